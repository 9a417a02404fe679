//! Observation vectors and the standardizing transformation every test
//! consumes.

use crate::error::{Error, Result};

/// Smallest sample size the downstream tests accept. Standardization itself
/// only needs two points, but jackknife pseudo-values and the Lagrange
/// solver are meaningless below this.
pub const MIN_TEST_SAMPLE_SIZE: usize = 5;

/// A vector of raw, finite observations in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                position: pos + 1,
                token: values[pos].to_string(),
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample variance with the n-1 denominator.
    pub fn variance_unbiased(&self) -> Result<f64> {
        if self.n() < 2 {
            return Err(Error::SampleTooSmall {
                required: 2,
                actual: self.n(),
            });
        }
        Ok(variance_unbiased(&self.values))
    }

    /// Applies y_i = (x_i - mean) / sd and caches the sort order.
    pub fn standardize(&self) -> Result<StandardizedSample> {
        let n = self.n();
        if n < 2 {
            return Err(Error::SampleTooSmall {
                required: 2,
                actual: n,
            });
        }
        let mean_raw = self.mean();
        let var = variance_unbiased(&self.values);
        if var <= 0.0 {
            return Err(Error::DegenerateSample);
        }
        let sd_raw = var.sqrt();
        let y: Vec<f64> = self
            .values
            .iter()
            .map(|x| (x - mean_raw) / sd_raw)
            .collect();
        let mut sorted_y = y.clone();
        sorted_y.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(StandardizedSample {
            y,
            sorted_y,
            mean_raw,
            sd_raw,
        })
    }
}

/// A sample after the standardizing transformation, with the ascending
/// permutation cached for the order-statistic formulas.
#[derive(Debug, Clone)]
pub struct StandardizedSample {
    y: Vec<f64>,
    sorted_y: Vec<f64>,
    mean_raw: f64,
    sd_raw: f64,
}

impl StandardizedSample {
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sorted_y(&self) -> &[f64] {
        &self.sorted_y
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn mean_raw(&self) -> f64 {
        self.mean_raw
    }

    pub fn sd_raw(&self) -> f64 {
        self.sd_raw
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn variance_unbiased(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Parses whitespace- or comma-separated decimal literals.
pub fn load_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    let mut position = 0usize;
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        position += 1;
        let v: f64 = token.parse().map_err(|_| Error::Parse {
            position,
            token: token.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                position,
                token: token.to_string(),
            });
        }
        values.push(v);
    }
    Sample::new(values)
}
