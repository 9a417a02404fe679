//! Reference tests for the power comparison: Anderson-Darling and
//! Jarque-Bera.

use crate::error::{Error, Result};
use crate::sample::{Sample, StandardizedSample, MIN_TEST_SAMPLE_SIZE};
use crate::special::{chi2_sf, std_normal_cdf};

/// Critical points for the Anderson-Darling statistic at the two supported
/// levels (Anderson and Darling, 1954).
pub const AD_CRITICAL_5PCT: f64 = 2.492;
pub const AD_CRITICAL_1PCT: f64 = 3.857;

// Guard for the logs: clamping only matters for |y| around 8 and beyond.
const AD_CLAMP: f64 = 1e-15;

/// Outcome of a reference test. Anderson-Darling decides by fixed critical
/// points and carries no p-value.
#[derive(Debug, Clone)]
pub struct ClassicalTestResult {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub reject: bool,
}

/// Anderson-Darling statistic
/// `-n - (1/n) sum (2i-1) [log(Z_i) + log(1 - Z_{n-i+1})]`
/// with `Z_i` the standard normal cdf of the i-th standardized order
/// statistic. Only the 5% and 1% levels are supported.
pub fn anderson_darling(sample: &StandardizedSample, alpha: f64) -> Result<ClassicalTestResult> {
    let critical = if alpha == 0.05 {
        AD_CRITICAL_5PCT
    } else if alpha == 0.01 {
        AD_CRITICAL_1PCT
    } else {
        return Err(Error::Domain(format!(
            "anderson-darling supports alpha 0.05 or 0.01, got {alpha}"
        )));
    };
    let n = sample.n();
    if n < MIN_TEST_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            required: MIN_TEST_SAMPLE_SIZE,
            actual: n,
        });
    }
    let statistic = anderson_darling_statistic(sample.sorted_y());
    Ok(ClassicalTestResult {
        name: "anderson-darling",
        statistic,
        p_value: None,
        alpha,
        reject: statistic > critical,
    })
}

/// Anderson-Darling against the fully specified standard normal null:
/// `Z_i = Phi(x_(i))` on the values as given, no standardization. This is
/// the form whose null distribution the 2.492 / 3.857 critical points
/// belong to, and the one the simulation engine tallies.
pub(crate) fn anderson_darling_values(values: &[f64], alpha: f64) -> Result<ClassicalTestResult> {
    let critical = if alpha == 0.05 {
        AD_CRITICAL_5PCT
    } else if alpha == 0.01 {
        AD_CRITICAL_1PCT
    } else {
        return Err(Error::Domain(format!(
            "anderson-darling supports alpha 0.05 or 0.01, got {alpha}"
        )));
    };
    if values.len() < MIN_TEST_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            required: MIN_TEST_SAMPLE_SIZE,
            actual: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let statistic = anderson_darling_statistic(&sorted);
    Ok(ClassicalTestResult {
        name: "anderson-darling",
        statistic,
        p_value: None,
        alpha,
        reject: statistic > critical,
    })
}

fn anderson_darling_statistic(sorted_y: &[f64]) -> f64 {
    let n = sorted_y.len();
    let z: Vec<f64> = sorted_y
        .iter()
        .map(|&y| std_normal_cdf(y).clamp(AD_CLAMP, 1.0 - AD_CLAMP))
        .collect();
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (2 * i - 1) as f64 * (z[i - 1].ln() + (1.0 - z[n - i]).ln());
    }
    -(n as f64) - acc / n as f64
}

/// Jarque-Bera statistic `(n/6)(S^2 + (K-3)^2/4)` with skewness and kurtosis
/// from n-denominator central moments, referred to chi-square with two
/// degrees of freedom.
pub fn jarque_bera(sample: &Sample, alpha: f64) -> Result<ClassicalTestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    jarque_bera_values(sample.values(), alpha)
}

pub(crate) fn jarque_bera_values(values: &[f64], alpha: f64) -> Result<ClassicalTestResult> {
    let n = values.len();
    if n < MIN_TEST_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            required: MIN_TEST_SAMPLE_SIZE,
            actual: n,
        });
    }
    let statistic = jb_statistic(values)?;
    let p_value = chi2_sf(statistic, 2)?;
    Ok(ClassicalTestResult {
        name: "jarque-bera",
        statistic,
        p_value: Some(p_value),
        alpha,
        reject: p_value < alpha,
    })
}

fn jb_statistic(values: &[f64]) -> Result<f64> {
    let nf = values.len() as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    Ok(nf / 6.0 * (skewness * skewness + 0.25 * (kurtosis - 3.0) * (kurtosis - 3.0)))
}
