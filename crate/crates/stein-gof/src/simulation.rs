//! Deterministic Monte Carlo engine: alternative-distribution samplers and
//! rejection-rate estimation over the grids of the power study.
//!
//! Every replicate draws from its own counter-based ChaCha8 stream derived
//! from the master seed and the replicate index, so results are bit-identical
//! regardless of execution order or thread count. Tallies are integer counts
//! and reduce associatively.
//!
//! The tests are applied to the raw draws, without standardizing first.
//! Standardizing makes the departure statistic exactly affine invariant,
//! which collapses its sampling variance far below the asymptotic null
//! variance (the measured type-I error drops to zero) and makes power
//! independent of location and scale parameters. The reference power grids
//! this engine reproduces are only attainable on raw draws; the user-facing
//! [`crate::jel::jel_test`] on standardized data remains the right tool for
//! real observations.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{anderson_darling_values, jarque_bera_values};
use crate::error::{Error, Result};
use crate::jel::jel_test_values;
use crate::stein::asymptotic_test_values;

/// Identifier of the RNG and stream-splitting scheme, echoed in output
/// metadata.
pub const RNG_LABEL: &str = "chacha8[stream=attempt<<32|replicate]";

const MAX_REDRAWS: u64 = 1000;

/// An alternative (or the null) distribution to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    Gumbel { location: f64, scale: f64 },
    LogNormal { log_mean: f64, log_sd: f64 },
    StudentT { df: f64 },
    Gamma { shape: f64, scale: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistributionSpec::Normal { sd, .. } => sd > 0.0,
            DistributionSpec::Gumbel { scale, .. } => scale > 0.0,
            DistributionSpec::LogNormal { log_sd, .. } => log_sd > 0.0,
            DistributionSpec::StudentT { df } => df > 0.0,
            DistributionSpec::Gamma { shape, scale } => shape > 0.0 && scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "invalid distribution parameters: {self:?}"
            )))
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            DistributionSpec::Normal { .. } => "normal",
            DistributionSpec::Gumbel { .. } => "gumbel",
            DistributionSpec::LogNormal { .. } => "lognormal",
            DistributionSpec::StudentT { .. } => "t",
            DistributionSpec::Gamma { .. } => "gamma",
        }
    }

    /// Compact parameter label, safe inside a CSV field.
    pub fn param_label(&self) -> String {
        match *self {
            DistributionSpec::Normal { mean, sd } => format!("mu={mean};sd={sd}"),
            DistributionSpec::Gumbel { location, scale } => {
                format!("theta={location};scale={scale}")
            }
            DistributionSpec::LogNormal { log_mean, log_sd } => {
                format!("mu={log_mean};theta={log_sd}")
            }
            DistributionSpec::StudentT { df } => format!("df={df}"),
            DistributionSpec::Gamma { shape, scale } => format!("shape={shape};scale={scale}"),
        }
    }
}

/// The tests the engine can tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestId {
    Jel,
    Asymptotic,
    AndersonDarling,
    JarqueBera,
}

impl TestId {
    pub fn label(&self) -> &'static str {
        match self {
            TestId::Jel => "jel",
            TestId::Asymptotic => "asymptotic",
            TestId::AndersonDarling => "ad",
            TestId::JarqueBera => "jb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "jel" => Ok(TestId::Jel),
            "asymptotic" => Ok(TestId::Asymptotic),
            "ad" => Ok(TestId::AndersonDarling),
            "jb" => Ok(TestId::JarqueBera),
            other => Err(Error::Domain(format!("unknown test {other:?}"))),
        }
    }
}

/// One simulation cell: distribution, sample size, replicates, levels,
/// tests, master seed.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub dist: DistributionSpec,
    pub n: usize,
    pub reps: usize,
    pub alphas: Vec<f64>,
    pub tests: Vec<TestId>,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        if self.reps < 1 {
            return Err(Error::Domain("reps must be at least 1".into()));
        }
        if self.n < 5 {
            return Err(Error::Domain("sample size must be at least 5".into()));
        }
        if self.alphas.is_empty() || self.tests.is_empty() {
            return Err(Error::Domain("need at least one alpha and one test".into()));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Domain(format!("alpha must be in (0,1), got {a}")));
            }
            if self.tests.contains(&TestId::AndersonDarling) && a != 0.05 && a != 0.01 {
                return Err(Error::Domain(format!(
                    "anderson-darling supports alpha 0.05 or 0.01, got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// One estimated rejection rate.
#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    /// Paper-table number when produced by the table runner.
    pub table: Option<u8>,
    pub dist: String,
    pub param: String,
    pub n: usize,
    pub test: &'static str,
    pub alpha: f64,
    pub rate: f64,
    pub se: f64,
}

/// Grid of rejection rates with the metadata needed to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
    pub reps: usize,
    pub seed: u64,
    pub rng: &'static str,
    /// Replicates that had to be redrawn because of a degenerate sample.
    pub redraws: u64,
}

impl PowerTable {
    /// CSV rendering with the fixed header
    /// `table,dist,param,n,test,alpha,rate,se,reps,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,dist,param,n,test,alpha,rate,se,reps,seed\n");
        for r in &self.rows {
            let table = r.table.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{table},{},{},{},{},{},{},{},{},{}\n",
                r.dist, r.param, r.n, r.test, r.alpha, r.rate, r.se, self.reps, self.seed
            ));
        }
        out
    }

    /// Aligned human-readable rendering, four decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<6} {:<10} {:<22} {:>6} {:<11} {:>6} {:>8} {:>8}\n",
            "table", "dist", "param", "n", "test", "alpha", "rate", "se"
        ));
        for r in &self.rows {
            let table = r.table.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<6} {:<10} {:<22} {:>6} {:<11} {:>6.4} {:>8.4} {:>8.4}\n",
                table, r.dist, r.param, r.n, r.test, r.alpha, r.rate, r.se
            ));
        }
        out.push_str(&format!(
            "reps={} seed={} rng={} redraws={}\n",
            self.reps, self.seed, self.rng, self.redraws
        ));
        out
    }
}

fn replicate_rng(seed: u64, replicate: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((attempt << 32) | replicate);
    rng
}

/// Uniform draw in the open interval (0, 1).
fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn normal_draw(rng: &mut ChaCha8Rng) -> f64 {
    crate::special::std_normal_quantile(uniform_open(rng)).expect("p in (0,1)")
}

// Marsaglia-Tsang for shape >= 1, with the power boost for shape < 1.
fn gamma_draw(rng: &mut ChaCha8Rng, shape: f64, scale: f64) -> f64 {
    if shape < 1.0 {
        let u = uniform_open(rng);
        return gamma_draw(rng, shape + 1.0, scale) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = normal_draw(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = uniform_open(rng);
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d * v * scale;
        }
    }
}

/// Draws `n` independent observations from `spec`.
pub fn sample_distribution(
    spec: &DistributionSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = match *spec {
            DistributionSpec::Normal { mean, sd } => mean + sd * normal_draw(rng),
            DistributionSpec::Gumbel { location, scale } => {
                location - scale * (-uniform_open(rng).ln()).ln()
            }
            DistributionSpec::LogNormal { log_mean, log_sd } => {
                (log_mean + log_sd * normal_draw(rng)).exp()
            }
            DistributionSpec::StudentT { df } => {
                let z = normal_draw(rng);
                let v = gamma_draw(rng, 0.5 * df, 2.0);
                z / (v / df).sqrt()
            }
            DistributionSpec::Gamma { shape, scale } => gamma_draw(rng, shape, scale),
        };
        out.push(x);
    }
    Ok(out)
}

fn sample_is_degenerate(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

// Rejection indicators for one replicate, in (test-major, alpha-minor)
// order. Errors inside a test (other than configuration errors caught up
// front) are treated as bugs and propagated.
fn run_replicate(config: &SimulationConfig, replicate: u64) -> Result<(Vec<bool>, u64)> {
    let mut redraws = 0;
    let values = loop {
        let mut rng = replicate_rng(config.seed, replicate, redraws);
        let draw = sample_distribution(&config.dist, config.n, &mut rng)?;
        if !sample_is_degenerate(&draw) {
            break draw;
        }
        redraws += 1;
        if redraws > MAX_REDRAWS {
            return Err(Error::DegenerateSample);
        }
    };
    let mut rejects = Vec::with_capacity(config.tests.len() * config.alphas.len());
    for test in &config.tests {
        match test {
            TestId::Jel => {
                for &alpha in &config.alphas {
                    rejects.push(jel_test_values(&values, alpha)?.reject);
                }
            }
            TestId::Asymptotic => {
                for &alpha in &config.alphas {
                    rejects.push(asymptotic_test_values(&values, alpha)?.reject);
                }
            }
            TestId::AndersonDarling => {
                for &alpha in &config.alphas {
                    rejects.push(anderson_darling_values(&values, alpha)?.reject);
                }
            }
            TestId::JarqueBera => {
                for &alpha in &config.alphas {
                    rejects.push(jarque_bera_values(&values, alpha)?.reject);
                }
            }
        }
    }
    Ok((rejects, redraws))
}

/// Estimates rejection rates for one configuration. Replicates run in
/// parallel; the result is identical for any thread count.
pub fn estimate_rejection_rate(config: &SimulationConfig) -> Result<PowerTable> {
    config.validate()?;
    let cells = config.tests.len() * config.alphas.len();
    let (counts, redraws) = (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| run_replicate(config, rep))
        .try_fold(
            || (vec![0u64; cells], 0u64),
            |(mut counts, redraws), item: Result<(Vec<bool>, u64)>| {
                let (rejects, r) = item?;
                for (c, rej) in counts.iter_mut().zip(&rejects) {
                    *c += u64::from(*rej);
                }
                Ok::<_, Error>((counts, redraws + r))
            },
        )
        .try_reduce(
            || (vec![0u64; cells], 0u64),
            |(mut a, ra), (b, rb)| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                Ok((a, ra + rb))
            },
        )?;

    let reps = config.reps as f64;
    let mut rows = Vec::with_capacity(cells);
    let mut idx = 0;
    for test in &config.tests {
        for &alpha in &config.alphas {
            let rate = counts[idx] as f64 / reps;
            let se = (rate * (1.0 - rate) / reps).sqrt();
            rows.push(PowerRow {
                table: None,
                dist: config.dist.family().to_string(),
                param: config.dist.param_label(),
                n: config.n,
                test: test.label(),
                alpha,
                rate,
                se,
            });
            idx += 1;
        }
    }
    Ok(PowerTable {
        rows,
        reps: config.reps,
        seed: config.seed,
        rng: RNG_LABEL,
        redraws,
    })
}

/// Sample sizes of the type-I-error grid.
pub const TABLE1_SIZES: [usize; 6] = [25, 50, 75, 100, 150, 200];
/// Sample sizes of the power grids.
pub const POWER_SIZES: [usize; 5] = [25, 50, 75, 100, 200];
/// The two significance levels every grid reports.
pub const GRID_ALPHAS: [f64; 2] = [0.05, 0.01];

/// Runs the full grid of one of the seven study tables.
pub fn run_paper_tables(table_id: u8, reps: usize, seed: u64) -> Result<PowerTable> {
    let (dists, sizes, tests): (Vec<DistributionSpec>, &[usize], Vec<TestId>) = match table_id {
        1 => (
            vec![DistributionSpec::Normal { mean: 0.0, sd: 1.0 }],
            &TABLE1_SIZES,
            vec![TestId::Jel],
        ),
        2 => (
            [0.0, 0.5, 1.0, 2.0]
                .iter()
                .map(|&t| DistributionSpec::Gumbel {
                    location: t,
                    scale: 1.0,
                })
                .collect(),
            &POWER_SIZES,
            vec![TestId::Jel],
        ),
        3 => (
            [0.5, 1.0, 1.5, 2.0]
                .iter()
                .map(|&t| DistributionSpec::LogNormal {
                    log_mean: 0.0,
                    log_sd: t,
                })
                .collect(),
            &POWER_SIZES,
            vec![TestId::Jel],
        ),
        4 => (
            [1.0, 2.0, 3.0, 4.0]
                .iter()
                .map(|&df| DistributionSpec::StudentT { df })
                .collect(),
            &POWER_SIZES,
            vec![TestId::Jel],
        ),
        5 => (
            vec![DistributionSpec::Gumbel {
                location: 0.0,
                scale: 1.0,
            }],
            &POWER_SIZES,
            vec![TestId::Jel, TestId::AndersonDarling, TestId::JarqueBera],
        ),
        6 => (
            vec![DistributionSpec::LogNormal {
                log_mean: 0.0,
                log_sd: 1.0,
            }],
            &POWER_SIZES,
            vec![TestId::Jel, TestId::AndersonDarling, TestId::JarqueBera],
        ),
        7 => (
            vec![DistributionSpec::Gamma {
                shape: 1.0,
                scale: 2.0,
            }],
            &POWER_SIZES,
            vec![TestId::Jel, TestId::AndersonDarling, TestId::JarqueBera],
        ),
        other => {
            return Err(Error::Domain(format!(
                "table id must be 1..=7, got {other}"
            )))
        }
    };

    let mut rows = Vec::new();
    let mut redraws = 0;
    for dist in &dists {
        for &n in sizes {
            let config = SimulationConfig {
                dist: *dist,
                n,
                reps,
                alphas: GRID_ALPHAS.to_vec(),
                tests: tests.clone(),
                seed,
            };
            let table = estimate_rejection_rate(&config)?;
            redraws += table.redraws;
            rows.extend(table.rows.into_iter().map(|mut r| {
                r.table = Some(table_id);
                r
            }));
        }
    }
    Ok(PowerTable {
        rows,
        reps,
        seed,
        rng: RNG_LABEL,
        redraws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        replicate_rng(seed, 0, 0)
    }

    #[test]
    fn gumbel_mean_is_euler_mascheroni() {
        let mut r = rng(1);
        let spec = DistributionSpec::Gumbel {
            location: 0.0,
            scale: 1.0,
        };
        let draws = sample_distribution(&spec, 1_000_000, &mut r).unwrap();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        // Var = pi^2/6, so 3 SE ~ 0.0038
        assert!((mean - 0.5772156649).abs() < 0.004, "mean={mean}");
    }

    #[test]
    fn lognormal_median_is_one() {
        let mut r = rng(2);
        let spec = DistributionSpec::LogNormal {
            log_mean: 0.0,
            log_sd: 1.0,
        };
        let mut draws = sample_distribution(&spec, 1_000_000, &mut r).unwrap();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = draws[draws.len() / 2];
        assert!((median - 1.0).abs() < 0.01, "median={median}");
    }

    #[test]
    fn cauchy_draws_are_finite() {
        let mut r = rng(3);
        let spec = DistributionSpec::StudentT { df: 1.0 };
        let draws = sample_distribution(&spec, 100_000, &mut r).unwrap();
        assert!(draws.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn gamma_mean_matches_shape_scale() {
        let mut r = rng(4);
        let spec = DistributionSpec::Gamma {
            shape: 1.0,
            scale: 2.0,
        };
        let draws = sample_distribution(&spec, 500_000, &mut r).unwrap();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean={mean}");
        assert!(draws.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistributionSpec::Normal { mean: 0.0, sd: 0.0 }
            .validate()
            .is_err());
        assert!(DistributionSpec::StudentT { df: -1.0 }.validate().is_err());
        assert!(DistributionSpec::Gamma {
            shape: 0.0,
            scale: 1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn single_replicate_rate_is_binary() {
        let config = SimulationConfig {
            dist: DistributionSpec::Normal { mean: 0.0, sd: 1.0 },
            n: 25,
            reps: 1,
            alphas: vec![0.05],
            tests: vec![TestId::Jel],
            seed: 9,
        };
        let table = estimate_rejection_rate(&config).unwrap();
        let rate = table.rows[0].rate;
        assert!(rate == 0.0 || rate == 1.0);
    }

    #[test]
    fn determinism_across_thread_counts() {
        let config = SimulationConfig {
            dist: DistributionSpec::Gumbel {
                location: 0.0,
                scale: 1.0,
            },
            n: 30,
            reps: 200,
            alphas: vec![0.05, 0.01],
            tests: vec![TestId::Jel, TestId::JarqueBera],
            seed: 42,
        };
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let t1 = pool1.install(|| estimate_rejection_rate(&config)).unwrap();
        let t4 = pool4.install(|| estimate_rejection_rate(&config)).unwrap();
        assert_eq!(t1.to_csv(), t4.to_csv());
    }

    #[test]
    fn config_validation() {
        let mut config = SimulationConfig {
            dist: DistributionSpec::Normal { mean: 0.0, sd: 1.0 },
            n: 25,
            reps: 0,
            alphas: vec![0.05],
            tests: vec![TestId::Jel],
            seed: 0,
        };
        assert!(config.validate().is_err());
        config.reps = 10;
        config.alphas = vec![0.10];
        config.tests = vec![TestId::AndersonDarling];
        assert!(config.validate().is_err());
        config.alphas = vec![0.05];
        assert!(config.validate().is_ok());
    }

    #[test]
    fn table_runner_shapes() {
        let t1 = run_paper_tables(1, 10, 7).unwrap();
        assert_eq!(t1.rows.len(), 6 * 2);
        let t5 = run_paper_tables(5, 10, 7).unwrap();
        assert_eq!(t5.rows.len(), 5 * 3 * 2);
        assert!(run_paper_tables(8, 10, 7).is_err());
    }

    #[test]
    fn csv_schema_and_rate_bounds() {
        let table = run_paper_tables(1, 20, 3).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("table,dist,param,n,test,alpha,rate,se,reps,seed\n"));
        for row in &table.rows {
            assert!((0.0..=1.0).contains(&row.rate));
            let se = (row.rate * (1.0 - row.rate) / table.reps as f64).sqrt();
            assert_eq!(row.se, se);
        }
    }
}
