//! Jackknife empirical likelihood: pseudo-values, the Lagrange multiplier
//! equation, the log-likelihood-ratio statistic and the chi-square
//! calibrated test.

use crate::error::{Error, Result};
use crate::sample::{StandardizedSample, MIN_TEST_SAMPLE_SIZE};
use crate::special::{chi2_critical_df1, chi2_sf};
use crate::stein::{delta_hat_values, leave_one_out_values, DeltaHat};

const LAMBDA_TOL: f64 = 1e-10;
const LAMBDA_MAX_ITER: usize = 200;

/// Internals of one likelihood-ratio evaluation.
#[derive(Debug, Clone)]
pub struct JelDiagnostics {
    /// Jackknife pseudo-values, in original observation order.
    pub pseudo_values: Vec<f64>,
    /// Solved Lagrange multiplier; zero when the pseudo-value mean is zero.
    pub lambda: f64,
    /// `-2 log R`; infinite when the constraint is infeasible.
    pub minus2_log_r: f64,
    /// Whether zero lies strictly inside the range of the pseudo-values.
    pub feasible: bool,
    /// Iterations the multiplier solver used.
    pub iterations: usize,
}

/// Outcome of the chi-square calibrated likelihood-ratio test.
#[derive(Debug, Clone)]
pub struct JelTestResult {
    /// `-2 log R`.
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub diagnostics: JelDiagnostics,
}

/// `nu_i = n * delta_hat - (n-1) * delta_hat_{-i}`.
pub fn pseudo_values(delta: &DeltaHat, loo: &[f64]) -> Result<Vec<f64>> {
    if loo.len() != delta.n {
        return Err(Error::Shape {
            expected: delta.n,
            actual: loo.len(),
        });
    }
    let n = delta.n as f64;
    Ok(loo
        .iter()
        .map(|d| n * delta.value - (n - 1.0) * d)
        .collect())
}

/// Solves `(1/n) sum nu_i / (1 + lambda nu_i) = 0` for lambda.
///
/// The objective is strictly decreasing on `(-1/max(nu), -1/min(nu))`, so a
/// Newton iteration safeguarded by bisection inside that bracket converges
/// to the unique root.
pub fn solve_lambda(nu: &[f64]) -> Result<(f64, usize)> {
    if nu.len() < 3 {
        return Err(Error::SampleTooSmall {
            required: 3,
            actual: nu.len(),
        });
    }
    let min = nu.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = nu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(min < 0.0 && max > 0.0) {
        return Err(Error::InfeasibleConstraint);
    }
    let n = nu.len() as f64;
    let f = |lambda: f64| nu.iter().map(|v| v / (1.0 + lambda * v)).sum::<f64>() / n;
    let fprime = |lambda: f64| {
        -nu.iter()
            .map(|v| {
                let d = 1.0 + lambda * v;
                v * v / (d * d)
            })
            .sum::<f64>()
            / n
    };

    let mut lo = -1.0 / max;
    let mut hi = -1.0 / min;
    lo += 1e-12 * lo.abs().max(1.0);
    hi -= 1e-12 * hi.abs().max(1.0);

    let mut lambda = 0.0_f64.clamp(lo, hi);
    let mut residual = f(lambda);
    for iter in 0..LAMBDA_MAX_ITER {
        if residual.abs() <= LAMBDA_TOL {
            return Ok((lambda, iter));
        }
        // f is decreasing: positive residual means the root is to the right
        if residual > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let step = residual / fprime(lambda);
        let next = lambda + step;
        lambda = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        residual = f(lambda);
    }
    if residual.abs() <= LAMBDA_TOL {
        Ok((lambda, LAMBDA_MAX_ITER))
    } else {
        Err(Error::ConvergenceFailure { residual })
    }
}

/// Computes `-2 log R` from pseudo-values. Infeasible constraints are
/// reported through the diagnostics rather than as an error: the constrained
/// likelihood is zero there, so the statistic is infinite.
pub fn jel_statistic(nu: &[f64]) -> Result<JelDiagnostics> {
    if nu.len() < 3 {
        return Err(Error::SampleTooSmall {
            required: 3,
            actual: nu.len(),
        });
    }
    match solve_lambda(nu) {
        Ok((lambda, iterations)) => {
            let minus2_log_r = 2.0 * nu.iter().map(|v| (1.0 + lambda * v).ln()).sum::<f64>();
            Ok(JelDiagnostics {
                pseudo_values: nu.to_vec(),
                lambda,
                minus2_log_r,
                feasible: true,
                iterations,
            })
        }
        Err(Error::InfeasibleConstraint) => Ok(JelDiagnostics {
            pseudo_values: nu.to_vec(),
            lambda: f64::NAN,
            minus2_log_r: f64::INFINITY,
            feasible: false,
            iterations: 0,
        }),
        Err(e) => Err(e),
    }
}

/// Full likelihood-ratio test on arbitrary values: statistic, leave-one-out
/// replicates, pseudo-values, multiplier, `-2 log R`, chi-square p-value.
///
/// An infeasible constraint is treated as maximal evidence against the null
/// and rejects at any level; the condition is flagged in the diagnostics.
pub fn jel_test_values(values: &[f64], alpha: f64) -> Result<JelTestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    if values.len() < MIN_TEST_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            required: MIN_TEST_SAMPLE_SIZE,
            actual: values.len(),
        });
    }
    let delta = delta_hat_values(values)?;
    let loo = leave_one_out_values(values)?;
    let nu = pseudo_values(&delta, &loo)?;
    let diagnostics = jel_statistic(&nu)?;
    let statistic = diagnostics.minus2_log_r;
    let (p_value, reject) = if diagnostics.feasible {
        let p = chi2_sf(statistic, 1)?;
        (p, statistic > chi2_critical_df1(alpha)?)
    } else {
        (0.0, true)
    };
    Ok(JelTestResult {
        statistic,
        p_value,
        alpha,
        reject,
        diagnostics,
    })
}

/// [`jel_test_values`] on a standardized sample: the user-facing test.
pub fn jel_test(sample: &StandardizedSample, alpha: f64) -> Result<JelTestResult> {
    jel_test_values(sample.y(), alpha)
}
