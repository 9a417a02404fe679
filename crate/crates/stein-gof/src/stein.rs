//! The departure statistic: pairwise kernel, U-statistic estimator in naive
//! and order-statistic forms, leave-one-out replicates, the null variance
//! constant, and the asymptotic normal test.
//!
//! For values y_1..y_n the estimator is
//!
//! ```text
//! delta_hat = [ sum_i (n-i) y_(i)^2 - sum_{i<j} y_i y_j ] / (n(n-1)) - 1/2
//! ```
//!
//! with y_(i) the i-th smallest value. The pair sum collapses to
//! ((sum y)^2 - sum y^2) / 2, so the whole statistic costs one sort.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sample::StandardizedSample;
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// The departure estimator together with its uncentered form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaHat {
    /// The centered statistic; zero in expectation under normality.
    pub value: f64,
    /// The raw U-statistic, `value + 1/2`.
    pub delta1: f64,
    /// Size of the sample the statistic was computed from.
    pub n: usize,
}

/// Symmetric pair kernel `(min(x,y)^2 - x*y) / 2`.
pub fn kernel_h(x: f64, y: f64) -> f64 {
    let m = x.min(y);
    0.5 * (m * m - x * y)
}

/// O(n^2) double-sum evaluation of the U-statistic. Serves as the
/// independent oracle for [`delta_hat_values`].
pub fn delta_hat_naive_values(values: &[f64]) -> Result<DeltaHat> {
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall {
            required: 2,
            actual: n,
        });
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..i {
            acc += kernel_h(values[i], values[j]);
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let delta1 = acc / pairs;
    Ok(DeltaHat {
        value: delta1 - 0.5,
        delta1,
        n,
    })
}

/// O(n log n) evaluation through the order-statistic form.
pub fn delta_hat_values(values: &[f64]) -> Result<DeltaHat> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    delta_hat_presorted(values, &sorted)
}

fn delta_hat_presorted(values: &[f64], sorted: &[f64]) -> Result<DeltaHat> {
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall {
            required: 2,
            actual: n,
        });
    }
    let t: f64 = sorted
        .iter()
        .enumerate()
        .map(|(idx, y)| (n - (idx + 1)) as f64 * y * y)
        .sum();
    let s1: f64 = values.iter().sum();
    let s2: f64 = values.iter().map(|y| y * y).sum();
    let p = 0.5 * (s1 * s1 - s2);
    let delta1 = (t - p) / (n * (n - 1)) as f64;
    Ok(DeltaHat {
        value: delta1 - 0.5,
        delta1,
        n,
    })
}

/// [`delta_hat_values`] on the cached sort order of a standardized sample.
pub fn delta_hat(sample: &StandardizedSample) -> Result<DeltaHat> {
    delta_hat_presorted(sample.y(), sample.sorted_y())
}

/// [`delta_hat_naive_values`] on a standardized sample.
pub fn delta_hat_naive(sample: &StandardizedSample) -> Result<DeltaHat> {
    delta_hat_naive_values(sample.y())
}

/// Leave-one-out replicates of the statistic, in original observation order.
///
/// Deleting the observation of rank r shifts the (n-i) weights of all lower
/// ranks down by one, so with one sort and a prefix sum over squared order
/// statistics each replicate costs O(1).
pub fn leave_one_out_values(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::SampleTooSmall {
            required: 3,
            actual: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

    let t: f64 = order
        .iter()
        .enumerate()
        .map(|(idx, &orig)| (n - (idx + 1)) as f64 * values[orig] * values[orig])
        .sum();
    let s1: f64 = values.iter().sum();
    let s2: f64 = values.iter().map(|y| y * y).sum();
    let denom = ((n - 1) * (n - 2)) as f64;

    let mut out = vec![0.0; n];
    let mut prefix_sq = 0.0; // sum of squared order statistics below rank r
    for (idx, &orig) in order.iter().enumerate() {
        let y = values[orig];
        let t_del = t - (n - (idx + 1)) as f64 * y * y - prefix_sq;
        let s1_del = s1 - y;
        let s2_del = s2 - y * y;
        let p_del = 0.5 * (s1_del * s1_del - s2_del);
        out[orig] = (t_del - p_del) / denom - 0.5;
        prefix_sq += y * y;
    }
    Ok(out)
}

/// [`leave_one_out_values`] on a standardized sample. The replicates are
/// computed on the once-standardized values; the sample is not
/// re-standardized per deletion.
pub fn leave_one_out_deltas(sample: &StandardizedSample) -> Result<Vec<f64>> {
    leave_one_out_values(sample.y())
}

/// Variance of `g(Z) = Z^2 (1 - Phi(Z)) + Phi(Z) - Z phi(Z)` for standard
/// normal Z: the null variance of the centered statistic, scaled by sqrt(n).
///
/// The inner integral of the defining expression has the closed form
/// `Phi(x) - x phi(x)`, which reduces the constant to one-dimensional
/// quadrature. Computed once by adaptive Simpson on [-10, 10].
pub fn null_sigma0_squared() -> f64 {
    static SIGMA0_SQ: OnceLock<f64> = OnceLock::new();
    *SIGMA0_SQ.get_or_init(|| {
        let g =
            |x: f64| x * x * (1.0 - std_normal_cdf(x)) + std_normal_cdf(x) - x * std_normal_pdf(x);
        let first = adaptive_simpson(&|x| g(x) * std_normal_pdf(x), -10.0, 10.0, 1e-12);
        let second = adaptive_simpson(&|x| g(x) * g(x) * std_normal_pdf(x), -10.0, 10.0, 1e-12);
        second - first * first
    })
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 40)
}

/// Outcome of the asymptotic normal test.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticTestResult {
    /// `sqrt(n) * delta_hat / sigma0`.
    pub statistic_z: f64,
    /// The null standard deviation used.
    pub sigma0: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

/// Two-sided test of normality from the asymptotic distribution of the
/// statistic, applied to arbitrary values.
pub fn asymptotic_test_values(values: &[f64], alpha: f64) -> Result<AsymptoticTestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    let n = values.len();
    if n < crate::sample::MIN_TEST_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            required: crate::sample::MIN_TEST_SAMPLE_SIZE,
            actual: n,
        });
    }
    let delta = delta_hat_values(values)?;
    let sigma0 = null_sigma0_squared().sqrt();
    let z = (n as f64).sqrt() * delta.value / sigma0;
    let p_value = 2.0 * (1.0 - std_normal_cdf(z.abs()));
    let critical = std_normal_quantile(1.0 - alpha / 2.0)?;
    Ok(AsymptoticTestResult {
        statistic_z: z,
        sigma0,
        p_value,
        alpha,
        reject: z.abs() > critical,
    })
}

/// [`asymptotic_test_values`] on a standardized sample.
pub fn asymptotic_test(sample: &StandardizedSample, alpha: f64) -> Result<AsymptoticTestResult> {
    asymptotic_test_values(sample.y(), alpha)
}

/// Frozen reference for the null variance constant, used by tests and
/// reported in diagnostics. The quadrature value is checked against this and
/// against a large Monte Carlo run in the acceptance suite.
pub const SIGMA0_SQUARED_REFERENCE: f64 = 0.9423311143775628;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sample;

    #[test]
    fn kernel_hand_values() {
        for x in [-3.0, 0.0, 1.5, 7.0] {
            assert_eq!(kernel_h(x, x), 0.0);
        }
        assert_eq!(kernel_h(1.0, 2.0), -0.5);
        assert_eq!(kernel_h(-1.0, 1.0), 1.0);
        assert_eq!(kernel_h(2.0, 1.0), kernel_h(1.0, 2.0));
    }

    #[test]
    fn delta_hat_naive_hand_enumerations() {
        let d = delta_hat_naive_values(&[-1.0, 1.0]).unwrap();
        assert!((d.delta1 - 1.0).abs() < 1e-15);
        assert!((d.value - 0.5).abs() < 1e-15);

        // pairs (-1,0), (-1,1), (0,1): h = 0.5, 1, 0
        let d = delta_hat_naive_values(&[-1.0, 0.0, 1.0]).unwrap();
        assert!((d.delta1 - 0.5).abs() < 1e-15);
        assert!(d.value.abs() < 1e-15);
    }

    #[test]
    fn delta_hat_fast_hand_computation() {
        // T = 2*1 + 1*0 + 0*1 = 2, P = (0 - 2)/2 = -1, delta1 = 3/6 = 0.5
        let d = delta_hat_values(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(d.value.abs() < 1e-15);
        let d = delta_hat_values(&[1.0, -1.0]).unwrap();
        assert!((d.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_hat_too_small() {
        assert!(delta_hat_values(&[1.0]).is_err());
        assert!(delta_hat_naive_values(&[]).is_err());
    }

    #[test]
    fn delta_identity_between_forms() {
        let d = delta_hat_values(&[0.3, -1.2, 2.0, 0.1, -0.4]).unwrap();
        assert_eq!(d.value, d.delta1 - 0.5);
    }

    #[test]
    fn leave_one_out_matches_direct_recomputation() {
        let values = [0.7, -0.3, 1.9, -2.2, 0.4, 0.1, -1.0];
        let loo = leave_one_out_values(&values).unwrap();
        for i in 0..values.len() {
            let mut rest: Vec<f64> = values.to_vec();
            rest.remove(i);
            let direct = delta_hat_naive_values(&rest).unwrap().value;
            assert!((loo[i] - direct).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn leave_one_out_middle_of_three() {
        let loo = leave_one_out_values(&[-1.0, 0.0, 1.0]).unwrap();
        assert!((loo[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn leave_one_out_is_exchangeable() {
        let values = [0.7, -0.3, 1.9, -2.2, 0.4];
        let loo = leave_one_out_values(&values).unwrap();
        let permuted = [1.9, 0.7, 0.4, -0.3, -2.2];
        let loo_p = leave_one_out_values(&permuted).unwrap();
        assert!((loo[2] - loo_p[0]).abs() < 1e-15);
        assert!((loo[0] - loo_p[1]).abs() < 1e-15);
        assert!((loo[4] - loo_p[2]).abs() < 1e-15);
    }

    #[test]
    fn jackknife_identity() {
        let values = [0.7, -0.3, 1.9, -2.2, 0.4, 0.1, -1.0, 0.9];
        let n = values.len() as f64;
        let d = delta_hat_values(&values).unwrap().value;
        let loo = leave_one_out_values(&values).unwrap();
        let loo_mean = loo.iter().sum::<f64>() / n;
        let pseudo_mean = values
            .iter()
            .enumerate()
            .map(|(i, _)| n * d - (n - 1.0) * loo[i])
            .sum::<f64>()
            / n;
        assert!((n * d - (n - 1.0) * loo_mean - pseudo_mean).abs() < 1e-10);
    }

    #[test]
    fn sigma0_squared_matches_frozen_quadrature() {
        let v = null_sigma0_squared();
        assert!(v > 0.0);
        assert!((v - SIGMA0_SQUARED_REFERENCE).abs() < 1e-8);
    }

    #[test]
    fn sigma0_mean_term_self_consistency() {
        // E[g(Z)] equals 2 * E[h-conditional mean] + centering and comes out
        // to exactly 1 under the null; check the quadrature reproduces it.
        let g =
            |x: f64| x * x * (1.0 - std_normal_cdf(x)) + std_normal_cdf(x) - x * std_normal_pdf(x);
        let mean = adaptive_simpson(&|x| g(x) * std_normal_pdf(x), -10.0, 10.0, 1e-12);
        assert!((mean - 1.0).abs() < 1e-8);
    }

    #[test]
    fn asymptotic_test_zero_statistic() {
        // delta1 scales quadratically, so rescale a symmetric sample to put
        // delta1 exactly at 1/2 and the centered statistic at 0
        let base = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let d1 = delta_hat_values(&base).unwrap().delta1;
        let c = (0.5 / d1).sqrt();
        let values: Vec<f64> = base.iter().map(|x| c * x).collect();
        let d = delta_hat_values(&values).unwrap();
        let r = asymptotic_test_values(&values, 0.05).unwrap();
        assert!(d.value.abs() < 1e-12);
        assert!(r.statistic_z.abs() < 1e-10);
        assert!((r.p_value - 1.0).abs() < 1e-9);
        assert!(!r.reject);
    }

    #[test]
    fn asymptotic_test_validates_alpha() {
        let values = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert!(asymptotic_test_values(&values, 0.0).is_err());
        assert!(asymptotic_test_values(&values, 1.0).is_err());
    }

    #[test]
    fn asymptotic_test_decision_consistency() {
        let s = Sample::new(vec![0.1, 2.3, -0.5, 0.9, 4.2, -3.0, 0.2, 1.1])
            .unwrap()
            .standardize()
            .unwrap();
        let r = asymptotic_test(&s, 0.05).unwrap();
        assert_eq!(r.reject, r.p_value < r.alpha);
    }
}
