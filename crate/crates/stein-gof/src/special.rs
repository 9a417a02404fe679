//! Standard normal pdf/cdf/quantile and the two chi-square tail probabilities
//! the tests need (1 and 2 degrees of freedom).
//!
//! The cdf is built on Cody's rational approximations to `erf`/`erfc`
//! (W. J. Cody, "Rational Chebyshev approximation for the error function",
//! Math. Comp. 23, 1969), which keep the absolute error of `std_normal_cdf`
//! well below 1e-14 on [-8, 8]. The quantile is a safeguarded Newton
//! iteration on the cdf started from Acklam's approximation.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Density of the standard normal distribution.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// P(Z <= x) for a standard normal Z.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

// Coefficients for erf(x), |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];

// Coefficients for erfc(x), 0.46875 <= x <= 4.
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];

// Coefficients for erfc(x), x > 4.
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

const SQRT_PI_INV: f64 = 5.641_895_835_477_562_87e-1;

fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let z = if y > 1e-300 { y * y } else { 0.0 };
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        x * (num + ERF_A[3]) / (den + ERF_B[3])
    } else if x < 0.0 {
        erfc(y) - 1.0
    } else {
        1.0 - erfc(y)
    }
}

fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf(x);
    }
    let result = if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        scaled_exp(y) * (num + ERFC_C[7]) / (den + ERFC_D[7])
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        scaled_exp(y) * (SQRT_PI_INV - r) / y
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

// exp(-y^2) evaluated as exp(-q^2) * exp(-(y-q)(y+q)) with q = y rounded to
// 1/16, which keeps the argument of the second exponential small and avoids
// cancellation in y*y for large y.
fn scaled_exp(y: f64) -> f64 {
    let q = (y * 16.0).trunc() / 16.0;
    let del = (y - q) * (y + q);
    (-q * q).exp() * (-del).exp()
}

// Acklam's rational approximation to the inverse normal cdf; relative error
// below 1.15e-9, used only as the Newton starting point.
fn quantile_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -quantile_guess(1.0 - p)
    }
}

/// Inverse of [`std_normal_cdf`]: the x with P(Z <= x) = p.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "quantile probability must be in (0,1), got {p}"
        )));
    }
    let mut x = quantile_guess(p);
    // Newton on the cdf, with a bisection bracket as the safeguard.
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..60 {
        let f = std_normal_cdf(x) - p;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / std_normal_pdf(x);
        let mut next = x - step;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() < 1e-15 * (1.0 + x.abs());
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Upper-tail probability of the chi-square distribution; only the two
/// degrees of freedom the tests use are supported.
pub fn chi2_sf(x: f64, df: u32) -> Result<f64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "chi-square statistic must be >= 0, got {x}"
        )));
    }
    match df {
        1 => Ok(2.0 * (1.0 - std_normal_cdf(x.sqrt()))),
        2 => Ok((-0.5 * x).exp()),
        other => Err(Error::Domain(format!(
            "unsupported degrees of freedom {other}"
        ))),
    }
}

/// Upper alpha-point of the chi-square distribution with one degree of
/// freedom, i.e. the square of the two-sided normal critical value.
pub fn chi2_critical_df1(alpha: f64) -> Result<f64> {
    let z = std_normal_quantile(1.0 - alpha / 2.0)?;
    Ok(z * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_at_zero_is_closed_form() {
        assert_eq!(std_normal_pdf(0.0), 0.3989422804014327);
    }

    #[test]
    fn pdf_symmetry_and_tail() {
        for x in [0.3, 1.7, 4.4] {
            assert_eq!(std_normal_pdf(x), std_normal_pdf(-x));
        }
        assert!(std_normal_pdf(10.0) < 1e-21);
    }

    #[test]
    fn cdf_basic_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        // complement identity over a grid
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-12);
            x += 0.37;
        }
    }

    #[test]
    fn cdf_monotone() {
        let mut prev = std_normal_cdf(-8.0);
        let mut x = -7.9;
        while x <= 8.0 {
            let c = std_normal_cdf(x);
            assert!(c > prev);
            prev = c;
            x += 0.1;
        }
    }

    #[test]
    fn quantile_basic_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn quantile_round_trip() {
        let mut x = -6.0;
        while x <= 6.0 {
            let back = std_normal_quantile(std_normal_cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-8, "x={x} back={back}");
            x += 0.25;
        }
    }

    #[test]
    fn quantile_rejects_bad_probability() {
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(-0.1).is_err());
    }

    #[test]
    fn chi2_sf_values() {
        assert_eq!(chi2_sf(0.0, 1).unwrap(), 1.0);
        assert!((chi2_sf(3.841459, 1).unwrap() - 0.05).abs() < 1e-5);
        assert!((chi2_sf(5.991465, 2).unwrap() - 0.05).abs() < 1e-6);
        assert!(chi2_sf(-1.0, 1).is_err());
        assert!(chi2_sf(1.0, 3).is_err());
    }

    #[test]
    fn chi2_sf_df1_matches_normal_identity() {
        let mut x = 0.01;
        while x < 30.0 {
            let direct = chi2_sf(x, 1).unwrap();
            let via_phi = 2.0 * (1.0 - std_normal_cdf(x.sqrt()));
            assert!((direct - via_phi).abs() < 1e-15);
            x *= 1.4;
        }
    }

    #[test]
    fn chi2_sf_strictly_decreasing() {
        for df in [1, 2] {
            let mut prev = chi2_sf(0.0, df).unwrap();
            let mut x = 0.05;
            while x < 20.0 {
                let s = chi2_sf(x, df).unwrap();
                assert!(s < prev);
                prev = s;
                x += 0.2;
            }
        }
    }

    // Quadrature cross-check of the df=1 tail against the chi-square density
    // integrated directly.
    #[test]
    fn chi2_df1_tail_matches_density_quadrature() {
        let density = |t: f64| (-0.5 * t).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
        for x in [0.5, 1.0, 3.841459, 6.0] {
            // trapezoid on [x, 60] with a million points
            let hi = 60.0;
            let steps = 1_000_000usize;
            let h = (hi - x) / steps as f64;
            let mut acc = 0.5 * (density(x) + density(hi));
            for k in 1..steps {
                acc += density(x + k as f64 * h);
            }
            let integral = acc * h;
            assert!((integral - chi2_sf(x, 1).unwrap()).abs() < 1e-6);
        }
    }
}
