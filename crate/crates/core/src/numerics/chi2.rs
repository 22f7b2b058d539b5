//! Chi-square distribution through the regularized incomplete gamma function.

use crate::error::VarError;
use crate::Result;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 10_000;

/// `ln Γ(x)` for `x > 0` (Lanczos approximation, relative error ~1e-15).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x)` and its complement `Q(a, x)`.
fn incomplete_gamma(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Power series for P.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_TERMS {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * SERIES_EPS {
                break;
            }
        }
        let p = (sum.ln() + log_prefactor).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        // Continued fraction for Q, modified Lentz.
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_TERMS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < SERIES_EPS {
                break;
            }
        }
        let q = (h.ln() + log_prefactor).exp().min(1.0);
        (1.0 - q, q)
    }
}

fn check_df(df: usize) -> Result<f64> {
    if df == 0 {
        return Err(VarError::InvalidArgument(
            "chi-square degrees of freedom must be at least 1".into(),
        ));
    }
    Ok(df as f64)
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(VarError::InvalidArgument(format!(
            "chi-square argument {x} must be non-negative"
        )));
    }
    Ok(())
}

pub fn chi2_cdf(x: f64, df: usize) -> Result<f64> {
    let k = check_df(df)?;
    check_x(x)?;
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(incomplete_gamma(0.5 * k, 0.5 * x).0)
}

/// Upper tail `1 − F(x)`, evaluated without cancellation.
pub fn chi2_sf(x: f64, df: usize) -> Result<f64> {
    let k = check_df(df)?;
    check_x(x)?;
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(incomplete_gamma(0.5 * k, 0.5 * x).1)
}

fn chi2_ln_pdf(x: f64, k: f64) -> f64 {
    (0.5 * k - 1.0) * x.ln() - 0.5 * x - 0.5 * k * std::f64::consts::LN_2 - ln_gamma(0.5 * k)
}

/// Quantile of the chi-square distribution: Newton steps kept inside a
/// shrinking bracket, falling back to bisection whenever a step leaves it.
pub fn chi2_quantile(prob: f64, df: usize) -> Result<f64> {
    chi2_quantile_tol(prob, df, 1e-12)
}

pub fn chi2_quantile_tol(prob: f64, df: usize, abs_tol: f64) -> Result<f64> {
    let k = check_df(df)?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(VarError::InvalidArgument(format!(
            "probability {prob} must lie in (0, 1)"
        )));
    }
    let f = |x: f64| incomplete_gamma(0.5 * k, 0.5 * x).0 - prob;

    // Wilson–Hilferty starting point.
    let z = normal_quantile(prob);
    let h = 2.0 / (9.0 * k);
    let mut x = (k * (1.0 - h + z * h.sqrt()).powi(3)).max(1e-8);

    let mut lo = 0.0;
    let mut hi = x.max(1.0);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..500 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dens = chi2_ln_pdf(x, k).exp();
        let mut next = x - fx / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= abs_tol * x.max(1.0) || hi - lo <= abs_tol * x.max(1.0) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Standard normal quantile (Acklam's rational approximation, ~1e-9),
/// used only as a starting value.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
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
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}
