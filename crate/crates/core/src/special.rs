//! Small special-function helpers shared by the mode and sampling code.

/// Natural log of n! — exact summation for small n, Stirling series above.
///
/// The summation path is exact to f64 rounding for every n that the mode
/// normalizations use (|l| <= ~170); the Stirling branch only serves the
/// Poisson sampler at large means.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        stirling_ln_gamma(n as f64 + 1.0)
    }
}

/// Stirling series for ln Γ(x), accurate to ~1e-12 for x >= 10.
fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Associated Laguerre polynomial L_p^a(x) by the three-term recurrence.
pub fn laguerre(p: u32, a: u32, x: f64) -> f64 {
    let a = a as f64;
    match p {
        0 => 1.0,
        _ => {
            let mut lm1 = 1.0;
            let mut l = 1.0 + a - x;
            for k in 1..p {
                let k = k as f64;
                let next = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
                lm1 = l;
                l = next;
            }
            l
        }
    }
}
