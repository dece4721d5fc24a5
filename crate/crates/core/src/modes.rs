//! Laguerre-Gaussian transverse modes.
//!
//! A normalized LG mode with radial index p and topological charge l,
//! evaluated at waist, is
//!
//! ```text
//! u(r, φ) = sqrt(2 p! / (π (p+|l|)!)) (1/w) (√2 r / w)^|l|
//!           exp(-r²/w²) L_p^|l|(2r²/w²) exp(i l φ)
//! ```
//!
//! so that ∫|u|² r dr dφ = 1. The normalization is computed through
//! log-factorials, which keeps it finite and accurate up to |l| ~ 100.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::{laguerre, ln_factorial};

/// A Laguerre-Gaussian mode LG_p^l with a given beam waist.
///
/// The radial index defaults to 0 (single-ring "donut" modes); higher p is
/// accepted as an extension but none of the shipped presets use it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgMode {
    pub charge: i32,
    pub radial: u32,
    pub waist: f64,
}

impl LgMode {
    /// p = 0 mode with the given charge and waist.
    pub fn new(charge: i32, waist: f64) -> Result<Self> {
        Self::with_radial(charge, 0, waist)
    }

    pub fn with_radial(charge: i32, radial: u32, waist: f64) -> Result<Self> {
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::domain(format!(
                "beam waist must be finite and positive, got {waist}"
            )));
        }
        Ok(LgMode { charge, radial, waist })
    }

    /// log of the radial normalization prefactor sqrt(2 p!/(π (p+|l|)!))/w.
    fn ln_norm(&self) -> f64 {
        let l = self.charge.unsigned_abs() as u64;
        let p = self.radial as u64;
        0.5 * ((2.0 / std::f64::consts::PI).ln() + ln_factorial(p) - ln_factorial(p + l))
            - self.waist.ln()
    }

    /// Real radial amplitude at radius r (the field without the e^{ilφ} factor).
    ///
    /// Evaluated in log space so high-charge modes neither overflow nor lose
    /// the ring structure to premature underflow.
    pub fn radial_amplitude(&self, r: f64) -> f64 {
        let l = self.charge.unsigned_abs();
        let x = 2.0 * r * r / (self.waist * self.waist);
        let envelope = if r == 0.0 {
            if l == 0 {
                self.ln_norm().exp()
            } else {
                0.0
            }
        } else {
            let ln_mag = self.ln_norm()
                + l as f64 * (std::f64::consts::SQRT_2 * r / self.waist).ln()
                - r * r / (self.waist * self.waist);
            ln_mag.exp()
        };
        if self.radial == 0 {
            envelope
        } else {
            envelope * laguerre(self.radial, l, x)
        }
    }

    /// Complex field amplitude at (r, φ).
    pub fn evaluate(&self, r: f64, phi: f64) -> Result<Complex64> {
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::domain(format!(
                "mode evaluation needs finite coordinates, got r={r}, phi={phi}"
            )));
        }
        if r < 0.0 {
            return Err(Error::domain(format!("radial coordinate must be >= 0, got {r}")));
        }
        let mag = self.radial_amplitude(r);
        Ok(Complex64::from_polar(mag, self.charge as f64 * phi))
    }

    /// Radius of peak intensity, w·sqrt(|l|/2) for p = 0.
    pub fn peak_radius(&self) -> f64 {
        self.waist * (self.charge.unsigned_abs() as f64 / 2.0).sqrt()
    }
}

/// Two LG modes stitched at a split radius: the field is `inner` for
/// r < split_radius and `outer` for r >= split_radius.
///
/// Models ring-multiplexed pump beams carrying different charges in the
/// inner and outer rings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularComposite {
    pub inner: LgMode,
    pub outer: LgMode,
    pub split_radius: f64,
}

impl AnnularComposite {
    pub fn new(inner: LgMode, outer: LgMode, split_radius: f64) -> Result<Self> {
        if !(split_radius.is_finite() && split_radius > 0.0) {
            return Err(Error::domain(format!(
                "split radius must be finite and positive, got {split_radius}"
            )));
        }
        Ok(AnnularComposite { inner, outer, split_radius })
    }

    /// The mode governing radius r.
    pub fn mode_at(&self, r: f64) -> &LgMode {
        if r < self.split_radius {
            &self.inner
        } else {
            &self.outer
        }
    }

    /// Local topological charge at radius r.
    pub fn charge_at(&self, r: f64) -> i32 {
        self.mode_at(r).charge
    }

    pub fn evaluate(&self, r: f64, phi: f64) -> Result<Complex64> {
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::domain(format!(
                "mode evaluation needs finite coordinates, got r={r}, phi={phi}"
            )));
        }
        if r < 0.0 {
            return Err(Error::domain(format!("radial coordinate must be >= 0, got {r}")));
        }
        self.mode_at(r).evaluate(r, phi)
    }

    /// Composite with the ring charges exchanged, geometry unchanged.
    pub fn with_swapped_charges(&self) -> Self {
        AnnularComposite {
            inner: LgMode { charge: self.outer.charge, ..self.inner },
            outer: LgMode { charge: self.inner.charge, ..self.outer },
            split_radius: self.split_radius,
        }
    }
}

/// Result of a numerical norm integral, with a truncation estimate for the
/// mass beyond the radial cutoff.
#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    pub value: f64,
    /// Estimated |u|² mass beyond r_max.
    pub truncated_mass: f64,
    /// Set when the truncated mass estimate exceeds 1e-6.
    pub truncated: bool,
}

/// Recommended radial cutoff for a set of charges: 6·w·sqrt(max(|l|, 1)).
pub fn radial_cutoff(max_waist: f64, max_abs_charge: i32) -> f64 {
    6.0 * max_waist * (max_abs_charge.unsigned_abs().max(1) as f64).sqrt()
}

/// ∫₀^{2π}∫₀^{r_max} |u|² r dr dφ by Gauss-Legendre quadrature.
///
/// Equals 1 within quadrature tolerance when r_max follows the
/// [`radial_cutoff`] rule and quad_order >= 96 for |l| <= 32.
pub fn mode_norm(mode: &LgMode, r_max: f64, quad_order: usize) -> Result<NormEstimate> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::domain(format!("r_max must be finite and positive, got {r_max}")));
    }
    if quad_order < 32 {
        return Err(Error::domain(format!("quad_order must be >= 32, got {quad_order}")));
    }
    let rule = GaussLegendre::cached(quad_order);
    let radial = rule.integrate(0.0, r_max, |r| {
        let a = mode.radial_amplitude(r);
        a * a * r
    });
    let value = 2.0 * std::f64::consts::PI * radial;
    // Tail estimate: integrate a further half-interval beyond the cutoff.
    let tail = rule.integrate(r_max, 1.5 * r_max, |r| {
        let a = mode.radial_amplitude(r);
        a * a * r
    });
    let truncated_mass = 2.0 * std::f64::consts::PI * tail;
    Ok(NormEstimate { value, truncated_mass, truncated: truncated_mass > 1e-6 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2_OVER_PI: f64 = 0.7978845608028654; // sqrt(2/π)

    #[test]
    fn gaussian_at_origin() {
        let m = LgMode::new(0, 1.0).unwrap();
        let v = m.evaluate(0.0, 0.0).unwrap();
        assert!((v.re - SQRT_2_OVER_PI).abs() < 1e-14, "{v}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn vortex_core_vanishes() {
        let m = LgMode::new(5, 1.0).unwrap();
        for phi in [0.0, 1.0, 4.0] {
            assert_eq!(m.evaluate(0.0, phi).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn azimuthal_phase_linearity() {
        let m = LgMode::new(1, 1.0).unwrap();
        let a = m.evaluate(0.5, 0.0).unwrap();
        let b = m.evaluate(0.5, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-15);
        let dphase = (b / a).arg();
        assert!((dphase - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn modulus_phi_invariant() {
        let m = LgMode::new(-7, 1.3).unwrap();
        let base = m.evaluate(2.0, 0.0).unwrap().norm();
        for k in 1..10 {
            let phi = k as f64 * 0.61;
            assert!((m.evaluate(2.0, phi).unwrap().norm() - base).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(LgMode::new(0, 0.0).is_err());
        assert!(LgMode::new(0, -1.0).is_err());
        let m = LgMode::new(0, 1.0).unwrap();
        assert!(m.evaluate(f64::NAN, 0.0).is_err());
        assert!(m.evaluate(1.0, f64::INFINITY).is_err());
        assert!(m.evaluate(-0.5, 0.0).is_err());
    }

    #[test]
    fn norm_closed_forms() {
        // l=0: plain Gaussian integral
        let m = LgMode::new(0, 1.0).unwrap();
        let n = mode_norm(&m, 8.0, 64).unwrap();
        assert!((n.value - 1.0).abs() < 1e-8, "{}", n.value);
        assert!(!n.truncated);

        // l=10: gamma-function radial moment
        let m = LgMode::new(10, 1.0).unwrap();
        let n = mode_norm(&m, 12.0, 96).unwrap();
        assert!((n.value - 1.0).abs() < 1e-6, "{}", n.value);

        // waist independence
        let m = LgMode::new(0, 2.0).unwrap();
        let n = mode_norm(&m, 16.0, 64).unwrap();
        assert!((n.value - 1.0).abs() < 1e-8, "{}", n.value);
    }

    #[test]
    fn norm_unit_for_all_charges_to_32() {
        for l in -32..=32 {
            let m = LgMode::new(l, 1.0).unwrap();
            let r_max = radial_cutoff(1.0, l);
            let n = mode_norm(&m, r_max, 96).unwrap();
            assert!((n.value - 1.0).abs() < 1e-6, "l={l}: {}", n.value);
        }
    }

    #[test]
    fn norm_unit_with_radial_index() {
        for (p, l) in [(1u32, 0i32), (2, 3), (3, -5)] {
            let m = LgMode::with_radial(l, p, 1.0).unwrap();
            let n = mode_norm(&m, 14.0, 128).unwrap();
            assert!((n.value - 1.0).abs() < 1e-8, "p={p} l={l}: {}", n.value);
        }
    }

    #[test]
    fn truncation_warning_when_cutoff_too_small() {
        let m = LgMode::new(20, 1.0).unwrap();
        let n = mode_norm(&m, 2.5, 96).unwrap();
        assert!(n.truncated, "ring at {} should overflow r_max", m.peak_radius());
        assert!(n.value < 1.0);
    }

    #[test]
    fn orthogonality_between_charges() {
        // ∫ u_l* u_l' r dr dφ = 0 for l ≠ l'; the azimuthal factor does it
        // analytically, here checked by brute 2-D quadrature.
        let rule = GaussLegendre::cached(96);
        let m1 = LgMode::new(3, 1.0).unwrap();
        let m2 = LgMode::new(-4, 1.0).unwrap();
        let n_phi = 64usize;
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n_phi {
            let phi = k as f64 * dphi;
            let radial = rule.integrate(0.0, 10.0, |r| {
                (m1.evaluate(r, phi).unwrap().conj() * m2.evaluate(r, phi).unwrap()).re * r
            });
            let radial_im = rule.integrate(0.0, 10.0, |r| {
                (m1.evaluate(r, phi).unwrap().conj() * m2.evaluate(r, phi).unwrap()).im * r
            });
            acc += Complex64::new(radial, radial_im) * dphi;
        }
        assert!(acc.norm() < 1e-8, "overlap {acc}");
    }

    #[test]
    fn peak_radius_matches_1d_maximization() {
        for l in [1, 4, 9, 16] {
            let m = LgMode::new(l, 1.0).unwrap();
            let expected = m.peak_radius();
            let mut best_r = 0.0;
            let mut best = -1.0;
            let mut r = 0.0;
            while r < 8.0 {
                let v = m.radial_amplitude(r).powi(2);
                if v > best {
                    best = v;
                    best_r = r;
                }
                r += 1e-4;
            }
            assert!((best_r - expected).abs() < 1e-3, "l={l}: {best_r} vs {expected}");
        }
    }

    #[test]
    fn annular_piecewise_evaluation() {
        let inner = LgMode::new(0, 0.5).unwrap();
        let outer = LgMode::new(10, 2.0).unwrap();
        let comp = AnnularComposite::new(inner, outer, 1.0).unwrap();
        let phi = 0.3;
        assert_eq!(comp.evaluate(0.2, phi).unwrap(), inner.evaluate(0.2, phi).unwrap());
        assert_eq!(comp.evaluate(3.0, phi).unwrap(), outer.evaluate(3.0, phi).unwrap());
        assert_eq!(comp.charge_at(0.2), 0);
        assert_eq!(comp.charge_at(3.0), 10);
    }

    #[test]
    fn degenerate_composite_equals_plain_mode() {
        let m = LgMode::new(0, 1.0).unwrap();
        let comp = AnnularComposite::new(m, m, 1.0).unwrap();
        for r in [0.0, 0.5, 1.0, 2.5] {
            assert_eq!(comp.evaluate(r, 0.7).unwrap(), m.evaluate(r, 0.7).unwrap());
        }
    }

    #[test]
    fn swapped_charges_keep_geometry() {
        let comp = AnnularComposite::new(
            LgMode::new(0, 1.0).unwrap(),
            LgMode::new(7, 2.5).unwrap(),
            1.2,
        )
        .unwrap();
        let swapped = comp.with_swapped_charges();
        assert_eq!(swapped.inner.charge, 7);
        assert_eq!(swapped.outer.charge, 0);
        assert_eq!(swapped.inner.waist, 1.0);
        assert_eq!(swapped.outer.waist, 2.5);
    }
}
