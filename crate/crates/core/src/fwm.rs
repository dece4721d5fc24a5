//! Four-wave-mixing mode coupling.
//!
//! The coupling amplitude between pump fields with charges (l_W, l_R) and a
//! signal pair (l_S1, l_S2) is a radial overlap of the four transverse
//! profiles weighted by the third-order susceptibility χ³. The azimuthal
//! integral is resolved analytically: it is 2π when l_W + l_R = l_S1 + l_S2
//! and exactly zero otherwise, which is the topological-charge conservation
//! law of the process. The medium is treated as thin, so the longitudinal
//! integral contributes the interaction length L as a constant factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{radial_cutoff, AnnularComposite, LgMode};
use crate::quad::GaussLegendre;
use crate::qstate::StateVector;

/// Relative tolerance for the order-doubling convergence check.
const QUAD_REL_TOL: f64 = 1e-10;

/// How the pump profiles enter the radial overlap.
///
/// `StandardFwm` multiplies each pump profile once, the usual four-field
/// overlap. `PaperLiteral` squares the pump product, reproducing a printed
/// variant of the overlap in which the write/read profiles appear twice.
/// The conservation law is the same in both conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PumpConvention {
    PaperLiteral,
    StandardFwm,
}

/// Parameters of the third-order susceptibility
///
/// ```text
/// χ³ = N μ / [ (Δ_W + iγ23) (|Ω_R|² − 4(ω + iγ24)(ω + iγ21)) ]
/// ```
///
/// All frequencies are angular (rad/s). `dipole_product` lumps
/// μ13 μ32 μ24 μ41 / (ε0 ħ³) into one real scalar; only the global scale of
/// χ³ depends on it, so normalized spectra are independent of its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi3Params {
    /// Write-laser detuning Δ_W.
    pub delta_w: f64,
    /// Two-photon detuning ω.
    pub omega: f64,
    /// Read-laser Rabi frequency Ω_R.
    pub rabi_r: f64,
    pub gamma_23: f64,
    pub gamma_24: f64,
    pub gamma_21: f64,
    pub dipole_product: f64,
    pub density_n: f64,
}

impl Default for Chi3Params {
    fn default() -> Self {
        let mhz = 2.0 * std::f64::consts::PI * 1e6;
        Chi3Params {
            delta_w: 70.0 * mhz,
            omega: 0.0,
            rabi_r: 10.0 * mhz,
            gamma_23: 0.1 * mhz,
            gamma_24: 0.1 * mhz,
            gamma_21: 0.1 * mhz,
            dipole_product: 1.0,
            density_n: 1.0,
        }
    }
}

impl Chi3Params {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta_w", self.delta_w),
            ("omega", self.omega),
            ("rabi_r", self.rabi_r),
            ("gamma_23", self.gamma_23),
            ("gamma_24", self.gamma_24),
            ("gamma_21", self.gamma_21),
            ("dipole_product", self.dipole_product),
            ("density_n", self.density_n),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(format!("chi3 parameter {name} must be finite")));
            }
        }
        if self.rabi_r < 0.0 {
            return Err(Error::domain("rabi_r must be >= 0"));
        }
        if self.gamma_23 < 0.0 || self.gamma_24 < 0.0 || self.gamma_21 < 0.0 {
            return Err(Error::domain("dephasing rates must be >= 0"));
        }
        Ok(())
    }
}

/// Third-order susceptibility for the configured detunings.
pub fn chi3(p: &Chi3Params) -> Result<Complex64> {
    p.validate()?;
    let write_factor = Complex64::new(p.delta_w, p.gamma_23);
    if write_factor.norm() == 0.0 {
        return Err(Error::Singularity { factor: "write detuning factor Δ_W + iγ23" });
    }
    let omega_24 = Complex64::new(p.omega, p.gamma_24);
    let omega_21 = Complex64::new(p.omega, p.gamma_21);
    let read_factor = Complex64::new(p.rabi_r * p.rabi_r, 0.0) - 4.0 * omega_24 * omega_21;
    if read_factor.norm() == 0.0 {
        return Err(Error::Singularity {
            factor: "read dressing factor |Ω_R|² − 4(ω + iγ24)(ω + iγ21)",
        });
    }
    Ok(Complex64::new(p.density_n * p.dipole_product, 0.0) / (write_factor * read_factor))
}

/// True when the signal pair conserves the pump topological charge.
pub fn azimuthal_selection(l_w: i32, l_r: i32, l_s1: i32, l_s2: i32) -> bool {
    l_w as i64 + l_r as i64 == l_s1 as i64 + l_s2 as i64
}

/// Full geometry and mode configuration for one coupling computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwmConfig {
    pub write: LgMode,
    pub read: LgMode,
    pub signal1_waist: f64,
    pub signal2_waist: f64,
    /// Interaction length L (the thin-medium longitudinal factor).
    pub interaction_length: f64,
    /// Hard radial integration cutoff.
    pub r_max: f64,
    pub quad_order: usize,
    pub convention: PumpConvention,
}

impl FwmConfig {
    /// Configuration with unit waists and length, default order 160 and a
    /// cutoff wide enough for signal charges up to |l| = 50.
    pub fn new(write_charge: i32, read_charge: i32) -> Result<Self> {
        let write = LgMode::new(write_charge, 1.0)?;
        let read = LgMode::new(read_charge, 1.0)?;
        let max_charge = write_charge.abs().max(read_charge.abs()).max(50);
        Ok(FwmConfig {
            write,
            read,
            signal1_waist: 1.0,
            signal2_waist: 1.0,
            interaction_length: 1.0,
            r_max: radial_cutoff(1.0, max_charge),
            quad_order: 160,
            convention: PumpConvention::StandardFwm,
        })
    }

    pub fn max_waist(&self) -> f64 {
        self.write
            .waist
            .max(self.read.waist)
            .max(self.signal1_waist)
            .max(self.signal2_waist)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("write waist", self.write.waist),
            ("read waist", self.read.waist),
            ("signal1_waist", self.signal1_waist),
            ("signal2_waist", self.signal2_waist),
            ("interaction_length", self.interaction_length),
            ("r_max", self.r_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if self.quad_order < 32 {
            return Err(Error::domain(format!("quad_order must be >= 32, got {}", self.quad_order)));
        }
        Ok(())
    }

    /// Soft checks: non-fatal geometry advisories.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let needed = radial_cutoff(self.max_waist(), self.write.charge.abs().max(self.read.charge.abs()));
        if self.r_max < needed {
            out.push(format!(
                "r_max = {} is below the recommended cutoff {:.3} for the configured charges",
                self.r_max, needed
            ));
        }
        if self.write.radial != 0 || self.read.radial != 0 {
            out.push("non-zero radial index on a pump mode is an extension beyond the shipped presets".into());
        }
        out
    }

    fn signal1(&self, charge: i32) -> LgMode {
        LgMode { charge, radial: 0, waist: self.signal1_waist }
    }

    fn signal2(&self, charge: i32) -> LgMode {
        LgMode { charge, radial: 0, waist: self.signal2_waist }
    }

    /// Effective integration cutoff for a specific charge quadruple: the
    /// configured cap, tightened to where the four-profile integrand has
    /// support (the outermost ring plus six envelope widths; the product of
    /// four Gaussian envelopes is dead far earlier).
    fn effective_cutoff(&self, l_s1: i32, l_s2: i32) -> f64 {
        let s1 = self.signal1(l_s1);
        let s2 = self.signal2(l_s2);
        let max_peak = self
            .write
            .peak_radius()
            .max(self.read.peak_radius())
            .max(s1.peak_radius())
            .max(s2.peak_radius());
        self.r_max.min(max_peak + 6.0 * self.max_waist())
    }
}

/// Radial coupling integral at a fixed quadrature order.
fn radial_overlap(
    order: usize,
    r_hi: f64,
    pump: impl Fn(f64) -> f64,
    s1: &LgMode,
    s2: &LgMode,
) -> f64 {
    let rule = GaussLegendre::cached(order);
    rule.integrate(0.0, r_hi, |r| {
        pump(r) * s1.radial_amplitude(r) * s2.radial_amplitude(r) * r
    })
}

/// Order-doubling convergence wrapper around [`radial_overlap`].
fn converged_overlap(
    order: usize,
    r_hi: f64,
    pump: &dyn Fn(f64) -> f64,
    s1: &LgMode,
    s2: &LgMode,
) -> Result<f64> {
    let coarse = radial_overlap(order, r_hi, pump, s1, s2);
    let fine = radial_overlap(order * 2, r_hi, pump, s1, s2);
    let delta = (fine - coarse).abs();
    if delta > QUAD_REL_TOL * fine.abs() + 1e-280 {
        return Err(Error::QuadratureNonConvergence { estimate: fine, delta });
    }
    Ok(fine)
}

fn pump_factor(config: &FwmConfig) -> impl Fn(f64) -> f64 + '_ {
    move |r| {
        let p = config.write.radial_amplitude(r) * config.read.radial_amplitude(r);
        match config.convention {
            PumpConvention::StandardFwm => p,
            PumpConvention::PaperLiteral => p * p,
        }
    }
}

/// Coupling amplitude c for the signal pair (l_S1, l_W + l_R − l_S1).
///
/// The partner charge is fixed by charge conservation; use
/// [`coupling_amplitude_pair`] to evaluate an arbitrary quadruple.
pub fn coupling_amplitude(config: &FwmConfig, chi: &Chi3Params, l_s1: i32) -> Result<Complex64> {
    let l_s2 = config.write.charge + config.read.charge - l_s1;
    coupling_amplitude_pair(config, chi, l_s1, l_s2)
}

/// Coupling amplitude for an explicit quadruple; exactly zero whenever the
/// charges do not conserve.
pub fn coupling_amplitude_pair(
    config: &FwmConfig,
    chi: &Chi3Params,
    l_s1: i32,
    l_s2: i32,
) -> Result<Complex64> {
    config.validate()?;
    if !azimuthal_selection(config.write.charge, config.read.charge, l_s1, l_s2) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let susceptibility = chi3(chi)?;
    let s1 = config.signal1(l_s1);
    let s2 = config.signal2(l_s2);
    let r_hi = config.effective_cutoff(l_s1, l_s2);
    let pump = pump_factor(config);
    let radial = converged_overlap(config.quad_order, r_hi, &pump, &s1, &s2)?;
    Ok(Complex64::new(2.0 * std::f64::consts::PI * config.interaction_length * radial, 0.0)
        * susceptibility)
}

/// One entry of a spiral spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub l_s1: i32,
    /// Normalized |c|² weight.
    pub weight: f64,
    /// The coupling amplitude behind the weight (kept for post-selection).
    #[serde(skip)]
    pub amplitude: Complex64,
    /// Entry below 1e-6 of the peak weight.
    pub tail: bool,
}

/// Normalized |c_l|² distribution over signal-1 charges.
#[derive(Debug, Clone, Serialize)]
pub struct SpiralSpectrum {
    pub l_w: i32,
    pub l_r: i32,
    pub entries: Vec<SpectrumEntry>,
    pub normalized: bool,
}

impl SpiralSpectrum {
    /// Partner charge of an entry: l_S2 = l_W + l_R − l_S1.
    pub fn partner_charge(&self, l_s1: i32) -> i32 {
        self.l_w + self.l_r - l_s1
    }

    pub fn weight(&self, l_s1: i32) -> Option<f64> {
        self.entries.iter().find(|e| e.l_s1 == l_s1).map(|e| e.weight)
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Data points (l, weight) for fitting.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.l_s1 as f64, e.weight)).collect()
    }
}

/// Normalized spiral spectrum over an inclusive charge interval.
///
/// Fails with a range error when the interval covers less than 99.9% of the
/// estimated spectral mass.
pub fn spiral_spectrum(
    config: &FwmConfig,
    chi: &Chi3Params,
    l_range: std::ops::RangeInclusive<i32>,
) -> Result<SpiralSpectrum> {
    config.validate()?;
    let (lo, hi) = (*l_range.start(), *l_range.end());
    if lo > hi {
        return Err(Error::domain(format!("empty l range [{lo}, {hi}]")));
    }
    let amplitudes: Vec<(i32, Complex64)> = (lo..=hi)
        .map(|l| Ok((l, coupling_amplitude(config, chi, l)?)))
        .collect::<Result<_>>()?;
    let total: f64 = amplitudes.iter().map(|(_, c)| c.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::domain("spectrum has zero total weight over the requested range"));
    }

    // Probe beyond both edges to estimate the missed mass.
    let probe = 8;
    let mut tail_mass = 0.0;
    for l in (lo - probe..lo).chain(hi + 1..=hi + probe) {
        tail_mass += coupling_amplitude(config, chi, l)?.norm_sqr();
    }
    tail_mass *= 2.0; // decay margin beyond the probe window
    let covered = total / (total + tail_mass);
    if covered < 0.999 {
        return Err(Error::RangeTooNarrow { covered, required: 0.999, suggested_margin: 10 });
    }

    let peak = amplitudes.iter().map(|(_, c)| c.norm_sqr()).fold(0.0, f64::max);
    let entries = amplitudes
        .into_iter()
        .map(|(l, c)| {
            let w = c.norm_sqr();
            SpectrumEntry {
                l_s1: l,
                weight: w / total,
                amplitude: c,
                tail: w < 1e-6 * peak,
            }
        })
        .collect();
    Ok(SpiralSpectrum { l_w: config.write.charge, l_r: config.read.charge, entries, normalized: true })
}

/// Post-selected two-photon state over the kept signal-1 charges.
///
/// Labels are (l_S1, l_S2) pairs; amplitudes keep the phases of the
/// underlying coupling amplitudes and are renormalized over the kept set.
pub fn two_photon_state(spectrum: &SpiralSpectrum, keep: &[i32]) -> Result<StateVector<(i32, i32)>> {
    if keep.is_empty() {
        return Err(Error::domain("post-selection needs at least one kept charge"));
    }
    let mut labels = Vec::with_capacity(keep.len());
    let mut amps = Vec::with_capacity(keep.len());
    for &l in keep {
        let entry = spectrum
            .entries
            .iter()
            .find(|e| e.l_s1 == l)
            .ok_or_else(|| Error::LabelMismatch(format!("charge {l} is not in the spectrum")))?;
        labels.push((l, spectrum.partner_charge(l)));
        amps.push(entry.amplitude);
    }
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::EmptySubspace(format!("{keep:?}")));
    }
    StateVector::renormalized(labels, amps)
}

/// Coupling amplitude with annular-composite pump beams.
///
/// The composites switch charge at their split radii, so the azimuthal
/// selection rule applies segment by segment: a radial segment contributes
/// only when its local pump charges satisfy
/// `write + read = s1.charge + s2.charge`.
pub fn composite_coupling_amplitude(
    write: &AnnularComposite,
    read: &AnnularComposite,
    s1: &LgMode,
    s2: &LgMode,
    chi: &Chi3Params,
    interaction_length: f64,
    quad_order: usize,
    convention: PumpConvention,
) -> Result<Complex64> {
    if quad_order < 32 {
        return Err(Error::domain(format!("quad_order must be >= 32, got {quad_order}")));
    }
    let susceptibility = chi3(chi)?;
    let max_waist = write
        .inner
        .waist
        .max(write.outer.waist)
        .max(read.inner.waist)
        .max(read.outer.waist)
        .max(s1.waist)
        .max(s2.waist);
    let max_peak = [write.inner, write.outer, read.inner, read.outer, *s1, *s2]
        .iter()
        .map(LgMode::peak_radius)
        .fold(0.0f64, f64::max);
    let r_hi = max_peak + 6.0 * max_waist;

    let mut cuts = vec![0.0, r_hi];
    for split in [write.split_radius, read.split_radius] {
        if split > 0.0 && split < r_hi {
            cuts.push(split);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut radial = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mid = 0.5 * (a + b);
        let w_mode = write.mode_at(mid);
        let r_mode = read.mode_at(mid);
        if !azimuthal_selection(w_mode.charge, r_mode.charge, s1.charge, s2.charge) {
            continue;
        }
        let pump = |r: f64| {
            let p = w_mode.radial_amplitude(r) * r_mode.radial_amplitude(r);
            match convention {
                PumpConvention::StandardFwm => p,
                PumpConvention::PaperLiteral => p * p,
            }
        };
        let rule = GaussLegendre::cached(quad_order);
        let coarse = rule.integrate(a, b, |r| pump(r) * s1.radial_amplitude(r) * s2.radial_amplitude(r) * r);
        let fine = GaussLegendre::cached(quad_order * 2)
            .integrate(a, b, |r| pump(r) * s1.radial_amplitude(r) * s2.radial_amplitude(r) * r);
        if (fine - coarse).abs() > QUAD_REL_TOL * fine.abs() + 1e-280 {
            return Err(Error::QuadratureNonConvergence {
                estimate: fine,
                delta: (fine - coarse).abs(),
            });
        }
        radial += fine;
    }
    Ok(Complex64::new(2.0 * std::f64::consts::PI * interaction_length * radial, 0.0) * susceptibility)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_dephasing() -> Chi3Params {
        Chi3Params {
            gamma_23: 0.0,
            gamma_24: 0.0,
            gamma_21: 0.0,
            ..Chi3Params::default()
        }
    }

    #[test]
    fn chi3_zero_dephasing_closed_form() {
        // off-resonance, all γ = 0: purely real value 1/(Δ_W |Ω_R|²)
        let p = zero_dephasing();
        let got = chi3(&p).unwrap();
        let want = 1.0 / (p.delta_w * p.rabi_r * p.rabi_r);
        assert!((got.re - want).abs() / want < 1e-14, "{got} vs {want}");
        assert!(got.im.abs() < want * 1e-14);
    }

    #[test]
    fn chi3_matches_independent_expansion() {
        // independent evaluation of the same closed form with doubled ω,
        // expanded in explicit real arithmetic
        let p = Chi3Params { omega: 2.0 * 2.0 * std::f64::consts::PI * 1e6, ..Chi3Params::default() };
        let got = chi3(&p).unwrap();

        let (dw, g23) = (p.delta_w, p.gamma_23);
        let (om, g24, g21, rr) = (p.omega, p.gamma_24, p.gamma_21, p.rabi_r);
        // (ω + iγ24)(ω + iγ21) = (ω² − γ24 γ21) + iω(γ24 + γ21)
        let prod_re = om * om - g24 * g21;
        let prod_im = om * (g24 + g21);
        let f2_re = rr * rr - 4.0 * prod_re;
        let f2_im = -4.0 * prod_im;
        // (Δ + iγ23)(f2_re + i f2_im)
        let den_re = dw * f2_re - g23 * f2_im;
        let den_im = dw * f2_im + g23 * f2_re;
        let den_sq = den_re * den_re + den_im * den_im;
        let want = Complex64::new(den_re / den_sq, -den_im / den_sq);
        assert!((got - want).norm() / want.norm() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn chi3_vanishes_at_large_dephasing() {
        let p = Chi3Params { gamma_23: 1e18, ..Chi3Params::default() };
        let small = chi3(&p).unwrap().norm();
        let base = chi3(&Chi3Params::default()).unwrap().norm();
        assert!(small < base * 1e-9);
    }

    #[test]
    fn chi3_singularity_is_reported() {
        let p = Chi3Params {
            delta_w: 0.0,
            gamma_23: 0.0,
            gamma_24: 0.0,
            gamma_21: 0.0,
            ..Chi3Params::default()
        };
        match chi3(&p) {
            Err(Error::Singularity { factor }) => assert!(factor.contains("Δ_W")),
            other => panic!("expected singularity, got {other:?}"),
        }
        // resonance in the read factor: ω = Ω_R/2 with zero dephasing
        let p = Chi3Params {
            omega: Chi3Params::default().rabi_r / 2.0,
            gamma_23: 0.0,
            gamma_24: 0.0,
            gamma_21: 0.0,
            ..Chi3Params::default()
        };
        match chi3(&p) {
            Err(Error::Singularity { factor }) => assert!(factor.contains("Ω_R")),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn selection_rule_cases() {
        assert!(azimuthal_selection(10, -10, 5, -5));
        assert!(!azimuthal_selection(10, 0, 5, -5));
        assert!(azimuthal_selection(2, 0, 0, 2));
    }

    #[test]
    fn coupling_zero_iff_nonconserving() {
        let cfg = FwmConfig::new(3, -1).unwrap();
        let chi = Chi3Params::default();
        let ok = coupling_amplitude_pair(&cfg, &chi, 1, 1).unwrap();
        assert!(ok.norm() > 0.0);
        let zero = coupling_amplitude_pair(&cfg, &chi, 1, 2).unwrap();
        assert_eq!(zero, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_pump_coupling_is_nonzero_and_chi_phased() {
        let cfg = FwmConfig::new(0, 0).unwrap();
        let chi = Chi3Params::default();
        let c = coupling_amplitude(&cfg, &chi, 0).unwrap();
        assert!(c.norm() > 0.0);
        // dividing out χ³ leaves a positive real overlap
        let bare = c / chi3(&chi).unwrap();
        assert!(bare.re > 0.0);
        assert!(bare.im.abs() < 1e-12 * bare.re);
    }

    #[test]
    fn coupling_modulus_symmetric_in_signal_sign() {
        let cfg = FwmConfig::new(0, 0).unwrap();
        let chi = Chi3Params::default();
        for k in [1, 3, 7, 12] {
            let plus = coupling_amplitude(&cfg, &chi, k).unwrap().norm();
            let minus = coupling_amplitude(&cfg, &chi, -k).unwrap().norm();
            assert!((plus - minus).abs() <= 1e-12 * plus.max(minus), "k={k}");
        }
    }

    #[test]
    fn spectrum_gaussian_is_single_peaked_and_normalized() {
        let cfg = FwmConfig::new(0, 0).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -40..=40).unwrap();
        assert!((spec.total_weight() - 1.0).abs() < 1e-12);
        let peak = spec.entries.iter().max_by(|a, b| a.weight.total_cmp(&b.weight)).unwrap();
        assert_eq!(peak.l_s1, 0);
        // symmetric
        for k in 1..=10 {
            let p = spec.weight(k).unwrap();
            let m = spec.weight(-k).unwrap();
            assert!((p - m).abs() < 1e-9 * p.max(m) + 1e-300, "k={k}");
        }
    }

    #[test]
    fn spectrum_matches_binomial_closed_form() {
        // For equal unit waists and pump charges (k, -k) the weight at l is
        // proportional to [C(k+|l|, |l|) / 2^|l|]²; derivable by the gamma
        // integral of the radial overlap.
        let cfg = FwmConfig::new(4, -4).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -30..=30).unwrap();
        let binom = |k: u64, l: u64| -> f64 {
            let mut v = 1.0;
            for j in 0..l {
                v *= (k + l - j) as f64 / (l - j) as f64;
            }
            v
        };
        let closed: Vec<f64> = (-30i32..=30)
            .map(|l| {
                let al = l.unsigned_abs() as u64;
                (binom(4, al) / 2f64.powi(l.abs())).powi(2)
            })
            .collect();
        let total: f64 = closed.iter().sum();
        for (entry, want) in spec.entries.iter().zip(&closed) {
            let w = want / total;
            assert!(
                (entry.weight - w).abs() < 1e-9 * w.max(1e-12),
                "l={}: {} vs {w}",
                entry.l_s1,
                entry.weight
            );
        }
    }

    #[test]
    fn spectrum_exchange_symmetry_for_asymmetric_pumps() {
        // l_W=2, l_R=0: weight(l_S1=0) = weight(l_S1=2) at equal signal waists
        let cfg = FwmConfig::new(2, 0).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -30..=30).unwrap();
        let a = spec.weight(0).unwrap();
        let b = spec.weight(2).unwrap();
        assert!((a - b).abs() < 1e-12 * a.max(b));
    }

    #[test]
    fn spectrum_range_error_when_too_narrow() {
        let cfg = FwmConfig::new(10, -10).unwrap();
        match spiral_spectrum(&cfg, &Chi3Params::default(), -3..=3) {
            Err(Error::RangeTooNarrow { covered, .. }) => assert!(covered < 0.999),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_chi_rescaling_invariance() {
        let cfg = FwmConfig::new(2, -2).unwrap();
        let a = spiral_spectrum(&cfg, &Chi3Params::default(), -25..=25).unwrap();
        let chi_scaled = Chi3Params { dipole_product: 137.0, ..Chi3Params::default() };
        let b = spiral_spectrum(&cfg, &chi_scaled, -25..=25).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.weight - y.weight).abs() <= 1e-12 * x.weight.max(y.weight) + 1e-300);
        }
    }

    #[test]
    fn quad_order_doubling_stability() {
        let mut cfg = FwmConfig::new(10, -10).unwrap();
        let base = spiral_spectrum(&cfg, &Chi3Params::default(), -50..=50).unwrap();
        cfg.quad_order *= 2;
        let fine = spiral_spectrum(&cfg, &Chi3Params::default(), -50..=50).unwrap();
        for (a, b) in base.entries.iter().zip(&fine.entries) {
            let rel = (a.weight - b.weight).abs() / b.weight.max(1e-300);
            assert!(rel < 1e-8, "l={}: rel change {rel}", a.l_s1);
        }
    }

    #[test]
    fn post_selection_two_terms() {
        let cfg = FwmConfig::new(2, 0).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -30..=30).unwrap();
        let state = two_photon_state(&spec, &[0, 2]).unwrap();
        assert_eq!(state.labels(), &[(0, 2), (2, 0)]);
        let amp = 1.0 / 2f64.sqrt();
        for a in state.amplitudes() {
            assert!((a.norm() - amp).abs() < 1e-12);
        }
    }

    #[test]
    fn post_selection_single_term_is_unit() {
        let cfg = FwmConfig::new(0, 0).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -20..=20).unwrap();
        let state = two_photon_state(&spec, &[3]).unwrap();
        assert_eq!(state.labels(), &[(3, -3)]);
        assert!((state.amplitudes()[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn post_selection_missing_label_errors() {
        let cfg = FwmConfig::new(0, 0).unwrap();
        let spec = spiral_spectrum(&cfg, &Chi3Params::default(), -10..=10).unwrap();
        assert!(matches!(two_photon_state(&spec, &[99]), Err(Error::LabelMismatch(_))));
        assert!(two_photon_state(&spec, &[]).is_err());
    }

    #[test]
    fn composite_single_ring_limit_matches_plain_coupling() {
        let chi = Chi3Params::default();
        let inner_w = LgMode::new(10, 1.0).unwrap();
        let inner_r = LgMode::new(-10, 1.0).unwrap();
        let far = 1e6;
        let write = AnnularComposite::new(inner_w, LgMode::new(3, 2.5).unwrap(), far).unwrap();
        let read = AnnularComposite::new(inner_r, LgMode::new(-3, 2.5).unwrap(), far).unwrap();
        let s1 = LgMode::new(0, 1.0).unwrap();
        let s2 = LgMode::new(0, 1.0).unwrap();
        let comp = composite_coupling_amplitude(
            &write,
            &read,
            &s1,
            &s2,
            &chi,
            1.0,
            160,
            PumpConvention::StandardFwm,
        )
        .unwrap();
        let cfg = FwmConfig::new(10, -10).unwrap();
        let plain = coupling_amplitude(&cfg, &chi, 0).unwrap();
        assert!((comp - plain).norm() <= 1e-8 * plain.norm(), "{comp} vs {plain}");
    }
}
