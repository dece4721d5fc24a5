//! Detection-chain simulation: analyzer projectors, Born-rule coincidence
//! probabilities, Poisson count records with background and memory decay,
//! and the flat/ring OAM-multiplexing configurations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::fwm::{
    composite_coupling_amplitude, coupling_amplitude_pair, Chi3Params, FwmConfig,
};
use crate::modes::{AnnularComposite, LgMode};
use crate::qstate::{DensityMatrix, StateVector};
use crate::rng::CounterRng;

/// Which signal arm a projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arm {
    S1,
    S2,
}

/// A single-photon projection loaded on one analyzer.
#[derive(Debug, Clone)]
pub struct Projector {
    pub target: StateVector<i32>,
    pub arm: Arm,
    /// Human-readable setting descriptor used in coincidence records.
    pub name: String,
}

/// The four tomography projections on a two-mode subspace {a, b}:
/// |a⟩, |b⟩, (|a⟩ − i|b⟩)/√2, (|a⟩ + |b⟩)/√2.
pub fn tomography_basis(a: i32, b: i32) -> Result<[(StateVector<i32>, String); 4]> {
    if a == b {
        return Err(Error::domain(format!("tomography basis needs two distinct charges, got {a}")));
    }
    let r2 = 1.0 / 2f64.sqrt();
    Ok([
        (StateVector::basis_state(vec![a, b], a)?, format!("|{a}>")),
        (StateVector::basis_state(vec![a, b], b)?, format!("|{b}>")),
        (
            StateVector::new(vec![a, b], vec![Complex64::new(r2, 0.0), Complex64::new(0.0, -r2)])?,
            format!("(|{a}>-i|{b}>)/r2"),
        ),
        (
            StateVector::new(vec![a, b], vec![Complex64::new(r2, 0.0), Complex64::new(r2, 0.0)])?,
            format!("(|{a}>+|{b}>)/r2"),
        ),
    ])
}

/// Analyzer projection (|a⟩ + e^{i2θ}|b⟩)/√2 at SLM angle θ.
///
/// Under this convention the ideal two-photon fringe for a symmetric Bell
/// pair is cos 2(θ_S1 + θ_S2).
pub fn analyzer_projector(a: i32, b: i32, theta: f64) -> Result<StateVector<i32>> {
    if a == b {
        return Err(Error::domain(format!("analyzer needs two distinct charges, got {a}")));
    }
    if !theta.is_finite() {
        return Err(Error::domain(format!("analyzer angle must be finite, got {theta}")));
    }
    let r2 = 1.0 / 2f64.sqrt();
    StateVector::new(
        vec![a, b],
        vec![Complex64::new(r2, 0.0), Complex64::from_polar(r2, 2.0 * theta)],
    )
}

/// Born-rule coincidence probability Tr(ρ · P1 ⊗ P2) for rank-one
/// projectors onto `p1` (signal 1) and `p2` (signal 2).
pub fn coincidence_probability(
    rho: &DensityMatrix<(i32, i32)>,
    p1: &StateVector<i32>,
    p2: &StateVector<i32>,
) -> Result<f64> {
    let s1_charges: Vec<i32> = rho.labels().iter().map(|l| l.0).collect();
    let s2_charges: Vec<i32> = rho.labels().iter().map(|l| l.1).collect();
    for l in p1.labels() {
        if !s1_charges.contains(l) {
            return Err(Error::LabelMismatch(format!(
                "signal-1 projector charge {l} absent from the state's S1 charges {s1_charges:?}"
            )));
        }
    }
    for l in p2.labels() {
        if !s2_charges.contains(l) {
            return Err(Error::LabelMismatch(format!(
                "signal-2 projector charge {l} absent from the state's S2 charges {s2_charges:?}"
            )));
        }
    }
    // ⟨v|ρ|v⟩ with v_j = ⟨t1|l1_j⟩⟨t2|l2_j⟩ over the state's labels
    let v: Vec<Complex64> = rho
        .labels()
        .iter()
        .map(|&(l1, l2)| {
            let a = p1.amplitude_of(l1).unwrap_or(Complex64::new(0.0, 0.0));
            let b = p2.amplitude_of(l2).unwrap_or(Complex64::new(0.0, 0.0));
            a * b
        })
        .collect();
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += v[i].conj() * rho.get(i, j) * v[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Exponential memory decay: the retrieval amplitude after a storage time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    /// Coherence time τ in nanoseconds.
    pub tau_ns: f64,
    /// Storage time Δt in nanoseconds.
    pub storage_ns: f64,
}

impl Default for DecayModel {
    fn default() -> Self {
        DecayModel { tau_ns: 1655.0, storage_ns: 0.0 }
    }
}

impl DecayModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_ns.is_finite() && self.tau_ns > 0.0) {
            return Err(Error::domain(format!("tau must be finite and positive, got {}", self.tau_ns)));
        }
        if !(self.storage_ns.is_finite() && self.storage_ns >= 0.0) {
            return Err(Error::domain(format!(
                "storage time must be finite and non-negative, got {}",
                self.storage_ns
            )));
        }
        Ok(())
    }

    /// exp(−Δt/τ).
    pub fn survival(&self) -> f64 {
        (-self.storage_ns / self.tau_ns).exp()
    }
}

/// Maps Born probabilities to detected count rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Mean accidental coincidences per second.
    pub background_rate: f64,
    /// Detected rate (per second) at unit probability and zero storage time.
    pub signal_rate_scale: f64,
}

impl NoiseModel {
    pub fn noiseless(signal_rate_scale: f64) -> Self {
        NoiseModel { background_rate: 0.0, signal_rate_scale }
    }

    /// Background calibrated so a fully multiplex-matched configuration shows
    /// a contrast of 0.91 against the background-only mismatched channel.
    pub fn contrast_calibrated(signal_rate_scale: f64) -> Self {
        let c = 0.91;
        NoiseModel {
            background_rate: signal_rate_scale * (1.0 - c) / (2.0 * c),
            signal_rate_scale,
        }
    }

    /// Background calibrated so the sampled CHSH parameter of an ideal Bell
    /// pair sits near 2.22: uniform accidentals wash the correlation down to
    /// E = V cos 2(θ1+θ2) with V = S_target/(2√2).
    pub fn chsh_calibrated(signal_rate_scale: f64, s_target: f64) -> Self {
        let v = s_target / (2.0 * 2f64.sqrt());
        NoiseModel {
            background_rate: signal_rate_scale * (1.0 / v - 1.0) / 4.0,
            signal_rate_scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.background_rate.is_finite() && self.background_rate >= 0.0) {
            return Err(Error::domain(format!(
                "background rate must be finite and non-negative, got {}",
                self.background_rate
            )));
        }
        if !(self.signal_rate_scale.is_finite() && self.signal_rate_scale > 0.0) {
            return Err(Error::domain(format!(
                "signal rate scale must be finite and positive, got {}",
                self.signal_rate_scale
            )));
        }
        Ok(())
    }
}

/// One measurement setting with its accumulated counts.
///
/// `counts` is integer-valued for Poisson-sampled data and real-valued in
/// the exact-rate (infinite-count) mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceRecord {
    pub setting_s1: String,
    pub setting_s2: String,
    pub theta_s1: Option<f64>,
    pub theta_s2: Option<f64>,
    pub counts: f64,
    pub duration_s: f64,
    pub seed: u64,
}

/// Expected coincidence mean for a Born probability under decay and noise.
pub fn expected_mean(
    probability: f64,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::domain(format!("probability must be in [0, 1], got {probability}")));
    }
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::domain(format!("duration must be positive, got {duration_s}")));
    }
    decay.validate()?;
    noise.validate()?;
    Ok(probability * decay.survival() * noise.signal_rate_scale * duration_s
        + noise.background_rate * duration_s)
}

/// Poisson-sampled coincidence counts; deterministic per seed.
pub fn sample_counts(
    probability: f64,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    seed: u64,
) -> Result<u64> {
    let mean = expected_mean(probability, decay, noise, duration_s)?;
    Ok(CounterRng::new(seed).poisson(mean))
}

/// Serialize records to the coincidence CSV format.
pub fn records_to_csv(records: &[CoincidenceRecord]) -> String {
    let mut out = String::from("setting_s1,setting_s2,theta_s1,theta_s2,counts,duration_s,seed\n");
    for r in records {
        let theta1 = r.theta_s1.map(g17).unwrap_or_default();
        let theta2 = r.theta_s2.map(g17).unwrap_or_default();
        let counts = if r.counts.fract() == 0.0 && r.counts.abs() < 2f64.powi(53) {
            format!("{}", r.counts as i64)
        } else {
            g17(r.counts)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.setting_s1,
            r.setting_s2,
            theta1,
            theta2,
            counts,
            g17(r.duration_s),
            r.seed
        ));
    }
    out
}

/// Parse the coincidence CSV format.
pub fn records_from_csv(text: &str) -> Result<Vec<CoincidenceRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::domain("empty CSV"))?;
    if header.trim() != "setting_s1,setting_s2,theta_s1,theta_s2,counts,duration_s,seed" {
        return Err(Error::domain(format!("unexpected CSV header {header:?}")));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::domain(format!(
                "line {}: expected 7 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::domain(format!("line {}: bad {what}: {e}", lineno + 2)))
        };
        let theta = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s, what).map(Some)
            }
        };
        records.push(CoincidenceRecord {
            setting_s1: fields[0].to_string(),
            setting_s2: fields[1].to_string(),
            theta_s1: theta(fields[2], "theta_s1")?,
            theta_s2: theta(fields[3], "theta_s2")?,
            counts: parse_f64(fields[4], "counts")?,
            duration_s: parse_f64(fields[5], "duration_s")?,
            seed: fields[6]
                .parse()
                .map_err(|e| Error::domain(format!("line {}: bad seed: {e}", lineno + 2)))?,
        });
    }
    Ok(records)
}

/// Expected coincidence rate for a flat (single-ring) multiplexing
/// configuration, proportional to the coupling modulus squared of the
/// requested charge quadruple; exactly zero when the detected charges do
/// not conserve the pump charge.
pub fn multiplex_coincidences(
    write_charge: i32,
    read_charge: i32,
    detect_s1: i32,
    detect_s2: i32,
    config: &FwmConfig,
    chi: &Chi3Params,
) -> Result<f64> {
    let mut cfg = *config;
    cfg.write = LgMode { charge: write_charge, ..config.write };
    cfg.read = LgMode { charge: read_charge, ..config.read };
    let c = coupling_amplitude_pair(&cfg, chi, detect_s1, detect_s2)?;
    Ok(c.norm_sqr())
}

/// Detection modes for the ring-multiplexed coincidence measurement.
#[derive(Debug, Clone, Copy)]
pub struct DetectionPair {
    pub s1: LgMode,
    pub s2: LgMode,
}

/// Matched and crosstalk rates for one ring-multiplexing configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RingRates {
    pub delta_l: i32,
    /// Rate with the read rings matched to the write rings.
    pub c_same: f64,
    /// Rate leaked by the charge-swapped read into the crosstalk channel.
    pub c_diff: f64,
}

/// Coincidence rates with ring-composite write/read beams.
///
/// `C_same` is the rate into the requested detection pair with matched ring
/// assignments. `C_diff` swaps the read-beam ring charges (geometry
/// unchanged) and measures the channel that the swapped inner region
/// converts into: s2 shifts by the local charge imbalance. For Δl = 0 the
/// two configurations coincide, so `C_same = C_diff` and the contrast
/// vanishes.
pub fn ring_multiplex_coincidences(
    write: &AnnularComposite,
    read: &AnnularComposite,
    detection: &DetectionPair,
    config: &FwmConfig,
    chi: &Chi3Params,
) -> Result<RingRates> {
    let delta_l = write.outer.charge - write.inner.charge;
    let c_same = composite_coupling_amplitude(
        write,
        read,
        &detection.s1,
        &detection.s2,
        chi,
        config.interaction_length,
        config.quad_order,
        config.convention,
    )?
    .norm_sqr();

    let swapped = read.with_swapped_charges();
    let cross_s2 = LgMode {
        charge: write.inner.charge + read.outer.charge - detection.s1.charge,
        ..detection.s2
    };
    let c_diff = composite_coupling_amplitude(
        write,
        &swapped,
        &detection.s1,
        &cross_s2,
        chi,
        config.interaction_length,
        config.quad_order,
        config.convention,
    )?
    .norm_sqr();

    Ok(RingRates { delta_l, c_same, c_diff })
}

/// Default ring geometry: inner waist w, split at 1.2 w, outer waist 2.5 w,
/// chosen so the two rings overlap by less than 5% in intensity.
pub fn default_ring_geometry(
    inner_waist: f64,
    inner_charge: i32,
    outer_charge: i32,
) -> Result<AnnularComposite> {
    AnnularComposite::new(
        LgMode::new(inner_charge, inner_waist)?,
        LgMode::new(outer_charge, 2.5 * inner_waist)?,
        1.2 * inner_waist,
    )
}
