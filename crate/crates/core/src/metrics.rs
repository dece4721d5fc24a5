//! Entanglement and multiplexing figures of merit: the CHSH parameter,
//! two-photon interference visibilities, the dimensionality witness and the
//! coincidence contrast.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{
    analyzer_projector, coincidence_probability, expected_mean, tomography_basis, DecayModel,
    NoiseModel,
};
use crate::qstate::{DensityMatrix, StateVector};
use crate::rng::CounterRng;

/// Analyzer angles of a CHSH run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub theta_s1: f64,
    pub theta_s1_prime: f64,
    pub theta_s2: f64,
    pub theta_s2_prime: f64,
}

impl ChshSettings {
    /// The settings that maximize S for the cos 2(θ_S1 + θ_S2) fringe:
    /// θ_S1 = π/4, θ'_S1 = 0, θ_S2 = π/8, θ'_S2 = 3π/8.
    pub fn canonical() -> Self {
        use std::f64::consts::PI;
        ChshSettings {
            theta_s1: PI / 4.0,
            theta_s1_prime: 0.0,
            theta_s2: PI / 8.0,
            theta_s2_prime: 3.0 * PI / 8.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta_s1", self.theta_s1),
            ("theta_s1_prime", self.theta_s1_prime),
            ("theta_s2", self.theta_s2),
            ("theta_s2_prime", self.theta_s2_prime),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// The four correlation values entering S, in the order
/// E(θ_S2, θ_S1), E(θ_S2, θ'_S1), E(θ'_S2, θ_S1), E(θ'_S2, θ'_S1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationSet {
    pub e_11: f64,
    pub e_1p: f64,
    pub e_p1: f64,
    pub e_pp: f64,
}

/// Correlation function from the four coincidence counts at
/// (θ1, θ2), (θ1, θ2⊥), (θ1⊥, θ2), (θ1⊥, θ2⊥), where ⊥ is θ + π/2.
pub fn correlation_e(c_11: f64, c_1perp: f64, c_perp1: f64, c_perpperp: f64) -> Result<f64> {
    let counts = [c_11, c_1perp, c_perp1, c_perpperp];
    if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::domain("correlation counts must be finite and non-negative"));
    }
    let total = c_11 + c_1perp + c_perp1 + c_perpperp;
    if total <= 0.0 {
        return Err(Error::UndefinedRatio("zero total counts in correlation".into()));
    }
    Ok((c_11 + c_perpperp - c_1perp - c_perp1) / total)
}

/// CHSH parameter |E(θ2,θ1) − E(θ2,θ1') + E(θ2',θ1) + E(θ2',θ1')|.
pub fn chsh_s(e: &CorrelationSet) -> f64 {
    (e.e_11 - e.e_1p + e.e_p1 + e.e_pp).abs()
}

/// Fringe visibility (c_max − c_min)/(c_max + c_min).
pub fn visibility(c_max: f64, c_min: f64) -> Result<f64> {
    if !c_max.is_finite() || !c_min.is_finite() || c_max < 0.0 || c_min < 0.0 {
        return Err(Error::domain("visibility counts must be finite and non-negative"));
    }
    if c_max + c_min <= 0.0 {
        return Err(Error::UndefinedRatio("zero total counts in visibility".into()));
    }
    Ok((c_max - c_min) / (c_max + c_min))
}

/// Multiplexing contrast (c_same − c_diff)/(c_same + c_diff).
pub fn contrast(c_same: f64, c_diff: f64) -> Result<f64> {
    if !c_same.is_finite() || !c_diff.is_finite() || c_same < 0.0 || c_diff < 0.0 {
        return Err(Error::domain("contrast counts must be finite and non-negative"));
    }
    if c_same + c_diff <= 0.0 {
        return Err(Error::UndefinedRatio("zero total counts in contrast".into()));
    }
    Ok((c_same - c_diff) / (c_same + c_diff))
}

/// Dimensionality-witness bound W_d = 3·D(D−1)/2 − D(D−d) for D measured
/// modes; exceeding W_d certifies entanglement in at least d+1 dimensions.
pub fn witness_bound(d_modes: u32, d: u32) -> Result<f64> {
    if d_modes < 2 {
        return Err(Error::domain(format!("witness needs D >= 2 modes, got {d_modes}")));
    }
    if d < 1 || d > d_modes {
        return Err(Error::domain(format!("dimension d = {d} outside [1, {d_modes}]")));
    }
    let dd = d_modes as f64;
    Ok(3.0 * dd * (dd - 1.0) / 2.0 - dd * (dd - d as f64))
}

/// Visibilities of one two-mode subspace in the three mutually unbiased
/// bases: v_z from the mode basis, v_x from (|a⟩±|b⟩)/√2, v_y from
/// (|a⟩±i|b⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubspaceVisibilities {
    /// The unordered mode pair (a, b), stored with a < b.
    pub pair: (i32, i32),
    pub v_x: f64,
    pub v_y: f64,
    pub v_z: f64,
}

impl SubspaceVisibilities {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("v_x", self.v_x), ("v_y", self.v_y), ("v_z", self.v_z)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.v_x + self.v_y + self.v_z
    }
}

/// One bound entry of a witness report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessBound {
    pub d: u32,
    #[serde(rename = "W_d")]
    pub w_d: f64,
}

/// Witness value, bounds and the certified entanglement dimension.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    #[serde(rename = "D")]
    pub d_modes: u32,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "sigma_W")]
    pub sigma_w: Option<f64>,
    pub bounds: Vec<WitnessBound>,
    pub certified_dimension: u32,
}

impl WitnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness report serializes")
    }

    /// Significance (W − W_d)/σ_W of the strongest violated bound, when a
    /// standard deviation is available.
    pub fn significance(&self) -> Option<f64> {
        let sigma = self.sigma_w?;
        if sigma <= 0.0 || self.certified_dimension < 2 {
            return None;
        }
        let d = self.certified_dimension - 1;
        let bound = self.bounds.iter().find(|b| b.d == d)?;
        Some((self.w - bound.w_d) / sigma)
    }
}

/// Sum the per-subspace visibilities into the witness W and certify the
/// entanglement dimension against the W_d ladder.
///
/// Requires exactly one entry per unordered pair of the D modes.
pub fn witness_w(modes: &[i32], subspaces: &[SubspaceVisibilities]) -> Result<WitnessReport> {
    let d_modes = modes.len() as u32;
    if d_modes < 2 {
        return Err(Error::domain("witness needs at least 2 modes"));
    }
    let mut sorted_modes = modes.to_vec();
    sorted_modes.sort_unstable();
    sorted_modes.dedup();
    if sorted_modes.len() != modes.len() {
        return Err(Error::domain("witness modes must be distinct"));
    }

    let mut expected: Vec<(i32, i32)> = Vec::new();
    for i in 0..sorted_modes.len() {
        for j in i + 1..sorted_modes.len() {
            expected.push((sorted_modes[i], sorted_modes[j]));
        }
    }
    let mut seen: Vec<(i32, i32)> = subspaces
        .iter()
        .map(|s| {
            let (a, b) = s.pair;
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("duplicate subspace pair in witness input"));
    }
    if seen != expected {
        return Err(Error::domain(format!(
            "witness needs one entry per mode pair; expected {expected:?}, got {seen:?}"
        )));
    }
    for s in subspaces {
        s.validate()?;
    }

    let w: f64 = subspaces.iter().map(SubspaceVisibilities::sum).sum();
    let bounds: Vec<WitnessBound> = (1..=d_modes)
        .map(|d| Ok(WitnessBound { d, w_d: witness_bound(d_modes, d)? }))
        .collect::<Result<_>>()?;
    let certified_dimension = bounds
        .iter()
        .filter(|b| w > b.w_d)
        .map(|b| b.d + 1)
        .max()
        .unwrap_or(1);
    Ok(WitnessReport { d_modes, w, sigma_w: None, bounds, certified_dimension })
}

/// Counting mode for the measurement drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountingMode {
    /// Exact expected means (the infinite-count limit).
    Infinite,
    /// Poisson-sampled counts with the given base seed.
    Sampled { seed: u64 },
}

/// The coincidence counts behind one correlation value.
fn correlation_counts(
    rho: &DensityMatrix<(i32, i32)>,
    s1_modes: (i32, i32),
    s2_modes: (i32, i32),
    theta_1: f64,
    theta_2: f64,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    mode: CountingMode,
    stream: u64,
) -> Result<[f64; 4]> {
    use std::f64::consts::FRAC_PI_2;
    let combos = [
        (theta_1, theta_2),
        (theta_1, theta_2 + FRAC_PI_2),
        (theta_1 + FRAC_PI_2, theta_2),
        (theta_1 + FRAC_PI_2, theta_2 + FRAC_PI_2),
    ];
    let mut counts = [0.0; 4];
    for (k, &(t1, t2)) in combos.iter().enumerate() {
        let p1 = analyzer_projector(s1_modes.0, s1_modes.1, t1)?;
        let p2 = analyzer_projector(s2_modes.0, s2_modes.1, t2)?;
        let p = coincidence_probability(rho, &p1, &p2)?;
        let mean = expected_mean(p, decay, noise, duration_s)?;
        counts[k] = match mode {
            CountingMode::Infinite => mean,
            CountingMode::Sampled { seed } => {
                CounterRng::derive(seed, stream * 4 + k as u64).poisson(mean) as f64
            }
        };
    }
    Ok(counts)
}

/// Outcome of a simulated CHSH run.
#[derive(Debug, Clone, Serialize)]
pub struct ChshOutcome {
    pub settings: ChshSettings,
    pub correlations: CorrelationSet,
    pub s: f64,
}

/// Measure the four CHSH correlations of a two-photon state.
///
/// `s1_modes`/`s2_modes` name the analyzer subspace on each arm. In
/// infinite-count mode the outcome is the exact quantum prediction.
#[allow(clippy::too_many_arguments)]
pub fn simulate_chsh(
    rho: &DensityMatrix<(i32, i32)>,
    s1_modes: (i32, i32),
    s2_modes: (i32, i32),
    settings: &ChshSettings,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    mode: CountingMode,
) -> Result<ChshOutcome> {
    settings.validate()?;
    let pairs = [
        (settings.theta_s1, settings.theta_s2),
        (settings.theta_s1_prime, settings.theta_s2),
        (settings.theta_s1, settings.theta_s2_prime),
        (settings.theta_s1_prime, settings.theta_s2_prime),
    ];
    let mut es = [0.0; 4];
    for (k, &(t1, t2)) in pairs.iter().enumerate() {
        let c = correlation_counts(
            rho, s1_modes, s2_modes, t1, t2, decay, noise, duration_s, mode, k as u64,
        )?;
        es[k] = correlation_e(c[0], c[1], c[2], c[3])?;
    }
    let correlations = CorrelationSet { e_11: es[0], e_1p: es[1], e_p1: es[2], e_pp: es[3] };
    Ok(ChshOutcome { settings: *settings, correlations, s: chsh_s(&correlations) })
}

/// Matched/mismatched coincidence sums of one two-mode subspace in the
/// three mutually unbiased bases.
#[derive(Debug, Clone, Copy)]
pub struct SubspaceCounts {
    /// The unordered mode pair (a, b), stored with a < b.
    pub pair: (i32, i32),
    /// (matched, mismatched) count sums per basis.
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl SubspaceCounts {
    pub fn visibilities(&self) -> Result<SubspaceVisibilities> {
        Ok(SubspaceVisibilities {
            pair: self.pair,
            v_x: visibility(self.x.0, self.x.1)?,
            v_y: visibility(self.y.0, self.y.1)?,
            v_z: visibility(self.z.0, self.z.1)?,
        })
    }
}

/// Measure the matched/mismatched coincidence sums of every two-mode
/// subspace of a multi-mode entangled state whose label i pairs S1 mode i
/// with S2 mode i.
///
/// Matched/mismatched combinations per basis:
/// * Z: basis states, matched = same index;
/// * X: (|a⟩±|b⟩)/√2 on both arms, matched = same sign;
/// * Y: (|a⟩±i|b⟩)/√2, matched = opposite signs (the symmetric pair
///   correlates circular bases anti-diagonally).
pub fn subspace_counts(
    rho: &DensityMatrix<(i32, i32)>,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    mode: CountingMode,
) -> Result<Vec<SubspaceCounts>> {
    let labels = rho.labels().to_vec();
    let d = labels.len();
    if d < 2 {
        return Err(Error::domain("need at least two paired modes"));
    }
    let r2 = 1.0 / 2f64.sqrt();
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    let mut stream = 0u64;
    for i in 0..d {
        for j in i + 1..d {
            let (a1, a2) = labels[i];
            let (b1, b2) = labels[j];
            let basis1 = tomography_basis(a1, b1)?;
            let basis2 = tomography_basis(a2, b2)?;
            // basis index: 0 = |a⟩, 1 = |b⟩, 2 = (|a⟩−i|b⟩)/√2, 3 = (|a⟩+|b⟩)/√2
            let minus = |a: i32, b: i32| {
                StateVector::new(
                    vec![a, b],
                    vec![
                        num_complex::Complex64::new(r2, 0.0),
                        num_complex::Complex64::new(-r2, 0.0),
                    ],
                )
            };
            let plus_i = |a: i32, b: i32| {
                StateVector::new(
                    vec![a, b],
                    vec![
                        num_complex::Complex64::new(r2, 0.0),
                        num_complex::Complex64::new(0.0, r2),
                    ],
                )
            };
            let minus1 = minus(a1, b1)?;
            let minus2 = minus(a2, b2)?;
            let plus_i_1 = plus_i(a1, b1)?;
            let plus_i_2 = plus_i(a2, b2)?;

            let mut count = |p1: &StateVector<i32>, p2: &StateVector<i32>| -> Result<f64> {
                let p = coincidence_probability(rho, p1, p2)?;
                let mean = expected_mean(p, decay, noise, duration_s)?;
                stream += 1;
                Ok(match mode {
                    CountingMode::Infinite => mean,
                    CountingMode::Sampled { seed } => {
                        CounterRng::derive(seed, stream).poisson(mean) as f64
                    }
                })
            };

            let zz_match = count(&basis1[0].0, &basis2[0].0)? + count(&basis1[1].0, &basis2[1].0)?;
            let zz_mis = count(&basis1[0].0, &basis2[1].0)? + count(&basis1[1].0, &basis2[0].0)?;
            let xx_match = count(&basis1[3].0, &basis2[3].0)? + count(&minus1, &minus2)?;
            let xx_mis = count(&basis1[3].0, &minus2)? + count(&minus1, &basis2[3].0)?;
            let yy_match = count(&plus_i_1, &basis2[2].0)? + count(&basis1[2].0, &plus_i_2)?;
            let yy_mis = count(&plus_i_1, &plus_i_2)? + count(&basis1[2].0, &basis2[2].0)?;

            out.push(SubspaceCounts {
                pair: if a1 < b1 { (a1, b1) } else { (b1, a1) },
                x: (xx_match, xx_mis),
                y: (yy_match, yy_mis),
                z: (zz_match, zz_mis),
            });
        }
    }
    Ok(out)
}

/// Visibilities of every two-mode subspace; see [`subspace_counts`].
pub fn subspace_visibilities(
    rho: &DensityMatrix<(i32, i32)>,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    mode: CountingMode,
) -> Result<Vec<SubspaceVisibilities>> {
    subspace_counts(rho, decay, noise, duration_s, mode)?
        .iter()
        .map(SubspaceCounts::visibilities)
        .collect()
}

fn resample_visibilities(
    counts: &[SubspaceCounts],
    rng: &mut CounterRng,
) -> Vec<SubspaceVisibilities> {
    counts
        .iter()
        .map(|c| {
            let mut draw_pair = |pair: (f64, f64)| -> f64 {
                let matched = rng.poisson(pair.0.max(0.0)) as f64;
                let mismatched = rng.poisson(pair.1.max(0.0)) as f64;
                if matched + mismatched == 0.0 {
                    0.0
                } else {
                    (matched - mismatched) / (matched + mismatched)
                }
            };
            SubspaceVisibilities {
                pair: c.pair,
                v_x: draw_pair(c.x),
                v_y: draw_pair(c.y),
                v_z: draw_pair(c.z),
            }
        })
        .collect()
}

/// Witness report for a paired multi-mode state, with an optional Poisson
/// Monte Carlo standard deviation over `replicas` resamplings of the
/// measured counts.
pub fn simulate_witness(
    rho: &DensityMatrix<(i32, i32)>,
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    mode: CountingMode,
    replicas: usize,
    mc_seed: u64,
) -> Result<WitnessReport> {
    let modes: Vec<i32> = rho.labels().iter().map(|l| l.0).collect();
    let counts = subspace_counts(rho, decay, noise, duration_s, mode)?;
    let subspaces: Vec<SubspaceVisibilities> = counts
        .iter()
        .map(SubspaceCounts::visibilities)
        .collect::<Result<_>>()?;
    let mut report = witness_w(&modes, &subspaces)?;
    if replicas >= 2 {
        let ws: Vec<f64> = (0..replicas)
            .map(|r| -> Result<f64> {
                let mut rng = CounterRng::derive(mc_seed, r as u64);
                let resampled = resample_visibilities(&counts, &mut rng);
                Ok(witness_w(&modes, &resampled)?.w)
            })
            .collect::<Result<_>>()?;
        let n = ws.len() as f64;
        let mean = ws.iter().sum::<f64>() / n;
        let var = ws.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0);
        report.sigma_w = Some(var.sqrt());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::pure_density;
    use num_complex::Complex64;

    fn bell() -> DensityMatrix<(i32, i32)> {
        let amp = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        pure_density(&StateVector::new(vec![(-28, 28), (-32, 32)], vec![amp, amp]).unwrap())
    }

    fn five_mode_state() -> DensityMatrix<(i32, i32)> {
        let amp = Complex64::new(1.0 / 5f64.sqrt(), 0.0);
        let labels: Vec<(i32, i32)> = (0..5).map(|k| (-4 * k, 4 * k)).collect();
        pure_density(&StateVector::new(labels, vec![amp; 5]).unwrap())
    }

    #[test]
    fn correlation_limits() {
        assert!((correlation_e(100.0, 0.0, 0.0, 100.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation_e(0.0, 50.0, 50.0, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((correlation_e(75.0, 25.0, 25.0, 75.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            correlation_e(0.0, 0.0, 0.0, 0.0),
            Err(Error::UndefinedRatio(_))
        ));
    }

    #[test]
    fn chsh_zero_and_fixture() {
        let zero = CorrelationSet { e_11: 0.0, e_1p: 0.0, e_p1: 0.0, e_pp: 0.0 };
        assert_eq!(chsh_s(&zero), 0.0);
        // back-solved regression values reproducing S = 2.22
        let fixture = CorrelationSet { e_11: -0.555, e_1p: 0.555, e_p1: -0.555, e_pp: -0.555 };
        assert!((chsh_s(&fixture) - 2.22).abs() < 1e-12);
    }

    #[test]
    fn canonical_settings_reach_tsirelson() {
        let outcome = simulate_chsh(
            &bell(),
            (-28, -32),
            (28, 32),
            &ChshSettings::canonical(),
            &DecayModel::default(),
            &NoiseModel::noiseless(1.0),
            1.0,
            CountingMode::Infinite,
        )
        .unwrap();
        assert!((outcome.s - 2.0 * 2f64.sqrt()).abs() < 1e-6, "S = {}", outcome.s);
    }

    #[test]
    fn sampled_chsh_lands_near_calibration() {
        let noise = NoiseModel::chsh_calibrated(50.0, 2.22);
        let outcome = simulate_chsh(
            &bell(),
            (-28, -32),
            (28, 32),
            &ChshSettings::canonical(),
            &DecayModel::default(),
            &noise,
            60.0,
            CountingMode::Sampled { seed: 4 },
        )
        .unwrap();
        assert!(outcome.s > 2.0 && outcome.s < 2.5, "S = {}", outcome.s);
    }

    #[test]
    fn visibility_cases() {
        assert!((visibility(100.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(visibility(50.0, 50.0).unwrap().abs() < 1e-15);
        assert!((visibility(90.0, 10.0).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(visibility(0.0, 0.0), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn contrast_cases() {
        assert!((contrast(100.0, 8.1).unwrap() - 0.85).abs() < 0.005);
        assert!((contrast(7.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(contrast(7.0, 7.0).unwrap().abs() < 1e-15);
        // antisymmetry
        let a = contrast(30.0, 10.0).unwrap();
        let b = contrast(10.0, 30.0).unwrap();
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn witness_bound_values() {
        assert_eq!(witness_bound(5, 3).unwrap(), 20.0);
        assert_eq!(witness_bound(5, 4).unwrap(), 25.0);
        assert_eq!(witness_bound(5, 5).unwrap(), 30.0);
        assert!(witness_bound(5, 6).is_err());
        assert!(witness_bound(1, 1).is_err());
    }

    #[test]
    fn witness_bound_maximum_is_attainable_w() {
        // W_D = 3D(D−1)/2 equals the all-visibilities-1 maximum
        for d_modes in 2..=8u32 {
            let max_w = 3.0 * (d_modes * (d_modes - 1) / 2) as f64;
            assert_eq!(witness_bound(d_modes, d_modes).unwrap(), max_w);
        }
    }

    fn uniform_visibilities(modes: &[i32], v: f64) -> Vec<SubspaceVisibilities> {
        let mut out = Vec::new();
        for i in 0..modes.len() {
            for j in i + 1..modes.len() {
                out.push(SubspaceVisibilities {
                    pair: (modes[i], modes[j]),
                    v_x: v,
                    v_y: v,
                    v_z: v,
                });
            }
        }
        out
    }

    #[test]
    fn witness_certification_ladder() {
        let modes = [0, 4, 8, 12, 16];
        let all_one = witness_w(&modes, &uniform_visibilities(&modes, 1.0)).unwrap();
        assert_eq!(all_one.w, 30.0);
        assert_eq!(all_one.certified_dimension, 5);

        let paper_level = witness_w(&modes, &uniform_visibilities(&modes, 21.93 / 30.0)).unwrap();
        assert!((paper_level.w - 21.93).abs() < 1e-9);
        assert_eq!(paper_level.certified_dimension, 4);

        let zero = witness_w(&modes, &uniform_visibilities(&modes, 0.0)).unwrap();
        assert_eq!(zero.w, 0.0);
        assert_eq!(zero.certified_dimension, 1);
    }

    #[test]
    fn witness_input_validation() {
        let modes = [0, 4, 8];
        let mut vis = uniform_visibilities(&modes, 0.5);
        vis.pop();
        assert!(witness_w(&modes, &vis).is_err());
        let mut vis = uniform_visibilities(&modes, 0.5);
        vis[0].pair = (4, 8); // duplicate of another pair
        assert!(witness_w(&modes, &vis).is_err());
    }

    #[test]
    fn ideal_five_mode_witness_is_maximal() {
        let report = simulate_witness(
            &five_mode_state(),
            &DecayModel::default(),
            &NoiseModel::noiseless(1.0),
            1.0,
            CountingMode::Infinite,
            0,
            0,
        )
        .unwrap();
        assert!((report.w - 30.0).abs() < 1e-6, "W = {}", report.w);
        assert_eq!(report.certified_dimension, 5);
    }

    #[test]
    fn bell_fringe_visibility_is_unit_in_all_bases() {
        let vis = subspace_visibilities(
            &bell(),
            &DecayModel::default(),
            &NoiseModel::noiseless(1.0),
            1.0,
            CountingMode::Infinite,
        )
        .unwrap();
        assert_eq!(vis.len(), 1);
        assert!((vis[0].v_x - 1.0).abs() < 1e-10);
        assert!((vis[0].v_y - 1.0).abs() < 1e-10);
        assert!((vis[0].v_z - 1.0).abs() < 1e-10);
    }

    #[test]
    fn witness_report_json_fields() {
        let modes = [0, 4, 8, 12, 16];
        let mut report = witness_w(&modes, &uniform_visibilities(&modes, 0.731)).unwrap();
        report.sigma_w = Some(0.55);
        let json = report.to_json();
        for key in ["\"D\"", "\"W\"", "\"sigma_W\"", "\"bounds\"", "\"W_d\"", "\"certified_dimension\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let sig = report.significance().unwrap();
        assert!((sig - (report.w - 20.0) / 0.55).abs() < 1e-12);
    }
}
