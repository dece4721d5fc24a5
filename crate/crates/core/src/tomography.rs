//! Two-qubit density-matrix reconstruction from 16 coincidence settings.
//!
//! Both arms are projected onto the four-state grid of [`tomography_basis`],
//! giving 16 count records. `linear_reconstruct` inverts the measurement
//! model directly (fast, possibly unphysical); `mle_reconstruct` maximizes
//! the Poisson likelihood over a Cholesky parameterization, so its output
//! is positive semidefinite with unit trace by construction. Poisson
//! uncertainty propagates through `mc_uncertainty` replicas.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{minimize_polished, MinimizeResult};
use crate::linalg;
use crate::measurement::{
    coincidence_probability, expected_mean, tomography_basis, CoincidenceRecord, DecayModel,
    NoiseModel,
};
use crate::qstate::{DensityMatrix, StateVector};
use crate::rng::CounterRng;

/// A complete 16-setting tomography data set over the two-mode subspaces
/// (a1, b1) on signal 1 and (a2, b2) on signal 2.
#[derive(Debug, Clone)]
pub struct TomographyRun {
    pub s1_modes: (i32, i32),
    pub s2_modes: (i32, i32),
    /// Records in s1-major order: index 4·i + j pairs the i-th signal-1
    /// projector with the j-th signal-2 projector.
    pub records: Vec<CoincidenceRecord>,
}

impl TomographyRun {
    pub fn new(
        s1_modes: (i32, i32),
        s2_modes: (i32, i32),
        records: Vec<CoincidenceRecord>,
    ) -> Result<Self> {
        if s1_modes.0 == s1_modes.1 || s2_modes.0 == s2_modes.1 {
            return Err(Error::domain("tomography subspace needs distinct charges per arm"));
        }
        if records.len() != 16 {
            return Err(Error::domain(format!(
                "tomography needs exactly 16 records, got {}",
                records.len()
            )));
        }
        let duration = records[0].duration_s;
        if records.iter().any(|r| r.duration_s != duration) {
            return Err(Error::domain("all tomography records must share one duration"));
        }
        if records.iter().any(|r| r.counts < 0.0) {
            return Err(Error::domain("counts must be non-negative"));
        }
        if records.iter().map(|r| r.counts).sum::<f64>() <= 0.0 {
            return Err(Error::domain("tomography needs a positive total count"));
        }
        Ok(TomographyRun { s1_modes, s2_modes, records })
    }

    pub fn duration_s(&self) -> f64 {
        self.records[0].duration_s
    }

    pub fn counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.counts).collect()
    }

    /// Product-basis labels of the reconstruction space, sorted ascending.
    pub fn labels(&self) -> Vec<(i32, i32)> {
        let mut labels = vec![
            (self.s1_modes.0, self.s2_modes.0),
            (self.s1_modes.0, self.s2_modes.1),
            (self.s1_modes.1, self.s2_modes.0),
            (self.s1_modes.1, self.s2_modes.1),
        ];
        labels.sort();
        labels
    }

    /// The 16 projector pairs in record order.
    pub fn projector_grid(&self) -> Result<Vec<(StateVector<i32>, StateVector<i32>)>> {
        let b1 = tomography_basis(self.s1_modes.0, self.s1_modes.1)?;
        let b2 = tomography_basis(self.s2_modes.0, self.s2_modes.1)?;
        let mut grid = Vec::with_capacity(16);
        for (p1, _) in &b1 {
            for (p2, _) in &b2 {
                grid.push((p1.clone(), p2.clone()));
            }
        }
        Ok(grid)
    }

    /// Projection vectors v_k over the sorted product labels, so that the
    /// Born probability of setting k is ⟨v_k|ρ|v_k⟩.
    fn projection_vectors(&self) -> Result<Vec<[Complex64; 4]>> {
        let labels = self.labels();
        let grid = self.projector_grid()?;
        Ok(grid
            .iter()
            .map(|(p1, p2)| {
                let mut v = [Complex64::new(0.0, 0.0); 4];
                for (slot, &(l1, l2)) in labels.iter().enumerate() {
                    let a = p1.amplitude_of(l1).unwrap_or(Complex64::new(0.0, 0.0));
                    let b = p2.amplitude_of(l2).unwrap_or(Complex64::new(0.0, 0.0));
                    v[slot] = a * b;
                }
                v
            })
            .collect())
    }
}

/// Simulate the 16 tomography settings for a state over the product labels.
///
/// With `infinite_counts` the records carry exact expected means instead of
/// Poisson draws.
#[allow(clippy::too_many_arguments)]
pub fn forward_simulate(
    rho: &DensityMatrix<(i32, i32)>,
    s1_modes: (i32, i32),
    s2_modes: (i32, i32),
    decay: &DecayModel,
    noise: &NoiseModel,
    duration_s: f64,
    seed: u64,
    infinite_counts: bool,
) -> Result<TomographyRun> {
    let b1 = tomography_basis(s1_modes.0, s1_modes.1)?;
    let b2 = tomography_basis(s2_modes.0, s2_modes.1)?;
    let mut records = Vec::with_capacity(16);
    for (i, (p1, name1)) in b1.iter().enumerate() {
        for (j, (p2, name2)) in b2.iter().enumerate() {
            let k = (4 * i + j) as u64;
            let p = coincidence_probability(rho, p1, p2)?;
            let mean = expected_mean(p, decay, noise, duration_s)?;
            let counts = if infinite_counts {
                mean
            } else {
                CounterRng::derive(seed, k).poisson(mean) as f64
            };
            records.push(CoincidenceRecord {
                setting_s1: name1.clone(),
                setting_s2: name2.clone(),
                theta_s1: None,
                theta_s2: None,
                counts,
                duration_s,
                seed,
            });
        }
    }
    TomographyRun::new(s1_modes, s2_modes, records)
}

/// Linear-inversion estimate plus its physicality diagnosis.
#[derive(Debug, Clone)]
pub struct LinearReconstruction {
    pub rho: DensityMatrix<(i32, i32)>,
    pub min_eigenvalue: f64,
    /// False when the inversion produced negative eigenvalues beyond 1e-10.
    pub physical: bool,
}

/// Background handling during reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackgroundModel {
    /// Raw rates are taken as pure signal (the default; uniform accidentals
    /// then appear as an admixed maximally mixed component, which matches
    /// how raw counting data is usually reported).
    Zero,
    /// A known accidental rate (counts/s) subtracted from every setting.
    Known(f64),
}

impl BackgroundModel {
    fn rate(&self) -> f64 {
        match self {
            BackgroundModel::Zero => 0.0,
            BackgroundModel::Known(r) => *r,
        }
    }
}

/// Direct inversion of the 16 normalized rates.
///
/// The result is Hermitian with unit trace by construction but may carry
/// negative eigenvalues at finite counts; the `physical` flag reports that.
pub fn linear_reconstruct(
    run: &TomographyRun,
    background: BackgroundModel,
) -> Result<LinearReconstruction> {
    let duration = run.duration_s();
    let rates: Vec<f64> = run
        .records
        .iter()
        .map(|r| r.counts / duration - background.rate())
        .collect();
    // The four basis-pair settings {0,1,4,5} form a complete product basis,
    // so their rate sum estimates the overall scale.
    let scale: f64 = [0usize, 1, 4, 5].iter().map(|&k| rates[k]).sum();
    if scale <= 0.0 {
        return Err(Error::domain("basis-pair rates sum to zero; cannot normalize"));
    }
    let q: Vec<f64> = rates.iter().map(|r| r / scale).collect();

    let v = run.projection_vectors()?;
    // Unknown ordering: 4 diagonal entries, then (re, im) for each i<j.
    let pairs: Vec<(usize, usize)> =
        (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let mut a = vec![0.0f64; 16 * 16];
    let mut b = vec![0.0f64; 16];
    for (k, vk) in v.iter().enumerate() {
        for d in 0..4 {
            a[k * 16 + d] = vk[d].norm_sqr();
        }
        for (col, &(i, j)) in pairs.iter().enumerate() {
            let w = vk[i].conj() * vk[j];
            a[k * 16 + 4 + 2 * col] = 2.0 * w.re;
            a[k * 16 + 4 + 2 * col + 1] = -2.0 * w.im;
        }
        b[k] = q[k];
    }
    let x = linalg::solve_real(16, &mut a, &mut b)?;

    let mut data = vec![Complex64::new(0.0, 0.0); 16];
    for d in 0..4 {
        data[linalg::idx(4, d, d)] = Complex64::new(x[d], 0.0);
    }
    for (col, &(i, j)) in pairs.iter().enumerate() {
        let z = Complex64::new(x[4 + 2 * col], x[4 + 2 * col + 1]);
        data[linalg::idx(4, i, j)] = z;
        data[linalg::idx(4, j, i)] = z.conj();
    }
    // Renormalize the trace exactly; inversion noise leaves it near 1.
    let tr = linalg::trace(4, &data).re;
    if tr <= 0.0 {
        return Err(Error::domain(format!("inverted matrix has non-positive trace {tr}")));
    }
    for z in data.iter_mut() {
        *z /= tr;
    }
    let rho = DensityMatrix::new(run.labels(), data)?;
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(LinearReconstruction { rho, min_eigenvalue, physical: min_eigenvalue >= -1e-10 })
}

/// Options for the likelihood maximization.
#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub background: BackgroundModel,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions { background: BackgroundModel::Zero, max_iterations: 20_000, tolerance: 1e-10 }
    }
}

/// Result of the maximum-likelihood reconstruction.
#[derive(Debug, Clone)]
pub struct MleReconstruction {
    pub rho: DensityMatrix<(i32, i32)>,
    pub converged: bool,
    pub iterations: usize,
    /// Fitted overall rate scale (counts per unit Born probability).
    pub n_scale: f64,
    pub log_likelihood: f64,
}

/// ρ(T) = T T†/Tr(T T†) from the 16 real Cholesky parameters.
fn rho_from_params(params: &[f64]) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); 16];
    for d in 0..4 {
        t[linalg::idx(4, d, d)] = Complex64::new(params[d], 0.0);
    }
    let mut p = 4;
    for i in 1..4 {
        for j in 0..i {
            t[linalg::idx(4, i, j)] = Complex64::new(params[p], params[p + 1]);
            p += 2;
        }
    }
    let tt = linalg::matmul(4, &t, &linalg::adjoint(4, &t));
    let tr = linalg::trace(4, &tt).re.max(1e-300);
    tt.into_iter().map(|z| z / tr).collect()
}

fn cholesky_params(rho: &[Complex64]) -> Result<Vec<f64>> {
    // ridge keeps the factorization strictly positive definite
    let mut ridged = rho.to_vec();
    for d in 0..4 {
        ridged[linalg::idx(4, d, d)] += Complex64::new(1e-8, 0.0);
    }
    let l = linalg::cholesky(4, &ridged)?;
    let mut params = Vec::with_capacity(16);
    for d in 0..4 {
        params.push(l[linalg::idx(4, d, d)].re);
    }
    for i in 1..4 {
        for j in 0..i {
            let z = l[linalg::idx(4, i, j)];
            params.push(z.re);
            params.push(z.im);
        }
    }
    Ok(params)
}

fn born_probability(v: &[Complex64; 4], rho: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i].conj() * rho[linalg::idx(4, i, j)] * v[j];
        }
    }
    acc.re.max(0.0)
}

/// Maximum-likelihood reconstruction over the physical set.
///
/// The 17-parameter search (16 Cholesky + log rate scale) starts from the
/// linear-inversion estimate projected onto the physical cone.
pub fn mle_reconstruct(run: &TomographyRun, options: &MleOptions) -> Result<MleReconstruction> {
    let duration = run.duration_s();
    let counts = run.counts();
    let background_counts = options.background.rate() * duration;
    let v = run.projection_vectors()?;

    // Seed: physical projection of the linear inversion.
    let linear = linear_reconstruct(run, options.background)?;
    let seed_rho = {
        let data = linear.rho.data();
        let (vals, vecs) = linalg::hermitian_eig(4, data)?;
        let clamped: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let mut m = vec![Complex64::new(0.0, 0.0); 16];
        for (k, &lambda) in clamped.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    m[linalg::idx(4, i, j)] += (lambda / total)
                        * vecs[linalg::idx(4, i, k)]
                        * vecs[linalg::idx(4, j, k)].conj();
                }
            }
        }
        m
    };
    let mut x0 = cholesky_params(&seed_rho)?;
    let q0: Vec<f64> = v.iter().map(|vk| born_probability(vk, &seed_rho)).collect();
    let q0_sum: f64 = q0.iter().sum();
    let signal_total: f64 =
        counts.iter().map(|&n| (n - background_counts).max(0.0)).sum();
    let n0 = (signal_total / q0_sum.max(1e-12)).max(1e-9);
    x0.push(n0.ln());

    let neg_log_likelihood = |p: &[f64]| {
        let rho = rho_from_params(&p[..16]);
        let scale = p[16].exp();
        let mut nll = 0.0;
        for (k, vk) in v.iter().enumerate() {
            let mu = (scale * born_probability(vk, &rho) + background_counts).max(1e-300);
            nll += mu - counts[k] * mu.ln();
        }
        nll
    };

    let MinimizeResult { x, fmin, iterations, converged } =
        minimize_polished(&neg_log_likelihood, &x0, options.tolerance, options.max_iterations)?;

    let data = rho_from_params(&x[..16]);
    let rho = DensityMatrix::new(run.labels(), data)?;
    Ok(MleReconstruction {
        rho,
        converged,
        iterations,
        n_scale: x[16].exp(),
        log_likelihood: -fmin,
    })
}

/// Monte Carlo statistics of a reconstruction-derived metric.
#[derive(Debug, Clone, Copy)]
pub struct McStats {
    pub mean: f64,
    pub std: f64,
    pub used_replicas: usize,
    pub failed_replicas: usize,
}

/// Poisson-resample the observed counts, re-reconstruct, and report the
/// mean and standard deviation of `metric` across replicas. Failed
/// replicas are excluded and counted.
pub fn mc_uncertainty(
    run: &TomographyRun,
    replicas: usize,
    metric: impl Fn(&DensityMatrix<(i32, i32)>) -> f64 + Sync,
    seed: u64,
    options: &MleOptions,
) -> Result<McStats> {
    if replicas < 2 {
        return Err(Error::domain("Monte Carlo uncertainty needs at least 2 replicas"));
    }
    let outcomes: Vec<Option<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = CounterRng::derive(seed, r as u64);
            let records: Vec<CoincidenceRecord> = run
                .records
                .iter()
                .map(|rec| CoincidenceRecord {
                    counts: rng.poisson(rec.counts.max(0.0)) as f64,
                    ..rec.clone()
                })
                .collect();
            let resampled = TomographyRun::new(run.s1_modes, run.s2_modes, records).ok()?;
            let recon = mle_reconstruct(&resampled, options).ok()?;
            Some(metric(&recon.rho))
        })
        .collect();

    let values: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let failed = replicas - values.len();
    if values.len() < 2 {
        return Err(Error::domain(format!(
            "only {} of {replicas} replicas succeeded",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McStats { mean, std: var.sqrt(), used_replicas: values.len(), failed_replicas: failed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{fidelity, pure_density};

    fn bell_rho() -> DensityMatrix<(i32, i32)> {
        let amp = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let full = StateVector::renormalized(
            vec![(0, 0), (0, 2), (2, 0), (2, 2)],
            vec![Complex64::new(0.0, 0.0), amp, amp, Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        pure_density(&full)
    }

    fn random_physical(seed: u64) -> DensityMatrix<(i32, i32)> {
        let mut rng = CounterRng::new(seed);
        let mut g = vec![Complex64::new(0.0, 0.0); 16];
        for z in g.iter_mut() {
            *z = Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
        }
        let m = linalg::matmul(4, &g, &linalg::adjoint(4, &g));
        let tr = linalg::trace(4, &m).re;
        let data: Vec<Complex64> = m.into_iter().map(|z| z / tr).collect();
        DensityMatrix::new(vec![(0, 0), (0, 2), (2, 0), (2, 2)], data).unwrap()
    }

    fn infinite_run(rho: &DensityMatrix<(i32, i32)>) -> TomographyRun {
        forward_simulate(
            rho,
            (0, 2),
            (0, 2),
            &DecayModel::default(),
            &NoiseModel::noiseless(1e6),
            1.0,
            0,
            true,
        )
        .unwrap()
    }

    #[test]
    fn linear_roundtrip_noiseless() {
        let rho = bell_rho();
        let run = infinite_run(&rho);
        let rec = linear_reconstruct(&run, BackgroundModel::Zero).unwrap();
        assert!(rec.physical);
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (rec.rho.get(i, j) - rho.get(i, j)).norm() < 1e-9,
                    "({i},{j}): {} vs {}",
                    rec.rho.get(i, j),
                    rho.get(i, j)
                );
            }
        }
    }

    #[test]
    fn linear_roundtrip_random_states() {
        for seed in 0..20 {
            let rho = random_physical(seed);
            let run = infinite_run(&rho);
            let rec = linear_reconstruct(&run, BackgroundModel::Zero).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((rec.rho.get(i, j) - rho.get(i, j)).norm() < 1e-9, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn linear_maximally_mixed() {
        let labels = vec![(0, 0), (0, 2), (2, 0), (2, 2)];
        let rho = DensityMatrix::maximally_mixed(labels).unwrap();
        let run = infinite_run(&rho);
        let rec = linear_reconstruct(&run, BackgroundModel::Zero).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((rec.rho.get(i, j) - Complex64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn noisy_linear_inversion_can_be_unphysical() {
        // at mean counts ~100 the inversion should go indefinite sometimes
        let rho = bell_rho();
        let mut flagged = 0;
        for seed in 0..100 {
            let run = forward_simulate(
                &rho,
                (0, 2),
                (0, 2),
                &DecayModel::default(),
                &NoiseModel::noiseless(400.0),
                1.0,
                seed,
                false,
            )
            .unwrap();
            let rec = linear_reconstruct(&run, BackgroundModel::Zero).unwrap();
            if !rec.physical {
                flagged += 1;
            }
        }
        assert!(flagged >= 1, "expected at least one unphysical inversion, got {flagged}");
    }

    #[test]
    fn mle_roundtrip_bell() {
        let rho = bell_rho();
        let run = infinite_run(&rho);
        let rec = mle_reconstruct(&run, &MleOptions::default()).unwrap();
        let f = fidelity(&rec.rho, &rho).unwrap();
        assert!(f >= 0.9999, "fidelity {f}");
        assert!((rec.rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mle_output_always_physical() {
        // high-noise run: tiny counts
        let rho = bell_rho();
        let run = forward_simulate(
            &rho,
            (0, 2),
            (0, 2),
            &DecayModel::default(),
            &NoiseModel { background_rate: 5.0, signal_rate_scale: 30.0 },
            1.0,
            3,
            false,
        )
        .unwrap();
        let rec = mle_reconstruct(&run, &MleOptions::default()).unwrap();
        assert!((rec.rho.trace() - 1.0).abs() < 1e-12);
        let min_eig = rec.rho.min_eigenvalue().unwrap();
        assert!(min_eig >= -1e-12, "min eigenvalue {min_eig}");
    }

    #[test]
    fn mle_equal_counts_gives_maximally_mixed() {
        let records: Vec<CoincidenceRecord> = (0..16)
            .map(|k| CoincidenceRecord {
                setting_s1: format!("s1-{}", k / 4),
                setting_s2: format!("s2-{}", k % 4),
                theta_s1: None,
                theta_s2: None,
                counts: 1000.0,
                duration_s: 1.0,
                seed: 0,
            })
            .collect();
        let run = TomographyRun::new((0, 2), (0, 2), records).unwrap();
        let rec = mle_reconstruct(&run, &MleOptions::default()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(run.labels()).unwrap();
        // trace distance within 0.02
        let mut diff = vec![Complex64::new(0.0, 0.0); 16];
        for i in 0..16 {
            diff[i] = rec.rho.data()[i] - mixed.data()[i];
        }
        let (vals, _) = linalg::hermitian_eig(4, &diff).unwrap();
        let trace_dist: f64 = 0.5 * vals.iter().map(|v| v.abs()).sum::<f64>();
        assert!(trace_dist < 0.02, "trace distance {trace_dist}");
    }

    #[test]
    fn mle_agrees_with_linear_on_noiseless_data() {
        let rho = random_physical(5);
        let run = infinite_run(&rho);
        let lin = linear_reconstruct(&run, BackgroundModel::Zero).unwrap();
        let mle = mle_reconstruct(&run, &MleOptions::default()).unwrap();
        let mut diff = vec![Complex64::new(0.0, 0.0); 16];
        for i in 0..16 {
            diff[i] = lin.rho.data()[i] - mle.rho.data()[i];
        }
        let (vals, _) = linalg::hermitian_eig(4, &diff).unwrap();
        let trace_dist: f64 = 0.5 * vals.iter().map(|v| v.abs()).sum::<f64>();
        assert!(trace_dist < 1e-6, "trace distance {trace_dist}");
    }

    #[test]
    fn run_validation() {
        let rec = CoincidenceRecord {
            setting_s1: "x".into(),
            setting_s2: "y".into(),
            theta_s1: None,
            theta_s2: None,
            counts: 1.0,
            duration_s: 1.0,
            seed: 0,
        };
        assert!(TomographyRun::new((0, 2), (0, 2), vec![rec.clone(); 15]).is_err());
        let mut records = vec![rec.clone(); 16];
        records[3].duration_s = 2.0;
        assert!(TomographyRun::new((0, 2), (0, 2), records).is_err());
        let zero = CoincidenceRecord { counts: 0.0, ..rec };
        assert!(TomographyRun::new((0, 2), (0, 2), vec![zero; 16]).is_err());
    }

    #[test]
    fn mc_uncertainty_minimal_and_concentrated() {
        let rho = bell_rho();
        let ideal = rho.clone();
        let run = forward_simulate(
            &rho,
            (0, 2),
            (0, 2),
            &DecayModel::default(),
            &NoiseModel::noiseless(1e8),
            1.0,
            0,
            true,
        )
        .unwrap();
        let stats = mc_uncertainty(
            &run,
            2,
            |r| fidelity(r, &ideal).unwrap_or(f64::NAN),
            7,
            &MleOptions::default(),
        )
        .unwrap();
        assert!(stats.mean.is_finite() && stats.std.is_finite());

        let stats = mc_uncertainty(
            &run,
            20,
            |r| fidelity(r, &ideal).unwrap_or(f64::NAN),
            11,
            &MleOptions::default(),
        )
        .unwrap();
        // counts of 1e8 concentrate the fidelity tightly
        assert!(stats.std < 1e-3, "std {}", stats.std);
        assert!(stats.mean > 0.999, "mean {}", stats.mean);
    }
}
