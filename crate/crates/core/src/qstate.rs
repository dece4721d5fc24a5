//! Finite-dimensional quantum states over labeled OAM bases.
//!
//! States and density matrices are indexed by explicit basis labels ­—
//! either a single topological charge (one photon) or a pair
//! (l_S1, l_S2) for the two-photon space. Labels are kept sorted
//! ascending so serialization is deterministic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::linalg;

pub use crate::linalg::hermitian_eig;

const NORM_TOL: f64 = 1e-12;
const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// A basis label: an OAM charge or a pair of them.
pub trait BasisLabel: Copy + Eq + Ord + std::hash::Hash + std::fmt::Debug {
    fn format_fields(&self) -> String;
    fn parse_fields(fields: &[&str]) -> Option<Self>;
}

impl BasisLabel for i32 {
    fn format_fields(&self) -> String {
        self.to_string()
    }
    fn parse_fields(fields: &[&str]) -> Option<Self> {
        match fields {
            [one] => one.parse().ok(),
            _ => None,
        }
    }
}

impl BasisLabel for (i32, i32) {
    fn format_fields(&self) -> String {
        format!("{} {}", self.0, self.1)
    }
    fn parse_fields(fields: &[&str]) -> Option<Self> {
        match fields {
            [a, b] => Some((a.parse().ok()?, b.parse().ok()?)),
            _ => None,
        }
    }
}

/// A normalized pure state over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<L: BasisLabel> {
    labels: Vec<L>,
    amplitudes: Vec<Complex64>,
}

impl<L: BasisLabel> StateVector<L> {
    /// Build from labels and amplitudes; requires unit norm within 1e-12.
    pub fn new(labels: Vec<L>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "state norm² = {norm_sq} is not 1 within {NORM_TOL:e}"
            )));
        }
        Self::build(labels, amplitudes)
    }

    /// Build from labels and unnormalized amplitudes, dividing out the norm.
    pub fn renormalized(labels: Vec<L>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::EmptySubspace("all amplitudes are zero".into()));
        }
        let norm = norm_sq.sqrt();
        Self::build(labels, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    fn build(labels: Vec<L>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if labels.len() != amplitudes.len() {
            return Err(Error::domain("labels and amplitudes differ in length"));
        }
        if labels.is_empty() {
            return Err(Error::domain("state needs at least one basis label"));
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&i, &j| labels[i].cmp(&labels[j]));
        let sorted_labels: Vec<L> = order.iter().map(|&i| labels[i]).collect();
        if sorted_labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate basis label in {sorted_labels:?}")));
        }
        let sorted_amps = order.iter().map(|&i| amplitudes[i]).collect();
        Ok(StateVector { labels: sorted_labels, amplitudes: sorted_amps })
    }

    /// A basis state |label⟩ in a basis of the given labels.
    pub fn basis_state(labels: Vec<L>, which: L) -> Result<Self> {
        let amps = labels
            .iter()
            .map(|&l| if l == which { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let state = Self::build(labels, amps)?;
        if state.amplitude_of(which).is_none() {
            return Err(Error::LabelMismatch(format!("{which:?} not in basis")));
        }
        Ok(state)
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn amplitude_of(&self, label: L) -> Option<Complex64> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.amplitudes[i])
    }

    /// ⟨self|other⟩, treating labels absent from either side as zero.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&l, a) in self.labels.iter().zip(&self.amplitudes) {
            if let Some(b) = other.amplitude_of(l) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn pure_density(&self) -> DensityMatrix<L> {
        let n = self.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[linalg::idx(n, i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix { labels: self.labels.clone(), data }
    }

    /// Renormalized restriction to the kept labels.
    pub fn post_select(&self, keep: &[L]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::domain("post-selection needs a non-empty label set"));
        }
        let mut labels = Vec::with_capacity(keep.len());
        let mut amps = Vec::with_capacity(keep.len());
        for &k in keep {
            let amp = self
                .amplitude_of(k)
                .ok_or_else(|| Error::LabelMismatch(format!("{k:?} not in state basis")))?;
            labels.push(k);
            amps.push(amp);
        }
        let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if total == 0.0 {
            return Err(Error::EmptySubspace(format!("{keep:?}")));
        }
        Self::renormalized(labels, amps)
    }
}

/// |ψ⟩⟨ψ| — free-function spelling of [`StateVector::pure_density`].
pub fn pure_density<L: BasisLabel>(psi: &StateVector<L>) -> DensityMatrix<L> {
    psi.pure_density()
}

/// Renormalized restriction of a pure state to a label subset.
pub fn post_select<L: BasisLabel>(psi: &StateVector<L>, keep: &[L]) -> Result<StateVector<L>> {
    psi.post_select(keep)
}

/// A trace-one Hermitian matrix over a labeled basis.
///
/// Construction enforces Hermiticity (1e-12 elementwise) and unit trace
/// (1e-10); positivity is checked separately by [`DensityMatrix::min_eigenvalue`]
/// because linear tomography inversion legitimately produces indefinite
/// estimates that are flagged rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<L: BasisLabel> {
    labels: Vec<L>,
    data: Vec<Complex64>,
}

impl<L: BasisLabel> DensityMatrix<L> {
    pub fn new(labels: Vec<L>, data: Vec<Complex64>) -> Result<Self> {
        let n = labels.len();
        if data.len() != n * n {
            return Err(Error::domain(format!(
                "matrix has {} entries for dimension {n}",
                data.len()
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| labels[i].cmp(&labels[j]));
        let sorted_labels: Vec<L> = order.iter().map(|&i| labels[i]).collect();
        if sorted_labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate basis label in {sorted_labels:?}")));
        }
        let mut sorted = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                sorted[linalg::idx(n, i, j)] = data[linalg::idx(n, order[i], order[j])];
            }
        }
        let dev = linalg::hermiticity_deviation(n, &sorted);
        if dev > HERM_TOL {
            return Err(Error::NotHermitian { deviation: dev, tol: HERM_TOL });
        }
        let tr = linalg::trace(n, &sorted).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!("trace = {tr} is not 1 within {TRACE_TOL:e}")));
        }
        Ok(DensityMatrix { labels: sorted_labels, data: sorted })
    }

    /// The maximally mixed state I/n.
    pub fn maximally_mixed(labels: Vec<L>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("need at least one label"));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[linalg::idx(n, i, i)] = Complex64::new(1.0 / n as f64, 0.0);
        }
        Self::new(labels, data)
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[linalg::idx(self.dim(), i, j)]
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.dim(), &self.data).re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eig(self.dim(), &self.data)?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self
            .eigenvalues()?
            .last()
            .expect("density matrix has at least one eigenvalue"))
    }

    /// Full physicality check (PSD within tolerance).
    pub fn validate_physical(&self) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::domain(format!(
                "matrix is not PSD: smallest eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure state over the same labels.
    pub fn expectation(&self, psi: &StateVector<L>) -> Result<f64> {
        if psi.labels() != self.labels {
            return Err(Error::LabelMismatch(format!(
                "state labels {:?} vs matrix labels {:?}",
                psi.labels(),
                self.labels
            )));
        }
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += psi.amplitudes()[i].conj() * self.data[linalg::idx(n, i, j)] * psi.amplitudes()[j];
            }
        }
        Ok(acc.re)
    }

    /// Serialize to the plain-text density-matrix format: a header,
    /// one `label` line per basis label, then row-major (re, im) pairs
    /// with 17 significant digits.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = String::from("density-matrix v1\n");
        out.push_str(&format!("dim {n}\n"));
        for l in &self.labels {
            out.push_str(&format!("label {}\n", l.format_fields()));
        }
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .flat_map(|j| {
                    let z = self.data[linalg::idx(n, i, j)];
                    [g17(z.re), g17(z.im)]
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::domain("empty density-matrix text"))?;
        if header.trim() != "density-matrix v1" {
            return Err(Error::domain(format!("unexpected header {header:?}")));
        }
        let dim_line = lines.next().ok_or_else(|| Error::domain("missing dim line"))?;
        let n: usize = dim_line
            .trim()
            .strip_prefix("dim ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::domain(format!("bad dim line {dim_line:?}")))?;
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::domain("missing label line"))?;
            let fields: Vec<&str> = line
                .trim()
                .strip_prefix("label ")
                .ok_or_else(|| Error::domain(format!("bad label line {line:?}")))?
                .split_whitespace()
                .collect();
            labels.push(
                L::parse_fields(&fields)
                    .ok_or_else(|| Error::domain(format!("unparseable label {line:?}")))?,
            );
        }
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::domain("missing matrix row"))?;
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::domain(format!("bad matrix entry: {e}")))?;
            if nums.len() != 2 * n {
                return Err(Error::domain(format!(
                    "matrix row has {} numbers, expected {}",
                    nums.len(),
                    2 * n
                )));
            }
            for pair in nums.chunks(2) {
                data.push(Complex64::new(pair[0], pair[1]));
            }
        }
        Self::new(labels, data)
    }
}

/// Uhlmann fidelity F = (Tr √(√ρ σ √ρ))².
///
/// When `rho_ideal` is pure this reduces to ⟨ψ|ρ|ψ⟩; the reduction is used
/// as an internal cross-check in debug builds.
pub fn fidelity<L: BasisLabel>(rho: &DensityMatrix<L>, rho_ideal: &DensityMatrix<L>) -> Result<f64> {
    if rho.labels != rho_ideal.labels {
        return Err(Error::LabelMismatch(format!(
            "{:?} vs {:?}",
            rho.labels, rho_ideal.labels
        )));
    }
    let n = rho.dim();
    let sqrt_rho = linalg::sqrt_psd(n, &rho.data, PSD_TOL)?;
    let middle = linalg::matmul(n, &sqrt_rho, &linalg::matmul(n, &rho_ideal.data, &sqrt_rho));
    let root_sum = linalg::trace_sqrt_psd(n, &middle)?;
    let f = (root_sum * root_sum).min(1.0);

    #[cfg(debug_assertions)]
    {
        let ideal_evals = rho_ideal.eigenvalues()?;
        if (ideal_evals[0] - 1.0).abs() < 1e-9 {
            // rank-1 ideal: compare with the pure-state shortcut
            let (_, vecs) = linalg::hermitian_eig(n, &rho_ideal.data)?;
            let psi: Vec<Complex64> = (0..n).map(|i| vecs[linalg::idx(n, i, 0)]).collect();
            let mut shortcut = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    shortcut += psi[i].conj() * rho.data[linalg::idx(n, i, j)] * psi[j];
                }
            }
            debug_assert!(
                (shortcut.re - f).abs() < 1e-9,
                "Uhlmann {f} disagrees with pure shortcut {}",
                shortcut.re
            );
        }
    }

    Ok(f)
}
