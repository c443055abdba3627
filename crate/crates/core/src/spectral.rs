//! Dense Hermitian operators, normalized states and full eigendecompositions.
//!
//! Every Hamiltonian and observable in the crate is a [`HermitianOperator`];
//! every ground state is a [`QuantumState`] over the same [`Basis`] label.

use std::fmt;

use faer::{Mat, Side};
use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::settings::Settings;

pub type C64 = Complex<f64>;

/// Label of the basis a vector or matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    /// Fock levels `0..=n_max`.
    Fock { n_max: usize },
    /// Fock levels tensored with a qubit, index `2 n + q` with `q = 0` the
    /// `sigma_z = +1` state.
    FockQubit { n_max: usize },
    /// Dicke states `|S = N/2, m>`, index `m + N/2`.
    Dicke { n: usize },
    /// Spin-chain product basis, bit `i` set means site `i + 1` is up.
    Chain { n: usize },
    /// Anything else.
    Plain { dim: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Fock { n_max } => n_max + 1,
            Basis::FockQubit { n_max } => 2 * (n_max + 1),
            Basis::Dicke { n } => n + 1,
            Basis::Chain { n } => 1 << n,
            Basis::Plain { dim } => dim,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Fock { n_max } => write!(f, "fock({n_max})"),
            Basis::FockQubit { n_max } => write!(f, "fock_qubit({n_max})"),
            Basis::Dicke { n } => write!(f, "dicke({n})"),
            Basis::Chain { n } => write!(f, "chain({n})"),
            Basis::Plain { dim } => write!(f, "plain({dim})"),
        }
    }
}

/// Dense complex matrix that passed a Hermiticity check on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    basis: Basis,
    entries: Array2<C64>,
}

impl HermitianOperator {
    pub fn new(basis: Basis, entries: Array2<C64>) -> Result<Self> {
        Self::with_tolerance(basis, entries, Settings::default().hermiticity_tol)
    }

    pub fn with_tolerance(basis: Basis, entries: Array2<C64>, tolerance: f64) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows == 0 || rows != cols {
            return Err(Error::DimensionGuard(format!(
                "operator must be square and non-empty, got {rows}x{cols}"
            )));
        }
        if basis.dim() != rows {
            return Err(Error::DimensionGuard(format!(
                "basis {basis} has dimension {} but matrix is {rows}x{rows}",
                basis.dim()
            )));
        }
        let op = HermitianOperator { basis, entries };
        let deviation = op.hermiticity_deviation();
        let allowed = tolerance * op.scale();
        if !(deviation <= allowed) {
            return Err(Error::HermiticityViolation {
                deviation,
                tolerance: allowed,
            });
        }
        Ok(op)
    }

    /// Real diagonal operator.
    pub fn diagonal(basis: Basis, diag: &[f64]) -> Result<Self> {
        if diag.len() != basis.dim() {
            return Err(Error::DimensionGuard(format!(
                "diagonal of length {} for basis {basis}",
                diag.len()
            )));
        }
        let mut m = Array2::zeros((diag.len(), diag.len()));
        for (i, &d) in diag.iter().enumerate() {
            m[[i, i]] = C64::new(d, 0.0);
        }
        Self::new(basis, m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// Largest entry modulus.
    pub fn scale(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let d = (self.entries[[j, k]] - self.entries[[k, j]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    /// `A |v>`.
    pub fn apply(&self, v: ArrayView1<'_, C64>) -> Array1<C64> {
        self.entries.dot(&v)
    }

    /// `self + c * Identity`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[[i, i]] += c;
        }
        HermitianOperator {
            basis: self.basis,
            entries,
        }
    }

    /// Real linear combination `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisGuard {
                left: self.basis.to_string(),
                right: other.basis.to_string(),
            });
        }
        let entries = &self.entries * C64::new(a, 0.0) + &other.entries * C64::new(b, 0.0);
        Ok(HermitianOperator {
            basis: self.basis,
            entries,
        })
    }

    /// Matrix product `self * other`, for operators known to commute (or
    /// squares); the result is re-checked for Hermiticity.
    pub fn product(&self, other: &HermitianOperator) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisGuard {
                left: self.basis.to_string(),
                right: other.basis.to_string(),
            });
        }
        Self::new(self.basis, self.entries.dot(&other.entries))
    }
}

/// Normalized amplitude vector with a basis label.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: Basis,
    amplitudes: Array1<C64>,
}

const NORM_TOL: f64 = 1e-12;

impl QuantumState {
    /// Wraps an already normalized vector.
    pub fn new(basis: Basis, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionGuard(format!(
                "{} amplitudes for basis {basis}",
                amplitudes.len()
            )));
        }
        let norm = l2_norm(amplitudes.view());
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(QuantumState { basis, amplitudes })
    }

    /// Normalizes `amplitudes` first.
    pub fn normalized(basis: Basis, amplitudes: Array1<C64>) -> Result<Self> {
        let norm = l2_norm(amplitudes.view());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        Self::new(basis, amplitudes.mapv(|z| z / norm))
    }

    pub fn basis_state(basis: Basis, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::IndexGuard(format!(
                "basis index {index} out of range for {basis}"
            )));
        }
        let mut v = Array1::zeros(basis.dim());
        v[index] = C64::new(1.0, 0.0);
        Ok(QuantumState { basis, amplitudes: v })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    /// Same state times a unit-modulus phase.
    pub fn with_phase(&self, phase: C64) -> Self {
        let phase = phase / phase.norm();
        QuantumState {
            basis: self.basis,
            amplitudes: self.amplitudes.mapv(|z| z * phase),
        }
    }

    pub fn population(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

fn l2_norm(v: ArrayView1<'_, C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ascending eigenvalues with their orthonormal, phase-fixed eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<QuantumState>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> &QuantumState {
        &self.eigenvectors[0]
    }

    /// `max_k ||H v_k - E_k v_k||`.
    pub fn max_residual(&self, h: &HermitianOperator) -> f64 {
        self.eigenvectors
            .iter()
            .zip(&self.eigenvalues)
            .map(|(v, &e)| {
                let hv = h.apply(v.amplitudes().view());
                let r = hv - v.amplitudes().mapv(|z| z * e);
                l2_norm(r.view())
            })
            .fold(0.0, f64::max)
    }

    /// Residual bound `1e-10 (|E_max| + |E_min| + 1)`.
    pub fn residual_bound(&self) -> f64 {
        let lo = self.eigenvalues.first().copied().unwrap_or(0.0);
        let hi = self.eigenvalues.last().copied().unwrap_or(0.0);
        1e-10 * (hi.abs() + lo.abs() + 1.0)
    }

    /// `max_{jk} |<v_j|v_k> - delta_jk|`. Quadratic in the dimension.
    pub fn max_orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.eigenvectors.iter().enumerate() {
            for (k, b) in self.eigenvectors.iter().enumerate().skip(j) {
                let ip: C64 = a
                    .amplitudes()
                    .iter()
                    .zip(b.amplitudes())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }
}

/// Full dense eigendecomposition with default settings.
pub fn eigendecompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    eigendecompose_with(h, &Settings::default())
}

/// Full dense eigendecomposition.
///
/// Decoupled blocks of the matrix (connected components of its nonzero
/// pattern) are diagonalized separately.
///
/// Each eigenvector is rotated so its largest-magnitude amplitude (first index
/// on ties) is real and positive. Eigenvalues closer than `cluster_tol` form a
/// cluster whose eigenvectors are replaced by a canonical orthonormal basis of
/// the same subspace, built by pivoted Gram-Schmidt on the projected
/// computational basis vectors.
pub fn eigendecompose_with(h: &HermitianOperator, settings: &Settings) -> Result<SpectralDecomposition> {
    let n = h.dim();
    if n > settings.max_dim {
        return Err(Error::DimensionGuard(format!(
            "dimension {n} exceeds the configured maximum {}",
            settings.max_dim
        )));
    }
    let deviation = h.hermiticity_deviation();
    let allowed = settings.hermiticity_tol * h.scale();
    if !(deviation <= allowed) {
        return Err(Error::HermiticityViolation {
            deviation,
            tolerance: allowed,
        });
    }

    let real = h.is_real();
    let blocks = connected_blocks(&h.entries);
    let (eigenvalues, mut vectors) = if blocks.len() == 1 {
        dense_evd(n, real, |i, j| h.entries[[i, j]])?
    } else {
        // Diagonalize each decoupled block and merge by energy; ties keep
        // block order.
        let mut all: Vec<(f64, usize, Array1<C64>)> = Vec::with_capacity(n);
        for (b, idx) in blocks.iter().enumerate() {
            let (vals, vecs) = dense_evd(idx.len(), real, |i, j| h.entries[[idx[i], idx[j]]])?;
            for (val, local) in vals.into_iter().zip(vecs) {
                let mut full = Array1::<C64>::zeros(n);
                for (k, &i) in idx.iter().enumerate() {
                    full[i] = local[k];
                }
                all.push((val, b, full));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.into_iter().map(|(v, _, u)| (v, u)).unzip()
    };

    if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::ConvergenceGuard("eigenvalues not ascending".into()));
    }

    for v in vectors.iter_mut() {
        fix_phase(v);
    }

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() < settings.cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_cluster(&mut vectors[start..end]);
        }
        start = end;
    }

    let basis = h.basis();
    let eigenvectors = vectors
        .into_iter()
        .map(|amplitudes| QuantumState { basis, amplitudes })
        .collect();
    let spec = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    log::trace!("eigendecompose: dim {n}, basis {basis}");
    Ok(spec)
}

/// Dense self-adjoint EVD of the `dim x dim` matrix given by `at`, ascending.
fn dense_evd(dim: usize, real: bool, at: impl Fn(usize, usize) -> C64) -> Result<(Vec<f64>, Vec<Array1<C64>>)> {
    let fail = |e| Error::ConvergenceGuard(format!("eigensolver failed: {e:?}"));
    if real {
        let m = Mat::<f64>::from_fn(dim, dim, |i, j| at(i, j).re);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let u = evd.U();
        let vecs = (0..dim)
            .map(|k| Array1::from_iter((0..dim).map(|i| C64::new(u[(i, k)], 0.0))))
            .collect();
        Ok(((0..dim).map(|k| evd.S()[k]).collect(), vecs))
    } else {
        let m = Mat::<C64>::from_fn(dim, dim, at);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let u = evd.U();
        let vecs = (0..dim)
            .map(|k| Array1::from_iter((0..dim).map(|i| u[(i, k)])))
            .collect();
        Ok(((0..dim).map(|k| evd.S()[k].re).collect(), vecs))
    }
}

/// Index sets of the connected components of the matrix's coupling graph,
/// each sorted, ordered by smallest index.
fn connected_blocks(m: &Array2<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[[i, j]] != C64::new(0.0, 0.0) || m[[j, i]] != C64::new(0.0, 0.0) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[label[r]].push(i);
    }
    blocks
}

fn fix_phase(v: &mut Array1<C64>) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let rot = v[best].conj() / best_mag;
    v.mapv_inplace(|z| z * rot);
    v[best] = C64::new(v[best].re, 0.0);
}

fn canonicalize_cluster(cluster: &mut [Array1<C64>]) {
    let k = cluster.len();
    let dim = cluster[0].len();
    // Diagonal of the cluster projector minus what the accepted vectors cover.
    let mut remaining: Vec<f64> = (0..dim)
        .map(|i| cluster.iter().map(|v| v[i].norm_sqr()).sum())
        .collect();
    let mut accepted: Vec<Array1<C64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut pivot = 0;
        for i in 1..dim {
            if remaining[i] > remaining[pivot] {
                pivot = i;
            }
        }
        // P e_pivot
        let mut w: Array1<C64> = Array1::zeros(dim);
        for v in cluster.iter() {
            let c = v[pivot].conj();
            w.zip_mut_with(v, |a, b| *a += b * c);
        }
        for _ in 0..2 {
            for u in &accepted {
                let ip: C64 = u.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                w.zip_mut_with(u, |a, b| *a -= b * ip);
            }
        }
        let norm = l2_norm(w.view());
        w.mapv_inplace(|z| z / norm);
        fix_phase(&mut w);
        for (i, r) in remaining.iter_mut().enumerate() {
            *r -= w[i].norm_sqr();
        }
        remaining[pivot] = f64::NEG_INFINITY;
        accepted.push(w);
    }
    for (slot, u) in cluster.iter_mut().zip(accepted) {
        *slot = u;
    }
}

/// `E_1 - E_0`.
pub fn energy_gap(spec: &SpectralDecomposition) -> Result<f64> {
    if spec.dim() < 2 {
        return Err(Error::DimensionGuard("energy gap needs dimension >= 2".into()));
    }
    Ok((spec.eigenvalues[1] - spec.eigenvalues[0]).max(0.0))
}

fn check_dims(a: &HermitianOperator, s: &QuantumState) -> Result<()> {
    if a.dim() != s.dim() {
        return Err(Error::DimensionGuard(format!(
            "operator of dimension {} applied to state of dimension {}",
            a.dim(),
            s.dim()
        )));
    }
    Ok(())
}

/// `Re <s|A|s>`.
pub fn expectation(a: &HermitianOperator, s: &QuantumState) -> Result<f64> {
    check_dims(a, s)?;
    let av = a.apply(s.amplitudes().view());
    let z: C64 = s
        .amplitudes()
        .iter()
        .zip(av.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    if z.im.abs() > 1e-12 * a.scale().max(1.0) * s.dim() as f64 {
        log::warn!("expectation: imaginary residue {:e}", z.im);
    }
    Ok(z.re)
}

/// `<A^2> - <A>^2`, evaluated as `||(A - <A>)|s>||^2`.
pub fn variance(a: &HermitianOperator, s: &QuantumState) -> Result<f64> {
    check_dims(a, s)?;
    let amps = s.amplitudes();
    let av = a.apply(amps.view());
    let mean: f64 = amps
        .iter()
        .zip(av.iter())
        .map(|(x, y)| (x.conj() * y).re)
        .sum();
    Ok(av
        .iter()
        .zip(amps.iter())
        .map(|(y, x)| (y - x * mean).norm_sqr())
        .sum())
}

/// `<a|b>`.
pub fn overlap(a: &QuantumState, b: &QuantumState) -> Result<C64> {
    if a.basis() != b.basis() {
        return Err(Error::BasisGuard {
            left: a.basis().to_string(),
            right: b.basis().to_string(),
        });
    }
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `exp(-i t A) |s>` through the spectral decomposition of `A`.
pub fn evolve(s: &QuantumState, generator: &HermitianOperator, t: f64) -> Result<QuantumState> {
    check_dims(generator, s)?;
    let spec = eigendecompose(generator)?;
    let mut out: Array1<C64> = Array1::zeros(s.dim());
    for (v, &e) in spec.eigenvectors.iter().zip(&spec.eigenvalues) {
        let c = overlap_unchecked(v.amplitudes(), s.amplitudes()) * C64::from_polar(1.0, -e * t);
        out.zip_mut_with(v.amplitudes(), |o, x| *o += x * c);
    }
    QuantumState::normalized(s.basis(), out)
}

pub(crate) fn overlap_unchecked(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
