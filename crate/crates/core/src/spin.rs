//! Collective spin operators on the Dicke subspace and site Pauli operators on
//! a periodic chain.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Basis, HermitianOperator, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Maximal-spin subspace of `n` spins-1/2, dimension `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DickeBasis {
    n: usize,
}

impl DickeBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("Dicke basis needs N >= 2, got {n}")));
        }
        Ok(DickeBasis { n })
    }

    pub fn spins(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        Basis::Dicke { n: self.n }
    }

    /// Total spin `S = N/2`.
    pub fn total_spin(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// `m` of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.total_spin()
    }
}

/// Collective `(S_x, S_y, S_z)`.
#[derive(Debug, Clone)]
pub struct CollectiveSpin {
    pub sx: HermitianOperator,
    pub sy: HermitianOperator,
    pub sz: HermitianOperator,
}

impl CollectiveSpin {
    pub fn component(&self, axis: Axis) -> &HermitianOperator {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }
}

pub fn collective_spin_ops(basis: DickeBasis) -> CollectiveSpin {
    let d = basis.spins() + 1;
    let s = basis.total_spin();
    let mut plus = Array2::<C64>::zeros((d, d));
    for k in 0..d - 1 {
        let m = basis.m(k);
        // <m+1|S_+|m>
        plus[[k + 1, k]] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.t().to_owned();
    let sx = (&plus + &minus).mapv(|z| z * 0.5);
    let sy = (&plus - &minus).mapv(|z| z / C64::new(0.0, 2.0));
    let mut sz = Array2::<C64>::zeros((d, d));
    for k in 0..d {
        sz[[k, k]] = C64::new(basis.m(k), 0.0);
    }
    let b = basis.basis();
    CollectiveSpin {
        sx: HermitianOperator::new(b, sx).expect("S_x Hermitian"),
        sy: HermitianOperator::new(b, sy).expect("S_y Hermitian"),
        sz: HermitianOperator::new(b, sz).expect("S_z Hermitian"),
    }
}

/// Periodic chain of `n` spins in the product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainBasis {
    n: usize,
}

impl ChainBasis {
    pub const MIN_SITES: usize = 3;
    pub const MAX_SITES: usize = 14;

    pub fn new(n: usize) -> Result<Self> {
        if !(Self::MIN_SITES..=Self::MAX_SITES).contains(&n) {
            return Err(Error::DimensionGuard(format!(
                "chain length must be in {}..={}, got {n}",
                Self::MIN_SITES,
                Self::MAX_SITES
            )));
        }
        Ok(ChainBasis { n })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn basis(&self) -> Basis {
        Basis::Chain { n: self.n }
    }

    /// `+1` if site `site` (0-based bit) is up in `state`, else `-1`.
    pub fn z_value(state: usize, bit: usize) -> f64 {
        if state >> bit & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Single-site Pauli matrix, `site` counted from 1 (least significant bit).
pub fn site_pauli(basis: ChainBasis, site: usize, axis: Axis) -> Result<HermitianOperator> {
    if site == 0 || site > basis.sites() {
        return Err(Error::IndexGuard(format!(
            "site {site} outside 1..={}",
            basis.sites()
        )));
    }
    let mut m = Array2::<C64>::zeros((basis.dim(), basis.dim()));
    add_pauli(&mut m, site - 1, axis, 1.0);
    HermitianOperator::new(basis.basis(), m)
}

/// `sum_i sigma_axis^(i) / 2`.
pub fn chain_total_spin(basis: ChainBasis, axis: Axis) -> HermitianOperator {
    let mut m = Array2::<C64>::zeros((basis.dim(), basis.dim()));
    for bit in 0..basis.sites() {
        add_pauli(&mut m, bit, axis, 0.5);
    }
    HermitianOperator::new(basis.basis(), m).expect("sum of Paulis is Hermitian")
}

/// Total spin `(S_x, S_y, S_z)` of a chain.
pub fn chain_collective_spin(basis: ChainBasis) -> CollectiveSpin {
    CollectiveSpin {
        sx: chain_total_spin(basis, Axis::X),
        sy: chain_total_spin(basis, Axis::Y),
        sz: chain_total_spin(basis, Axis::Z),
    }
}

/// Adds `coeff * sigma_axis` acting on `bit` to a dense matrix.
pub(crate) fn add_pauli(m: &mut Array2<C64>, bit: usize, axis: Axis, coeff: f64) {
    let dim = m.nrows();
    let mask = 1usize << bit;
    for col in 0..dim {
        let up = col & mask != 0;
        match axis {
            Axis::Z => m[[col, col]] += coeff * if up { 1.0 } else { -1.0 },
            Axis::X => m[[col ^ mask, col]] += coeff,
            // sigma_y |up> = i |down>, sigma_y |down> = -i |up>
            Axis::Y => m[[col ^ mask, col]] += C64::new(0.0, if up { coeff } else { -coeff }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{expectation, QuantumState};

    fn max_abs(m: &Array2<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Array2<C64> {
        a.entries().dot(b.entries()) - b.entries().dot(a.entries())
    }

    #[test]
    fn dicke_two_spins() {
        let s = collective_spin_ops(DickeBasis::new(2).unwrap());
        for (k, m) in [-1.0, 0.0, 1.0].iter().enumerate() {
            assert_eq!(s.sz.entries()[[k, k]].re, *m);
        }
        assert!(DickeBasis::new(1).is_err());
    }

    #[test]
    fn su2_algebra_and_casimir() {
        for n in [2, 5, 10, 31] {
            let b = DickeBasis::new(n).unwrap();
            let s = collective_spin_ops(b);
            let i = C64::new(0.0, 1.0);
            let residue = commutator(&s.sx, &s.sy) - s.sz.entries().mapv(|z| z * i);
            assert!(max_abs(&residue) <= 1e-12);
            let cas = s.sx.entries().dot(s.sx.entries())
                + s.sy.entries().dot(s.sy.entries())
                + s.sz.entries().dot(s.sz.entries());
            let j = b.total_spin();
            let mut target = Array2::<C64>::eye(n + 1);
            target.mapv_inplace(|z| z * j * (j + 1.0));
            assert!(max_abs(&(cas - target)) <= 1e-10);
        }
    }

    #[test]
    fn spin_down_pole() {
        let b = DickeBasis::new(10).unwrap();
        let s = collective_spin_ops(b);
        let pole = QuantumState::basis_state(b.basis(), 0).unwrap();
        assert_eq!(expectation(&s.sz, &pole).unwrap(), -5.0);
        let var = crate::spectral::variance(&s.sx, &pole).unwrap();
        assert!((var - 2.5).abs() < 1e-12);
    }

    #[test]
    fn site_paulis() {
        let b = ChainBasis::new(4).unwrap();
        let down = QuantumState::basis_state(b.basis(), 0).unwrap();
        let z1 = site_pauli(b, 1, Axis::Z).unwrap();
        assert_eq!(expectation(&z1, &down).unwrap(), -1.0);
        let x2 = site_pauli(b, 2, Axis::X).unwrap();
        let sq = x2.entries().dot(x2.entries()) - Array2::<C64>::eye(16);
        assert!(max_abs(&sq) <= 1e-14);
        for i in 1..=4 {
            for j in 1..=4 {
                if i == j {
                    continue;
                }
                for a in Axis::ALL {
                    for c in Axis::ALL {
                        let p = site_pauli(b, i, a).unwrap();
                        let q = site_pauli(b, j, c).unwrap();
                        assert!(max_abs(&commutator(&p, &q)) == 0.0);
                    }
                }
            }
        }
        assert!(matches!(site_pauli(b, 0, Axis::X), Err(Error::IndexGuard(_))));
        assert!(matches!(site_pauli(b, 5, Axis::X), Err(Error::IndexGuard(_))));
        assert!(ChainBasis::new(2).is_err());
        assert!(ChainBasis::new(15).is_err());
    }

    #[test]
    fn single_site_pauli_algebra() {
        let b = ChainBasis::new(3).unwrap();
        let x = site_pauli(b, 2, Axis::X).unwrap();
        let y = site_pauli(b, 2, Axis::Y).unwrap();
        let z = site_pauli(b, 2, Axis::Z).unwrap();
        let two_i = C64::new(0.0, 2.0);
        assert!(max_abs(&(commutator(&x, &y) - z.entries().mapv(|v| v * two_i))) <= 1e-14);
    }

    #[test]
    fn chain_total_spin_is_su2() {
        let b = ChainBasis::new(5).unwrap();
        let s = chain_collective_spin(b);
        let i = C64::new(0.0, 1.0);
        for (a, c, d) in [(&s.sx, &s.sy, &s.sz), (&s.sy, &s.sz, &s.sx), (&s.sz, &s.sx, &s.sy)] {
            let residue = commutator(a, c) - d.entries().mapv(|z| z * i);
            assert!(max_abs(&residue) <= 1e-12);
        }
    }
}
