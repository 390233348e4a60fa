//! Symmetry observables (N, S_z, S², irrep number parity, irrep weights)
//! and configuration-state-function bases.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::IrrepLabel;
use crate::fock::{enumerate_sector, matrix_rep, Coeff, CsrMatrix, Determinant, FermionPolynomial, Op, SectorBasis, StateVector};

/// Normalization tolerance accepted by [`symmetry_report`].
pub const NORM_TOL: f64 = 1e-8;
/// Eigenspace membership threshold for S².
pub const SPIN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub n_expect: f64,
    pub sz_expect: f64,
    pub s2_expect: f64,
    pub s2_std: f64,
    pub irrep_weights: BTreeMap<IrrepLabel, f64>,
}

/// `S² = S_z² + S_z + S₋S₊` as a fermionic polynomial.
pub fn s2_polynomial(n_spatial: usize) -> FermionPolynomial {
    let half = Coeff::rational(1, 2);
    let mut sz = FermionPolynomial::zero();
    let mut sp = FermionPolynomial::zero();
    let mut sm = FermionPolynomial::zero();
    for p in 0..n_spatial {
        let (u, d) = ((2 * p) as u8, (2 * p + 1) as u8);
        sz = sz + half * FermionPolynomial::number(u as usize) - half * FermionPolynomial::number(d as usize);
        sp = sp + FermionPolynomial::from_word(Coeff::ONE, &[Op::Cre(u), Op::Ann(d)]);
        sm = sm + FermionPolynomial::from_word(Coeff::ONE, &[Op::Cre(d), Op::Ann(u)]);
    }
    &(&sz * &sz) + &sz + &sm * &sp
}

pub fn s2_matrix(basis: &SectorBasis) -> CsrMatrix {
    matrix_rep(&s2_polynomial(basis.n_spatial()), basis)
}

/// Diagonal ±1 parity of the electron count in the orbitals of one irrep.
pub fn parity_matrix(irrep: IrrepLabel, basis: &SectorBasis, orbital_irreps: &[IrrepLabel]) -> CsrMatrix {
    let mask: u64 = orbital_irreps
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == irrep)
        .map(|(p, _)| 0b11u64 << (2 * p))
        .fold(0, |a, b| a | b);
    let d: Vec<f64> = basis.words().iter().map(|w| if (w & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect();
    CsrMatrix::from_diagonal(&d)
}

/// Observables prepared once per sector for repeated reports.
#[derive(Clone, Debug)]
pub struct SymmetryObservables {
    basis: Arc<SectorBasis>,
    s2: CsrMatrix,
    n: Vec<f64>,
    sz: Vec<f64>,
    irreps: Vec<IrrepLabel>,
}

impl SymmetryObservables {
    pub fn new(basis: Arc<SectorBasis>, orbital_irreps: &[IrrepLabel]) -> Self {
        let s2 = s2_matrix(&basis);
        let n = basis.iter().map(|d| d.n_electrons() as f64).collect();
        let sz = basis.iter().map(|d| d.sz2() as f64 / 2.0).collect();
        let irreps = basis.iter().map(|d| d.irrep(orbital_irreps)).collect();
        SymmetryObservables { basis, s2, n, sz, irreps }
    }

    pub fn s2(&self) -> &CsrMatrix {
        &self.s2
    }

    pub fn report(&self, v: &StateVector) -> Result<SymmetryReport> {
        if v.amps.len() != self.basis.len() {
            return Err(Error::InvalidInput("state does not match the observables' basis".into()));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("state is not normalized (norm {norm:.12})")));
        }
        let w: Vec<f64> = v.amps.iter().map(|a| a * a).collect();
        let n_expect = w.iter().zip(&self.n).map(|(a, b)| a * b).sum();
        let sz_expect = w.iter().zip(&self.sz).map(|(a, b)| a * b).sum();
        let sv = self.s2.matvec(&v.amps);
        let s2_expect: f64 = v.amps.iter().zip(&sv).map(|(a, b)| a * b).sum();
        let s4: f64 = sv.iter().map(|x| x * x).sum();
        let s2_std = (s4 - s2_expect * s2_expect).max(0.0).sqrt();
        let mut irrep_weights = BTreeMap::new();
        for (wi, l) in w.iter().zip(&self.irreps) {
            *irrep_weights.entry(*l).or_insert(0.0) += wi / (norm * norm);
        }
        Ok(SymmetryReport { n_expect, sz_expect, s2_expect, s2_std, irrep_weights })
    }
}

pub fn symmetry_report(v: &StateVector, orbital_irreps: &[IrrepLabel]) -> Result<SymmetryReport> {
    SymmetryObservables::new(v.basis.clone(), orbital_irreps).report(v)
}

/// Orthonormal basis of an S² eigenspace in a sector.
#[derive(Clone, Debug)]
pub struct CsfBasis {
    /// `dim(sector) × n_csf`
    pub columns: DMatrix<f64>,
    /// `None` for the plain determinant basis.
    pub spin: Option<f64>,
    pub irrep: Option<IrrepLabel>,
}

impl CsfBasis {
    /// Unit vectors on every determinant: the carrier for pools that do not
    /// conserve S².
    pub fn determinants(basis: &SectorBasis) -> Self {
        CsfBasis { columns: DMatrix::identity(basis.len(), basis.len()), spin: None, irrep: basis.constraints().irrep }
    }

    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// S(S+1) eigenspace of S² on `basis`, with columns fixed by Gram–Schmidt
/// of the projected unit vectors in determinant order.
pub fn csf_basis(basis: &SectorBasis, total_s: f64) -> Result<CsfBasis> {
    if let Some(sz2) = basis.constraints().sz2 {
        if (sz2.unsigned_abs() as f64) > 2.0 * total_s + 1e-12 || (2.0 * total_s - sz2 as f64).rem_euclid(2.0) > 1e-12 {
            return Err(Error::InvalidInput(format!("S = {total_s} is incompatible with 2S_z = {sz2}")));
        }
    }
    let n = basis.len();
    let target = total_s * (total_s + 1.0);
    let eig = SymmetricEigen::new(s2_matrix(basis).to_dense());
    let cols: Vec<usize> = (0..n).filter(|&i| (eig.eigenvalues[i] - target).abs() < SPIN_TOL).collect();
    let k = cols.len();
    let v = eig.eigenvectors.select_columns(&cols);
    let mut out = DMatrix::<f64>::zeros(n, k);
    let mut found = 0;
    for i in 0..n {
        if found == k {
            break;
        }
        // projector column P e_i = V (row i of V)ᵀ
        let mut c = &v * v.row(i).transpose();
        for _ in 0..2 {
            for j in 0..found {
                let d = out.column(j).dot(&c);
                c -= out.column(j) * d;
            }
        }
        let nrm = c.norm();
        if nrm > 1e-6 {
            out.set_column(found, &(c / nrm));
            found += 1;
        }
    }
    if found != k {
        return Err(Error::Numerical(format!("CSF orthonormalization found {found} of {k} columns")));
    }
    Ok(CsfBasis { columns: out, spin: Some(total_s), irrep: basis.constraints().irrep })
}

/// Number of spin-S states in a sector, by counting determinants:
/// `#(2S_z = 2S) − #(2S_z = 2S + 2)`.
pub fn csf_count(
    n_spatial: usize,
    n_electrons: usize,
    total_s2: u32,
    irrep: Option<IrrepLabel>,
    orbital_irreps: &[IrrepLabel],
) -> Result<usize> {
    let s2 = total_s2 as i32;
    if s2 as usize > n_electrons || (n_electrons as i32 - s2) % 2 != 0 {
        return Ok(0);
    }
    let a = enumerate_sector(n_spatial, n_electrons, Some(s2), irrep, orbital_irreps)?.len();
    let b = if s2 + 2 <= n_electrons as i32 {
        enumerate_sector(n_spatial, n_electrons, Some(s2 + 2), irrep, orbital_irreps)?.len()
    } else {
        0
    };
    Ok(a - b)
}

/// Result of applying a named operator sequence to a reference.
#[derive(Clone, Debug)]
pub enum NamedCsf {
    State(StateVector),
    /// The product is exactly zero on the reference (symbolically, not by
    /// rounding).
    Annihilated,
}

impl NamedCsf {
    pub fn state(self) -> Option<StateVector> {
        match self {
            NamedCsf::State(v) => Some(v),
            NamedCsf::Annihilated => None,
        }
    }
}

/// Apply `ops[0] ops[1] … ops[k-1]` (the rightmost acts first) to a
/// determinant in exact arithmetic.
pub fn apply_exact(ops: &[FermionPolynomial], reference: Determinant) -> BTreeMap<u64, Coeff> {
    let mut state: BTreeMap<u64, Coeff> = BTreeMap::from([(reference.0, Coeff::ONE)]);
    for op in ops.iter().rev() {
        let mut next: BTreeMap<u64, Coeff> = BTreeMap::new();
        for s in op.terms() {
            for (&d, &c) in &state {
                if let Some((sign, t)) = s.apply(d) {
                    let v = next.entry(t).or_insert(Coeff::ZERO);
                    *v += if sign < 0.0 { -(s.coeff * c) } else { s.coeff * c };
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        state = next;
    }
    state
}

/// Normalized `ops…|reference⟩` on `basis`.
pub fn named_csf(ops: &[FermionPolynomial], reference: Determinant, basis: Arc<SectorBasis>) -> Result<NamedCsf> {
    let exact = apply_exact(ops, reference);
    if exact.is_empty() {
        return Ok(NamedCsf::Annihilated);
    }
    let mut v = StateVector::zeros(basis.clone());
    for (d, c) in exact {
        let i = basis.index_of(Determinant(d)).ok_or(Error::NotInBasis(d))?;
        v.amps[i] = c.to_f64();
    }
    Ok(NamedCsf::State(v.normalized().expect("nonzero exact state")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pools::{perfect_pair, sa_double1};

    fn alt(n: usize) -> Vec<IrrepLabel> {
        (0..n).map(|p| IrrepLabel::new((p % 2) as u8).unwrap()).collect()
    }

    #[test]
    fn two_electron_spectrum() {
        let irr = alt(2);
        let b = enumerate_sector(2, 2, Some(0), None, &irr).unwrap();
        let e = SymmetricEigen::new(s2_matrix(&b).to_dense());
        let mut ev: Vec<f64> = e.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([0.0, 0.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(csf_basis(&b, 0.0).unwrap().len(), 3);
        let b = Arc::new(b);
        let d = Determinant::from_occupations(&[], &[0], &[1]).unwrap();
        let r = symmetry_report(&StateVector::basis_state(b, d).unwrap(), &irr).unwrap();
        assert!((r.s2_expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn h6_csf_counts() {
        let irr = alt(6);
        let b = enumerate_sector(6, 6, Some(0), Some(IrrepLabel::TOTALLY_SYMMETRIC), &irr).unwrap();
        let c = csf_basis(&b, 0.0).unwrap();
        assert_eq!(c.len(), 92);
        let g = c.columns.transpose() * &c.columns - DMatrix::identity(92, 92);
        assert!(g.abs().max() < 1e-12);
        assert_eq!(csf_count(6, 6, 0, Some(IrrepLabel::TOTALLY_SYMMETRIC), &irr).unwrap(), 92);
        assert_eq!(csf_count(6, 6, 0, None, &irr).unwrap(), 175);
    }

    #[test]
    fn parity_basics() {
        let irr = alt(3);
        let b = SectorBasis::fock_space(3);
        let pm = parity_matrix(IrrepLabel::new(1).unwrap(), &b, &irr);
        assert!(pm.matmul(&pm).add_scaled(&CsrMatrix::identity(b.len()), -1.0).max_abs() == 0.0);
        let empty = parity_matrix(IrrepLabel::new(5).unwrap(), &b, &irr);
        assert_eq!(empty, CsrMatrix::identity(b.len()));
        let i = b.index_of(Determinant(0b0100)).unwrap();
        assert_eq!(pm.get(i, i), -1.0);
    }

    #[test]
    fn named_constructions() {
        let irr = alt(2);
        let b = Arc::new(enumerate_sector(2, 2, Some(0), None, &irr).unwrap());
        let r = Determinant::from_occupations(&[0], &[], &[]).unwrap();
        let v = named_csf(&[perfect_pair(0, 1)], r, b.clone()).unwrap().state().unwrap();
        let t = b.index_of(Determinant::from_occupations(&[1], &[], &[]).unwrap()).unwrap();
        assert!((v.amps[t].abs() - 1.0).abs() < 1e-15);
        assert!(matches!(named_csf(&[sa_double1(0, 0, 1, 1)], r, b).unwrap(), NamedCsf::Annihilated));
    }

    #[test]
    fn unnormalized_report_is_error() {
        let irr = alt(2);
        let b = Arc::new(enumerate_sector(2, 2, Some(0), None, &irr).unwrap());
        let mut v = StateVector::zeros(b);
        v.amps[0] = 0.5;
        assert!(symmetry_report(&v, &irr).is_err());
    }
}
