//! Determinant bases, operator application and matrix representations.
//!
//! Spinorbital `2P` is `(P,↑)` and `2P+1` is `(P,↓)`. Creating or
//! annihilating spinorbital `i` contributes `(-1)^(occupied below i)`.

pub mod coeff;
mod hamiltonian;
pub mod poly;
pub mod sparse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::IrrepLabel;

pub use coeff::Coeff;
pub use hamiltonian::{build_hamiltonian, hamiltonian_polynomial};
pub use poly::{FermionPolynomial, FermionString, Op};
pub use sparse::CsrMatrix;

/// Occupation word over `2·n_spatial` spinorbitals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Determinant(pub u64);

impl Determinant {
    pub fn n_electrons(self) -> u32 {
        self.0.count_ones()
    }

    pub fn occupied(self, spinorbital: usize) -> bool {
        self.0 >> spinorbital & 1 == 1
    }

    /// `2·S_z`
    pub fn sz2(self) -> i32 {
        let up = (self.0 & 0x5555_5555_5555_5555).count_ones() as i32;
        let dn = (self.0 & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
        up - dn
    }

    /// XOR of the irreps of all occupied spinorbitals.
    pub fn irrep(self, orbital_irreps: &[IrrepLabel]) -> IrrepLabel {
        let mut g = IrrepLabel::TOTALLY_SYMMETRIC;
        for (p, &l) in orbital_irreps.iter().enumerate() {
            let single = (self.0 >> (2 * p) & 1) ^ (self.0 >> (2 * p + 1) & 1);
            if single == 1 {
                g = g * l;
            }
        }
        g
    }

    /// Closed/open-shell determinant from spatial occupation lists.
    pub fn from_occupations(doubly: &[usize], up: &[usize], down: &[usize]) -> Result<Self> {
        let mut w = 0u64;
        let mut set = |i: usize| -> Result<()> {
            if i >= 64 {
                return Err(Error::InvalidInput(format!("spinorbital {i} beyond 64-bit word")));
            }
            if w >> i & 1 == 1 {
                return Err(Error::InvalidInput(format!("spinorbital {i} occupied twice")));
            }
            w |= 1 << i;
            Ok(())
        };
        for &p in doubly {
            set(2 * p)?;
            set(2 * p + 1)?;
        }
        for &p in up {
            set(2 * p)?;
        }
        for &p in down {
            set(2 * p + 1)?;
        }
        Ok(Determinant(w))
    }
}

impl fmt::Debug for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Det({:#b})", self.0)
    }
}

/// Constraint record of a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorConstraints {
    pub n_electrons: Option<usize>,
    pub sz2: Option<i32>,
    pub irrep: Option<IrrepLabel>,
}

/// Sorted list of determinants satisfying a set of constraints.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_spatial: usize,
    orbital_irreps: Vec<IrrepLabel>,
    constraints: SectorConstraints,
    dets: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn spread(mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= 1 << (2 * i);
        m &= m - 1;
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    if k == 0 {
        return vec![0];
    }
    // Gosper's hack.
    let mut x: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Enumerate the determinants of a symmetry sector.
pub fn enumerate_sector(
    n_spatial: usize,
    n_elec: usize,
    sz2: Option<i32>,
    irrep: Option<IrrepLabel>,
    orbital_irreps: &[IrrepLabel],
) -> Result<SectorBasis> {
    if orbital_irreps.len() != n_spatial {
        return Err(Error::InvalidInput(format!(
            "{} orbital irreps supplied for {n_spatial} orbitals",
            orbital_irreps.len()
        )));
    }
    if n_spatial > 32 {
        return Err(Error::InvalidInput("at most 32 spatial orbitals are supported".into()));
    }
    if n_elec > 2 * n_spatial {
        return Err(Error::InvalidInput(format!("{n_elec} electrons exceed {} spinorbitals", 2 * n_spatial)));
    }
    if let Some(s) = sz2 {
        if s.unsigned_abs() as usize > n_elec || (s.rem_euclid(2) as usize) != n_elec % 2 {
            return Err(Error::InvalidInput(format!("2·S_z = {s} incompatible with {n_elec} electrons")));
        }
    }
    let mut dets = Vec::new();
    for n_up in 0..=n_elec {
        let n_dn = n_elec - n_up;
        if n_up > n_spatial || n_dn > n_spatial {
            continue;
        }
        if let Some(s) = sz2 {
            if n_up as i32 - n_dn as i32 != s {
                continue;
            }
        }
        let ups = combinations(n_spatial, n_up);
        let dns = combinations(n_spatial, n_dn);
        for &u in &ups {
            for &d in &dns {
                let w = spread(u) | spread(d) << 1;
                if let Some(g) = irrep {
                    if Determinant(w).irrep(orbital_irreps) != g {
                        continue;
                    }
                }
                dets.push(w);
            }
        }
    }
    dets.sort_unstable();
    Ok(SectorBasis::from_sorted(
        n_spatial,
        orbital_irreps.to_vec(),
        SectorConstraints { n_electrons: Some(n_elec), sz2, irrep },
        dets,
    ))
}

impl SectorBasis {
    fn from_sorted(n_spatial: usize, orbital_irreps: Vec<IrrepLabel>, constraints: SectorConstraints, dets: Vec<u64>) -> Self {
        let index = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        SectorBasis { n_spatial, orbital_irreps, constraints, dets, index }
    }

    /// Every occupation word over `n_spatial` orbitals (all particle numbers).
    pub fn fock_space(n_spatial: usize) -> Self {
        assert!(n_spatial <= 12, "full Fock space limited to 12 orbitals");
        let dets: Vec<u64> = (0..1u64 << (2 * n_spatial)).collect();
        Self::from_sorted(
            n_spatial,
            vec![IrrepLabel::TOTALLY_SYMMETRIC; n_spatial],
            SectorConstraints { n_electrons: None, sz2: None, irrep: None },
            dets,
        )
    }

    /// Basis restricted to an explicit determinant list (sorted internally).
    pub fn from_determinants(n_spatial: usize, orbital_irreps: &[IrrepLabel], dets: &[Determinant]) -> Self {
        let mut d: Vec<u64> = dets.iter().map(|d| d.0).collect();
        d.sort_unstable();
        d.dedup();
        let n = d.first().map(|w| w.count_ones() as usize);
        let n = n.filter(|&n| d.iter().all(|w| w.count_ones() as usize == n));
        Self::from_sorted(
            n_spatial,
            orbital_irreps.to_vec(),
            SectorConstraints { n_electrons: n, sz2: None, irrep: None },
            d,
        )
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }
    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }
    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }
    pub fn orbital_irreps(&self) -> &[IrrepLabel] {
        &self.orbital_irreps
    }
    pub fn constraints(&self) -> SectorConstraints {
        self.constraints
    }
    pub fn n_electrons(&self) -> Option<usize> {
        self.constraints.n_electrons
    }
    pub fn determinant(&self, i: usize) -> Determinant {
        Determinant(self.dets[i])
    }
    pub fn words(&self) -> &[u64] {
        &self.dets
    }
    pub fn iter(&self) -> impl Iterator<Item = Determinant> + '_ {
        self.dets.iter().map(|&d| Determinant(d))
    }
    pub fn index_of(&self, d: Determinant) -> Option<usize> {
        self.index.get(&d.0).copied()
    }
}

/// Real amplitudes aligned with a shared basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub basis: Arc<SectorBasis>,
    pub amps: Vec<f64>,
}

impl StateVector {
    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let n = basis.len();
        StateVector { basis, amps: vec![0.0; n] }
    }

    pub fn basis_state(basis: Arc<SectorBasis>, d: Determinant) -> Result<Self> {
        let i = basis.index_of(d).ok_or(Error::NotInBasis(d.0))?;
        let mut v = Self::zeros(basis);
        v.amps[i] = 1.0;
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum()
    }

    pub fn normalized(mut self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 {
            return None;
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Some(self)
    }
}

/// Apply one canonical string to a state.
///
/// With `closed = true`, a result outside the basis is an error; otherwise
/// it is projected away.
pub fn apply_string(s: &FermionString, v: &StateVector, closed: bool) -> Result<StateVector> {
    let c = s.coeff.to_f64();
    let mut out = StateVector::zeros(v.basis.clone());
    for (j, &d) in v.basis.words().iter().enumerate() {
        if v.amps[j] == 0.0 {
            continue;
        }
        if let Some((sign, t)) = s.apply(d) {
            match v.basis.index_of(Determinant(t)) {
                Some(i) => out.amps[i] += sign * c * v.amps[j],
                None if closed => return Err(Error::BasisLeak(t)),
                None => {}
            }
        }
    }
    Ok(out)
}

/// Apply a polynomial to a state (projected onto the basis).
pub fn apply_polynomial(p: &FermionPolynomial, v: &StateVector) -> StateVector {
    let mut out = StateVector::zeros(v.basis.clone());
    for s in p.terms() {
        let r = apply_string(&s, v, false).expect("projection never fails");
        out.amps.iter_mut().zip(&r.amps).for_each(|(o, x)| *o += x);
    }
    out
}

fn matrix_triplets(p: &FermionPolynomial, basis: &SectorBasis, closed: bool) -> Result<Vec<(usize, usize, f64)>> {
    let mut t = Vec::new();
    for s in p.terms() {
        let c = s.coeff.to_f64();
        for (j, &d) in basis.words().iter().enumerate() {
            if let Some((sign, w)) = s.apply(d) {
                match basis.index_of(Determinant(w)) {
                    Some(i) => t.push((i, j, sign * c)),
                    None if closed => return Err(Error::BasisLeak(w)),
                    None => {}
                }
            }
        }
    }
    Ok(t)
}

/// Matrix of `p` on `basis`; components leaving the basis are dropped.
pub fn matrix_rep(p: &FermionPolynomial, basis: &SectorBasis) -> CsrMatrix {
    let t = matrix_triplets(p, basis, false).expect("projection never fails");
    CsrMatrix::from_triplets(basis.len(), basis.len(), t)
}

/// Matrix of `p` on a basis asserted to be closed under `p`.
pub fn matrix_rep_closed(p: &FermionPolynomial, basis: &SectorBasis) -> Result<CsrMatrix> {
    let t = matrix_triplets(p, basis, true)?;
    Ok(CsrMatrix::from_triplets(basis.len(), basis.len(), t))
}
