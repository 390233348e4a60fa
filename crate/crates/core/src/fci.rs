//! Exact diagonalization and eigenvector-overlap analysis.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{CsrMatrix, SectorBasis, SectorConstraints, StateVector};

/// Energies closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Dimensions below this use dense diagonalization.
    pub dense_limit: usize,
    /// Residual norm ‖Hv − Ev‖ required of every returned pair.
    pub tol: f64,
    /// Largest subspace before a restart.
    pub max_subspace: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { dense_limit: 2000, tol: 1e-9, max_subspace: 80, max_restarts: 400, seed: 17 }
    }
}

/// Lowest eigenpairs of a Hamiltonian on a sector.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    /// `dim × k`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    pub sector: SectorConstraints,
    pub basis: Arc<SectorBasis>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn state(&self, i: usize) -> StateVector {
        StateVector { basis: self.basis.clone(), amps: self.vectors.column(i).iter().copied().collect() }
    }

    /// Index ranges of degenerate levels.
    pub fn degenerate_blocks(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.energies.len() {
            if i == self.energies.len() || self.energies[i] - self.energies[start] > DEGENERACY_TOL {
                out.push(start..i);
                start = i;
            }
        }
        out
    }
}

pub fn lowest_eigenpairs(h: &CsrMatrix, basis: Arc<SectorBasis>, k: usize) -> Result<Spectrum> {
    lowest_eigenpairs_with(h, basis, k, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(h: &CsrMatrix, basis: Arc<SectorBasis>, k: usize, opts: &EigenOptions) -> Result<Spectrum> {
    let n = h.nrows();
    if n != basis.len() || h.ncols() != n {
        return Err(Error::InvalidInput("Hamiltonian does not match the basis".into()));
    }
    if k > n {
        return Err(Error::InvalidInput(format!("requested {k} eigenpairs of a {n}-dimensional problem")));
    }
    let (energies, vectors) = if n < opts.dense_limit { dense(h, k) } else { krylov(h, k, opts)? };
    Ok(Spectrum { energies, vectors, sector: basis.constraints(), basis })
}

fn sorted_eigen(m: DMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    idx.truncate(k);
    (idx.iter().map(|&i| e.eigenvalues[i]).collect(), e.eigenvectors.select_columns(&idx))
}

fn dense(h: &CsrMatrix, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    sorted_eigen(h.to_dense(), k)
}

fn orthonormalize_into(v: &mut DVector<f64>, q: &[DVector<f64>]) -> f64 {
    for _ in 0..2 {
        for b in q {
            let d = b.dot(v);
            v.axpy(-d, b, 1.0);
        }
    }
    let nv = v.norm();
    if nv > 0.0 {
        *v /= nv;
    }
    nv
}

/// Restarted block Krylov iteration with full reorthogonalization and
/// Rayleigh–Ritz extraction.
fn krylov(h: &CsrMatrix, k: usize, opts: &EigenOptions) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = h.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let block = (k + 2).min(n);
    let m_max = opts.max_subspace.max(3 * block).min(n);
    let hv = |v: &DVector<f64>| DVector::from_vec(h.matvec(v.as_slice()));

    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut hq: Vec<DVector<f64>> = Vec::new();
    let push = |v: DVector<f64>, q: &mut Vec<DVector<f64>>, hq: &mut Vec<DVector<f64>>| {
        let mut v = v;
        if orthonormalize_into(&mut v, q) > 1e-10 {
            hq.push(hv(&v));
            q.push(v);
            true
        } else {
            false
        }
    };
    while q.len() < block {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        push(v, &mut q, &mut hq);
    }
    let mut worst = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        loop {
            let m = q.len();
            let t = DMatrix::from_fn(m, m, |i, j| 0.5 * (q[i].dot(&hq[j]) + q[j].dot(&hq[i])));
            let (theta, s) = sorted_eigen(t, block.min(m));
            let ritz: Vec<DVector<f64>> = (0..theta.len())
                .map(|c| q.iter().zip(s.column(c).iter()).fold(DVector::zeros(n), |acc, (v, &w)| acc + v * w))
                .collect();
            let hritz: Vec<DVector<f64>> = (0..theta.len())
                .map(|c| hq.iter().zip(s.column(c).iter()).fold(DVector::zeros(n), |acc, (v, &w)| acc + v * w))
                .collect();
            let res: Vec<DVector<f64>> = (0..theta.len()).map(|c| &hritz[c] - &ritz[c] * theta[c]).collect();
            worst = res.iter().take(k).map(|r| r.norm()).fold(0.0, f64::max);
            if worst < opts.tol {
                let vecs = DMatrix::from_columns(&ritz[..k]);
                return Ok((theta[..k].to_vec(), vecs));
            }
            if m + block > m_max {
                // restart from the current Ritz block
                q.clear();
                hq.clear();
                for (v, hv_) in ritz.into_iter().zip(hritz) {
                    let nv = v.norm();
                    q.push(v / nv);
                    hq.push(hv_ / nv);
                }
                break;
            }
            let mut grew = false;
            for r in res.into_iter().filter(|r| r.norm() > opts.tol * 1e-3) {
                grew |= push(r, &mut q, &mut hq);
            }
            if !grew {
                let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                push(v, &mut q, &mut hq);
            }
        }
    }
    Err(Error::NoConvergence { restarts: opts.max_restarts, residual: worst })
}

/// `⟨S²⟩` deviation accepted when filtering eigenstates by spin.
pub const SPIN_MATCH_TOL: f64 = 1e-6;

/// Lowest eigenpair of `h` whose spin is `total_s`.
///
/// Dense sectors are filtered level by level (S² is diagonalized inside
/// degenerate blocks); larger ones shift every other spin up with a
/// `(S² − S(S+1))²` penalty.
pub fn lowest_with_spin(
    h: &CsrMatrix,
    s2: &CsrMatrix,
    basis: Arc<SectorBasis>,
    total_s: f64,
    opts: &EigenOptions,
) -> Result<(f64, StateVector)> {
    let target = total_s * (total_s + 1.0);
    let n = h.nrows();
    if n < opts.dense_limit {
        let spec = lowest_eigenpairs_with(h, basis.clone(), n, opts)?;
        for r in spec.degenerate_blocks() {
            let block = spec.vectors.columns(r.start, r.len()).into_owned();
            let sb = s2.to_dense();
            let proj = block.transpose() * &sb * &block;
            let e = SymmetricEigen::new(proj);
            if let Some(j) = (0..r.len()).find(|&j| (e.eigenvalues[j] - target).abs() < SPIN_MATCH_TOL) {
                let v = &block * e.eigenvectors.column(j);
                return Ok((spec.energies[r.start], StateVector { basis, amps: v.iter().copied().collect() }));
            }
        }
        return Err(Error::InvalidInput(format!("no state with S = {total_s} in the sector")));
    }
    let mut mu = 0.5;
    for _ in 0..6 {
        let d = s2.add_scaled(&CsrMatrix::identity(n), -target);
        let shifted = h.add_scaled(&d.matmul(&d), mu);
        let spec = lowest_eigenpairs_with(&shifted, basis.clone(), 1, opts)?;
        let v = spec.state(0);
        let s = s2.bilinear(&v.amps, &v.amps);
        if (s - target).abs() < SPIN_MATCH_TOL {
            return Ok((h.bilinear(&v.amps, &v.amps), v));
        }
        mu *= 4.0;
    }
    Err(Error::NoConvergence { restarts: 6, residual: f64::NAN })
}

#[derive(Clone, Debug)]
pub struct OverlapAnalysis {
    /// `|⟨v_i|ψ⟩|²` per eigenvector.
    pub weights: Vec<f64>,
    /// Summed weight per degenerate level.
    pub level_weights: Vec<(Range<usize>, f64)>,
    /// `‖ψ‖² − Σ weights`
    pub residual_weight: f64,
}

pub fn overlap_analysis(state: &StateVector, spectrum: &Spectrum) -> Result<OverlapAnalysis> {
    if !Arc::ptr_eq(&state.basis, &spectrum.basis) && state.basis.words() != spectrum.basis.words() {
        return Err(Error::InvalidInput("state and spectrum live on different bases".into()));
    }
    let psi = DVector::from_column_slice(&state.amps);
    let weights: Vec<f64> = (0..spectrum.len()).map(|i| spectrum.vectors.column(i).dot(&psi).powi(2)).collect();
    let level_weights = spectrum
        .degenerate_blocks()
        .into_iter()
        .map(|r| {
            let w = weights[r.clone()].iter().sum();
            (r, w)
        })
        .collect();
    let residual_weight = psi.norm_squared() - weights.iter().sum::<f64>();
    Ok(OverlapAnalysis { weights, level_weights, residual_weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcidump::IrrepLabel;
    use crate::fock::Determinant;

    fn toy_basis(n: usize) -> Arc<SectorBasis> {
        // any basis of the right length works for matrix-only tests
        let dets: Vec<Determinant> = (0..n as u64).map(Determinant).collect();
        Arc::new(SectorBasis::from_determinants(32, &[IrrepLabel::TOTALLY_SYMMETRIC; 32], &dets))
    }

    fn random_symmetric(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, rng.random_range(-5.0..5.0)));
            for j in i + 1..n {
                if rng.random_range(0.0..1.0) < 0.05 {
                    let v = rng.random_range(-1.0..1.0);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn identity_spectrum() {
        let s = lowest_eigenpairs(&CsrMatrix::identity(5), toy_basis(5), 3).unwrap();
        assert_eq!(s.energies, vec![1.0, 1.0, 1.0]);
        assert_eq!(s.degenerate_blocks(), vec![0..3]);
    }

    #[test]
    fn krylov_matches_dense() {
        let h = random_symmetric(300, 3);
        let b = toy_basis(300);
        let d = lowest_eigenpairs(&h, b.clone(), 4).unwrap();
        let it = lowest_eigenpairs_with(&h, b, 4, &EigenOptions { dense_limit: 0, ..Default::default() }).unwrap();
        for (a, b) in d.energies.iter().zip(&it.energies) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn spin_filter_agrees_between_paths() {
        use crate::fcidump::IrrepLabel;
        use crate::fock::{enumerate_sector, Coeff, FermionPolynomial, Op};
        use crate::symmetry::s2_matrix;
        // Hubbard-like model: hopping plus on-site repulsion on four sites
        let irr = [IrrepLabel::TOTALLY_SYMMETRIC; 4];
        let b = Arc::new(enumerate_sector(4, 4, Some(0), None, &irr).unwrap());
        let mut p = FermionPolynomial::zero();
        for i in 0..4 {
            p = p + Coeff::int(4) * (FermionPolynomial::number(2 * i) * FermionPolynomial::number(2 * i + 1));
            for s in 0..2 {
                let (a, c) = ((2 * i + s) as u8, (2 * ((i + 1) % 4) + s) as u8);
                let hop = FermionPolynomial::from_word(Coeff::ONE, &[Op::Cre(a), Op::Ann(c)])
                    + FermionPolynomial::from_word(Coeff::ONE, &[Op::Cre(c), Op::Ann(a)]);
                p = p - hop;
            }
        }
        let h = crate::fock::matrix_rep(&p, &b);
        let s2 = s2_matrix(&b);
        let dense = lowest_with_spin(&h, &s2, b.clone(), 1.0, &EigenOptions::default()).unwrap();
        let it = lowest_with_spin(&h, &s2, b, 1.0, &EigenOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert!((dense.0 - it.0).abs() < 1e-8, "{} vs {}", dense.0, it.0);
    }

    #[test]
    fn overlaps_of_mixture() {
        let h = random_symmetric(40, 5);
        let s = lowest_eigenpairs(&h, toy_basis(40), 3).unwrap();
        let mut v = s.state(0);
        let w = s.state(1);
        v.amps.iter_mut().zip(&w.amps).for_each(|(a, b)| *a = (*a + b) / 2f64.sqrt());
        let o = overlap_analysis(&v, &s).unwrap();
        assert!((o.weights[0] - 0.5).abs() < 1e-12 && (o.weights[1] - 0.5).abs() < 1e-12);
        assert!(o.residual_weight.abs() < 1e-12);
    }
}
