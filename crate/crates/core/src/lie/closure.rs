//! Dynamical Lie algebra of a pool in matrix representation, and the
//! smallest invariant subspace containing a reference.

use nalgebra::{DMatrix, DMatrixView, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{CsrMatrix, StateVector};
use crate::symmetry::CsfBasis;

/// Options for [`dla_closure`].
#[derive(Clone, Debug)]
pub struct ClosureOptions {
    /// A candidate is new when its residual after projection exceeds
    /// `tol·(1 + ‖candidate‖)`.
    pub tol: f64,
    /// Abort once the algebra exceeds this many elements.
    pub cap: usize,
    /// Seed for the random generator combinations.
    pub seed: u64,
    /// Number of random generator combinations the closure is grown from.
    pub n_seeds: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { tol: 1e-7, cap: 20000, seed: 0x5eed, n_seeds: 3 }
    }
}

/// Frobenius-orthonormal basis of antisymmetric matrices acting on a
/// carrier space (the columns of an isometry `C` into the sector).
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    carrier: DMatrix<f64>,
    data: Vec<f64>,
    depth: Vec<usize>,
}

fn tri_len(k: usize) -> usize {
    k * (k.saturating_sub(1)) / 2
}

/// Upper-triangle coordinates scaled by √2, so the Euclidean inner product
/// equals the Frobenius one on antisymmetric matrices.
fn to_vec(m: &DMatrix<f64>, out: &mut [f64]) {
    let k = m.nrows();
    let mut t = 0;
    for j in 0..k {
        for i in 0..j {
            out[t] = m[(i, j)] * std::f64::consts::SQRT_2;
            t += 1;
        }
    }
}

fn from_vec(v: &[f64], k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    let mut t = 0;
    for j in 0..k {
        for i in 0..j {
            let x = v[t] / std::f64::consts::SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = -x;
            t += 1;
        }
    }
    m
}

/// `Aᵀ B` for column-major slices (nalgebra's `tr_mul` does not go
/// through the blocked kernel).
fn at_b(a: &[f64], rows: usize, a_cols: usize, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.ncols();
    let mut c = DMatrix::<f64>::zeros(a_cols, n);
    if rows == 0 || a_cols == 0 || n == 0 {
        return c;
    }
    // SAFETY: dimensions and strides describe the column-major buffers
    // exactly; `c` is freshly allocated and does not alias.
    unsafe {
        matrixmultiply::dgemm(
            a_cols,
            rows,
            n,
            1.0,
            a.as_ptr(),
            rows as isize,
            1,
            b.as_ptr(),
            1,
            rows as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            a_cols as isize,
        );
    }
    c
}

fn sparse_times_dense(a: &CsrMatrix, c: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), c.ncols());
    for j in 0..c.ncols() {
        let y = a.matvec(c.column(j).as_slice());
        out.column_mut(j).copy_from_slice(&y);
    }
    out
}

impl AlgebraBasis {
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// Dimension of the carrier space.
    pub fn carrier_dim(&self) -> usize {
        self.carrier.ncols()
    }

    /// Isometry from carrier coordinates to sector coordinates.
    pub fn carrier(&self) -> &DMatrix<f64> {
        &self.carrier
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    fn coords(&self, i: usize) -> &[f64] {
        let l = tri_len(self.carrier_dim());
        &self.data[i * l..(i + 1) * l]
    }

    /// Element `i` in carrier coordinates.
    pub fn element(&self, i: usize) -> DMatrix<f64> {
        from_vec(self.coords(i), self.carrier_dim())
    }

    /// Element `i` on the sector, `C M Cᵀ`.
    pub fn element_on_sector(&self, i: usize) -> DMatrix<f64> {
        &self.carrier * self.element(i) * self.carrier.transpose()
    }

    /// Largest Frobenius norm of `[O, M]` over all elements `M`, for an
    /// operator `O` on the sector that preserves the carrier.
    pub fn max_commutator_norm(&self, op: &CsrMatrix) -> Result<f64> {
        let c = &self.carrier;
        let oc = sparse_times_dense(op, c);
        let ok = c.transpose() * &oc;
        let leak = (&oc - c * &ok).abs().max();
        if leak > 1e-10 {
            return Err(Error::InvalidInput(format!("operator does not preserve the carrier (leak {leak:.3e})")));
        }
        Ok((0..self.len())
            .map(|i| {
                let m = self.element(i);
                (&ok * &m - &m * &ok).norm()
            })
            .fold(0.0, f64::max))
    }

    /// Largest relative residual of a set of antisymmetric carrier matrices
    /// after projection onto the algebra.
    pub fn span_residual(&self, mats: &[DMatrix<f64>]) -> f64 {
        let l = tri_len(self.carrier_dim());
        let b = DMatrixView::from_slice(&self.data, l, self.len());
        let mut worst: f64 = 0.0;
        for m in mats {
            let mut v = DVector::zeros(l);
            to_vec(m, v.as_mut_slice());
            let n = v.norm();
            if n == 0.0 {
                continue;
            }
            let r = &v - &b * (b.tr_mul(&v));
            worst = worst.max(r.norm() / n);
        }
        worst
    }
}

struct Builder<'a> {
    k: usize,
    l: usize,
    opts: &'a ClosureOptions,
    data: Vec<f64>,
    depth: Vec<usize>,
}

impl Builder<'_> {
    fn len(&self) -> usize {
        self.depth.len()
    }

    /// Orthogonalize a batch of candidates (columns of `v`) against the
    /// basis and each other; returns indices of the accepted elements.
    fn add_batch(&mut self, mut v: DMatrix<f64>, depth: usize) -> Result<Vec<usize>> {
        let norms: Vec<f64> = v.column_iter().map(|c| c.norm()).collect();
        if self.len() > 0 {
            for _ in 0..2 {
                let coef = at_b(&self.data, self.l, self.len(), &v);
                let b = DMatrixView::from_slice(&self.data, self.l, self.len());
                v.gemm(-1.0, &b, &coef, 1.0);
            }
        }
        let start = self.len();
        let mut accepted = Vec::new();
        for (j, &nrm) in norms.iter().enumerate() {
            let mut c = v.column(j).clone_owned();
            for _ in 0..2 {
                for a in start..self.len() {
                    let e = DVector::from_column_slice(&self.data[a * self.l..(a + 1) * self.l]);
                    let d = e.dot(&c);
                    c.axpy(-d, &e, 1.0);
                }
            }
            let r = c.norm();
            if r > self.opts.tol * (1.0 + nrm) {
                if self.len() >= self.opts.cap {
                    return Err(Error::DimensionCap { cap: self.opts.cap, reached: self.len() + 1, depth });
                }
                self.data.extend(c.iter().map(|x| x / r));
                self.depth.push(depth);
                accepted.push(self.len() - 1);
            }
        }
        Ok(accepted)
    }

    fn element(&self, i: usize) -> DMatrix<f64> {
        from_vec(&self.data[i * self.l..(i + 1) * self.l], self.k)
    }

    /// Grow until `ad_a` for every `a` in `ad` maps the span into itself.
    fn close(&mut self, mut frontier: Vec<usize>, ad: &[DMatrix<f64>]) -> Result<()> {
        const CHUNK: usize = 64;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for chunk in frontier.chunks(CHUNK) {
                if self.len() == self.l {
                    // the whole antisymmetric algebra: nothing left to find
                    return Ok(());
                }
                let mut cand = DMatrix::zeros(self.l, chunk.len() * ad.len());
                let mut col = 0;
                let mut d = 0;
                for &i in chunk {
                    let x = self.element(i);
                    d = d.max(self.depth[i] + 1);
                    for a in ad {
                        let c = &x * a - a * &x;
                        to_vec(&c, cand.column_mut(col).as_mut_slice());
                        col += 1;
                    }
                }
                next.extend(self.add_batch(cand, d)?);
            }
            frontier = next;
        }
        Ok(())
    }
}

/// Lie closure of a set of antisymmetric sector matrices, restricted to a
/// carrier subspace (pass `None` for the whole sector).
///
/// The closure is grown from a few random combinations of the generators:
/// right-normed brackets of a generating set span the algebra it generates,
/// so closing under `ad` of those combinations yields a subalgebra; if some
/// generator is not in its span, closure continues under all generators.
pub fn dla_closure(generators: &[CsrMatrix], carrier: Option<&CsfBasis>, opts: &ClosureOptions) -> Result<AlgebraBasis> {
    let n = generators.first().map_or(0, |g| g.nrows());
    let c = match carrier {
        Some(cs) => cs.columns.clone(),
        None => DMatrix::identity(n, n),
    };
    if c.nrows() != n {
        return Err(Error::InvalidInput("carrier does not match the generators' sector".into()));
    }
    let k = c.ncols();
    let mut gens = Vec::new();
    for g in generators {
        if g.symmetry_defect(-1.0) > 1e-12 {
            return Err(Error::InvalidInput("generator is not antisymmetric".into()));
        }
        let gc = sparse_times_dense(g, &c);
        let gk = c.transpose() * &gc;
        let leak = (&gc - &c * &gk).abs().max();
        if leak > 1e-10 {
            return Err(Error::InvalidInput(format!("generator does not preserve the carrier (leak {leak:.3e})")));
        }
        if gk.norm() > 1e-14 {
            gens.push(gk);
        }
    }
    let l = tri_len(k);
    let mut b = Builder { k, l, opts, data: Vec::new(), depth: Vec::new() };
    if !gens.is_empty() {
        let ad: Vec<DMatrix<f64>> = if gens.len() <= opts.n_seeds.max(1) {
            gens.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            (0..opts.n_seeds.max(1))
                .map(|_| gens.iter().fold(DMatrix::zeros(k, k), |acc, g| acc + g * rng.random_range(-1.0..1.0)))
                .collect()
        };
        let mut seeds = DMatrix::zeros(l, ad.len());
        for (j, a) in ad.iter().enumerate() {
            to_vec(a, seeds.column_mut(j).as_mut_slice());
        }
        let first = b.add_batch(seeds, 1)?;
        b.close(first, &ad)?;

        let missing: Vec<DVector<f64>> = {
            let basis = DMatrixView::from_slice(&b.data, l, b.len());
            gens.iter()
                .map(|g| {
                    let mut v = DVector::zeros(l);
                    to_vec(g, v.as_mut_slice());
                    v
                })
                .filter(|v| (v - &basis * basis.tr_mul(v)).norm() > opts.tol * (1.0 + v.norm()))
                .collect()
        };
        if !missing.is_empty() {
            b.add_batch(DMatrix::from_columns(&missing), 1)?;
            let all: Vec<usize> = (0..b.len()).collect();
            b.close(all, &gens)?;
        }
    }
    Ok(AlgebraBasis { carrier: c, data: b.data, depth: b.depth })
}

/// Smallest algebra-invariant subspace containing a reference, in CSF
/// coordinates.
#[derive(Clone, Debug)]
pub struct ReachabilityResult {
    pub invariant_dim: usize,
    pub complement_dim: usize,
    /// Orthonormal columns over the CSF basis spanning the invariant space.
    pub invariant_vectors: DMatrix<f64>,
    /// Orthonormal columns over the CSF basis orthogonal to it.
    pub complement_vectors: DMatrix<f64>,
}

/// Rank threshold for reachability.
pub const REACH_TOL: f64 = 1e-8;

fn orth_against(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let d = b.dot(v);
            v.axpy(-d, b, 1.0);
        }
    }
}

pub fn reachable_subspace(algebra: &AlgebraBasis, reference: &StateVector, csfs: &CsfBasis) -> Result<ReachabilityResult> {
    let cmat = &csfs.columns;
    let k = cmat.ncols();
    if cmat.nrows() != reference.amps.len() || algebra.carrier().nrows() != reference.amps.len() {
        return Err(Error::InvalidInput("reference, CSF basis and algebra live on different sectors".into()));
    }
    // algebra elements expressed on the CSF space
    let t = cmat.transpose() * algebra.carrier();
    let elems: Vec<DMatrix<f64>> = (0..algebra.len()).map(|i| &t * algebra.element(i) * t.transpose()).collect();

    let r = DVector::from_column_slice(&reference.amps);
    let rc = cmat.transpose() * &r;
    if (rc.norm() - r.norm()).abs() > 1e-8 || r.norm() == 0.0 {
        return Err(Error::InvalidInput("reference does not lie in the span of the CSF basis".into()));
    }
    let mut basis = vec![rc.normalize()];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() && basis.len() < k {
        let mut next = Vec::new();
        for &w in &frontier {
            for m in &elems {
                if basis.len() == k {
                    break;
                }
                let mut u = m * &basis[w];
                let nu = u.norm();
                orth_against(&mut u, &basis);
                let ru = u.norm();
                if ru > REACH_TOL * (1.0 + nu) {
                    basis.push(u / ru);
                    next.push(basis.len() - 1);
                }
            }
        }
        frontier = next;
    }
    let inv = basis.len();
    let mut comp: Vec<DVector<f64>> = Vec::new();
    for i in 0..k {
        if inv + comp.len() == k {
            break;
        }
        let mut e = DVector::zeros(k);
        e[i] = 1.0;
        orth_against(&mut e, &basis);
        orth_against(&mut e, &comp);
        let n = e.norm();
        if n > 1e-6 {
            comp.push(e / n);
        }
    }
    let to_mat = |v: &[DVector<f64>]| {
        if v.is_empty() {
            DMatrix::zeros(k, 0)
        } else {
            DMatrix::from_columns(v)
        }
    };
    Ok(ReachabilityResult {
        invariant_dim: inv,
        complement_dim: comp.len(),
        invariant_vectors: to_mat(&basis),
        complement_vectors: to_mat(&comp),
    })
}
