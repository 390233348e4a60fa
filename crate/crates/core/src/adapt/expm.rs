//! Action of `exp(θG)` for real antisymmetric sparse `G`.

use nalgebra::{DMatrix, DVector};

use crate::fock::CsrMatrix;

/// Truncation bound on the relative 2-norm error of one application.
pub const EXPM_TOL: f64 = 1e-13;

/// Sectors smaller than this use a dense matrix exponential.
pub const DENSE_EXPM_BELOW: usize = 64;

/// Largest `|θ|·‖G‖₁` handled by one Taylor step.
const STEP_RHO: f64 = 2.0;

/// A generator restricted to the determinants it touches. Outside its
/// support `exp(θG)` is the identity, so all work happens on the support.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    support: Vec<usize>,
    local: CsrMatrix,
    norm1: f64,
    dense: Option<DMatrix<f64>>,
}

impl Generator {
    pub fn new(g: &CsrMatrix) -> Self {
        let dim = g.nrows();
        let mut touched = vec![false; dim];
        for (r, c, _) in g.triplets() {
            touched[r] = true;
            touched[c] = true;
        }
        let support: Vec<usize> = (0..dim).filter(|&i| touched[i]).collect();
        let mut pos = vec![usize::MAX; dim];
        for (k, &i) in support.iter().enumerate() {
            pos[i] = k;
        }
        let m = support.len();
        let local = CsrMatrix::from_triplets(m, m, g.triplets().map(|(r, c, v)| (pos[r], pos[c], v)).collect());
        let norm1 = local.norm1();
        let dense = (dim < DENSE_EXPM_BELOW).then(|| g.to_dense());
        Generator { dim, support, local, norm1, dense }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `y = G x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let xl: Vec<f64> = self.support.iter().map(|&i| x[i]).collect();
        let yl = self.local.matvec(&xl);
        let mut y = vec![0.0; self.dim];
        for (&i, v) in self.support.iter().zip(yl) {
            y[i] = v;
        }
        y
    }

    /// `⟨a|G|b⟩`
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let bl: Vec<f64> = self.support.iter().map(|&i| b[i]).collect();
        let yl = self.local.matvec(&bl);
        self.support.iter().zip(yl).map(|(&i, v)| a[i] * v).sum()
    }

    /// In-place `x ← exp(θG) x`.
    pub fn exp_apply(&self, theta: f64, x: &mut [f64]) {
        if theta == 0.0 || self.support.is_empty() {
            return;
        }
        if let Some(g) = &self.dense {
            let u = (g * theta).exp();
            let y = u * DVector::from_column_slice(x);
            x.copy_from_slice(y.as_slice());
            return;
        }
        let mut v: Vec<f64> = self.support.iter().map(|&i| x[i]).collect();
        taylor_action(&self.local, self.norm1, theta, &mut v);
        for (&i, a) in self.support.iter().zip(v) {
            x[i] = a;
        }
    }
}

/// Number of Taylor terms `K` such that the remainder of `exp` at radius
/// `rho` is below `tol`: `rho^{K+1}/(K+1)! · e^rho ≤ tol`.
fn taylor_terms(rho: f64, tol: f64) -> usize {
    let mut bound = rho.exp();
    let mut k = 0;
    loop {
        bound *= rho / (k + 1) as f64;
        if bound <= tol || k >= 60 {
            return k;
        }
        k += 1;
    }
}

/// Scaling by `s` steps, each a truncated Taylor series.
fn taylor_action(a: &CsrMatrix, norm1: f64, theta: f64, v: &mut [f64]) {
    let rho_total = theta.abs() * norm1;
    let s = ((rho_total / STEP_RHO).ceil() as usize).max(1);
    let h = theta / s as f64;
    // split the total budget over the steps
    let k_max = taylor_terms(rho_total / s as f64, EXPM_TOL / s as f64);
    let mut term = vec![0.0; v.len()];
    let mut next = vec![0.0; v.len()];
    for _ in 0..s {
        term.copy_from_slice(v);
        for k in 1..=k_max {
            a.matvec_into(&term, &mut next);
            let f = h / k as f64;
            let mut zero = true;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * f;
                zero &= *t == 0.0;
            }
            for (vi, t) in v.iter_mut().zip(&term) {
                *vi += t;
            }
            if zero {
                break;
            }
        }
    }
}
