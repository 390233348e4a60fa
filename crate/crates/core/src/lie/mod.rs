//! Exact commutator algebra, identity verification, Lie-algebra closure and
//! reachability analysis.

mod closure;
pub mod identities;

pub use closure::{dla_closure, reachable_subspace, AlgebraBasis, ClosureOptions, ReachabilityResult};

use crate::fock::{matrix_rep, FermionPolynomial, SectorBasis};

/// `[a, b] = ab − ba`, normal ordered, exact coefficients.
pub fn commutator(a: &FermionPolynomial, b: &FermionPolynomial) -> FermionPolynomial {
    &(a * b) - &(b * a)
}

/// Left-nested `[[[o1, o2], o3], …]`.
pub fn nested_commutator(ops: &[FermionPolynomial]) -> FermionPolynomial {
    assert!(ops.len() >= 2, "nested commutator needs at least two operators");
    ops[1..].iter().fold(ops[0].clone(), |acc, o| commutator(&acc, o))
}

/// Outcome of comparing two operators on a full Fock space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Max-norm of the matrix difference.
    pub residual: f64,
}

/// Residual threshold used by [`verify_identity`].
pub const IDENTITY_TOL: f64 = 1e-12;

/// Compare `lhs` and `rhs` on the full Fock space of `n_spatial` orbitals.
pub fn verify_identity(lhs: &FermionPolynomial, rhs: &FermionPolynomial, n_spatial: usize) -> IdentityCheck {
    let fock = SectorBasis::fock_space(n_spatial);
    let d = matrix_rep(&(lhs - rhs), &fock);
    let residual = d.max_abs();
    IdentityCheck { holds: residual < IDENTITY_TOL, residual }
}
