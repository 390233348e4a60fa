//! Commutator algebra, identity verification and Lie closure.

mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use adaptsym::fcidump::IrrepLabel;
use adaptsym::fock::{enumerate_sector, Coeff, Determinant, FermionPolynomial, SectorBasis, StateVector};
use adaptsym::lie::identities::catalog;
use adaptsym::lie::{commutator, dla_closure, nested_commutator, reachable_subspace, verify_identity, ClosureOptions};
use adaptsym::pools::{perfect_pair, realize_on_sector, sa_single, PoolElement, PoolFamily, PoolSpec};
use adaptsym::symmetry::{csf_basis, parity_matrix};

use common::alternating;

fn pool(family: PoolFamily, n: usize) -> Vec<PoolElement> {
    PoolSpec { family, enforce_spatial: false, orbital_irreps: alternating(n) }.build()
}

fn generators(family: PoolFamily, basis: &SectorBasis) -> Vec<adaptsym::fock::CsrMatrix> {
    let spec = PoolSpec { family, enforce_spatial: true, orbital_irreps: basis.orbital_irreps().to_vec() };
    realize_on_sector(&spec.build(), basis).unwrap().into_iter().flat_map(|e| e.matrices).collect()
}

#[test]
fn catalog_holds_for_non_adjacent_labels() {
    for id in catalog(0, 2, 3, 4) {
        let c = verify_identity(&id.lhs, &id.rhs, 5);
        assert!(c.holds, "{}: residual {:e}", id.name, c.residual);
    }
}

#[test]
fn perturbed_rhs_is_detected() {
    let mut seen = 0;
    for id in catalog(0, 1, 2, 3).into_iter().filter(|i| !i.rhs.is_zero()) {
        let bumped = Coeff::rational(101, 100) * &id.rhs;
        assert!(!verify_identity(&id.lhs, &bumped, 4).holds, "{}", id.name);
        seen += 1;
    }
    assert!(seen > 10);
    let z = FermionPolynomial::zero();
    let c = verify_identity(&z, &z, 3);
    assert!(c.holds && c.residual == 0.0);
}

#[test]
fn pair_rotation_by_a_single() {
    let l = nested_commutator(&[perfect_pair(0, 1), sa_single(1, 2), sa_single(1, 2)]);
    assert!(verify_identity(&l, &(&perfect_pair(0, 2) - &perfect_pair(0, 1)), 3).holds);
}

#[test]
fn closure_is_independent_of_generator_order() {
    let irr = alternating(5);
    let basis = enumerate_sector(5, 4, Some(0), Some(IrrepLabel::TOTALLY_SYMMETRIC), &irr).unwrap();
    let csfs = csf_basis(&basis, 0.0).unwrap();
    let gens = generators(PoolFamily::SaGspd, &basis);
    let mut rev = gens.clone();
    rev.reverse();
    let opts = ClosureOptions::default();
    let a = dla_closure(&gens, Some(&csfs), &opts).unwrap();
    let b = dla_closure(&rev, Some(&csfs), &ClosureOptions { seed: 99, ..opts }).unwrap();
    assert_eq!(a.len(), b.len());
    let elems = |x: &adaptsym::lie::AlgebraBasis| (0..x.len()).map(|i| x.element(i)).collect::<Vec<_>>();
    assert!(a.span_residual(&elems(&b)) < 1e-8);
    assert!(b.span_residual(&elems(&a)) < 1e-8);
}

fn complement_is_invariant(family: PoolFamily, n: usize, n_elec: usize) -> usize {
    let irr = alternating(n);
    let basis = Arc::new(enumerate_sector(n, n_elec, Some(0), Some(IrrepLabel::TOTALLY_SYMMETRIC), &irr).unwrap());
    let csfs = csf_basis(&basis, 0.0).unwrap();
    let algebra = dla_closure(&generators(family, &basis), Some(&csfs), &ClosureOptions::default()).unwrap();
    let occ: Vec<usize> = (0..n_elec / 2).collect();
    let phi = StateVector::basis_state(basis.clone(), Determinant::from_occupations(&occ, &[], &[]).unwrap()).unwrap();
    let reach = reachable_subspace(&algebra, &phi, &csfs).unwrap();
    assert_eq!(reach.invariant_dim + reach.complement_dim, csfs.len());
    let (inv, comp) = (&reach.invariant_vectors, &reach.complement_vectors);
    assert!((inv.transpose() * comp).abs().max() < 1e-10);
    for i in 0..algebra.len() {
        let m = csfs.columns.transpose() * algebra.element_on_sector(i) * &csfs.columns;
        let leak = inv.transpose() * &m * comp;
        assert!(leak.norm() < 1e-9, "element {i} leaks {:e}", leak.norm());
    }
    reach.complement_dim
}

#[test]
fn reachable_complement_is_invariant() {
    assert_eq!(complement_is_invariant(PoolFamily::PDint0, 4, 4), 0);
    complement_is_invariant(PoolFamily::SaGspd, 5, 4);
    complement_is_invariant(PoolFamily::SaGspd, 4, 4);
}

#[test]
fn parity_is_conserved_without_an_irrep_constraint() {
    // four irreps, so a totally symmetric double can flip two parities at once
    for (n, n_elec, sz2) in [(4, 2, 0), (4, 3, 1), (5, 2, 0), (5, 3, -1)] {
        let irr: Vec<IrrepLabel> = (0..n).map(|p| IrrepLabel::new((p % 4) as u8).unwrap()).collect();
        let basis = enumerate_sector(n, n_elec, Some(sz2), None, &irr).unwrap();
        let parity_norm = |family| {
            let algebra = dla_closure(&generators(family, &basis), None, &ClosureOptions::default()).unwrap();
            (0..4)
                .map(|b| algebra.max_commutator_norm(&parity_matrix(IrrepLabel::new(b).unwrap(), &basis, &irr)).unwrap())
                .fold(0.0, f64::max)
        };
        let sa = parity_norm(PoolFamily::SaGspd);
        assert!(sa < 1e-9, "N={n_elec}: {sa:e}");
        let gsd = parity_norm(PoolFamily::Gsd);
        assert!(gsd > 1e-3, "GSD closure unexpectedly conserves parity for N={n_elec}");
    }
}

#[test]
fn closure_on_determinants_contains_the_generators() {
    let irr = alternating(3);
    let basis = enumerate_sector(3, 2, Some(0), None, &irr).unwrap();
    let gens = generators(PoolFamily::Gsd, &basis);
    let algebra = dla_closure(&gens, None, &ClosureOptions::default()).unwrap();
    let dense: Vec<DMatrix<f64>> = gens.iter().map(|g| g.to_dense()).collect();
    assert!(algebra.span_residual(&dense) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jacobi_identity(family in 0usize..5, i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let p = pool(PoolFamily::ALL[family], 4);
        let g = |x: usize| &p[x % p.len()].generators[0];
        let (a, b, c) = (g(i), g(j), g(k));
        let jac = &(&commutator(a, &commutator(b, c)) + &commutator(b, &commutator(c, a))) + &commutator(c, &commutator(a, b));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn commutator_is_bilinear_and_antisymmetric(i in any::<usize>(), j in any::<usize>(), k in any::<usize>(), x in -5i64..6) {
        let p = pool(PoolFamily::SaGspd, 4);
        let g = |t: usize| &p[t % p.len()].generators[0];
        let (a, b, c) = (g(i), g(j), g(k));
        prop_assert_eq!(commutator(a, b), -commutator(b, a));
        let xa = Coeff::int(x) * a;
        let lhs = commutator(&(&xa + c), b);
        let rhs = &(Coeff::int(x) * &commutator(a, b)) + &commutator(c, b);
        prop_assert_eq!(lhs, rhs);
    }
}
