//! Shared helpers for the integration targets.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adaptsym::adapt::{AdaptConfig, AdaptProblem, Generator, ParamBudget, ReferenceSpec, VqeProblem};
use adaptsym::fcidump::{parse_fcidump, read_fcidump, IrrepLabel, MolecularIntegrals};
use adaptsym::fock::{matrix_rep, Coeff, FermionPolynomial, SectorBasis};
use adaptsym::lie::commutator;
use adaptsym::pools::{number, PoolElement, PoolFamily, PoolSpec, Spin};
use adaptsym::symmetry::s2_polynomial;

pub fn fixture(name: &str) -> MolecularIntegrals {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.fcidump"));
    read_fcidump(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Orbitals alternating between the two irreps of a C2-type group.
pub fn alternating(n: usize) -> Vec<IrrepLabel> {
    (0..n).map(|p| IrrepLabel::new((p % 2) as u8).unwrap()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real integrals with full permutational symmetry, zero wherever the
/// orbital irreps forbid a value.
pub fn random_integrals(n_electrons: usize, irreps: Vec<IrrepLabel>, seed: u64) -> MolecularIntegrals {
    let n = irreps.len();
    let mut r = rng(seed);
    let mut h1 = vec![0.0; n * n];
    for p in 0..n {
        for q in 0..=p {
            if irreps[p] == irreps[q] {
                let v = if p == q { -2.0 + 0.5 * p as f64 + r.random_range(-0.2..0.2) } else { r.random_range(-0.3..0.3) };
                h1[p * n + q] = v;
                h1[q * n + p] = v;
            }
        }
    }
    let mut h2 = vec![0.0; n * n * n * n];
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    for p in 0..n {
        for q in 0..=p {
            for s in 0..n {
                for t in 0..=s {
                    if idx(p, q, 0, 0) < idx(s, t, 0, 0)
                        || !IrrepLabel::product_of([irreps[p], irreps[q], irreps[s], irreps[t]]).is_totally_symmetric()
                    {
                        continue;
                    }
                    let v = if p == q && s == t { r.random_range(0.2..0.7) } else { r.random_range(-0.1..0.1) };
                    for (a, b) in [(p, q), (q, p)] {
                        for (c, d) in [(s, t), (t, s)] {
                            h2[idx(a, b, c, d)] = v;
                            h2[idx(c, d, a, b)] = v;
                        }
                    }
                }
            }
        }
    }
    MolecularIntegrals::new(n_electrons, 0, irreps, h1, h2, 0.7).unwrap()
}

pub fn total_number(n: usize) -> FermionPolynomial {
    (0..n).fold(FermionPolynomial::zero(), |acc, p| &(&acc + &number(p, Spin::Up)) + &number(p, Spin::Down))
}

pub fn sz(n: usize) -> FermionPolynomial {
    let d = (0..n).fold(FermionPolynomial::zero(), |acc, p| &(&acc + &number(p, Spin::Up)) - &number(p, Spin::Down));
    Coeff::rational(1, 2) * d
}

/// Which of (N, Γ, S_z, S²) every generator of `e` conserves, decided from
/// exact commutators and, for Γ, from the matrix couplings.
pub fn measured_conservation(e: &PoolElement, n: usize, irreps: &[IrrepLabel], fock: &SectorBasis) -> [bool; 4] {
    let (nn, szz, s2) = (total_number(n), sz(n), s2_polynomial(n));
    let all = |op: &FermionPolynomial| e.generators.iter().all(|g| commutator(g, op).is_zero());
    let gamma = e.generators.iter().all(|g| {
        matrix_rep(g, fock).triplets().all(|(i, j, _)| fock.determinant(i).irrep(irreps) == fock.determinant(j).irrep(irreps))
    });
    [all(&nn), gamma, all(&szz), all(&s2)]
}

pub fn central_difference(p: &VqeProblem<'_>, theta: &[f64], h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|k| {
            let (mut a, mut b) = (theta.to_vec(), theta.to_vec());
            a[k] += h;
            b[k] -= h;
            (p.energy(&a) - p.energy(&b)) / (2.0 * h)
        })
        .collect()
}

/// Check every pool family on `irreps`: a flag an element declares must hold
/// exactly, and a symmetry the family does not guarantee must be broken by at
/// least one element (when `witness` is set; degenerate irrep patterns can
/// conserve more than the family promises). Returns the element count and the
/// violations found.
pub fn flag_violations(irreps: &[IrrepLabel], witness: bool) -> (usize, Vec<String>) {
    let n = irreps.len();
    let fock = SectorBasis::fock_space(n);
    let names = ["N", "Γ", "S_z", "S²"];
    let (mut checked, mut bad) = (0, Vec::new());
    for family in PoolFamily::ALL {
        let spec = PoolSpec { family, enforce_spatial: false, orbital_irreps: irreps.to_vec() };
        let mut broken = [false; 4];
        for e in spec.build() {
            checked += 1;
            let c = e.conserved;
            let m = measured_conservation(&e, n, irreps, &fock);
            for (k, (declared, holds)) in [c.n, c.gamma, c.sz, c.s2].into_iter().zip(m).enumerate() {
                if declared && !holds {
                    bad.push(format!("{} claims {} but breaks it", e.id, names[k]));
                }
                broken[k] |= !holds;
            }
        }
        let family_level = [true, spec.conserves_gamma(), true, spec.conserves_s2()];
        for k in (0..4).filter(|_| witness) {
            if family_level[k] == broken[k] {
                bad.push(format!("{family}: family-level {} flag {} but broken = {}", names[k], family_level[k], broken[k]));
            }
        }
    }
    (checked, bad)
}

/// Compact run of every property family, for the acceptance summary.
pub fn property_smoke() -> Vec<(&'static str, bool, String)> {
    let mut out = Vec::new();
    let n = 4;
    let irreps = alternating(n);

    // conserved flags versus commutators
    let (checked, bad) = flag_violations(&irreps, true);
    out.push(("conserved flags", bad.is_empty(), format!("{checked} elements, violations {bad:?}")));

    // analytic vs finite-difference gradient
    let m = random_integrals(4, irreps.clone(), 11);
    let cfg = AdaptConfig::new(PoolSpec { family: PoolFamily::SaGsd, enforce_spatial: true, orbital_irreps: irreps.clone() });
    let problem = AdaptProblem::new(&m, &cfg).unwrap();
    let gens: Vec<Generator> = problem.pool.iter().take(5).map(|e| Generator::new(&e.matrices[0])).collect();
    let reference = adaptsym::adapt::build_reference(&ReferenceSpec::closed_shell(2), problem.basis.clone()).unwrap();
    let vqe = VqeProblem { h: &problem.hamiltonian, factors: gens.iter().collect(), reference: &reference.amps };
    let mut r = rng(3);
    let theta: Vec<f64> = (0..gens.len()).map(|_| r.random_range(-1.0..1.0)).collect();
    let (_, g) = vqe.energy_and_gradient(&theta);
    let fd = central_difference(&vqe, &theta, 1e-4);
    let err = g.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(("gradient", err < 1e-7, format!("max |analytic − FD| {err:.1e}")));

    // monotone ADAPT energies
    let mut cfg = cfg;
    cfg.param_budget = ParamBudget::Fixed(6);
    let trace = problem.run(&cfg, &ReferenceSpec::closed_shell(2)).unwrap().trace;
    let rise = trace.iterations.windows(2).map(|w| w[1].energy - w[0].energy).fold(f64::MIN, f64::max);
    out.push(("VQE monotonicity", rise <= 1e-10, format!("largest energy rise {rise:.1e}")));

    // Jacobi on sampled triples
    let pool = PoolSpec { family: PoolFamily::SaGspd, enforce_spatial: false, orbital_irreps: irreps.clone() }.build();
    let mut bad = 0;
    for _ in 0..100 {
        let mut pick = || &pool[r.random_range(0..pool.len())].generators[0];
        let (a, b, c) = (pick(), pick(), pick());
        let j = &(&commutator(a, &commutator(b, c)) + &commutator(b, &commutator(c, a))) + &commutator(c, &commutator(a, b));
        bad += !j.is_zero() as usize;
    }
    out.push(("Jacobi", bad == 0, format!("100 triples, {bad} nonzero")));

    // FCIDUMP round trip
    let text = m.to_fcidump();
    let back = parse_fcidump(&text).unwrap();
    let diff = m.max_abs_diff(&back);
    out.push(("FCIDUMP round-trip", diff == Some(0.0), format!("max difference {diff:?}")));
    out
}
