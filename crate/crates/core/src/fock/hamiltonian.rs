//! Electronic Hamiltonian on a determinant basis (Slater–Condon rules).

use super::poly::apply_masks;
use super::{CsrMatrix, Determinant, SectorBasis};
use crate::error::{Error, Result};
use crate::fcidump::MolecularIntegrals;

fn occ_list(d: u64) -> Vec<usize> {
    (0..64).filter(|&i| d >> i & 1 == 1).collect()
}

/// `H = e_core + Σ h_pq E_pq + ½ Σ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}`
pub fn build_hamiltonian(m: &MolecularIntegrals, basis: &SectorBasis) -> Result<CsrMatrix> {
    if basis.n_spatial() != m.n_spatial() {
        return Err(Error::InvalidInput(format!(
            "basis has {} orbitals, integrals {}",
            basis.n_spatial(),
            m.n_spatial()
        )));
    }
    if let Some(n) = basis.n_electrons() {
        if n != m.n_electrons() {
            return Err(Error::InvalidInput(format!(
                "basis has {n} electrons, integrals declare {}",
                m.n_electrons()
            )));
        }
    }
    let nso = 2 * m.n_spatial();
    let sp = |i: usize| i >> 1;
    let same = |i: usize, j: usize| i & 1 == j & 1;
    let mut trip = Vec::new();
    for (col, &d) in basis.words().iter().enumerate() {
        let occ = occ_list(d);
        let vir: Vec<usize> = (0..nso).filter(|&i| d >> i & 1 == 0).collect();

        let mut e = m.e_core();
        for &i in &occ {
            e += m.h1(sp(i), sp(i));
            for &j in &occ {
                e += 0.5 * m.h2(sp(i), sp(i), sp(j), sp(j));
                if same(i, j) {
                    e -= 0.5 * m.h2(sp(i), sp(j), sp(j), sp(i));
                }
            }
        }
        trip.push((col, col, e));

        for &i in &occ {
            for &a in &vir {
                if !same(i, a) {
                    continue;
                }
                let mut v = m.h1(sp(a), sp(i));
                for &k in &occ {
                    v += m.h2(sp(a), sp(i), sp(k), sp(k));
                    if same(k, i) {
                        v -= m.h2(sp(a), sp(k), sp(k), sp(i));
                    }
                }
                if v == 0.0 {
                    continue;
                }
                let (sign, t) = apply_masks(1 << a, 1 << i, d).expect("valid single");
                if let Some(row) = basis.index_of(Determinant(t)) {
                    trip.push((row, col, sign * v));
                }
            }
        }

        for (x, &i) in occ.iter().enumerate() {
            for &j in &occ[x + 1..] {
                for (y, &a) in vir.iter().enumerate() {
                    for &b in &vir[y + 1..] {
                        let mut v = 0.0;
                        if same(a, i) && same(b, j) {
                            v += m.h2(sp(a), sp(i), sp(b), sp(j));
                        }
                        if same(a, j) && same(b, i) {
                            v -= m.h2(sp(a), sp(j), sp(b), sp(i));
                        }
                        if v == 0.0 {
                            continue;
                        }
                        // Operator a†_a a†_b a_j a_i, canonical masks with a<b, i<j:
                        // a^b a^a a_j a_i = -(a^a a^b a_j a_i).
                        let (sign, t) = apply_masks(1 << a | 1 << b, 1 << i | 1 << j, d).expect("valid double");
                        if let Some(row) = basis.index_of(Determinant(t)) {
                            trip.push((row, col, -sign * v));
                        }
                    }
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(basis.len(), basis.len(), trip))
}

/// Second-quantized Hamiltonian applied by brute force, string by string.
/// Slow; used as an oracle.
pub fn hamiltonian_polynomial(m: &MolecularIntegrals, basis: &SectorBasis) -> CsrMatrix {
    use super::poly::{normal_order, Op};
    let n = m.n_spatial();
    let mut trip = Vec::new();
    let push_word = |coef: f64, word: &[Op], trip: &mut Vec<(usize, usize, f64)>| {
        if coef == 0.0 {
            return;
        }
        for (s, c, a) in normal_order(word) {
            for (col, &d) in basis.words().iter().enumerate() {
                if let Some((sign, t)) = apply_masks(c, a, d) {
                    if let Some(row) = basis.index_of(Determinant(t)) {
                        trip.push((row, col, coef * s as f64 * sign));
                    }
                }
            }
        }
    };
    for col in 0..basis.len() {
        trip.push((col, col, m.e_core()));
    }
    for p in 0..n {
        for q in 0..n {
            for s in 0..2u8 {
                let (ps, qs) = ((2 * p) as u8 + s, (2 * q) as u8 + s);
                push_word(m.h1(p, q), &[Op::Cre(ps), Op::Ann(qs)], &mut trip);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = 0.5 * m.h2(p, q, r, s);
                    for si in 0..2u8 {
                        for ti in 0..2u8 {
                            let w = [
                                Op::Cre((2 * p) as u8 + si),
                                Op::Cre((2 * r) as u8 + ti),
                                Op::Ann((2 * s) as u8 + ti),
                                Op::Ann((2 * q) as u8 + si),
                            ];
                            push_word(v, &w, &mut trip);
                        }
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(basis.len(), basis.len(), trip)
}
