//! Operator pools: GSD, saGSD, saGSpD, saGSpD-full and pDint0.
//!
//! Operator conventions (spinorbitals `p,q,r,s`, spatial `P,Q,R,S`):
//!
//! * `A_p^q = a^q a_p − a^p a_q`
//! * `A_pq^rs = a^r a^s a_q a_p − a^p a^q a_s a_r`
//! * `A_P^Q = (A_{P↑}^{Q↑} + A_{P↓}^{Q↓})/√2`
//! * `[0]A_PQ^RS` and `[1]A_PQ^RS`: singlet doubles through an intermediate
//!   singlet / triplet, with the δ-dependent prefactors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::IrrepLabel;
use crate::fock::{matrix_rep_closed, Coeff, CsrMatrix, FermionPolynomial, Op, SectorBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

use Spin::{Down, Up};

/// Spinorbital index of `(P, σ)`.
pub fn so(p: usize, s: Spin) -> usize {
    2 * p + matches!(s, Down) as usize
}

fn anti(word: &[Op]) -> FermionPolynomial {
    let p = FermionPolynomial::from_word(Coeff::ONE, word);
    &p - &p.adjoint()
}

/// `A_p^q` over spinorbitals.
pub fn sr_single(p: usize, q: usize) -> FermionPolynomial {
    anti(&[Op::Cre(q as u8), Op::Ann(p as u8)])
}

/// `A_pq^rs` over spinorbitals.
pub fn sr_double(p: usize, q: usize, r: usize, s: usize) -> FermionPolynomial {
    anti(&[Op::Cre(r as u8), Op::Cre(s as u8), Op::Ann(q as u8), Op::Ann(p as u8)])
}

/// Spin-resolved double with explicit spins, `A_{Pσ Qτ}^{Rυ Sω}`.
pub fn srd(p: usize, sp: Spin, q: usize, sq: Spin, r: usize, sr: Spin, s: usize, ss: Spin) -> FermionPolynomial {
    sr_double(so(p, sp), so(q, sq), so(r, sr), so(s, ss))
}

/// `n_{Pσ}`
pub fn number(p: usize, s: Spin) -> FermionPolynomial {
    FermionPolynomial::number(so(p, s))
}

/// Singlet spin-adapted single `A_P^Q`.
pub fn sa_single(p: usize, q: usize) -> FermionPolynomial {
    Coeff::inv_sqrt2() * (sr_single(so(p, Up), so(q, Up)) + sr_single(so(p, Down), so(q, Down)))
}

/// `[0]A_PQ^RS`
pub fn sa_double0(p: usize, q: usize, r: usize, s: usize) -> FermionPolynomial {
    let body = srd(p, Up, q, Down, r, Up, s, Down) - srd(p, Up, q, Down, r, Down, s, Up)
        - srd(p, Down, q, Up, r, Up, s, Down)
        + srd(p, Down, q, Up, r, Down, s, Up);
    // 1/(2√((1+δPQ)(1+δRS)))
    let pref = match ((p == q) as u8) + ((r == s) as u8) {
        0 => Coeff::rational(1, 2),
        1 => Coeff::inv_sqrt2().scale(1, 2),
        _ => Coeff::rational(1, 4),
    };
    pref * body
}

/// `[1]A_PQ^RS` (zero when `P = Q` or `R = S`).
pub fn sa_double1(p: usize, q: usize, r: usize, s: usize) -> FermionPolynomial {
    if p == q || r == s {
        return FermionPolynomial::zero();
    }
    let mixed = srd(p, Up, q, Down, r, Up, s, Down)
        + srd(p, Up, q, Down, r, Down, s, Up)
        + srd(p, Down, q, Up, r, Up, s, Down)
        + srd(p, Down, q, Up, r, Down, s, Up);
    let body = srd(p, Up, q, Up, r, Up, s, Up) + srd(p, Down, q, Down, r, Down, s, Down) + Coeff::rational(1, 2) * mixed;
    Coeff::inv_sqrt3() * body
}

/// Perfect-pairing double `A_PP^QQ = a^{Q↑}a^{Q↓}a_{P↓}a_{P↑} − h.c.`
pub fn perfect_pair(p: usize, q: usize) -> FermionPolynomial {
    sa_double0(p, p, q, q)
}

/// `A_PP^QR`
pub fn pair_single(p: usize, q: usize, r: usize) -> FermionPolynomial {
    sa_double0(p, p, q, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    SpinResolvedSingle,
    SpinResolvedDouble,
    SaSingle,
    SaDoubleInt0,
    SaDoubleInt1,
    PerfectPairing,
    Tuple,
}

/// Symmetries conserved by an element's unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conserved {
    pub n: bool,
    pub gamma: bool,
    pub sz: bool,
    pub s2: bool,
}

#[derive(Clone, Debug)]
pub struct PoolElement {
    pub id: String,
    pub generators: Vec<FermionPolynomial>,
    pub kind: PoolKind,
    pub irrep: IrrepLabel,
    pub conserved: Conserved,
    /// Spatial orbitals carried by the excitation (with multiplicity).
    pub orbitals: Vec<usize>,
    /// Member ids, for tuples.
    pub members: Vec<String>,
}

impl PoolElement {
    fn single_gen(id: String, g: FermionPolynomial, kind: PoolKind, orbitals: Vec<usize>, irreps: &[IrrepLabel]) -> Self {
        let irrep = IrrepLabel::product_of(orbitals.iter().map(|&p| irreps[p]));
        let s2 = !matches!(kind, PoolKind::SpinResolvedSingle | PoolKind::SpinResolvedDouble);
        PoolElement {
            id,
            generators: vec![g],
            kind,
            irrep,
            conserved: Conserved { n: true, gamma: irrep.is_totally_symmetric(), sz: true, s2 },
            orbitals,
            members: Vec::new(),
        }
    }

    pub fn is_tuple(&self) -> bool {
        self.generators.len() > 1
    }
}

/// Table-I test: the XOR of all orbital irreps in the excitation vanishes.
pub fn is_totally_symmetric(e: &PoolElement, orbital_irreps: &[IrrepLabel]) -> bool {
    IrrepLabel::product_of(e.orbitals.iter().map(|&p| orbital_irreps[p])).is_totally_symmetric()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoolFamily {
    #[serde(rename = "gsd")]
    Gsd,
    #[serde(rename = "sagsd")]
    SaGsd,
    #[serde(rename = "sagspd")]
    SaGspd,
    #[serde(rename = "sagspd-full")]
    SaGspdFull,
    #[serde(rename = "pdint0")]
    PDint0,
}

impl PoolFamily {
    pub const ALL: [PoolFamily; 5] =
        [PoolFamily::Gsd, PoolFamily::SaGsd, PoolFamily::SaGspd, PoolFamily::SaGspdFull, PoolFamily::PDint0];

    pub fn name(self) -> &'static str {
        match self {
            PoolFamily::Gsd => "gsd",
            PoolFamily::SaGsd => "sagsd",
            PoolFamily::SaGspd => "sagspd",
            PoolFamily::SaGspdFull => "sagspd-full",
            PoolFamily::PDint0 => "pdint0",
        }
    }
}

impl fmt::Display for PoolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PoolFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PoolFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = PoolFamily::ALL.iter().map(|f| f.name()).collect();
                Error::InvalidInput(format!("unknown pool '{s}' (valid: {})", valid.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolSpec {
    pub family: PoolFamily,
    pub enforce_spatial: bool,
    pub orbital_irreps: Vec<IrrepLabel>,
}

impl PoolSpec {
    pub fn build(&self) -> Vec<PoolElement> {
        let (n, irr, f) = (self.orbital_irreps.len(), &self.orbital_irreps[..], self.enforce_spatial);
        match self.family {
            PoolFamily::Gsd => build_gsd(n, irr, f),
            PoolFamily::SaGsd => build_sagsd(n, irr, f),
            PoolFamily::SaGspd => build_sagspd(n, irr, f),
            PoolFamily::SaGspdFull => build_sagspd_full(n, irr),
            PoolFamily::PDint0 => build_pdint0(n, irr, f),
        }
    }

    /// Whether every unitary of the pool conserves the point-group irrep.
    pub fn conserves_gamma(&self) -> bool {
        self.family != PoolFamily::SaGspdFull && (self.enforce_spatial || self.orbital_irreps.iter().all(|l| *l == self.orbital_irreps[0]))
    }

    pub fn conserves_s2(&self) -> bool {
        self.family != PoolFamily::Gsd
    }
}

fn so_name(i: usize) -> String {
    format!("{}{}", i / 2, if i % 2 == 0 { 'a' } else { 'b' })
}

fn keep(filter: bool, e: &PoolElement) -> bool {
    !filter || e.irrep.is_totally_symmetric()
}

/// Spin-resolved generalized singles and doubles.
pub fn build_gsd(n_spatial: usize, irreps: &[IrrepLabel], enforce_spatial: bool) -> Vec<PoolElement> {
    let nso = 2 * n_spatial;
    let mut out = Vec::new();
    for p in 0..n_spatial {
        for q in p + 1..n_spatial {
            for s in [Up, Down] {
                let (a, b) = (so(p, s), so(q, s));
                let e = PoolElement::single_gen(
                    format!("g1({};{})", so_name(a), so_name(b)),
                    sr_single(a, b),
                    PoolKind::SpinResolvedSingle,
                    vec![p, q],
                    irreps,
                );
                if keep(enforce_spatial, &e) {
                    out.push(e);
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..nso).flat_map(|p| (p + 1..nso).map(move |q| (p, q))).collect();
    let downs = |(p, q): (usize, usize)| p % 2 + q % 2;
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            if (p, q) >= (r, s) || downs((p, q)) != downs((r, s)) {
                continue;
            }
            let e = PoolElement::single_gen(
                format!("g2({},{};{},{})", so_name(p), so_name(q), so_name(r), so_name(s)),
                sr_double(p, q, r, s),
                PoolKind::SpinResolvedDouble,
                vec![p / 2, q / 2, r / 2, s / 2],
                irreps,
            );
            if keep(enforce_spatial, &e) {
                out.push(e);
            }
        }
    }
    out
}

fn sa_singles(n: usize, irreps: &[IrrepLabel], filter: bool) -> Vec<PoolElement> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let e = PoolElement::single_gen(format!("sa({p};{q})"), sa_single(p, q), PoolKind::SaSingle, vec![p, q], irreps);
            if keep(filter, &e) {
                out.push(e);
            }
        }
    }
    out
}

fn perfect_pairs(n: usize, irreps: &[IrrepLabel]) -> Vec<PoolElement> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            out.push(PoolElement::single_gen(
                format!("pp({p};{q})"),
                perfect_pair(p, q),
                PoolKind::PerfectPairing,
                vec![p, p, q, q],
                irreps,
            ));
        }
    }
    out
}

/// Index tuples `P<Q, R<S, (P,Q) < (R,S)` (the "P<Q, P≤R, ξ<S" rule).
fn double_tuples(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
    let mut out = Vec::new();
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            if (p, q) < (r, s) {
                out.push((p, q, r, s));
            }
        }
    }
    out
}

/// Singlet spin-adapted generalized singles and doubles.
pub fn build_sagsd(n_spatial: usize, irreps: &[IrrepLabel], enforce_spatial: bool) -> Vec<PoolElement> {
    let n = n_spatial;
    let mut out = sa_singles(n, irreps, enforce_spatial);
    out.extend(perfect_pairs(n, irreps));
    for p in 0..n {
        for q in 0..n {
            for r in q + 1..n {
                let e = PoolElement::single_gen(
                    format!("d0({p},{p};{q},{r})"),
                    pair_single(p, q, r),
                    PoolKind::SaDoubleInt0,
                    vec![p, p, q, r],
                    irreps,
                );
                if keep(enforce_spatial, &e) {
                    out.push(e);
                }
            }
        }
    }
    for (p, q, r, s) in double_tuples(n) {
        let e0 = PoolElement::single_gen(
            format!("d0({p},{q};{r},{s})"),
            sa_double0(p, q, r, s),
            PoolKind::SaDoubleInt0,
            vec![p, q, r, s],
            irreps,
        );
        if keep(enforce_spatial, &e0) {
            out.push(e0);
        }
        let g1 = sa_double1(p, q, r, s);
        if g1.is_zero() {
            continue;
        }
        let e1 = PoolElement::single_gen(format!("d1({p},{q};{r},{s})"), g1, PoolKind::SaDoubleInt1, vec![p, q, r, s], irreps);
        if keep(enforce_spatial, &e1) {
            out.push(e1);
        }
    }
    out
}

/// Spin-adapted singles plus perfect-pairing doubles.
pub fn build_sagspd(n_spatial: usize, irreps: &[IrrepLabel], enforce_spatial: bool) -> Vec<PoolElement> {
    let mut out = sa_singles(n_spatial, irreps, enforce_spatial);
    out.extend(perfect_pairs(n_spatial, irreps));
    out
}

/// saGSpD without the spatial filter, plus ordered 2- and 3-tuples of
/// non-totally-symmetric singles whose irreps multiply to the totally
/// symmetric one.
pub fn build_sagspd_full(n_spatial: usize, irreps: &[IrrepLabel]) -> Vec<PoolElement> {
    let mut out = build_sagspd(n_spatial, irreps, false);
    let mut off: Vec<PoolElement> = out
        .iter()
        .filter(|e| e.kind == PoolKind::SaSingle && !e.irrep.is_totally_symmetric())
        .cloned()
        .collect();
    off.sort_by(|a, b| a.id.cmp(&b.id));
    let tuple = |members: &[&PoolElement]| PoolElement {
        id: format!("t[{}]", members.iter().map(|m| m.id.as_str()).collect::<Vec<_>>().join(",")),
        generators: members.iter().map(|m| m.generators[0].clone()).collect(),
        kind: PoolKind::Tuple,
        irrep: IrrepLabel::product_of(members.iter().map(|m| m.irrep)),
        conserved: Conserved { n: true, gamma: false, sz: true, s2: true },
        orbitals: members.iter().flat_map(|m| m.orbitals.iter().copied()).collect(),
        members: members.iter().map(|m| m.id.clone()).collect(),
    };
    for a in &off {
        for b in &off {
            if (a.irrep * b.irrep).is_totally_symmetric() {
                out.push(tuple(&[a, b]));
            }
        }
    }
    for a in &off {
        for b in &off {
            for c in &off {
                if (a.irrep * b.irrep * c.irrep).is_totally_symmetric() {
                    out.push(tuple(&[a, b, c]));
                }
            }
        }
    }
    out
}

/// Perfect-pairing doubles plus intermediate-singlet doubles with
/// `P ≠ Q` and `R ≠ S`.
pub fn build_pdint0(n_spatial: usize, irreps: &[IrrepLabel], enforce_spatial: bool) -> Vec<PoolElement> {
    let mut out = perfect_pairs(n_spatial, irreps);
    for (p, q, r, s) in double_tuples(n_spatial) {
        let e = PoolElement::single_gen(
            format!("d0({p},{q};{r},{s})"),
            sa_double0(p, q, r, s),
            PoolKind::SaDoubleInt0,
            vec![p, q, r, s],
            irreps,
        );
        if keep(enforce_spatial, &e) {
            out.push(e);
        }
    }
    out
}

/// An element together with its generator matrices on a working sector.
#[derive(Clone, Debug)]
pub struct SectorElement {
    pub element: PoolElement,
    pub matrices: Vec<CsrMatrix>,
}

/// Represent a pool on a sector, dropping elements with a generator that
/// vanishes identically there. Fails if a generator leaks out of the sector.
pub fn realize_on_sector(pool: &[PoolElement], basis: &SectorBasis) -> Result<Vec<SectorElement>> {
    let mut out = Vec::new();
    for e in pool {
        let mats = e
            .generators
            .iter()
            .map(|g| matrix_rep_closed(g, basis))
            .collect::<Result<Vec<_>>>()?;
        if mats.iter().any(|m| m.nnz() == 0) {
            continue;
        }
        out.push(SectorElement { element: e.clone(), matrices: mats });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt(n: usize) -> Vec<IrrepLabel> {
        (0..n).map(|p| IrrepLabel::new((p % 2) as u8).unwrap()).collect()
    }

    fn count(pool: &[PoolElement], k: PoolKind) -> usize {
        pool.iter().filter(|e| e.kind == k).count()
    }

    #[test]
    fn gsd_two_orbitals() {
        let pool = build_gsd(2, &[IrrepLabel::TOTALLY_SYMMETRIC; 2], false);
        assert_eq!(count(&pool, PoolKind::SpinResolvedSingle), 2);
        assert!(pool.iter().all(|e| e.generators[0].is_anti_hermitian()));
    }

    #[test]
    fn sagspd_counts_on_h6_pattern() {
        let irr = alt(6);
        let pool = build_sagspd(6, &irr, true);
        assert_eq!(count(&pool, PoolKind::PerfectPairing), 15);
        assert_eq!(count(&pool, PoolKind::SaSingle), 6);
        let open = build_sagspd(6, &irr, false);
        assert_eq!(count(&open, PoolKind::SaSingle) - 6, 9);
    }

    #[test]
    fn sagspd_full_two_tuples() {
        let irr = alt(6);
        let pool = build_sagspd_full(6, &irr);
        let tuples: Vec<_> = pool.iter().filter(|e| e.kind == PoolKind::Tuple).collect();
        assert_eq!(tuples.iter().filter(|t| t.generators.len() == 2).count(), 81);
        assert_eq!(tuples.iter().filter(|t| t.generators.len() == 3).count(), 0);
        assert!(tuples.iter().all(|t| t.irrep.is_totally_symmetric()));
    }

    #[test]
    fn double1_vanishes_on_repeated_index() {
        assert!(sa_double1(1, 1, 2, 3).is_zero());
        assert!(sa_double1(0, 1, 2, 2).is_zero());
    }

    #[test]
    fn table_one_rows() {
        let irr: Vec<IrrepLabel> = (0..4).map(|b| IrrepLabel::new(b).unwrap()).collect();
        let pool = build_sagsd(4, &irr, false);
        let find = |id: &str| pool.iter().find(|e| e.id == id).unwrap();
        assert!(is_totally_symmetric(find("pp(0;3)"), &irr));
        assert!(!is_totally_symmetric(find("sa(0;1)"), &irr));
        assert!(is_totally_symmetric(find("d0(0,1;2,3)"), &irr));
        assert!(is_totally_symmetric(find("d1(0,1;2,3)"), &irr));
    }

    #[test]
    fn pdint0_subset_of_sagsd() {
        let irr = alt(5);
        let sagsd: std::collections::HashSet<String> = build_sagsd(5, &irr, true).into_iter().map(|e| e.id).collect();
        let pd = build_pdint0(5, &irr, true);
        assert!(pd.iter().all(|e| sagsd.contains(&e.id)));
        assert!(pd.len() < sagsd.len());
        for e in pd.iter().filter(|e| e.kind != PoolKind::PerfectPairing) {
            let o = &e.orbitals;
            assert!(o[0] != o[1] && o[2] != o[3]);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in PoolFamily::ALL {
            assert_eq!(f.name().parse::<PoolFamily>().unwrap(), f);
        }
        let err = "nope".parse::<PoolFamily>().unwrap_err().to_string();
        assert!(err.contains("sagspd-full"));
    }
}
