//! Normal-ordered fermionic operator strings and polynomials.
//!
//! A canonical string is `a^{c1} a^{c2} … a_{a1} a_{a2} …` with
//! `c1 > c2 > …` and `a1 > a2 > …`; it is therefore fully described by the
//! two bit masks of its creation and annihilation indices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::Coeff;

/// Elementary operator on spinorbital `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Cre(u8),
    Ann(u8),
}

impl Op {
    fn index(self) -> u8 {
        match self {
            Op::Cre(i) | Op::Ann(i) => i,
        }
    }
}

#[inline]
fn below(i: u32) -> u64 {
    if i >= 64 { u64::MAX } else { (1u64 << i) - 1 }
}

#[inline]
fn above(i: u32) -> u64 {
    if i >= 63 { 0 } else { !((1u64 << (i + 1)) - 1) }
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros();
            m &= m - 1;
            Some(i)
        }
    })
}

/// Apply the canonical string `(cre, ann)` to an occupation word.
/// Returns the sign and the resulting word, or `None` if annihilated.
#[inline]
pub fn apply_masks(cre: u64, ann: u64, det: u64) -> Option<(f64, u64)> {
    if det & ann != ann {
        return None;
    }
    let mut d = det;
    let mut parity = 0u32;
    // Rightmost (lowest) annihilator acts first.
    for i in bits(ann) {
        parity += (d & below(i)).count_ones();
        d ^= 1 << i;
    }
    if d & cre != 0 {
        return None;
    }
    for i in bits(cre) {
        parity += (d & below(i)).count_ones();
        d |= 1 << i;
    }
    Some((if parity & 1 == 0 { 1.0 } else { -1.0 }, d))
}

/// Number of pairs `(x ∈ a, y ∈ b)` with `x < y`.
fn cross_inversions(a: u64, b: u64) -> u32 {
    bits(a).map(|x| (b & above(x)).count_ones()).sum()
}

/// One canonical term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FermionString {
    pub coeff: Coeff,
    pub cre: u64,
    pub ann: u64,
}

impl FermionString {
    /// Operators in written (canonical) order.
    pub fn ops(&self) -> Vec<Op> {
        let mut v: Vec<Op> = bits(self.cre).map(|i| Op::Cre(i as u8)).collect();
        v.reverse();
        let mut a: Vec<Op> = bits(self.ann).map(|i| Op::Ann(i as u8)).collect();
        a.reverse();
        v.extend(a);
        v
    }

    pub fn apply(&self, det: u64) -> Option<(f64, u64)> {
        apply_masks(self.cre, self.ann, det)
    }
}

/// Normal-order an arbitrary operator word. Each output entry is
/// `(sign, cre_mask, ann_mask)`.
pub fn normal_order(word: &[Op]) -> Vec<(i32, u64, u64)> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Op>, i32)> = vec![(word.to_vec(), 1)];
    while let Some((mut w, sign)) = stack.pop() {
        let pos = w
            .windows(2)
            .position(|p| matches!(p, [Op::Ann(_), Op::Cre(_)]));
        match pos {
            None => {
                if let Some(t) = canonical_block(&w, sign) {
                    out.push(t);
                }
            }
            Some(i) => {
                if w[i].index() == w[i + 1].index() {
                    let mut contracted = w.clone();
                    contracted.drain(i..i + 2);
                    stack.push((contracted, sign));
                }
                w.swap(i, i + 1);
                stack.push((w, -sign));
            }
        }
    }
    out
}

/// Sort an already creator-before-annihilator word into canonical order.
fn canonical_block(w: &[Op], mut sign: i32) -> Option<(i32, u64, u64)> {
    let (mut cre, mut ann) = (0u64, 0u64);
    let mut cre_seq = Vec::new();
    let mut ann_seq = Vec::new();
    for &op in w {
        match op {
            Op::Cre(i) => {
                if cre & (1 << i) != 0 {
                    return None;
                }
                cre |= 1 << i;
                cre_seq.push(i);
            }
            Op::Ann(i) => {
                if ann & (1 << i) != 0 {
                    return None;
                }
                ann |= 1 << i;
                ann_seq.push(i);
            }
        }
    }
    // Permutation parity to strictly decreasing order = number of ascending pairs.
    for seq in [&cre_seq, &ann_seq] {
        for a in 0..seq.len() {
            for b in a + 1..seq.len() {
                if seq[a] < seq[b] {
                    sign = -sign;
                }
            }
        }
    }
    Some((sign, cre, ann))
}

/// Product of two canonical strings as canonical `(sign, cre, ann)` terms.
fn string_product(c1: u64, a1: u64, c2: u64, a2: u64) -> Vec<(i32, u64, u64)> {
    if a1 & c2 == 0 {
        if c1 & c2 != 0 || a1 & a2 != 0 {
            return Vec::new();
        }
        // Move C2 left past A1, then merge the blocks.
        let swaps = a1.count_ones() * c2.count_ones() + cross_inversions(c1, c2) + cross_inversions(a1, a2);
        let sign = if swaps & 1 == 0 { 1 } else { -1 };
        return vec![(sign, c1 | c2, a1 | a2)];
    }
    let mut word = FermionString { coeff: Coeff::ONE, cre: c1, ann: a1 }.ops();
    word.extend(FermionString { coeff: Coeff::ONE, cre: c2, ann: a2 }.ops());
    normal_order(&word)
}

/// A linear combination of canonical strings with exact coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FermionPolynomial {
    terms: BTreeMap<(u64, u64), Coeff>,
}

impl FermionPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_term(Coeff::ONE, 0, 0)
    }

    pub fn from_term(coeff: Coeff, cre: u64, ann: u64) -> Self {
        let mut p = Self::zero();
        p.add_term(coeff, cre, ann);
        p
    }

    /// Build from an operator word in written order (normal-ordering it).
    pub fn from_word(coeff: Coeff, word: &[Op]) -> Self {
        let mut p = Self::zero();
        for (s, c, a) in normal_order(word) {
            p.add_term(if s > 0 { coeff } else { -coeff }, c, a);
        }
        p
    }

    /// `a^p a_p`
    pub fn number(p: usize) -> Self {
        Self::from_term(Coeff::ONE, 1 << p, 1 << p)
    }

    pub fn add_term(&mut self, coeff: Coeff, cre: u64, ann: u64) {
        if coeff.is_zero() {
            return;
        }
        let e = self.terms.entry((cre, ann)).or_insert(Coeff::ZERO);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&(cre, ann));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = FermionString> + '_ {
        self.terms.iter().map(|(&(cre, ann), &coeff)| FermionString { coeff, cre, ann })
    }

    pub fn coeff(&self, cre: u64, ann: u64) -> Coeff {
        self.terms.get(&(cre, ann)).copied().unwrap_or(Coeff::ZERO)
    }

    pub fn scale(&self, c: Coeff) -> Self {
        let mut p = Self::zero();
        for t in self.terms() {
            p.add_term(t.coeff * c, t.cre, t.ann);
        }
        p
    }

    /// Highest spinorbital index touched, if any.
    pub fn max_spinorbital(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(c, a)| c | a)
            .filter(|m| *m != 0)
            .map(|m| 63 - m.leading_zeros())
            .max()
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        let mut p = Self::zero();
        for t in self.terms() {
            let (k, m) = (t.cre.count_ones(), t.ann.count_ones());
            let flips = k * k.saturating_sub(1) / 2 + m * m.saturating_sub(1) / 2;
            let c = if flips % 2 == 0 { t.coeff } else { -t.coeff };
            p.add_term(c, t.ann, t.cre);
        }
        p
    }

    pub fn is_anti_hermitian(&self) -> bool {
        (self + &self.adjoint()).is_zero()
    }

    /// Largest absolute coefficient (as f64).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Net change in the number of electrons.
    pub fn particle_change(&self) -> Option<i32> {
        let mut out = None;
        for t in self.terms() {
            let d = t.cre.count_ones() as i32 - t.ann.count_ones() as i32;
            match out {
                None => out = Some(d),
                Some(o) if o != d => return None,
                _ => {}
            }
        }
        out
    }
}

impl fmt::Debug for FermionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FermionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, t) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coeff)?;
            for op in t.ops() {
                match op {
                    Op::Cre(i) => write!(f, " a^{i}")?,
                    Op::Ann(i) => write!(f, " a_{i}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &FermionPolynomial {
    type Output = FermionPolynomial;
    fn add(self, o: &FermionPolynomial) -> FermionPolynomial {
        let mut p = self.clone();
        for t in o.terms() {
            p.add_term(t.coeff, t.cre, t.ann);
        }
        p
    }
}

impl Sub for &FermionPolynomial {
    type Output = FermionPolynomial;
    fn sub(self, o: &FermionPolynomial) -> FermionPolynomial {
        let mut p = self.clone();
        for t in o.terms() {
            p.add_term(-t.coeff, t.cre, t.ann);
        }
        p
    }
}

impl Neg for &FermionPolynomial {
    type Output = FermionPolynomial;
    fn neg(self) -> FermionPolynomial {
        self.scale(-Coeff::ONE)
    }
}

impl Mul for &FermionPolynomial {
    type Output = FermionPolynomial;
    fn mul(self, o: &FermionPolynomial) -> FermionPolynomial {
        let mut p = FermionPolynomial::zero();
        for x in self.terms() {
            for y in o.terms() {
                let c = x.coeff * y.coeff;
                for (s, cre, ann) in string_product(x.cre, x.ann, y.cre, y.ann) {
                    p.add_term(if s > 0 { c } else { -c }, cre, ann);
                }
            }
        }
        p
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FermionPolynomial {
            type Output = FermionPolynomial;
            fn $m(self, o: FermionPolynomial) -> FermionPolynomial {
                (&self).$m(&o)
            }
        }
        impl $tr<&FermionPolynomial> for FermionPolynomial {
            type Output = FermionPolynomial;
            fn $m(self, o: &FermionPolynomial) -> FermionPolynomial {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FermionPolynomial {
    type Output = FermionPolynomial;
    fn neg(self) -> FermionPolynomial {
        -&self
    }
}

impl Mul<FermionPolynomial> for Coeff {
    type Output = FermionPolynomial;
    fn mul(self, p: FermionPolynomial) -> FermionPolynomial {
        p.scale(self)
    }
}

impl Mul<&FermionPolynomial> for Coeff {
    type Output = FermionPolynomial;
    fn mul(self, p: &FermionPolynomial) -> FermionPolynomial {
        p.scale(self)
    }
}
