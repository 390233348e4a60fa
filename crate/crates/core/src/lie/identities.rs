//! Catalog of nested-commutator identities among spin-adapted singles and
//! perfect-pairing doubles, for distinct spatial orbitals `P<Q<R<S`.
//!
//! Two operator families appear on right-hand sides that are not pool
//! members and have no standard definition; they are fixed here as
//!
//! * `H_Q^S = (1/√2) Σ_σ (a^{Sσ} a_{Qσ} + a^{Qσ} a_{Sσ})` and
//!   `H_QQ^SS = a^{S↑}a^{S↓}a_{Q↓}a_{Q↑} + h.c.` (Hermitian partners of
//!   `A_Q^S`, `A_QQ^SS`);
//! * the conditional triple `T_{PPQ}^{SSR} = (Σ_σ a^{Rσ}a_{Qσ}) a^{S↑}a^{S↓}a_{P↓}a_{P↑} − h.c.`,
//!   which satisfies `T_{PPQ}^{RRQ} = n_Q A_PP^RR`.

use crate::fock::{Coeff, FermionPolynomial as FP, Op};
use crate::pools::{number, pair_single, perfect_pair, sa_double0, sa_double1, sa_single, so, sr_single, srd, Spin};

use super::nested_commutator;

use Spin::{Down as D, Up as U};

/// One catalogued identity `lhs = rhs`.
#[derive(Clone, Debug)]
pub struct Identity {
    pub name: String,
    pub lhs: FP,
    pub rhs: FP,
    /// Set when the right-hand side differs from the commonly quoted form;
    /// describes the amendment.
    pub amended: Option<&'static str>,
}

fn one() -> FP {
    FP::identity()
}

fn n(p: usize, s: Spin) -> FP {
    number(p, s)
}

fn ntot(p: usize) -> FP {
    n(p, U) + n(p, D)
}

fn c(x: Coeff, p: FP) -> FP {
    x * p
}

fn half() -> Coeff {
    Coeff::rational(1, 2)
}

fn r2() -> Coeff {
    Coeff::inv_sqrt2()
}

/// Spin-resolved single `A_{Pσ}^{Qσ}`.
fn s1(p: usize, q: usize, s: Spin) -> FP {
    sr_single(so(p, s), so(q, s))
}

/// `H_Q^S`
pub fn hermitian_single(q: usize, s: usize) -> FP {
    let mut out = FP::zero();
    for sp in [U, D] {
        let (a, b) = (so(q, sp) as u8, so(s, sp) as u8);
        out = out + FP::from_word(Coeff::ONE, &[Op::Cre(b), Op::Ann(a)]) + FP::from_word(Coeff::ONE, &[Op::Cre(a), Op::Ann(b)]);
    }
    r2() * out
}

fn pair_hop(p: usize, q: usize) -> FP {
    FP::from_word(
        Coeff::ONE,
        &[Op::Cre(so(q, U) as u8), Op::Cre(so(q, D) as u8), Op::Ann(so(p, D) as u8), Op::Ann(so(p, U) as u8)],
    )
}

/// `H_QQ^SS`
pub fn hermitian_pair(q: usize, s: usize) -> FP {
    let x = pair_hop(q, s);
    &x + &x.adjoint()
}

/// `T_{PPQ}^{SSR}`
pub fn conditional_triple(p: usize, q: usize, s: usize, r: usize) -> FP {
    let mut e = FP::zero();
    for sp in [U, D] {
        e = e + FP::from_word(Coeff::ONE, &[Op::Cre(so(r, sp) as u8), Op::Ann(so(q, sp) as u8)]);
    }
    let x = &e * &pair_hop(p, s);
    &x - &x.adjoint()
}

/// The four-term spin-polarized combination `√3 [1]A − [0]A`, spelled out.
pub fn triplet_minus_singlet(p: usize, q: usize, r: usize, s: usize) -> FP {
    srd(p, U, q, U, r, U, s, U) + srd(p, D, q, D, r, D, s, D) + srd(p, U, q, D, r, D, s, U) + srd(p, D, q, U, r, U, s, D)
}

struct Catalog(Vec<Identity>);

impl Catalog {
    fn amend(&mut self, name: &str, ops: Vec<FP>, rhs: FP, amended: Option<&'static str>) {
        let lhs = if ops.len() == 1 { ops.into_iter().next().unwrap() } else { nested_commutator(&ops) };
        self.0.push(Identity { name: name.to_string(), lhs, rhs, amended });
    }

    fn add(&mut self, name: &str, ops: Vec<FP>, rhs: FP) {
        self.amend(name, ops, rhs, None);
    }
}

/// All identities for the orbital assignment `(p, q, r, s)`, which must be
/// strictly increasing.
pub fn catalog(p: usize, q: usize, r: usize, s: usize) -> Vec<Identity> {
    assert!(p < q && q < r && r < s, "indices must be strictly increasing");
    let (sa, pp, ps, a0) = (sa_single, perfect_pair, pair_single, sa_double0);
    let mut cat = Catalog(Vec::new());
    let zero = FP::zero;

    // single commutators
    cat.add("[sa(P,Q),sa(R,S)]", vec![sa(p, q), sa(r, s)], zero());
    cat.add("[sa(P,Q),sa(Q,R)]", vec![sa(p, q), sa(q, r)], c(-r2(), sa(p, r)));
    cat.add("[sa(P,Q),sa(P,Q)]", vec![sa(p, q), sa(p, q)], zero());
    cat.add("[pp(P,Q),pp(R,S)]", vec![pp(p, q), pp(r, s)], zero());
    cat.add("[pp(P,Q),pp(Q,R)]", vec![pp(p, q), pp(q, r)], (ntot(q) - one()) * pp(p, r));
    cat.add("[pp(P,Q),pp(Q,R)] (triple form)", vec![pp(p, q), pp(q, r)], conditional_triple(p, q, r, q) - pp(p, r));
    cat.add("[pp(P,Q),pp(P,Q)]", vec![pp(p, q), pp(p, q)], zero());
    cat.add("[pp(P,Q),sa(R,S)]", vec![pp(p, q), sa(r, s)], zero());
    cat.add("[pp(P,Q),sa(Q,R)]", vec![pp(p, q), sa(q, r)], -ps(p, q, r));
    let cond_s = (n(p, D) - n(q, D)) * s1(p, q, U) + (n(p, U) - n(q, U)) * s1(p, q, D);
    cat.amend("[pp(P,Q),sa(P,Q)]", vec![pp(p, q), sa(p, q)], c(r2(), cond_s), Some("overall factor 1/√2"));
    cat.add("[pp(P,Q),sa(P,Q)] (double form)", vec![pp(p, q), sa(p, q)], ps(p, p, q) + a0(q, q, p, q));

    // doubly nested, inner [pp(P,Q), pp(Q,R)]
    let x = || vec![pp(p, q), pp(q, r)];
    let with = |mut v: Vec<FP>, o: FP| {
        v.push(o);
        v
    };
    let one_minus = |t: usize| one() - ntot(t);
    cat.add("[[pp(P,Q),pp(Q,R)],sa(P,S)]", with(x(), sa(p, s)), (ntot(q) - one()) * ps(r, p, s));
    cat.add("[[pp(P,Q),pp(Q,R)],sa(Q,S)]", with(x(), sa(q, s)), -(pp(p, r) * hermitian_single(q, s)));
    cat.add("[[pp(P,Q),pp(Q,R)],sa(R,S)]", with(x(), sa(r, s)), one_minus(q) * ps(p, r, s));
    cat.add(
        "[[pp(P,Q),pp(Q,R)],sa(P,Q)]",
        with(x(), sa(p, q)),
        c(r2(), (n(p, D) + n(q, U) - one()) * srd(r, U, r, D, p, U, q, D))
            - c(r2(), (n(p, U) + n(q, D) - one()) * srd(r, U, r, D, p, D, q, U)),
    );
    cat.amend(
        "[[pp(P,Q),pp(Q,R)],sa(P,R)]",
        with(x(), sa(p, r)),
        c(-r2(), one_minus(q) * (s1(p, r, U) * (n(p, D) - n(r, D)) + s1(p, r, D) * (n(p, U) - n(r, U)))),
        Some("spin-resolved singles A_P^R, not A_P^Q"),
    );
    cat.amend(
        "[[pp(P,Q),pp(Q,R)],sa(Q,R)]",
        with(x(), sa(q, r)),
        c(
            r2(),
            (n(q, D) + n(r, U) - one()) * srd(p, U, p, D, q, U, r, D) - (n(q, U) + n(r, D) - one()) * srd(p, U, p, D, q, D, r, U),
        ),
        Some("overall factor 1/√2"),
    );
    cat.add("[[pp(P,Q),pp(Q,R)],pp(P,S)]", with(x(), pp(p, s)), -(one_minus(p) * one_minus(q) * pp(r, s)));
    cat.add("[[pp(P,Q),pp(Q,R)],pp(Q,S)]", with(x(), pp(q, s)), c(Coeff::int(-2), pp(p, r) * hermitian_pair(q, s)));
    cat.add("[[pp(P,Q),pp(Q,R)],pp(R,S)]", with(x(), pp(r, s)), one_minus(q) * one_minus(r) * pp(p, s));
    let dbl = |t: usize| one_minus(t) + c(Coeff::int(2), n(t, U) * n(t, D));
    cat.add("[[pp(P,Q),pp(Q,R)],pp(P,Q)]", with(x(), pp(p, q)), dbl(p) * pp(q, r));
    cat.add("[[pp(P,Q),pp(Q,R)],pp(P,R)]", with(x(), pp(p, r)), zero());
    cat.add("[[pp(P,Q),pp(Q,R)],pp(Q,R)]", with(x(), pp(q, r)), -(dbl(r) * pp(p, q)));

    // doubly nested, inner [pp(P,Q), sa(Q,R)]
    let y = || vec![pp(p, q), sa(q, r)];
    cat.add("[[pp(P,Q),sa(Q,R)],sa(P,S)]", with(y(), sa(p, s)), a0(p, s, q, r));
    cat.add("[[pp(P,Q),sa(Q,R)],sa(Q,S)]", with(y(), sa(q, s)), c(r2(), ps(p, r, s)));
    cat.add("[[pp(P,Q),sa(Q,R)],sa(R,S)]", with(y(), sa(r, s)), c(r2(), ps(p, q, s)));
    cat.add("[[pp(P,Q),sa(Q,R)],sa(P,Q)]", with(y(), sa(p, q)), c(-r2(), ps(p, p, r)) + a0(p, q, q, r));
    cat.add("[[pp(P,Q),sa(Q,R)],sa(P,R)]", with(y(), sa(p, r)), c(-r2(), ps(p, p, q)) + a0(p, r, q, r));
    cat.add("[[pp(P,Q),sa(Q,R)],sa(Q,R)]", with(y(), sa(q, r)), pp(p, r) - pp(p, q));
    cat.add("[[pp(P,Q),sa(Q,R)],pp(P,S)]", with(y(), pp(p, s)), one_minus(p) * ps(s, q, r));
    // T carries the spin-adapted single's 1/√2 here but not in the
    // perfect-pair form above; no single normalization fits both.
    let t_note = Some("conditional triple scaled by 1/√2");
    cat.amend("[[pp(P,Q),sa(Q,R)],pp(Q,S)]", with(y(), pp(q, s)), c(-r2(), conditional_triple(p, q, s, r)), t_note);
    cat.amend("[[pp(P,Q),sa(Q,R)],pp(R,S)]", with(y(), pp(r, s)), c(-r2(), conditional_triple(p, r, s, q)), t_note);
    cat.add(
        "[[pp(P,Q),sa(Q,R)],pp(P,Q)]",
        with(y(), pp(p, q)),
        n(p, U) * n(p, D) * sa(q, r) + c(r2(), one_minus(p) * (n(q, D) * s1(q, r, U) + n(q, U) * s1(q, r, D))),
    );
    cat.add(
        "[[pp(P,Q),sa(Q,R)],pp(P,R)]",
        with(y(), pp(p, r)),
        -(n(p, U) * n(p, D) * sa(q, r)) - c(r2(), one_minus(p) * (n(r, D) * s1(q, r, U) + n(r, U) * s1(q, r, D))),
    );
    cat.add("[[pp(P,Q),sa(Q,R)],pp(Q,R)]", with(y(), pp(q, r)), zero());

    // doubly nested, inner [pp(P,Q), sa(P,Q)]
    let z = || vec![pp(p, q), sa(p, q)];
    let sqrt2 = Coeff::sqrt2();
    cat.add(
        "[[pp(P,Q),sa(P,Q)],sa(P,R)]",
        with(z(), sa(p, r)),
        c(
            half(),
            (n(p, D) - n(q, D)) * s1(q, r, U) + (n(p, U) - n(q, U)) * s1(q, r, D)
                - c(sqrt2, ps(p, q, r))
                - srd(p, U, q, D, p, D, r, U)
                - srd(p, D, q, U, p, U, r, D),
        ),
    );
    cat.add(
        "[[pp(P,Q),sa(P,Q)],sa(Q,R)]",
        with(z(), sa(q, r)),
        c(
            half(),
            (n(q, D) - n(p, D)) * s1(p, r, U) + (n(q, U) - n(p, U)) * s1(p, r, D) - c(sqrt2, ps(q, p, r))
                + srd(p, U, q, D, q, U, r, D)
                + srd(p, D, q, U, q, D, r, U),
        ),
    );
    cat.add("[[pp(P,Q),sa(P,Q)],sa(P,Q)]", with(z(), sa(p, q)), c(Coeff::int(-2), pp(p, q)));
    let zr = |t: usize| {
        c(
            r2(),
            (one() - n(p, U) - n(q, D)) * srd(t, U, t, D, p, D, q, U) - (one() - n(p, D) - n(q, U)) * srd(t, U, t, D, p, U, q, D),
        )
    };
    cat.add("[[pp(P,Q),sa(P,Q)],pp(P,R)]", with(z(), pp(p, r)), zr(r));
    cat.add("[[pp(P,Q),sa(P,Q)],pp(Q,R)]", with(z(), pp(q, r)), zr(r));
    let two = Coeff::int(2);
    cat.amend(
        "[[pp(P,Q),sa(P,Q)],pp(P,Q)]",
        with(z(), pp(p, q)),
        c(
            r2(),
            (n(p, D) + n(q, D) - c(two, n(p, D) * n(q, D))) * s1(p, q, U)
                + (n(p, U) + n(q, U) - c(two, n(p, U) * n(q, U))) * s1(p, q, D),
        ),
        Some("overall factor 1/√2"),
    );

    // triply nested: spin-polarized doubles
    let a = |p1, s1_, q1, s2_, r1, s3_, t1, s4_| srd(p1, s1_, q1, s2_, r1, s3_, t1, s4_);
    let t12 = c(
        half(),
        (n(p, D) - n(r, D)) * (-a(p, U, q, U, r, U, s, U) - a(p, U, q, D, r, U, s, D) + a(p, U, s, U, q, U, r, U) + a(p, U, s, D, q, D, r, U))
            + (n(p, U) - n(r, U))
                * (-a(p, D, q, D, r, D, s, D) - a(p, D, q, U, r, D, s, U) + a(p, D, s, D, q, D, r, D) + a(p, D, s, U, q, U, r, D)),
    );
    cat.add("[[[pp(P,Q),pp(Q,R)],sa(Q,S)],sa(P,R)]", vec![pp(p, q), pp(q, r), sa(q, s), sa(p, r)], t12.clone());
    cat.add("[[[pp(P,Q),pp(Q,R)],sa(P,R)],sa(Q,S)]", vec![pp(p, q), pp(q, r), sa(p, r), sa(q, s)], t12);
    // shared shape: ½ Σ A_{P· lo2·}^{up1· S·} (n_m· − n_k·)
    let trail = |lo2: usize, up1: usize, m: usize, k: usize| {
        c(
            half(),
            a(p, U, lo2, U, up1, U, s, U) * (n(m, D) - n(k, D))
                + a(p, U, lo2, D, up1, D, s, U) * (n(m, U) - n(k, D))
                + a(p, D, lo2, D, up1, D, s, D) * (n(m, U) - n(k, U))
                + a(p, D, lo2, U, up1, U, s, D) * (n(m, D) - n(k, U)),
        )
    };
    cat.add("[[[pp(P,Q),sa(Q,R)],sa(P,S)],pp(P,Q)]", vec![pp(p, q), sa(q, r), sa(p, s), pp(p, q)], trail(r, q, q, p));
    cat.add("[[[pp(P,Q),sa(Q,R)],sa(P,S)],pp(P,R)]", vec![pp(p, q), sa(q, r), sa(p, s), pp(p, r)], trail(q, r, r, p));
    cat.add("[[[pp(P,Q),sa(Q,R)],sa(P,S)],pp(Q,S)]", vec![pp(p, q), sa(q, r), sa(p, s), pp(q, s)], trail(q, r, q, s));
    cat.add("[[[pp(P,Q),sa(Q,R)],sa(P,S)],pp(R,S)]", vec![pp(p, q), sa(q, r), sa(p, s), pp(r, s)], trail(r, q, r, s));
    let lead = |lo2: usize, up1: usize| {
        c(
            half(),
            (n(p, D) - n(s, D)) * (a(p, U, lo2, U, up1, U, s, U) + a(p, U, lo2, D, up1, D, s, U))
                + (n(p, U) - n(s, U)) * (a(p, D, lo2, D, up1, D, s, D) + a(p, D, lo2, U, up1, U, s, D)),
        )
    };
    cat.add("[[[pp(P,Q),sa(Q,R)],pp(Q,S)],sa(P,S)]", vec![pp(p, q), sa(q, r), pp(q, s), sa(p, s)], lead(q, r));
    cat.add("[[[pp(P,Q),sa(Q,R)],pp(R,S)],sa(P,S)]", vec![pp(p, q), sa(q, r), pp(r, s), sa(p, s)], lead(r, q));
    let diff = |m: usize, sign: i64| {
        let g = |lo2s: Spin, up1s: Spin| a(p, U, q, lo2s, r, up1s, s, U) - a(p, U, r, lo2s, q, up1s, s, U);
        let h = |lo2s: Spin, up1s: Spin| a(p, D, q, lo2s, r, up1s, s, D) - a(p, D, r, lo2s, q, up1s, s, D);
        c(
            Coeff::rational(sign, 2),
            (n(p, D) - n(m, D)) * g(U, U) + (n(p, D) - n(m, U)) * g(D, D) + (n(p, U) - n(m, U)) * h(D, D) + (n(p, U) - n(m, D)) * h(U, U),
        )
    };
    cat.add("[[[pp(P,Q),sa(Q,R)],pp(P,Q)],sa(P,S)]", vec![pp(p, q), sa(q, r), pp(p, q), sa(p, s)], diff(q, 1));
    cat.add("[[[pp(P,Q),sa(Q,R)],pp(P,R)],sa(P,S)]", vec![pp(p, q), sa(q, r), pp(p, r), sa(p, s)], diff(r, -1));

    // the spin-polarized combination in the spin-adapted basis
    cat.add(
        "√3·[1]A(P,Q;R,S) − [0]A(P,Q;R,S)",
        vec![c(Coeff::sqrt3(), sa_double1(p, q, r, s)) - sa_double0(p, q, r, s)],
        triplet_minus_singlet(p, q, r, s),
    );
    cat.0
}
