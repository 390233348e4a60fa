//! FCIDUMP ingestion and the molecular-integrals data model.
//!
//! Integrals are stored in chemists' notation, `(pq|rs)`, over spatial
//! orbitals. Orbital symmetry labels follow the Molpro numbering used by
//! most integral writers (1..8), mapped to three-bit labels whose product
//! is bitwise XOR.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for integral symmetry checks and duplicate detection.
pub const INTEGRAL_TOL: f64 = 1e-10;

/// Irreducible representation of an elementary Abelian 2-group (at most D2h).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepLabel(u8);

impl IrrepLabel {
    pub const TOTALLY_SYMMETRIC: IrrepLabel = IrrepLabel(0);

    pub fn new(bits: u8) -> Result<Self> {
        if bits > 7 {
            return Err(Error::InvalidInput(format!("irrep label {bits} does not fit in three bits")));
        }
        Ok(IrrepLabel(bits))
    }

    /// Label from a 1-based ORBSYM value.
    pub fn from_orbsym(value: i64) -> Result<Self> {
        if !(1..=8).contains(&value) {
            return Err(Error::InvalidInput(format!("ORBSYM value {value} outside 1..8")));
        }
        Ok(IrrepLabel(value as u8 - 1))
    }

    pub fn to_orbsym(self) -> u8 {
        self.0 + 1
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_totally_symmetric(self) -> bool {
        self.0 == 0
    }

    /// Direct product of two irreps.
    pub fn product(self, other: IrrepLabel) -> IrrepLabel {
        IrrepLabel(self.0 ^ other.0)
    }

    /// Direct product over an iterator of labels (empty product is totally symmetric).
    pub fn product_of<I: IntoIterator<Item = IrrepLabel>>(labels: I) -> IrrepLabel {
        labels.into_iter().fold(IrrepLabel::TOTALLY_SYMMETRIC, IrrepLabel::product)
    }
}

impl std::ops::Mul for IrrepLabel {
    type Output = IrrepLabel;
    fn mul(self, rhs: IrrepLabel) -> IrrepLabel {
        self.product(rhs)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parse a comma-separated list of irrep labels, e.g. `0,1,0,1`.
pub fn parse_irrep_list(s: &str) -> Result<Vec<IrrepLabel>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: u8 = t
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad irrep label '{t}'")))?;
            IrrepLabel::new(v)
        })
        .collect()
}

/// One- and two-electron integrals over an orthonormal spatial-orbital basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i32,
    orbital_irreps: Vec<IrrepLabel>,
    target_irrep: IrrepLabel,
    h1: Vec<f64>,
    h2: Vec<f64>,
    e_core: f64,
}

impl MolecularIntegrals {
    /// Build from dense arrays. `h1` is row-major `n²`, `h2` is `n⁴` in
    /// `(pq|rs)` order. All declared symmetries are validated.
    pub fn new(
        n_electrons: usize,
        ms2: i32,
        orbital_irreps: Vec<IrrepLabel>,
        h1: Vec<f64>,
        h2: Vec<f64>,
        e_core: f64,
    ) -> Result<Self> {
        let n = orbital_irreps.len();
        if h1.len() != n * n || h2.len() != n * n * n * n {
            return Err(Error::InvalidInput(format!(
                "integral arrays do not match {n} orbitals (h1 {}, h2 {})",
                h1.len(),
                h2.len()
            )));
        }
        let m = MolecularIntegrals {
            n_spatial: n,
            n_electrons,
            ms2,
            orbital_irreps,
            target_irrep: IrrepLabel::TOTALLY_SYMMETRIC,
            h1,
            h2,
            e_core,
        };
        m.validate()?;
        Ok(m)
    }

    /// Integrals with every entry zero except the core energy.
    pub fn zero(n_spatial: usize, n_electrons: usize, ms2: i32, e_core: f64) -> Self {
        MolecularIntegrals {
            n_spatial,
            n_electrons,
            ms2,
            orbital_irreps: vec![IrrepLabel::TOTALLY_SYMMETRIC; n_spatial],
            target_irrep: IrrepLabel::TOTALLY_SYMMETRIC,
            h1: vec![0.0; n_spatial * n_spatial],
            h2: vec![0.0; n_spatial.pow(4)],
            e_core,
        }
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }
    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }
    pub fn ms2(&self) -> i32 {
        self.ms2
    }
    pub fn orbital_irreps(&self) -> &[IrrepLabel] {
        &self.orbital_irreps
    }
    /// The ISYM field of the source file (carried through, not interpreted).
    pub fn target_irrep(&self) -> IrrepLabel {
        self.target_irrep
    }
    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_spatial + q]
    }

    /// Two-electron integral `(pq|rs)`.
    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    fn idx2(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_spatial;
        ((p * n + q) * n + r) * n + s
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if n > 32 {
            return Err(Error::InvalidInput(format!("{n} spatial orbitals exceed the 32-orbital limit")));
        }
        if self.n_electrons > 2 * n {
            return Err(Error::InvalidInput(format!(
                "{} electrons do not fit in {n} spatial orbitals",
                self.n_electrons
            )));
        }
        let irr = &self.orbital_irreps;
        for p in 0..n {
            for q in 0..n {
                let v = self.h1(p, q);
                if (v - self.h1(q, p)).abs() > INTEGRAL_TOL {
                    return Err(Error::Symmetry(format!("h1[{p}][{q}] != h1[{q}][{p}]")));
                }
                if v.abs() > INTEGRAL_TOL && irr[p] != irr[q] {
                    return Err(Error::Symmetry(format!(
                        "h1[{p}][{q}] = {v:e} couples irreps {} and {}",
                        irr[p], irr[q]
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        for (a, b, c, d) in [(q, p, r, s), (p, q, s, r), (r, s, p, q)] {
                            if (v - self.h2(a, b, c, d)).abs() > INTEGRAL_TOL {
                                return Err(Error::Symmetry(format!(
                                    "({p}{q}|{r}{s}) != ({a}{b}|{c}{d})"
                                )));
                            }
                        }
                        if v.abs() > INTEGRAL_TOL
                            && !IrrepLabel::product_of([irr[p], irr[q], irr[r], irr[s]]).is_totally_symmetric()
                        {
                            return Err(Error::Symmetry(format!(
                                "({p}{q}|{r}{s}) = {v:e} is not totally symmetric"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Field-wise maximum absolute difference; `None` when headers differ.
    pub fn max_abs_diff(&self, other: &MolecularIntegrals) -> Option<f64> {
        if self.n_spatial != other.n_spatial
            || self.n_electrons != other.n_electrons
            || self.ms2 != other.ms2
            || self.orbital_irreps != other.orbital_irreps
        {
            return None;
        }
        let d1 = self.h1.iter().zip(&other.h1).map(|(a, b)| (a - b).abs());
        let d2 = self.h2.iter().zip(&other.h2).map(|(a, b)| (a - b).abs());
        Some(
            d1.chain(d2)
                .fold((self.e_core - other.e_core).abs(), f64::max),
        )
    }

    /// Serialize in FCIDUMP form. Unique integrals only; values use the
    /// shortest exactly round-tripping decimal representation.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        let orbsym: Vec<String> = self.orbital_irreps.iter().map(|l| l.to_orbsym().to_string()).collect();
        let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, self.n_electrons, self.ms2);
        let _ = writeln!(out, "  ORBSYM={},", orbsym.join(","));
        let _ = writeln!(out, "  ISYM={},", self.target_irrep.to_orbsym());
        let _ = writeln!(out, " &END");
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                            continue;
                        }
                        let v = self.h2(p, q, r, s);
                        if v != 0.0 {
                            let _ = writeln!(out, " {:e} {} {} {} {}", v, p + 1, q + 1, r + 1, s + 1);
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..=p {
                let v = self.h1(p, q);
                if v != 0.0 {
                    let _ = writeln!(out, " {:e} {} {} 0 0", v, p + 1, q + 1);
                }
            }
        }
        let _ = writeln!(out, " {:e} 0 0 0 0", self.e_core);
        out
    }
}

struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: i32,
    orbsym: Option<(usize, Vec<i64>)>,
    isym: i64,
}

fn parse_header(lines: &[(usize, &str)]) -> Result<Header> {
    // Flatten into (line, char) so key/value errors can cite the right line.
    let mut text = String::new();
    let mut line_of = Vec::new();
    for &(ln, l) in lines {
        for c in l.chars() {
            text.push(c);
            line_of.push(ln);
        }
        text.push(' ');
        line_of.push(ln);
    }
    let upper = text.to_ascii_uppercase();
    let start = upper
        .find("&FCI")
        .ok_or_else(|| Error::Parse { line: lines.first().map_or(1, |l| l.0), msg: "missing &FCI".into() })?;
    let body = &upper[start + 4..];
    let offset = start + 4;

    // Locate `KEY=` occurrences.
    let bytes = body.as_bytes();
    let mut keys: Vec<(usize, usize, String)> = Vec::new(); // (key_start, value_start, key)
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'=' {
            let mut k = i;
            while k > 0 && (bytes[k - 1].is_ascii_alphanumeric() || bytes[k - 1] == b'_') {
                k -= 1;
            }
            if k == i {
                return Err(Error::Parse { line: line_of[offset + i], msg: "'=' without a key".into() });
            }
            keys.push((k, i + 1, body[k..i].to_string()));
        }
        i += 1;
    }
    let mut h = Header { norb: None, nelec: None, ms2: 0, orbsym: None, isym: 1 };
    for (idx, (_, vstart, key)) in keys.iter().enumerate() {
        let vend = keys.get(idx + 1).map_or(body.len(), |k| k.0);
        let line = line_of[offset + vstart.min(&(body.len().saturating_sub(1))).to_owned()];
        let raw = &body[*vstart..vend];
        let raw = raw.split(['&', '/']).next().unwrap_or("");
        let vals: Result<Vec<i64>> = raw
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse { line, msg: format!("{key}: '{t}' is not an integer") })
            })
            .collect();
        let single = |vals: Result<Vec<i64>>| -> Result<i64> {
            let v = vals?;
            if v.len() != 1 {
                return Err(Error::Parse { line, msg: format!("{key} expects one value, got {}", v.len()) });
            }
            Ok(v[0])
        };
        match key.as_str() {
            "NORB" => {
                let v = single(vals)?;
                if v < 0 {
                    return Err(Error::Parse { line, msg: "NORB must be non-negative".into() });
                }
                h.norb = Some(v as usize);
            }
            "NELEC" => {
                let v = single(vals)?;
                if v < 0 {
                    return Err(Error::Parse { line, msg: "NELEC must be non-negative".into() });
                }
                h.nelec = Some(v as usize);
            }
            "MS2" => h.ms2 = single(vals)? as i32,
            "ISYM" => h.isym = single(vals)?,
            "ORBSYM" => h.orbsym = Some((line, vals?)),
            // UHF, IUHF, ST and friends are accepted and ignored.
            _ => {}
        }
    }
    Ok(h)
}

/// Parse FCIDUMP text.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut header_end = None;
    for (k, &(_, l)) in lines.iter().enumerate() {
        let u = l.trim().to_ascii_uppercase();
        if u.contains("&END") || u == "/" || u.ends_with('/') {
            header_end = Some(k);
            break;
        }
    }
    let header_end = header_end.ok_or_else(|| Error::Parse {
        line: lines.len().max(1),
        msg: "header terminator (&END or /) not found".into(),
    })?;
    let header = parse_header(&lines[..=header_end])?;
    let n = header.norb.ok_or_else(|| Error::Parse { line: 1, msg: "NORB missing".into() })?;
    let nelec = header.nelec.ok_or_else(|| Error::Parse { line: 1, msg: "NELEC missing".into() })?;
    if n > 32 {
        return Err(Error::Parse { line: 1, msg: format!("NORB={n} exceeds the 32-orbital limit") });
    }
    let orbital_irreps = match header.orbsym {
        Some((line, vals)) => {
            if vals.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("ORBSYM has {} entries, NORB is {n}", vals.len()),
                });
            }
            vals.into_iter()
                .map(|v| IrrepLabel::from_orbsym(v).map_err(|e| Error::Parse { line, msg: e.to_string() }))
                .collect::<Result<Vec<_>>>()?
        }
        None => vec![IrrepLabel::TOTALLY_SYMMETRIC; n],
    };
    let target_irrep =
        IrrepLabel::from_orbsym(header.isym).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;

    let mut m = MolecularIntegrals {
        n_spatial: n,
        n_electrons: nelec,
        ms2: header.ms2,
        orbital_irreps,
        target_irrep,
        h1: vec![0.0; n * n],
        h2: vec![0.0; n.pow(4)],
        e_core: 0.0,
    };
    let mut filled1 = vec![false; n * n];
    let mut filled2 = vec![false; n.pow(4)];
    let mut core_seen = false;

    let put = |store: &mut [f64], filled: &mut [bool], slot: usize, v: f64, line: usize| -> Result<()> {
        if filled[slot] && (store[slot] - v).abs() > INTEGRAL_TOL {
            return Err(Error::Parse {
                line,
                msg: format!("conflicting duplicate integral ({:e} vs {:e})", store[slot], v),
            });
        }
        filled[slot] = true;
        store[slot] = v;
        Ok(())
    };

    for &(line, l) in &lines[header_end + 1..] {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse { line, msg: format!("expected 5 fields, found {}", toks.len()) });
        }
        let v: f64 = toks[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| Error::Parse { line, msg: format!("bad value '{}'", toks[0]) })?;
        let mut idx = [0usize; 4];
        for (k, t) in toks[1..].iter().enumerate() {
            let x: i64 = t
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad index '{t}'") })?;
            if x < 0 || x as usize > n {
                return Err(Error::Parse { line, msg: format!("index {x} out of range [1, {n}]") });
            }
            idx[k] = x as usize;
        }
        match idx {
            [0, 0, 0, 0] => {
                if core_seen && (m.e_core - v).abs() > INTEGRAL_TOL {
                    return Err(Error::Parse { line, msg: "conflicting duplicate core energy".into() });
                }
                core_seen = true;
                m.e_core = v;
            }
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                put(&mut m.h1, &mut filled1, p * n + q, v, line)?;
                put(&mut m.h1, &mut filled1, q * n + p, v, line)?;
            }
            [_, 0, 0, 0] => {} // orbital energies
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in [
                    (p, q, r, s),
                    (q, p, r, s),
                    (p, q, s, r),
                    (q, p, s, r),
                    (r, s, p, q),
                    (s, r, p, q),
                    (r, s, q, p),
                    (s, r, q, p),
                ] {
                    let slot = m.idx2(a, b, c, d);
                    put(&mut m.h2, &mut filled2, slot, v, line)?;
                }
            }
            _ => {
                return Err(Error::Parse { line, msg: format!("unrecognized index pattern {idx:?}") });
            }
        }
    }
    m.validate()?;
    Ok(m)
}

/// Read and parse an FCIDUMP file.
pub fn read_fcidump(path: impl AsRef<std::path::Path>) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text)
}

/// Remove doubly occupied core orbitals, folding their mean field into `h1`
/// and their energy into `e_core`.
pub fn freeze_core(m: &MolecularIntegrals, frozen: &[usize]) -> Result<MolecularIntegrals> {
    if frozen.is_empty() {
        return Ok(m.clone());
    }
    let n = m.n_spatial;
    let mut is_frozen = vec![false; n];
    for &c in frozen {
        if c >= n {
            return Err(Error::InvalidInput(format!("frozen orbital {c} out of range (n_spatial = {n})")));
        }
        if is_frozen[c] {
            return Err(Error::InvalidInput(format!("frozen orbital {c} listed twice")));
        }
        is_frozen[c] = true;
    }
    if 2 * frozen.len() > m.n_electrons {
        return Err(Error::InvalidInput(format!(
            "freezing {} orbitals leaves a negative electron count ({} electrons)",
            frozen.len(),
            m.n_electrons
        )));
    }
    let active: Vec<usize> = (0..n).filter(|&p| !is_frozen[p]).collect();
    let na = active.len();

    let mut e_core = m.e_core;
    for &c in frozen {
        e_core += 2.0 * m.h1(c, c);
        for &d in frozen {
            e_core += 2.0 * m.h2(c, c, d, d) - m.h2(c, d, d, c);
        }
    }
    let mut h1 = vec![0.0; na * na];
    for (i, &p) in active.iter().enumerate() {
        for (j, &q) in active.iter().enumerate() {
            let mut v = m.h1(p, q);
            for &c in frozen {
                v += 2.0 * m.h2(p, q, c, c) - m.h2(p, c, c, q);
            }
            h1[i * na + j] = v;
        }
    }
    let mut h2 = vec![0.0; na.pow(4)];
    for (i, &p) in active.iter().enumerate() {
        for (j, &q) in active.iter().enumerate() {
            for (k, &r) in active.iter().enumerate() {
                for (l, &s) in active.iter().enumerate() {
                    h2[((i * na + j) * na + k) * na + l] = m.h2(p, q, r, s);
                }
            }
        }
    }
    let mut out = MolecularIntegrals::new(
        m.n_electrons - 2 * frozen.len(),
        m.ms2,
        active.iter().map(|&p| m.orbital_irreps[p]).collect(),
        h1,
        h2,
        e_core,
    )?;
    out.target_irrep = m.target_irrep;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n 0.5 1 1 0 0\n -1.0 0 0 0 0\n";

    #[test]
    fn header_and_one_body_transcription() {
        let m = parse_fcidump(TINY).unwrap();
        assert_eq!(m.n_spatial(), 2);
        assert_eq!(m.n_electrons(), 2);
        assert_eq!(m.h1(0, 0), 0.5);
        assert_eq!(m.e_core(), -1.0);
    }

    #[test]
    fn two_body_fills_all_eight_slots() {
        let text = TINY.replace(" &END\n", " &END\n 0.25 1 2 1 2\n");
        let m = parse_fcidump(&text).unwrap();
        for (p, q, r, s) in [
            (0, 1, 0, 1),
            (1, 0, 0, 1),
            (0, 1, 1, 0),
            (1, 0, 1, 0),
        ] {
            assert_eq!(m.h2(p, q, r, s), 0.25);
            assert_eq!(m.h2(r, s, p, q), 0.25);
        }
        assert_eq!(m.h2(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn slash_terminator_and_fortran_exponent() {
        let text = "&FCI NORB=1, NELEC=2, MS2=0, ORBSYM=1, ISYM=1\n/\n 1.5D-1 1 1 1 1\n";
        let m = parse_fcidump(text).unwrap();
        assert!((m.h2(0, 0, 0, 0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_idx = TINY.replace(" 0.5 1 1 0 0", " 0.5 3 1 0 0");
        match parse_fcidump(&bad_idx) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let bad_orbsym = TINY.replace("ORBSYM=1,1,", "ORBSYM=1,");
        match parse_fcidump(&bad_orbsym) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("ORBSYM"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let dup = TINY.replace(" -1.0 0 0 0 0", " 0.6 1 1 0 0\n -1.0 0 0 0 0");
        match parse_fcidump(&dup) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        let same_dup = TINY.replace(" -1.0 0 0 0 0", " 0.5 1 1 0 0\n -1.0 0 0 0 0");
        assert!(parse_fcidump(&same_dup).is_ok());
        assert!(matches!(parse_fcidump("&FCI NORB=x\n&END\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_fcidump("NORB=2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn symmetry_forbidden_integral_is_rejected() {
        let text = " &FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,2,\n &END\n 0.1 1 2 0 0\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Symmetry(_))));
        let text = " &FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,2,\n &END\n 0.1 1 1 1 2\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Symmetry(_))));
    }

    #[test]
    fn irrep_products() {
        let l: Vec<IrrepLabel> = (0..8).map(|b| IrrepLabel::new(b).unwrap()).collect();
        for &a in &l {
            assert!((a * a).is_totally_symmetric());
            for &b in &l {
                assert_eq!(a * b, b * a);
                for &c in &l {
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
        }
        assert!(IrrepLabel::product_of(l[..4].iter().copied()).is_totally_symmetric());
        assert!(IrrepLabel::new(8).is_err());
    }

    #[test]
    fn freeze_nothing_is_identity() {
        let m = parse_fcidump(TINY).unwrap();
        assert_eq!(freeze_core(&m, &[]).unwrap(), m);
    }

    #[test]
    fn freeze_rejects_bad_lists() {
        let m = parse_fcidump(TINY).unwrap();
        assert!(freeze_core(&m, &[2]).is_err());
        assert!(freeze_core(&m, &[0, 1]).is_err());
        assert!(freeze_core(&m, &[0, 0]).is_err());
    }
}
