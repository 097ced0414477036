//! Text input parsers for the CLI surface. One shared cursor, 1-based error
//! columns, permissive whitespace. Grammars:
//!
//! * polynomial: `term ('+' term)*` with `term := coeff ['*'] t ['^' nat] |
//!   coeff | t ['^' nat]`; composite coefficients must be parenthesized,
//!   matching the display form (`(w+1)*t^2+w*t+1`).
//! * rational function: `poly` or `poly/poly`, either side optionally
//!   wrapped in parentheses.
//! * extension element: sum of `[coeff '*'] v ['^' nat]` terms (`w` when the
//!   base is a prime field).
//! * Puiseux series: `c*pi^(n/d)` terms plus an optional `prec=(P/d)`
//!   marker; `t^k`, bare constants and `pi^k` are accepted as sugar.
//! * tail element: polynomial part plus `pi^j` terms with j >= 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField};
use crate::fq::{Fq, FqElem};
use crate::poly::PolyA;
use crate::polycore::FieldCtx;
use crate::puiseux::Puiseux;
use crate::ratfun::{RatF, TailElement};

struct P<'a> {
    b: &'a [u8],
    i: usize,
    off: usize,
}

impl<'a> P<'a> {
    fn new(s: &'a str) -> P<'a> {
        P { b: s.as_bytes(), i: 0, off: 0 }
    }

    fn col(&self) -> usize {
        self.off + self.i + 1
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { col: self.col(), msg: msg.into() })
    }

    fn ws(&mut self) {
        while matches!(self.b.get(self.i), Some(b' ') | Some(b'\t')) {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.b.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected '{}'", c as char))
        }
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.i >= self.b.len()
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.i;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.i += 1;
        }
        if self.i == start {
            return self.fail("expected a number");
        }
        std::str::from_utf8(&self.b[start..self.i])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| Error::Parse { col: self.off + start + 1, msg: "number out of range".into() })
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let n = self.nat()?;
        let n = i64::try_from(n)
            .map_err(|_| Error::Parse { col: self.col(), msg: "number out of range".into() })?;
        Ok(if neg { -n } else { n })
    }

    /// Exponent written as `nat`, or `(int/nat)`; returns (num, den).
    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat(b'(') {
            let n = self.int()?;
            self.expect(b'/')?;
            let d = self.nat()?;
            if d == 0 {
                return self.fail("zero denominator");
            }
            self.expect(b')')?;
            Ok((n, d as i64))
        } else {
            Ok((self.int()?, 1))
        }
    }

    // --- base-field coefficients ---

    /// Integer literal reduced into the prime subfield; must be < p.
    fn fq_int(&mut self, fq: &Arc<Fq>) -> Result<FqElem> {
        let start_col = self.col();
        let n = self.nat()?;
        if n >= fq.p as u64 {
            return Err(Error::Parse {
                col: start_col,
                msg: format!("coefficient {} out of range 0..{}", n, fq.p),
            });
        }
        Ok(fq.from_int(n as i64))
    }

    /// `nat ['*' w-power] | w-power`, the unparenthesized building block.
    fn fq_term(&mut self, fq: &Arc<Fq>) -> Result<FqElem> {
        self.ws();
        let mut c = if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
            let c = self.fq_int(fq)?;
            self.ws();
            if self.eat(b'*') {
                self.ws();
                if self.peek() != Some(b'w') {
                    return self.fail("expected 'w'");
                }
                c
            } else {
                return Ok(c);
            }
        } else {
            fq.one()
        };
        if !self.eat(b'w') {
            return self.fail("expected coefficient");
        }
        if fq.e == 1 {
            return self.fail("'w' needs an extension field");
        }
        let k = if self.eat(b'^') { self.nat()? } else { 1 };
        c = fq.mul(&c, &fq.pow(fq.gen_w(), k));
        Ok(c)
    }

    /// Sum of fq_terms: `w+1`, `2*w^2+w`.
    fn fq_sum(&mut self, fq: &Arc<Fq>) -> Result<FqElem> {
        let mut acc = self.fq_term(fq)?;
        loop {
            self.ws();
            if self.eat(b'+') {
                let t = self.fq_term(fq)?;
                acc = fq.add(&acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    /// Coefficient position in a polynomial over fq: bare int, bare w-power,
    /// or a parenthesized sum.
    fn fq_coeff(&mut self, fq: &Arc<Fq>) -> Result<FqElem> {
        self.ws();
        if self.eat(b'(') {
            let v = self.fq_sum(fq)?;
            self.ws();
            self.expect(b')')?;
            return Ok(v);
        }
        if self.peek() == Some(b'w') {
            return self.fq_term(fq);
        }
        self.fq_int(fq)
    }

    // --- polynomials in t over fq ---

    fn poly_term(&mut self, fq: &Arc<Fq>) -> Result<(usize, FqElem)> {
        self.ws();
        let c = if self.peek() == Some(b't') {
            fq.one()
        } else {
            let c = self.fq_coeff(fq)?;
            self.ws();
            let star = self.eat(b'*');
            self.ws();
            if self.peek() != Some(b't') {
                if star {
                    return self.fail("expected 't'");
                }
                return Ok((0, c));
            }
            c
        };
        self.expect(b't')?;
        let e = if self.eat(b'^') { self.nat()? } else { 1 };
        let e = usize::try_from(e)
            .map_err(|_| Error::Parse { col: self.col(), msg: "exponent out of range".into() })?;
        if e > 1 << 20 {
            return self.fail("exponent out of range");
        }
        Ok((e, c))
    }

    fn poly(&mut self, fq: &Arc<Fq>) -> Result<PolyA> {
        let mut coeffs: Vec<FqElem> = Vec::new();
        loop {
            let (e, c) = self.poly_term(fq)?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, fq.zero());
            }
            coeffs[e] = fq.add(&coeffs[e], &c);
            self.ws();
            if !self.eat(b'+') {
                break;
            }
        }
        Ok(PolyA::from_coeffs(fq, coeffs))
    }

    // --- extension-field elements ---

    fn ext_term(&mut self, field: &Arc<ExtField>) -> Result<ExtElem> {
        let var = if field.base.e == 1 { b'w' } else { b'v' };
        self.ws();
        let c = if self.peek() == Some(var) && field.m > 1 {
            field.one()
        } else {
            let c = self.fq_coeff(&field.base)?;
            self.ws();
            // only claim a following '*' when the generator comes next;
            // otherwise it belongs to an enclosing grammar (e.g. `1*pi^...`)
            let save = self.i;
            self.eat(b'*');
            self.ws();
            if self.peek() != Some(var) || field.m == 1 {
                self.i = save;
                return Ok(field.const_from(c));
            }
            field.const_from(c)
        };
        self.expect(var)?;
        let k = if self.eat(b'^') { self.nat()? } else { 1 };
        if k as usize >= field.m * 4 {
            return self.fail("generator power out of range");
        }
        let mut g = field.one();
        for _ in 0..k {
            g = field.mul(&g, &field.gen());
        }
        Ok(field.mul(&c, &g))
    }

    fn ext_sum(&mut self, field: &Arc<ExtField>) -> Result<ExtElem> {
        let mut acc = self.ext_term(field)?;
        loop {
            self.ws();
            if self.eat(b'+') {
                let t = self.ext_term(field)?;
                acc = field.add(&acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    /// Coefficient of a Puiseux term: like ext_sum but composite values must
    /// be parenthesized so '+' still separates terms.
    fn ext_coeff(&mut self, field: &Arc<ExtField>) -> Result<ExtElem> {
        self.ws();
        if self.eat(b'(') {
            let v = self.ext_sum(field)?;
            self.ws();
            self.expect(b')')?;
            return Ok(v);
        }
        self.ext_term(field)
    }

    // --- Puiseux series ---

    fn puiseux_term(&mut self, field: &Arc<ExtField>) -> Result<PuiseuxPiece> {
        self.ws();
        if self.b[self.i..].starts_with(b"prec=") {
            self.i += 5;
            let (n, d) = self.exponent()?;
            return Ok(PuiseuxPiece::Prec(n, d));
        }
        let c = if self.b[self.i..].starts_with(b"pi") || self.peek() == Some(b't') {
            field.one()
        } else {
            let c = self.ext_coeff(field)?;
            self.ws();
            let star = self.eat(b'*');
            self.ws();
            if !(self.b[self.i..].starts_with(b"pi") || self.peek() == Some(b't')) {
                if star {
                    return self.fail("expected 'pi' or 't'");
                }
                return Ok(PuiseuxPiece::Term(0, 1, c));
            }
            c
        };
        if self.b[self.i..].starts_with(b"pi") {
            self.i += 2;
            let (n, d) = if self.eat(b'^') { self.exponent()? } else { (1, 1) };
            Ok(PuiseuxPiece::Term(n, d, c))
        } else {
            self.expect(b't')?;
            let e = if self.eat(b'^') { self.int()? } else { 1 };
            Ok(PuiseuxPiece::Term(-e, 1, c))
        }
    }

    fn puiseux(&mut self, field: &Arc<ExtField>) -> Result<Puiseux> {
        let mut terms: Vec<(i64, i64, ExtElem)> = Vec::new();
        let mut prec: Option<(i64, i64)> = None;
        loop {
            match self.puiseux_term(field)? {
                PuiseuxPiece::Term(n, d, c) => {
                    if prec.is_some() {
                        return self.fail("terms after prec marker");
                    }
                    terms.push((n, d, c));
                }
                PuiseuxPiece::Prec(n, d) => {
                    if prec.is_some() {
                        return self.fail("duplicate prec marker");
                    }
                    prec = Some((n, d));
                }
            }
            self.ws();
            if !self.eat(b'+') {
                break;
            }
        }
        // common denominator across terms and the prec marker
        let mut den: i64 = 1;
        for &(_, d, _) in &terms {
            den = lcm(den, d);
        }
        if let Some((_, d)) = prec {
            den = lcm(den, d);
        }
        let scaled: Vec<(i64, ExtElem)> =
            terms.into_iter().map(|(n, d, c)| (n * (den / d), c)).collect();
        let prec = prec.map(|(n, d)| n * (den / d));
        Ok(Puiseux::new(field.clone(), den, scaled, prec))
    }

    // --- tail elements (polynomial part + strictly positive pi powers) ---

    fn tail_elem(&mut self, fq: &Arc<Fq>) -> Result<TailElement> {
        let mut poly: Vec<FqElem> = Vec::new();
        let mut tail: BTreeMap<i64, FqElem> = BTreeMap::new();
        loop {
            self.ws();
            let piece_col = self.col();
            // reuse the Puiseux term shapes, but exponents must be integers
            let c = if self.b[self.i..].starts_with(b"pi") || self.peek() == Some(b't') {
                fq.one()
            } else {
                let c = self.fq_coeff(fq)?;
                self.ws();
                let star = self.eat(b'*');
                self.ws();
                if !(self.b[self.i..].starts_with(b"pi") || self.peek() == Some(b't')) {
                    if star {
                        return self.fail("expected 'pi' or 't'");
                    }
                    if poly.is_empty() {
                        poly.push(fq.zero());
                    }
                    poly[0] = fq.add(&poly[0], &c);
                    if !self.continue_sum()? {
                        break;
                    }
                    continue;
                }
                c
            };
            if self.b[self.i..].starts_with(b"pi") {
                self.i += 2;
                let (n, d) = if self.eat(b'^') { self.exponent()? } else { (1, 1) };
                if d != 1 || n < 1 {
                    return Err(Error::Parse {
                        col: piece_col,
                        msg: "tail exponents must be integers >= 1".into(),
                    });
                }
                let slot = tail.entry(n).or_insert_with(|| fq.zero());
                *slot = fq.add(slot, &c);
                if fq.is_zero(slot) {
                    tail.remove(&n);
                }
            } else {
                self.expect(b't')?;
                let e = if self.eat(b'^') { self.nat()? } else { 1 } as usize;
                if e > 1 << 20 {
                    return self.fail("exponent out of range");
                }
                if poly.len() <= e {
                    poly.resize(e + 1, fq.zero());
                }
                poly[e] = fq.add(&poly[e], &c);
            }
            if !self.continue_sum()? {
                break;
            }
        }
        Ok(TailElement::new(
            PolyA::from_coeffs(fq, poly),
            tail.into_iter().collect(),
        ))
    }

    fn continue_sum(&mut self) -> Result<bool> {
        self.ws();
        Ok(self.eat(b'+'))
    }
}

enum PuiseuxPiece {
    Term(i64, i64, ExtElem),
    Prec(i64, i64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

pub fn parse_poly(fq: &Arc<Fq>, s: &str) -> Result<PolyA> {
    let mut p = P::new(s);
    let out = p.poly(fq)?;
    p.expect_end()?;
    Ok(out)
}

pub fn parse_fq_elem(fq: &Arc<Fq>, s: &str) -> Result<FqElem> {
    let mut p = P::new(s);
    let out = p.fq_sum(fq)?;
    p.expect_end()?;
    Ok(out)
}

pub fn parse_ext_elem(field: &Arc<ExtField>, s: &str) -> Result<ExtElem> {
    let mut p = P::new(s);
    let out = p.ext_sum(field)?;
    p.expect_end()?;
    Ok(out)
}

/// `poly` or `poly/poly`; either side may be wrapped in one layer of parens.
pub fn parse_ratf(fq: &Arc<Fq>, s: &str) -> Result<RatF> {
    // split at the top-level '/' if present
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut slash = None;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'/' if depth == 0 => {
                if slash.is_some() {
                    return Err(Error::Parse { col: i + 1, msg: "more than one '/'".into() });
                }
                slash = Some(i);
            }
            _ => {}
        }
    }
    let poly_side = |side: &str, off: usize| -> Result<PolyA> {
        let t = side.trim();
        let lead = side.len() - side.trim_start().len();
        // strip one full-span paren layer
        let (t, extra) = if t.starts_with('(') && t.ends_with(')') && spans_whole(t) {
            (&t[1..t.len() - 1], 1)
        } else {
            (t, 0)
        };
        let mut p = P::new(t);
        p.off = off + lead + extra;
        let out = p.poly(fq)?;
        p.expect_end()?;
        Ok(out)
    };
    match slash {
        None => Ok(RatF::from_poly(poly_side(s, 0)?)),
        Some(i) => {
            let num = poly_side(&s[..i], 0)?;
            let den = poly_side(&s[i + 1..], i + 1)?;
            RatF::new(num, den)
        }
    }
}

/// True when the outer parens of a `(...)`-shaped string match each other.
fn spans_whole(t: &str) -> bool {
    let mut depth = 0i32;
    for (i, c) in t.bytes().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return i == t.len() - 1;
                }
            }
            _ => {}
        }
    }
    false
}

pub fn parse_puiseux(field: &Arc<ExtField>, s: &str) -> Result<Puiseux> {
    let mut p = P::new(s);
    let out = p.puiseux(field)?;
    p.expect_end()?;
    Ok(out)
}

pub fn parse_tail(fq: &Arc<Fq>, s: &str) -> Result<TailElement> {
    let mut p = P::new(s);
    let out = p.tail_elem(fq)?;
    p.expect_end()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtField;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }

    #[test]
    fn poly_round_trip() {
        let fq = f2();
        for s in ["t^2+t+1", "t", "1", "0", "t^5+1"] {
            let p = parse_poly(&fq, s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        let f9 = Fq::new(3, 2).unwrap();
        for s in ["(w+1)*t^2+w*t+2", "2*t^2+t+2", "w^2+1"] {
            let p = parse_poly(&f9, s).unwrap();
            let back = parse_poly(&f9, &p.to_string()).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn poly_merges_and_accepts_juxtaposition() {
        let fq = Fq::new(3, 1).unwrap();
        let a = parse_poly(&fq, "2t^2 + t^2").unwrap();
        assert_eq!(a.to_string(), "0");
        let b = parse_poly(&fq, "2*t^2").unwrap();
        let c = parse_poly(&fq, "2t^2").unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn error_columns_are_one_based() {
        let fq = f2();
        let err = parse_poly(&fq, "t^^2").unwrap_err();
        match err {
            Error::Parse { col, .. } => assert_eq!(col, 3),
            e => panic!("unexpected {e:?}"),
        }
        let err = parse_poly(&fq, "t^2+5").unwrap_err();
        match err {
            Error::Parse { col, .. } => assert_eq!(col, 5),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn ratf_forms() {
        let fq = f2();
        let x = parse_ratf(&fq, "(t^2+1)/(t^3+t+1)").unwrap();
        assert_eq!(x.to_string(), "(t^2+1)/(t^3+t+1)");
        // '/' splits at top level: everything left of it is the numerator
        let y = parse_ratf(&fq, "t^2+1/t").unwrap();
        assert_eq!(y.to_string(), "(t^2+1)/(t)");
        let z = parse_ratf(&fq, "t+1").unwrap();
        assert_eq!(z.to_string(), "t+1");
        let q = parse_ratf(&fq, "t^2 / t").unwrap();
        assert_eq!(q.to_string(), "t");
    }

    #[test]
    fn ext_elements() {
        let f4 = ExtField::canonical(f2(), 2).unwrap();
        let w = parse_ext_elem(&f4, "w+1").unwrap();
        assert_eq!(f4.fmt_elem(&w), "w+1");
        // tower: F_4 base, relative degree 2; generator v, coefficients w
        let f16 = ExtField::canonical(Fq::new(2, 2).unwrap(), 2).unwrap();
        let x = parse_ext_elem(&f16, "(w+1)*v+w").unwrap();
        assert_eq!(f16.fmt_elem(&x), "(w+1)*v+w");
    }

    #[test]
    fn puiseux_round_trip() {
        let f4 = ExtField::canonical(f2(), 2).unwrap();
        let z = parse_puiseux(&f4, "1*pi^(1/1)+1*pi^(3/1)+w*pi^(6/1)").unwrap();
        assert_eq!(z.to_string(), "1*pi^(1/1)+1*pi^(3/1)+w*pi^(6/1)");
        let z2 = parse_puiseux(&f4, &z.to_string()).unwrap();
        assert_eq!(z, z2);
        // sugar forms
        let s = parse_puiseux(&f4, "t^2+w").unwrap();
        assert_eq!(s.to_string(), "1*pi^(-2/1)+w*pi^(0/1)");
        let p = parse_puiseux(&f4, "pi+pi^3+prec=(6/1)").unwrap();
        assert_eq!(p.to_string(), "1*pi^(1/1)+1*pi^(3/1)+prec=(6/1)");
        // ramified exponents
        let r = parse_puiseux(&f4, "w*pi^(3/2)").unwrap();
        assert_eq!(r.to_string(), "w*pi^(3/2)");
    }

    #[test]
    fn tail_elements() {
        let fq = f2();
        let u = parse_tail(&fq, "t^2+1+pi^3+pi^5").unwrap();
        assert_eq!(u.to_string(), "t^2+1+pi^3+pi^5");
        let z = parse_tail(&fq, "0").unwrap();
        assert!(z.is_zero());
        let bad = parse_tail(&fq, "pi^0");
        assert!(bad.is_err());
    }
}
