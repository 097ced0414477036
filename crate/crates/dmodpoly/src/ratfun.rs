//! The fraction field F = F_q(t), 2x2 matrices over it, and expansions
//! at the place at infinity in powers of pi = 1/t.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::poly::PolyA;
use crate::polycore::FieldCtx;
use crate::POS_INF;

/// Element of F_q(t) in lowest terms with monic denominator; 0 is 0/1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatF {
    num: PolyA,
    den: PolyA,
}

impl fmt::Display for RatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RatF {
    pub fn new(num: PolyA, den: PolyA) -> Result<RatF> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: PolyA, den: PolyA) -> RatF {
        let fq = num.fq().clone();
        if num.is_zero() {
            return RatF { num, den: PolyA::one(&fq) };
        }
        let g = num.gcd(&den);
        let num = num.divrem(&g).unwrap().0;
        let den = den.divrem(&g).unwrap().0;
        let li = fq.inv(&den.lead().unwrap()).unwrap();
        RatF { num: num.scale(li), den: den.scale(li) }
    }

    pub fn from_poly(p: PolyA) -> RatF {
        let fq = p.fq().clone();
        RatF { num: p, den: PolyA::one(&fq) }
    }

    pub fn zero(fq: &Arc<Fq>) -> RatF {
        RatF::from_poly(PolyA::zero(fq))
    }

    pub fn one(fq: &Arc<Fq>) -> RatF {
        RatF::from_poly(PolyA::one(fq))
    }

    pub fn fq(&self) -> &Arc<Fq> {
        self.num.fq()
    }

    pub fn num(&self) -> &PolyA {
        &self.num
    }

    pub fn den(&self) -> &PolyA {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatF) -> RatF {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RatF::normalized(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RatF) -> RatF {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        RatF::normalized(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> RatF {
        RatF { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatF) -> RatF {
        RatF::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<RatF> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatF::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatF) -> Result<RatF> {
        Ok(self.mul(&other.inv()?))
    }

    /// Valuation at infinity: deg den - deg num; POS_INF for 0.
    pub fn v_inf(&self) -> i64 {
        if self.is_zero() {
            POS_INF
        } else {
            self.den.deg() - self.num.deg()
        }
    }

    /// log_q of the absolute value at infinity; NEG of v_inf for nonzero x.
    pub fn log_abs(&self) -> i64 {
        assert!(!self.is_zero(), "log of zero");
        -self.v_inf()
    }

    pub fn eval(&self, x: FqElem) -> Option<FqElem> {
        let d = self.den.eval(x);
        if self.fq().is_zero(&d) {
            None
        } else {
            Some(self.fq().div(self.num.eval(x), d))
        }
    }
}

/// Truncated expansion at infinity: x = poly(t) + sum_{1 <= j < upto} c_j pi^j.
/// Exact in the sense that x minus the returned data has valuation >= upto.
pub fn pi_series(x: &RatF, upto: i64) -> (PolyA, Vec<(i64, FqElem)>) {
    let fq = x.fq().clone();
    let (q, r) = x.num().divrem(x.den()).unwrap();
    let mut tail = Vec::new();
    if !r.is_zero() && upto > 1 {
        let dd = x.den().deg() as usize;
        let n = (upto - 1) as usize;
        // u_k = coefficient of pi^k in r/den before division by the unit part
        let u = |k: usize| -> FqElem {
            if k >= 1 && k <= dd {
                r.coeff(dd - k)
            } else {
                FqElem(0)
            }
        };
        let v = |k: usize| -> FqElem {
            if k <= dd {
                x.den().coeff(dd - k)
            } else {
                FqElem(0)
            }
        };
        let mut c: Vec<FqElem> = vec![FqElem(0); n + 1];
        for k in 1..=n {
            let mut acc = u(k);
            for i in 1..k {
                acc = fq.sub(&acc, &fq.mul(&v(i), &c[k - i]));
            }
            c[k] = acc;
        }
        for (k, ck) in c.iter().enumerate().skip(1) {
            if !fq.is_zero(ck) {
                tail.push((k as i64, *ck));
            }
        }
    }
    (q, tail)
}

/// Finite tail expansion at infinity: an exact element
/// poly(t) + sum a_j pi^j with strictly increasing indices j >= 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TailElement {
    pub poly: PolyA,
    pub tail: Vec<(i64, FqElem)>,
}

impl TailElement {
    pub fn new(poly: PolyA, tail: Vec<(i64, FqElem)>) -> TailElement {
        let fq = poly.fq().clone();
        let tail: Vec<_> = tail.into_iter().filter(|(_, c)| !fq.is_zero(c)).collect();
        for w in tail.windows(2) {
            assert!(w[0].0 < w[1].0, "tail indices must increase");
        }
        assert!(tail.first().map_or(true, |&(j, _)| j >= 1));
        TailElement { poly, tail }
    }

    pub fn from_poly(p: PolyA) -> TailElement {
        TailElement { poly: p, tail: Vec::new() }
    }

    pub fn zero(fq: &Arc<Fq>) -> TailElement {
        TailElement::from_poly(PolyA::zero(fq))
    }

    pub fn fq(&self) -> &Arc<Fq> {
        self.poly.fq()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.tail.is_empty()
    }

    pub fn to_ratf(&self) -> RatF {
        let fq = self.fq().clone();
        let mut acc = RatF::from_poly(self.poly.clone());
        if let Some(&(jmax, _)) = self.tail.last() {
            // sum a_j t^(jmax - j) / t^jmax
            let mut num = PolyA::zero(&fq);
            for &(j, a) in &self.tail {
                num = num.add(&PolyA::constant(&fq, a).shift((jmax - j) as usize));
            }
            let den = PolyA::t(&fq).pow(jmax as u32);
            acc = acc.add(&RatF::new(num, den).unwrap());
        }
        acc
    }

    /// Valuation at infinity of the exact element.
    pub fn v_inf(&self) -> i64 {
        if !self.poly.is_zero() {
            -self.poly.deg()
        } else if let Some(&(j, _)) = self.tail.first() {
            j
        } else {
            POS_INF
        }
    }

    pub fn add(&self, other: &TailElement) -> TailElement {
        let fq = self.fq().clone();
        let mut acc: BTreeMap<i64, FqElem> = self.tail.iter().cloned().collect();
        for &(j, a) in &other.tail {
            let e = acc.entry(j).or_insert_with(|| fq.zero());
            *e = fq.add(e, &a);
        }
        TailElement::new(
            self.poly.add(&other.poly),
            acc.into_iter().collect(),
        )
    }

    pub fn scale(&self, s: FqElem) -> TailElement {
        let fq = self.fq().clone();
        TailElement::new(
            self.poly.scale(s),
            self.tail.iter().map(|&(j, a)| (j, fq.mul(&a, &s))).collect(),
        )
    }

    /// Exact product with a polynomial; monomials t^i * pi^j with j <= i
    /// spill back into the polynomial part.
    pub fn mul_poly(&self, p: &PolyA) -> TailElement {
        let fq = self.fq().clone();
        let mut poly = self.poly.mul(p);
        let mut acc: BTreeMap<i64, FqElem> = BTreeMap::new();
        for &(j, a) in &self.tail {
            for (i, &ci) in p.coeffs().iter().enumerate() {
                if fq.is_zero(&ci) {
                    continue;
                }
                let e = j - i as i64;
                let v = fq.mul(&a, &ci);
                if e >= 1 {
                    let slot = acc.entry(e).or_insert_with(|| fq.zero());
                    *slot = fq.add(slot, &v);
                } else {
                    poly = poly.add(&PolyA::constant(&fq, v).shift((-e) as usize));
                }
            }
        }
        TailElement::new(poly, acc.into_iter().collect())
    }

    /// Canonical representative modulo pi^k O_inf: drop every term of
    /// valuation >= k (tail indices >= k; monomials t^m with m <= -k).
    pub fn reduce_mod(&self, k: i64) -> TailElement {
        let fq = self.fq().clone();
        let mut poly = self.poly.clone();
        if k <= 0 {
            let keep: Vec<FqElem> = poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(m, &c)| if (m as i64) <= -k { fq.zero() } else { c })
                .collect();
            poly = PolyA::from_coeffs(&fq, keep);
        }
        let tail = self.tail.iter().filter(|&&(j, _)| j < k).cloned().collect();
        TailElement::new(poly, tail)
    }

    /// Coefficient of pi^j in the tail part.
    pub fn tail_coeff(&self, j: i64) -> FqElem {
        self.tail
            .iter()
            .find(|&&(i, _)| i == j)
            .map(|&(_, a)| a)
            .unwrap_or_else(|| self.fq().zero())
    }
}

impl fmt::Display for TailElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.poly.is_zero() {
            write!(f, "{}", self.poly)?;
            first = false;
        }
        let fq = self.fq();
        for &(j, a) in &self.tail {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = fq.fmt_elem(a);
            let cs = if cs.contains('+') || cs.contains('*') { format!("({cs})") } else { cs };
            let p = if j == 1 { "pi".to_string() } else { format!("pi^{j}") };
            if cs == "1" {
                write!(f, "{p}")?;
            } else {
                write!(f, "{cs}*{p}")?;
            }
        }
        Ok(())
    }
}

/// 2x2 matrix over F.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat2F {
    pub a: RatF,
    pub b: RatF,
    pub c: RatF,
    pub d: RatF,
}

impl Mat2F {
    pub fn new(a: RatF, b: RatF, c: RatF, d: RatF) -> Mat2F {
        Mat2F { a, b, c, d }
    }

    pub fn identity(fq: &Arc<Fq>) -> Mat2F {
        Mat2F::new(RatF::one(fq), RatF::zero(fq), RatF::zero(fq), RatF::one(fq))
    }

    pub fn det(&self) -> RatF {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn mul(&self, o: &Mat2F) -> Mat2F {
        Mat2F::new(
            self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        )
    }

    pub fn inv(&self) -> Result<Mat2F> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let di = det.inv()?;
        Ok(Mat2F::new(
            self.d.mul(&di),
            self.b.neg().mul(&di),
            self.c.neg().mul(&di),
            self.a.mul(&di),
        ))
    }

    pub fn scale(&self, s: &RatF) -> Mat2F {
        Mat2F::new(self.a.mul(s), self.b.mul(s), self.c.mul(s), self.d.mul(s))
    }

    /// Moebius action on F (when the denominator does not vanish).
    pub fn moebius(&self, z: &RatF) -> Result<RatF> {
        let num = self.a.mul(z).add(&self.b);
        let den = self.c.mul(z).add(&self.d);
        num.div(&den)
    }
}

/// 2x2 matrix over A.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat2A {
    pub a: PolyA,
    pub b: PolyA,
    pub c: PolyA,
    pub d: PolyA,
}

impl Mat2A {
    pub fn new(a: PolyA, b: PolyA, c: PolyA, d: PolyA) -> Mat2A {
        Mat2A { a, b, c, d }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    pub fn identity(fq: &Arc<Fq>) -> Mat2A {
        Mat2A::new(PolyA::one(fq), PolyA::zero(fq), PolyA::zero(fq), PolyA::one(fq))
    }

    /// The inversion (0 1; 1 0).
    pub fn swap(fq: &Arc<Fq>) -> Mat2A {
        Mat2A::new(PolyA::zero(fq), PolyA::one(fq), PolyA::one(fq), PolyA::zero(fq))
    }

    /// Translation (1 b; 0 1).
    pub fn translation(b: PolyA) -> Mat2A {
        let fq = b.fq().clone();
        Mat2A::new(PolyA::one(&fq), b, PolyA::zero(&fq), PolyA::one(&fq))
    }

    pub fn det(&self) -> PolyA {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// Determinant is a nonzero constant, i.e. the matrix lies in GL_2(A).
    pub fn is_unimodular(&self) -> bool {
        let d = self.det();
        !d.is_zero() && d.is_constant()
    }

    pub fn mul(&self, o: &Mat2A) -> Mat2A {
        Mat2A::new(
            self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        )
    }

    /// Inverse of a GL_2(A) matrix, again over A.
    pub fn inv_unimodular(&self) -> Result<Mat2A> {
        let det = self.det();
        if det.is_zero() || !det.is_constant() {
            return Err(Error::SingularMatrix);
        }
        let di = self.a.fq().inv(&det.lead().unwrap()).unwrap();
        Ok(Mat2A::new(
            self.d.scale(di),
            self.b.neg().scale(di),
            self.c.neg().scale(di),
            self.a.scale(di),
        ))
    }

    pub fn to_f(&self) -> Mat2F {
        Mat2F::new(
            RatF::from_poly(self.a.clone()),
            RatF::from_poly(self.b.clone()),
            RatF::from_poly(self.c.clone()),
            RatF::from_poly(self.d.clone()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }
    fn f3() -> Arc<Fq> {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn normalization() {
        let fq = f3();
        // (2t^2+2t)/(2t) = t+1
        let num = PolyA::from_ints(&fq, &[0, 2, 2]);
        let den = PolyA::from_ints(&fq, &[0, 2]);
        let x = RatF::new(num, den).unwrap();
        assert_eq!(x, RatF::from_poly(PolyA::from_ints(&fq, &[1, 1])));
        assert!(x.den().is_monic());
    }

    #[test]
    fn field_ops() {
        let fq = f2();
        let t = RatF::from_poly(PolyA::t(&fq));
        let one = RatF::one(&fq);
        let x = one.div(&t.add(&one)).unwrap(); // 1/(t+1)
        let y = one.div(&t).unwrap(); // 1/t
        let s = x.add(&y); // (t + t+1)/(t(t+1)) = 1/(t^2+t)
        assert_eq!(s, one.div(&t.mul(&t).add(&t)).unwrap());
        assert_eq!(s.v_inf(), 2);
        assert_eq!(x.mul(&y).v_inf(), 2);
        assert_eq!(RatF::zero(&fq).v_inf(), POS_INF);
    }

    #[test]
    fn pi_series_expands() {
        let fq = f2();
        // 1/(t+1) = pi + pi^2 + pi^3 + ...
        let x = RatF::new(PolyA::one(&fq), PolyA::from_ints(&fq, &[1, 1])).unwrap();
        let (p, tail) = pi_series(&x, 5);
        assert!(p.is_zero());
        assert_eq!(tail, vec![(1, FqElem(1)), (2, FqElem(1)), (3, FqElem(1)), (4, FqElem(1))]);

        // t^2/(t+1) = t + 1 + pi + pi^2 + ...
        let y = RatF::new(PolyA::t(&fq).pow(2), PolyA::from_ints(&fq, &[1, 1])).unwrap();
        let (p, tail) = pi_series(&y, 3);
        assert_eq!(p, PolyA::from_ints(&fq, &[1, 1]));
        assert_eq!(tail, vec![(1, FqElem(1)), (2, FqElem(1))]);
    }

    #[test]
    fn pi_series_matches_tail_roundtrip() {
        let fq = f3();
        // exact finite tails convert to F and expand back to themselves
        let te = TailElement::new(
            PolyA::from_ints(&fq, &[2, 0, 1]),
            vec![(2, FqElem(1)), (5, FqElem(2))],
        );
        let x = te.to_ratf();
        let (p, tail) = pi_series(&x, 6);
        assert_eq!(p, te.poly);
        assert_eq!(tail, te.tail);
        assert_eq!(te.v_inf(), -2);
    }

    #[test]
    fn tail_display() {
        let fq = f2();
        let te = TailElement::new(PolyA::from_ints(&fq, &[1, 0, 1]), vec![(3, FqElem(1))]);
        assert_eq!(te.to_string(), "t^2+1+pi^3");
        assert_eq!(TailElement::zero(&fq).to_string(), "0");
    }

    #[test]
    fn mat2_inverse() {
        let fq = f2();
        let t = PolyA::t(&fq);
        let m = Mat2A::new(
            t.clone(),
            PolyA::one(&fq),
            t.mul(&t).add(&PolyA::one(&fq)),
            t.clone(),
        );
        // det = t^2 - (t^2+1) = 1
        assert!(m.is_unimodular());
        let mi = m.inv_unimodular().unwrap();
        let id = m.mul(&mi);
        assert_eq!(id, Mat2A::identity(&fq));
        let mf = m.to_f().inv().unwrap();
        let prod = m.to_f().mul(&mf);
        assert_eq!(prod, Mat2F::identity(&fq));
    }
}
