//! Truncated Puiseux series in pi = 1/t with coefficients in an extension
//! of F_q. These model points of the completed algebraic closure at the
//! place at infinity closely enough for all reduction work: finitely many
//! terms plus an optional absolute precision bound.
//!
//! Exponents are stored as integer numerators over one common denominator
//! (the ramification index). A series with `prec = None` is exact. All
//! operations track how far the result is trustworthy and refuse to invent
//! digits beyond that.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField};
use crate::polycore::FieldCtx;
use crate::ratfun::{pi_series, RatF};
use crate::Rat;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    a / gcd_i64(a, b) * b
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Puiseux {
    field: Arc<ExtField>,
    /// Ramification index: exponents are key/den.
    den: i64,
    /// Exponent numerator -> nonzero coefficient; ascending = leading first.
    terms: BTreeMap<i64, ExtElem>,
    /// Absolute precision numerator over den: the series is only known
    /// modulo pi^(prec/den). None means exact.
    prec: Option<i64>,
}

impl Puiseux {
    pub fn new(
        field: Arc<ExtField>,
        den: i64,
        terms: Vec<(i64, ExtElem)>,
        prec: Option<i64>,
    ) -> Puiseux {
        assert!(den >= 1, "ramification index must be positive");
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if field.is_zero(&c) {
                continue;
            }
            if let Some(p) = prec {
                if k >= p {
                    continue;
                }
            }
            let slot = map.entry(k).or_insert_with(|| field.zero());
            *slot = field.add(slot, &c);
            if field.is_zero(slot) {
                map.remove(&k);
            }
        }
        let mut out = Puiseux { field, den, terms: map, prec };
        out.reduce_den();
        out
    }

    fn reduce_den(&mut self) {
        if self.den == 1 {
            return;
        }
        let mut g = self.den;
        for k in self.terms.keys() {
            g = gcd_i64(g, *k);
        }
        if let Some(p) = self.prec {
            g = gcd_i64(g, p);
        }
        if self.terms.is_empty() && self.prec.is_none() {
            g = self.den;
        }
        if g > 1 {
            self.den /= g;
            self.terms = self.terms.iter().map(|(k, c)| (k / g, c.clone())).collect();
            self.prec = self.prec.map(|p| p / g);
        }
    }

    pub fn zero(field: Arc<ExtField>) -> Puiseux {
        Puiseux { field, den: 1, terms: BTreeMap::new(), prec: None }
    }

    pub fn monomial(field: Arc<ExtField>, coeff: ExtElem, num: i64, den: i64) -> Puiseux {
        Puiseux::new(field, den, vec![(num, coeff)], None)
    }

    /// Expansion of a rational function, exact for polynomials and truncated
    /// at the target precision otherwise.
    pub fn from_ratf(x: &RatF, field: &Arc<ExtField>, target: &Rat) -> Puiseux {
        assert_eq!(**x.fq(), *field.base);
        if x.den().is_one() {
            let p = x.num();
            let terms = (0..=p.deg().max(0))
                .map(|i| (-i, field.const_from(p.coeff(i as usize))))
                .collect();
            return Puiseux::new(field.clone(), 1, terms, None);
        }
        let upto = target.ceil().to_integer().try_into().unwrap_or(i64::MAX / 4);
        let (poly, tail) = pi_series(x, upto);
        let mut terms: Vec<(i64, ExtElem)> = (0..=poly.deg().max(0))
            .map(|i| (-i, field.const_from(poly.coeff(i as usize))))
            .collect();
        for (j, c) in tail {
            terms.push((j, field.const_from(c)));
        }
        Puiseux::new(field.clone(), 1, terms, Some(upto))
    }

    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn ram_den(&self) -> i64 {
        self.den
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Exactly zero (not merely zero to the known precision).
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// No visible terms (zero to the known precision).
    pub fn is_apparently_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn prec_rat(&self) -> Option<Rat> {
        self.prec.map(|p| rat(p, self.den))
    }

    /// Valuation of the leading term, if any term is visible.
    pub fn valuation_rat(&self) -> Option<Rat> {
        self.terms.keys().next().map(|&k| rat(k, self.den))
    }

    pub fn leading(&self) -> Option<(Rat, ExtElem)> {
        self.terms.iter().next().map(|(&k, c)| (rat(k, self.den), c.clone()))
    }

    pub fn terms_rat(&self) -> Vec<(Rat, ExtElem)> {
        self.terms.iter().map(|(&k, c)| (rat(k, self.den), c.clone())).collect()
    }

    /// Raw view: (denominator, ascending (numerator, coeff) pairs, prec numerator).
    pub fn raw_parts(&self) -> (i64, Vec<(i64, ExtElem)>, Option<i64>) {
        (self.den, self.terms.iter().map(|(&k, c)| (k, c.clone())).collect(), self.prec)
    }

    fn rescale(&self, new_den: i64) -> Puiseux {
        assert!(new_den % self.den == 0);
        let f = new_den / self.den;
        Puiseux {
            field: self.field.clone(),
            den: new_den,
            terms: self.terms.iter().map(|(&k, c)| (k * f, c.clone())).collect(),
            prec: self.prec.map(|p| p * f),
        }
    }

    pub fn add(&self, other: &Puiseux) -> Puiseux {
        assert_eq!(*self.field, *other.field, "coefficient fields differ");
        let den = lcm_i64(self.den, other.den);
        let a = self.rescale(den);
        let b = other.rescale(den);
        let prec = match (a.prec, b.prec) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p),
            (Some(p), Some(q)) => Some(p.min(q)),
        };
        let mut terms: Vec<(i64, ExtElem)> = a.terms.into_iter().collect();
        terms.extend(b.terms);
        Puiseux::new(self.field.clone(), den, terms, prec)
    }

    pub fn neg(&self) -> Puiseux {
        Puiseux {
            field: self.field.clone(),
            den: self.den,
            terms: self.terms.iter().map(|(&k, c)| (k, self.field.neg(c))).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Puiseux) -> Puiseux {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExtElem) -> Puiseux {
        if self.field.is_zero(c) {
            let mut z = Puiseux::zero(self.field.clone());
            z.prec = self.prec;
            z.den = self.den;
            z.reduce_den();
            return z;
        }
        Puiseux {
            field: self.field.clone(),
            den: self.den,
            terms: self.terms.iter().map(|(&k, co)| (k, self.field.mul(co, c))).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by pi^(num/den).
    pub fn shift_pi(&self, num: i64, den: i64) -> Puiseux {
        assert!(den >= 1);
        let nd = lcm_i64(self.den, den);
        let a = self.rescale(nd);
        let shift = num * (nd / den);
        Puiseux {
            field: a.field,
            den: nd,
            terms: a.terms.into_iter().map(|(k, c)| (k + shift, c)).collect(),
            prec: a.prec.map(|p| p + shift),
        }
        .reduced()
    }

    fn reduced(mut self) -> Puiseux {
        self.reduce_den();
        self
    }

    pub fn mul(&self, other: &Puiseux) -> Puiseux {
        assert_eq!(*self.field, *other.field, "coefficient fields differ");
        if self.is_exact_zero() || other.is_exact_zero() {
            return Puiseux::zero(self.field.clone());
        }
        let den = lcm_i64(self.den, other.den);
        let a = self.rescale(den);
        let b = other.rescale(den);
        // known precision: val(a) + prec(b) and val(b) + prec(a)
        let va = a.terms.keys().next().copied().or(a.prec);
        let vb = b.terms.keys().next().copied().or(b.prec);
        let mut prec: Option<i64> = None;
        if let (Some(pb), Some(va)) = (b.prec, va) {
            prec = Some(va + pb);
        }
        if let (Some(pa), Some(vb)) = (a.prec, vb) {
            let cand = vb + pa;
            prec = Some(prec.map_or(cand, |p| p.min(cand)));
        }
        let mut terms = Vec::new();
        for (&ka, ca) in &a.terms {
            for (&kb, cb) in &b.terms {
                terms.push((ka + kb, a.field.mul(ca, cb)));
            }
        }
        Puiseux::new(self.field.clone(), den, terms, prec)
    }

    /// Truncate the known part strictly below the target precision.
    pub fn truncate(&self, target: &Rat) -> Puiseux {
        let p = self.prec_rat();
        let new_prec = match p {
            Some(p) if p <= *target => return self.clone(),
            _ => target.clone(),
        };
        // express new_prec over a compatible denominator
        let nden = lcm_i64(self.den, new_prec.denom().try_into().unwrap_or(1));
        let a = self.rescale(nden);
        let pnum = (new_prec * BigInt::from(nden)).to_integer();
        let pnum: i64 = pnum.try_into().expect("precision out of range");
        Puiseux::new(
            self.field.clone(),
            nden,
            a.terms.into_iter().collect(),
            Some(pnum),
        )
    }

    /// Inverse, computed at least up to the target absolute precision
    /// (exact when the input is an exact monomial).
    pub fn inv_to(&self, target: &Rat) -> Result<Puiseux> {
        let Some((&v, c0)) = self.terms.iter().next() else {
            return Err(if self.prec.is_some() {
                Error::PrecisionInsufficient(
                    "cannot invert a series that vanishes to its known precision".into(),
                )
            } else {
                Error::DivisionByZero
            });
        };
        let c0i = self.field.inv(c0).unwrap();
        // z = c0 pi^(v/den) (1 + y)
        let mut y_terms = Vec::new();
        for (&k, c) in self.terms.iter().skip(1) {
            y_terms.push((k - v, self.field.mul(c, &c0i)));
        }
        let y = Puiseux::new(
            self.field.clone(),
            self.den,
            y_terms,
            self.prec.map(|p| p - v),
        );
        if y.is_exact_zero() {
            // exact monomial: exact inverse
            return Ok(Puiseux::monomial(self.field.clone(), c0i, -v, self.den));
        }
        // sum of (-y)^i, truncated at target + v/den
        let sum_target = target.clone() + rat(v, self.den);
        let my = y.neg();
        let mut acc = Puiseux::monomial(self.field.clone(), self.field.one(), 0, 1);
        let mut cur = acc.clone();
        let w = y.valuation_rat().unwrap_or_else(|| y.prec_rat().unwrap());
        if w <= rat(0, 1) {
            return Err(Error::PrecisionInsufficient(
                "inverse needs a series with positive-gap tail".into(),
            ));
        }
        let mut steps = 0u32;
        loop {
            cur = cur.mul(&my).truncate(&sum_target);
            if cur.is_apparently_zero() {
                break;
            }
            acc = acc.add(&cur);
            steps += 1;
            if steps > 4096 {
                return Err(Error::IterationCapExceeded("inverse series expansion".into()));
            }
        }
        // acc has prec >= sum_target by construction unless y was inexact shorter
        let mut acc = acc.truncate(&sum_target);
        if let Some(py) = y.prec_rat() {
            // the tail of z is only known to py; so is the inverse sum
            if py < sum_target {
                acc = acc.truncate(&py);
            }
        }
        let out = acc.scale(&c0i).shift_pi(-v, self.den);
        Ok(out)
    }

    /// Moebius action (a z + b)/(c z + d), single pass at a working precision
    /// derived from the target; fails honestly instead of retrying deeper.
    pub fn moebius(&self, m: &crate::ratfun::Mat2F, target: &Rat) -> Result<Puiseux> {
        let field = self.field.clone();
        // working precision: target plus the worst valuation shifts the
        // matrix and the input can introduce, plus fixed slack
        let span = match (self.prec_rat(), self.valuation_rat()) {
            (Some(p), Some(v)) => p - v,
            (None, Some(_)) => {
                let lo = *self.terms.keys().next().unwrap();
                let hi = *self.terms.keys().next_back().unwrap();
                rat(hi - lo, self.den)
            }
            _ => rat(0, 1),
        };
        let vabs = self
            .valuation_rat()
            .map(|v| if v < rat(0, 1) { -v } else { v })
            .unwrap_or_else(|| rat(0, 1));
        let mut amp = rat(0, 1);
        for e in [&m.a, &m.b, &m.c, &m.d] {
            if !e.is_zero() {
                amp += rat(e.v_inf().abs(), 1);
            }
        }
        let w = target.clone() + span + vabs + amp + rat(8, 1);
        let conv = |r: &RatF| Puiseux::from_ratf(r, &field, &w);
        let num = conv(&m.a).mul(self).add(&conv(&m.b));
        let den = conv(&m.c).mul(self).add(&conv(&m.d));
        if den.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if den.is_apparently_zero() {
            return Err(Error::PrecisionInsufficient(
                "denominator vanishes to the working precision".into(),
            ));
        }
        if num.is_exact_zero() {
            return Ok(Puiseux::zero(field));
        }
        let Some(vnum) = num.valuation_rat() else {
            return Err(Error::PrecisionInsufficient(
                "numerator vanishes to the working precision".into(),
            ));
        };
        // the product num * den^(-1) needs den^(-1) known to target - v(num)
        let dinv = den.inv_to(&(target.clone() - vnum + rat(1, 1)))?;
        let out = num.mul(&dinv);
        if let Some(p) = out.prec_rat() {
            if p < *target {
                return Err(Error::PrecisionInsufficient(format!(
                    "achieved precision pi^{p}, requested pi^{target}"
                )));
            }
        }
        Ok(out.truncate(target))
    }
}

impl fmt::Display for Puiseux {
    /// Canonical text form: `c*pi^(n/d)` terms in ascending exponent order
    /// joined by `+`, then a `prec=(P/d)` marker when inexact.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (&k, c) in &self.terms {
            let cs = self.field.fmt_elem(c);
            let cs = if cs.contains('+') || cs.contains('*') {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(format!("{cs}*pi^({k}/{})", self.den));
        }
        if let Some(p) = self.prec {
            parts.push(format!("prec=({p}/{})", self.den));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join("+"))
    }
}
