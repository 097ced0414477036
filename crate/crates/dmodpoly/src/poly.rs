//! Polynomials in t over F_q: the ring A = F_q[t].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::polycore::{self, FieldCtx};
use crate::NEG_INF;

/// Element of A = F_q[t]. Coefficients are little-endian with no trailing
/// zeros; the zero polynomial has an empty coefficient vector.
#[derive(Clone)]
pub struct PolyA {
    fq: Arc<Fq>,
    c: Vec<FqElem>,
}

impl PartialEq for PolyA {
    fn eq(&self, other: &Self) -> bool {
        *self.fq == *other.fq && self.c == other.c
    }
}
impl Eq for PolyA {}

impl PartialOrd for PolyA {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficient vectors compared from the top.
impl Ord for PolyA {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl fmt::Debug for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyA({self})")
    }
}

impl fmt::Display for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &co) in self.c.iter().enumerate().rev() {
            if self.fq.is_zero(&co) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = self.fq.fmt_elem(co);
            let cs = if cs.contains('+') || cs.contains('*') { format!("({cs})") } else { cs };
            match (i, cs.as_str()) {
                (0, _) => write!(f, "{cs}")?,
                (1, "1") => write!(f, "t")?,
                (1, _) => write!(f, "{cs}*t")?,
                (i, "1") => write!(f, "t^{i}")?,
                (i, _) => write!(f, "{cs}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl PolyA {
    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.c
    }

    pub fn zero(fq: &Arc<Fq>) -> PolyA {
        PolyA { fq: fq.clone(), c: Vec::new() }
    }

    pub fn one(fq: &Arc<Fq>) -> PolyA {
        PolyA::constant(fq, fq.one())
    }

    pub fn t(fq: &Arc<Fq>) -> PolyA {
        PolyA { fq: fq.clone(), c: vec![fq.zero(), fq.one()] }
    }

    pub fn constant(fq: &Arc<Fq>, c: FqElem) -> PolyA {
        if fq.is_zero(&c) {
            PolyA::zero(fq)
        } else {
            PolyA { fq: fq.clone(), c: vec![c] }
        }
    }

    pub fn from_coeffs(fq: &Arc<Fq>, mut c: Vec<FqElem>) -> PolyA {
        polycore::trim(&**fq, &mut c);
        PolyA { fq: fq.clone(), c }
    }

    /// Coefficients given as integers (reduced into the prime subfield).
    pub fn from_ints(fq: &Arc<Fq>, v: &[i64]) -> PolyA {
        let c = v.iter().map(|&n| fq.from_int(n)).collect();
        PolyA::from_coeffs(fq, c)
    }

    /// deg 0 = NEG_INF.
    pub fn deg(&self) -> i64 {
        if self.c.is_empty() {
            NEG_INF
        } else {
            (self.c.len() - 1) as i64
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == self.fq.one()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.c.last() == Some(&self.fq.one())
    }

    pub fn lead(&self) -> Option<FqElem> {
        self.c.last().copied()
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.c.get(i).copied().unwrap_or(FqElem(0))
    }

    pub fn add(&self, other: &PolyA) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::add(&*self.fq, &self.c, &other.c) }
    }

    pub fn sub(&self, other: &PolyA) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::sub(&*self.fq, &self.c, &other.c) }
    }

    pub fn neg(&self) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::neg(&*self.fq, &self.c) }
    }

    pub fn mul(&self, other: &PolyA) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::mul(&*self.fq, &self.c, &other.c) }
    }

    pub fn scale(&self, s: FqElem) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::scale(&*self.fq, &self.c, &s) }
    }

    pub fn shift(&self, k: usize) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::shift(&*self.fq, &self.c, k) }
    }

    pub fn pow(&self, mut n: u32) -> PolyA {
        let mut base = self.clone();
        let mut acc = PolyA::one(&self.fq);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn divrem(&self, other: &PolyA) -> Result<(PolyA, PolyA)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = polycore::divrem(&*self.fq, &self.c, &other.c);
        Ok((PolyA { fq: self.fq.clone(), c: q }, PolyA { fq: self.fq.clone(), c: r }))
    }

    pub fn rem_by(&self, other: &PolyA) -> Result<PolyA> {
        Ok(self.divrem(other)?.1)
    }

    pub fn divides(&self, other: &PolyA) -> bool {
        !self.is_zero() && other.divrem(self).unwrap().1.is_zero()
    }

    /// Monic gcd; 0 when both inputs are zero.
    pub fn gcd(&self, other: &PolyA) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::gcd(&*self.fq, &self.c, &other.c) }
    }

    pub fn gcd3(&self, b: &PolyA, c: &PolyA) -> PolyA {
        self.gcd(b).gcd(c)
    }

    pub fn coprime(&self, other: &PolyA) -> bool {
        self.gcd(other).is_one()
    }

    /// Extended gcd in canonical form: (g, s, t) with s*self + t*other = g,
    /// g monic, and deg s < deg(other/g) whenever other/g is nonconstant.
    pub fn xgcd(&self, other: &PolyA) -> Result<(PolyA, PolyA, PolyA)> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (g, s, _) = polycore::xgcd(&*self.fq, &self.c, &other.c);
        let g = PolyA { fq: self.fq.clone(), c: g };
        let s = PolyA { fq: self.fq.clone(), c: s };
        if other.is_zero() {
            // s*self = g exactly
            return Ok((g.clone(), s, PolyA::zero(&self.fq)));
        }
        let cof = other.divrem(&g)?.0;
        let s = if cof.is_constant() { PolyA::zero(&self.fq) } else { s.rem_by(&cof)? };
        let (t, r) = g.sub(&s.mul(self)).divrem(other)?;
        debug_assert!(r.is_zero());
        Ok((g, s, t))
    }

    pub fn monic(&self) -> PolyA {
        PolyA { fq: self.fq.clone(), c: polycore::monic(&*self.fq, &self.c) }
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        polycore::eval(&*self.fq, &self.c, &x)
    }

    /// Evaluate with coefficients lifted into another field.
    pub fn eval_in<F: FieldCtx>(
        &self,
        ctx: &F,
        theta: &F::El,
        lift: impl Fn(FqElem) -> F::El,
    ) -> F::El {
        let mut acc = ctx.zero();
        for co in self.c.iter().rev() {
            acc = ctx.mul(&acc, theta);
            if !self.fq.is_zero(co) {
                acc = ctx.add(&acc, &lift(*co));
            }
        }
        acc
    }

    pub fn is_irreducible(&self) -> bool {
        polycore::is_irreducible(&*self.fq, &self.c)
    }

    /// Multiplicity of the irreducible p in self (self nonzero).
    pub fn ord_at(&self, p: &PolyA) -> u32 {
        assert!(!self.is_zero());
        let mut n = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(p).unwrap();
            if !r.is_zero() {
                return n;
            }
            n += 1;
            cur = q;
        }
    }

    /// Factor a monic polynomial by trial division against the enumerated
    /// irreducibles in ascending order. Factors come back sorted with their
    /// multiplicities; the constant 1 factors into the empty product.
    pub fn factor_monic(&self) -> Result<Vec<(PolyA, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.is_monic() {
            return Err(Error::NotMonic(self.to_string()));
        }
        let mut out = Vec::new();
        let mut cur = self.clone();
        let mut d = 1usize;
        while cur.deg() > 0 {
            if (d as i64) * 2 > cur.deg() {
                // what remains is irreducible
                out.push((cur.clone(), 1));
                break;
            }
            for p in irreducibles(&self.fq, d) {
                if cur.deg() < d as i64 {
                    break;
                }
                let mut mult = 0u32;
                while p.divides(&cur) {
                    cur = cur.divrem(&p).unwrap().0;
                    mult += 1;
                }
                if mult > 0 {
                    out.push((p, mult));
                }
            }
            d += 1;
        }
        Ok(out)
    }
}

/// All monic polynomials of exact degree d, in coefficient order.
pub fn monic_polys(fq: &Arc<Fq>, d: usize) -> Vec<PolyA> {
    let q = fq.q as u64;
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total as usize);
    for n in 0..total {
        let mut c = Vec::with_capacity(d + 1);
        let mut v = n;
        for _ in 0..d {
            c.push(FqElem((v % q) as u32));
            v /= q;
        }
        c.push(fq.one());
        out.push(PolyA { fq: fq.clone(), c });
    }
    out
}

/// All polynomials of degree < bound, including 0.
pub fn polys_below(fq: &Arc<Fq>, bound: usize) -> Vec<PolyA> {
    let q = fq.q as u64;
    let total = q.pow(bound as u32);
    let mut out = Vec::with_capacity(total as usize);
    for n in 0..total {
        let mut c = Vec::with_capacity(bound);
        let mut v = n;
        for _ in 0..bound {
            c.push(FqElem((v % q) as u32));
            v /= q;
        }
        out.push(PolyA::from_coeffs(fq, c));
    }
    out
}

static IRR_CACHE: OnceLock<Mutex<BTreeMap<(u32, u32, usize), Arc<Vec<Vec<FqElem>>>>>> =
    OnceLock::new();

/// Monic irreducibles of exact degree d, ascending, cached per field.
pub fn irreducibles(fq: &Arc<Fq>, d: usize) -> Vec<PolyA> {
    assert!(d >= 1);
    let cache = IRR_CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let key = (fq.p, fq.e, d);
    let coeffs = {
        let mut map = cache.lock().unwrap();
        if let Some(v) = map.get(&key) {
            v.clone()
        } else {
            let v: Vec<Vec<FqElem>> = monic_polys(fq, d)
                .into_iter()
                .filter(|p| p.is_irreducible())
                .map(|p| p.c)
                .collect();
            let v = Arc::new(v);
            map.insert(key, v.clone());
            v
        }
    };
    coeffs.iter().map(|c| PolyA { fq: fq.clone(), c: c.clone() }).collect()
}

/// Chinese remainder lift: residues r_i mod pairwise coprime moduli m_i.
/// The result is the unique representative of degree < sum deg m_i.
pub fn crt(pairs: &[(PolyA, PolyA)]) -> Result<PolyA> {
    let (mut acc, mut modulus) = match pairs.first() {
        None => return Err(Error::PreconditionViolated("empty residue list".into())),
        Some((r, m)) => (r.rem_by(m)?, m.clone()),
    };
    for (r, m) in &pairs[1..] {
        // acc + modulus * u = r mod m
        let (g, s, _) = modulus.xgcd(m)?;
        if !g.is_one() {
            return Err(Error::PreconditionViolated("crt moduli are not coprime".into()));
        }
        // s*modulus = 1 mod m
        let diff = r.sub(&acc).rem_by(m)?;
        let u = s.mul(&diff).rem_by(m)?;
        acc = acc.add(&modulus.mul(&u));
        modulus = modulus.mul(m);
        acc = acc.rem_by(&modulus)?;
    }
    Ok(acc)
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
    fn display_forms() {
        let fq = f3();
        assert_eq!(PolyA::zero(&fq).to_string(), "0");
        assert_eq!(PolyA::from_ints(&fq, &[2, 1, 2]).to_string(), "2*t^2+t+2");
        assert_eq!(PolyA::t(&fq).to_string(), "t");
        let f4 = Fq::new(2, 2).unwrap();
        let p = PolyA::from_coeffs(&f4, vec![f4.elem(3), f4.elem(1), f4.elem(2)]);
        assert_eq!(p.to_string(), "w*t^2+t+(w+1)");
    }

    #[test]
    fn degree_sentinel() {
        let fq = f2();
        assert!(PolyA::zero(&fq).deg() < -1_000_000_000);
        assert_eq!(PolyA::one(&fq).deg(), 0);
        assert_eq!(PolyA::t(&fq).deg(), 1);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over F_q:
        // q=2: 2,1,2,3,6; q=3: 3,3,8,18,48
        let expect2 = [2usize, 1, 2, 3, 6];
        let expect3 = [3usize, 3, 8, 18, 48];
        for (d, &e) in expect2.iter().enumerate() {
            assert_eq!(irreducibles(&f2(), d + 1).len(), e);
        }
        for (d, &e) in expect3.iter().enumerate() {
            assert_eq!(irreducibles(&f3(), d + 1).len(), e);
        }
    }

    #[test]
    fn factor_roundtrip() {
        let fq = f2();
        // t^2 * (t+1) * (t^2+t+1)^2
        let t = PolyA::t(&fq);
        let t1 = PolyA::from_ints(&fq, &[1, 1]);
        let tt1 = PolyA::from_ints(&fq, &[1, 1, 1]);
        let n = t.pow(2).mul(&t1).mul(&tt1.pow(2));
        let f = n.factor_monic().unwrap();
        assert_eq!(f, vec![(t.clone(), 2), (t1.clone(), 1), (tt1.clone(), 2)]);
        let back = f.iter().fold(PolyA::one(&fq), |acc, (p, m)| acc.mul(&p.pow(*m)));
        assert_eq!(back, n);
        assert!(PolyA::from_ints(&fq, &[1, 1, 1, 1]).factor_monic().is_ok());
        assert!(t.scale(fq.elem(1)).factor_monic().is_ok());
    }

    #[test]
    fn factor_rejects_nonmonic_and_zero() {
        let fq = f3();
        let p = PolyA::from_ints(&fq, &[1, 2]);
        assert!(matches!(p.factor_monic(), Err(Error::NotMonic(_))));
        assert!(matches!(PolyA::zero(&fq).factor_monic(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn xgcd_is_canonical() {
        let fq = f3();
        for a in monic_polys(&fq, 3) {
            for b in monic_polys(&fq, 2) {
                let (g, s, t) = a.xgcd(&b).unwrap();
                assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
                assert!(g.is_monic());
                let cof = b.divrem(&g).unwrap().0;
                if !cof.is_constant() {
                    assert!(s.deg() < cof.deg());
                }
            }
        }
        let z = PolyA::zero(&fq);
        assert!(matches!(z.xgcd(&z), Err(Error::BothZero)));
    }

    #[test]
    fn crt_reconstructs() {
        let fq = f2();
        let m1 = PolyA::from_ints(&fq, &[1, 1]); // t+1
        let m2 = PolyA::from_ints(&fq, &[1, 1, 1]); // t^2+t+1
        let m3 = PolyA::from_ints(&fq, &[1, 1, 0, 1]); // t^3+t^2+1? no: 1+t+t^3
        let target = PolyA::from_ints(&fq, &[1, 0, 1, 1, 0, 1]);
        let pairs: Vec<_> = [m1, m2, m3]
            .iter()
            .map(|m| (target.rem_by(m).unwrap(), m.clone()))
            .collect();
        let got = crt(&pairs).unwrap();
        assert_eq!(got, target);
    }

    #[test]
    fn ord_at_counts_multiplicity() {
        let fq = f2();
        let t = PolyA::t(&fq);
        let n = t.pow(3).mul(&PolyA::from_ints(&fq, &[1, 1]));
        assert_eq!(n.ord_at(&t), 3);
        assert_eq!(n.ord_at(&PolyA::from_ints(&fq, &[1, 1])), 1);
        assert_eq!(n.ord_at(&PolyA::from_ints(&fq, &[1, 1, 1])), 0);
    }
}
