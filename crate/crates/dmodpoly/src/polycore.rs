//! Dense univariate polynomial arithmetic over an abstract field.
//!
//! Polynomials are little-endian coefficient vectors with no trailing zeros;
//! the zero polynomial is the empty vector. Every extension layer in the
//! crate reuses these routines with its own [`FieldCtx`].

use num_bigint::BigUint;
use num_traits::Zero;

pub trait FieldCtx {
    type El: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Option<Self::El>;
    /// Number of field elements.
    fn size_big(&self) -> BigUint;

    fn pow_u64(&self, a: &Self::El, mut n: u64) -> Self::El {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
}

pub fn trim<F: FieldCtx>(f: &F, v: &mut Vec<F::El>) {
    while v.last().is_some_and(|c| f.is_zero(c)) {
        v.pop();
    }
}

/// Degree as usize; None for the zero polynomial.
pub fn deg<F: FieldCtx>(f: &F, v: &[F::El]) -> Option<usize> {
    v.iter().rposition(|c| !f.is_zero(c))
}

pub fn is_zero_poly<F: FieldCtx>(f: &F, v: &[F::El]) -> bool {
    v.iter().all(|c| f.is_zero(c))
}

pub fn add<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
        out.push(f.add(&x, &y));
    }
    trim(f, &mut out);
    out
}

pub fn sub<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
        out.push(f.sub(&x, &y));
    }
    trim(f, &mut out);
    out
}

pub fn neg<F: FieldCtx>(f: &F, a: &[F::El]) -> Vec<F::El> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn scale<F: FieldCtx>(f: &F, a: &[F::El], s: &F::El) -> Vec<F::El> {
    let mut out: Vec<_> = a.iter().map(|c| f.mul(c, s)).collect();
    trim(f, &mut out);
    out
}

pub fn mul<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    if is_zero_poly(f, a) || is_zero_poly(f, b) {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if f.is_zero(y) {
                continue;
            }
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, &mut out);
    out
}

/// Multiply by x^k.
pub fn shift<F: FieldCtx>(f: &F, a: &[F::El], k: usize) -> Vec<F::El> {
    if is_zero_poly(f, a) {
        return Vec::new();
    }
    let mut out = vec![f.zero(); k];
    out.extend_from_slice(a);
    out
}

/// Quotient and remainder; panics if b = 0.
pub fn divrem<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> (Vec<F::El>, Vec<F::El>) {
    let db = deg(f, b).expect("division by the zero polynomial");
    let lead_inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    let mut rem: Vec<F::El> = a.to_vec();
    trim(f, &mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quo = vec![f.zero(); rem.len() - db];
    while let Some(dr) = deg(f, &rem) {
        if dr < db {
            break;
        }
        let c = f.mul(&rem[dr], &lead_inv);
        quo[dr - db] = c.clone();
        for i in 0..=db {
            let t = f.mul(&b[i], &c);
            rem[dr - db + i] = f.sub(&rem[dr - db + i], &t);
        }
        trim(f, &mut rem);
    }
    trim(f, &mut quo);
    (quo, rem)
}

pub fn rem<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    divrem(f, a, b).1
}

pub fn monic<F: FieldCtx>(f: &F, a: &[F::El]) -> Vec<F::El> {
    match deg(f, a) {
        None => Vec::new(),
        Some(d) => {
            let li = f.inv(&a[d]).unwrap();
            scale(f, a, &li)
        }
    }
}

/// Monic gcd; gcd(0, 0) = 0.
pub fn gcd<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let mut x: Vec<F::El> = a.to_vec();
    let mut y: Vec<F::El> = b.to_vec();
    trim(f, &mut x);
    trim(f, &mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic (or zero),
/// and deg s < deg(b/g) whenever both inputs are nonzero and b/g is nonconstant.
pub fn xgcd<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El]) -> (Vec<F::El>, Vec<F::El>, Vec<F::El>) {
    let mut r0: Vec<F::El> = a.to_vec();
    let mut r1: Vec<F::El> = b.to_vec();
    trim(f, &mut r0);
    trim(f, &mut r1);
    let mut s0 = vec![f.one()];
    let mut s1: Vec<F::El> = Vec::new();
    let mut t0: Vec<F::El> = Vec::new();
    let mut t1 = vec![f.one()];
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let ns = sub(f, &s0, &mul(f, &q, &s1));
        let nt = sub(f, &t0, &mul(f, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    if r0.is_empty() {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let li = f.inv(&r0[deg(f, &r0).unwrap()]).unwrap();
    (scale(f, &r0, &li), scale(f, &s0, &li), scale(f, &t0, &li))
}

pub fn eval<F: FieldCtx>(f: &F, v: &[F::El], x: &F::El) -> F::El {
    let mut acc = f.zero();
    for c in v.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn modmul<F: FieldCtx>(f: &F, a: &[F::El], b: &[F::El], m: &[F::El]) -> Vec<F::El> {
    rem(f, &mul(f, a, b), m)
}

pub fn modpow_big<F: FieldCtx>(f: &F, a: &[F::El], n: &BigUint, m: &[F::El]) -> Vec<F::El> {
    let mut base = rem(f, a, m);
    let mut acc = vec![f.one()];
    let bits = n.bits();
    for i in 0..bits {
        if n.bit(i) {
            acc = modmul(f, &acc, &base, m);
        }
        if i + 1 < bits {
            base = modmul(f, &base, &base, m);
        }
    }
    if n.is_zero() {
        acc = vec![f.one()];
    }
    acc
}

/// Rabin irreducibility test for a polynomial of degree >= 1.
pub fn is_irreducible<F: FieldCtx>(f: &F, poly: &[F::El]) -> bool {
    let d = match deg(f, poly) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    if d == 1 {
        return true;
    }
    let m = monic(f, poly);
    let qf = f.size_big();
    let x: Vec<F::El> = vec![f.zero(), f.one()];

    // frob[i] = x^(q^(i+1)) mod m, built by repeated q-th powers
    let mut frob = Vec::with_capacity(d);
    let mut cur = modpow_big(f, &x, &qf, &m);
    frob.push(cur.clone());
    for _ in 1..d {
        cur = modpow_big(f, &cur, &qf, &m);
        frob.push(cur.clone());
    }
    // x^(q^d) must equal x mod m
    if sub(f, &frob[d - 1], &x) != Vec::<F::El>::new() {
        return false;
    }
    // no root field of degree d/r for any prime r | d
    let mut dd = d;
    let mut primes = Vec::new();
    let mut r = 2usize;
    while r * r <= dd {
        if dd % r == 0 {
            primes.push(r);
            while dd % r == 0 {
                dd /= r;
            }
        }
        r += 1;
    }
    if dd > 1 {
        primes.push(dd);
    }
    for r in primes {
        let h = sub(f, &frob[d / r - 1], &x);
        let g = gcd(f, &h, &m);
        if deg(f, &g) != Some(0) {
            return false;
        }
    }
    true
}

/// One root of a squarefree product of linear factors, by deterministic
/// gcd splitting. `poly` must split completely over the field. Returns the
/// root reached by the fixed splitting schedule, so repeated calls agree.
pub fn one_root<F: FieldCtx>(
    f: &F,
    poly: &[F::El],
    char_two: bool,
    abs_dim_over_f2: u32,
    elem_by_index: &dyn Fn(u64) -> F::El,
) -> F::El {
    let mut cur = monic(f, poly);
    let mut salt = 1u64;
    loop {
        let d = deg(f, &cur).expect("nonzero split polynomial");
        if d == 1 {
            return f.neg(&cur[0]);
        }
        let delta = elem_by_index(salt);
        salt += 1;
        let split = if char_two {
            // additive splitting: trace of delta*x over F_2
            let mut term: Vec<F::El> = vec![f.zero(), delta.clone()]; // delta * x
            let mut acc = term.clone();
            for _ in 1..abs_dim_over_f2 {
                term = modmul(f, &term, &term, &cur);
                acc = add(f, &acc, &term);
            }
            acc
        } else {
            // multiplicative splitting: (x+delta)^((|F|-1)/2) - 1
            let ebig = (f.size_big() - BigUint::from(1u32)) / BigUint::from(2u32);
            let xd: Vec<F::El> = vec![delta.clone(), f.one()];
            let p = modpow_big(f, &xd, &ebig, &cur);
            sub(f, &p, &[f.one()])
        };
        let g = gcd(f, &split, &cur);
        let dg = deg(f, &g);
        if let Some(dg) = dg {
            if dg > 0 && dg < d {
                // keep the smaller factor for a shorter tail
                let other = divrem(f, &cur, &g).0;
                cur = if dg <= d - dg { g } else { monic(f, &other) };
                continue;
            }
        }
        // splitting element failed to separate; try the next one
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;

    #[test]
    fn divrem_roundtrip() {
        let f = Fq::new(5, 1).unwrap();
        let a: Vec<_> = [1, 2, 0, 3, 4].iter().map(|&c| f.elem(c)).collect();
        let b: Vec<_> = [2, 1, 3].iter().map(|&c| f.elem(c)).collect();
        let (q, r) = divrem(&*f, &a, &b);
        let back = add(&*f, &mul(&*f, &q, &b), &r);
        let mut a2 = a.clone();
        trim(&*f, &mut a2);
        assert_eq!(back, a2);
        assert!(deg(&*f, &r).map_or(true, |d| d < 2));
    }

    #[test]
    fn xgcd_bezout() {
        let f = Fq::new(3, 1).unwrap();
        let a: Vec<_> = [1, 0, 1, 1].iter().map(|&c| f.elem(c)).collect(); // t^3+t^2+1
        let b: Vec<_> = [2, 1, 1].iter().map(|&c| f.elem(c)).collect(); // t^2+t+2
        let (g, s, t) = xgcd(&*f, &a, &b);
        let lhs = add(&*f, &mul(&*f, &s, &a), &mul(&*f, &t, &b));
        assert_eq!(lhs, g);
        assert!(!g.is_empty());
    }

    #[test]
    fn irreducibility_matches_enumeration_f2() {
        let f = Fq::new(2, 1).unwrap();
        // count monic irreducibles of degree d over F_2: 2: 1, 3: 2, 4: 3
        for (d, expect) in [(2usize, 1usize), (3, 2), (4, 3)] {
            let mut count = 0;
            for n in 0..(1u32 << d) {
                let mut v: Vec<_> = (0..d).map(|i| f.elem((n >> i) & 1)).collect();
                v.push(f.one());
                if is_irreducible(&*f, &v) {
                    count += 1;
                }
            }
            assert_eq!(count, expect, "degree {d}");
        }
    }

    #[test]
    fn one_root_finds_roots() {
        // x^2+1 splits over F_9 with roots of multiplicative order 4
        let f9 = Fq::new(3, 2).unwrap();
        let poly: Vec<_> = vec![f9.one(), f9.zero(), f9.one()];
        let r = one_root(&*f9, &poly, false, 0, &|i| f9.elem((i % 9) as u32));
        assert_eq!(eval(&*f9, &poly, &r), f9.zero());

        // char 2 splitting over F_4: x^2+x+w0 style products
        let f4 = Fq::new(2, 2).unwrap();
        let w = f4.gen_w();
        // (x - w)(x - (w+1)) = x^2 + x + w*(w+1) = x^2 + x + 1
        let poly: Vec<_> = vec![f4.one(), f4.one(), f4.one()];
        let r = one_root(&*f4, &poly, true, 2, &|i| f4.elem((i % 4) as u32));
        assert!(r == w || r == f4.elem(3));
        assert_eq!(eval(&*f4, &poly, &r), f4.zero());
    }
}
