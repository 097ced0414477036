//! Base coefficient fields F_q, q = p^e, with table-driven multiplication.
//!
//! Elements are encoded as u32 values below q: the base-p digits of the
//! encoding are the coordinates with respect to the power basis of the
//! defining modulus (for e = 1 the encoding is the residue itself).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::polycore::{self, FieldCtx};

/// Element of some [`Fq`]; meaningful only together with its field.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FqElem(pub u32);

/// A finite field F_q with q = p^e <= 2^16.
pub struct Fq {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    /// Defining monic irreducible over F_p, little-endian digit values.
    /// None exactly when e = 1.
    pub modulus: Option<Vec<u32>>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.q)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of n, ascending, without multiplicity.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime field arithmetic used while bootstrapping a new Fq.
struct Fp(u32);

impl FieldCtx for Fp {
    type El = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        (a + b) % self.0
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        (a + self.0 - b) % self.0
    }
    fn neg(&self, a: &u32) -> u32 {
        (self.0 - a) % self.0
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.0 as u64) as u32
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            None
        } else {
            Some(self.pow_u64(a, self.0 as u64 - 2))
        }
    }
    fn size_big(&self) -> BigUint {
        BigUint::from(self.0)
    }
}

impl Fq {
    /// Build F_{p^e}. The defining modulus for e > 1 is the first monic
    /// irreducible of degree e over F_p in coefficient-vector order
    /// (constant coefficient most significant).
    pub fn new(p: u32, e: u32) -> Result<Arc<Fq>> {
        if !is_prime(p) {
            return Err(Error::UnsupportedField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::UnsupportedField("extension degree 0".into()));
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= 1 << 16).ok_or_else(|| {
            Error::UnsupportedField(format!("{p}^{e} exceeds the 2^16 field size cap"))
        })? as u32;

        let modulus = if e == 1 { None } else { Some(Self::least_modulus(p, e)) };
        let (generator, exp, log) = Self::build_tables(p, e, q, modulus.as_deref());
        Ok(Arc::new(Fq { p, e, q, modulus, generator, exp, log }))
    }

    /// Build F_q from q itself, factoring q = p^e.
    pub fn from_q(q: u32) -> Result<Arc<Fq>> {
        if q < 2 {
            return Err(Error::UnsupportedField(format!("q = {q}")));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut e = 0u32;
        let mut m = q;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if m != 1 {
            return Err(Error::UnsupportedField(format!("{q} is not a prime power")));
        }
        Fq::new(p, e)
    }

    fn least_modulus(p: u32, e: u32) -> Vec<u32> {
        let ctx = Fp(p);
        let total = (p as u64).pow(e);
        for n in 0..total {
            // digits of n, base p, most significant digit = constant coefficient
            let mut digits = vec![0u32; e as usize];
            let mut m = n;
            for i in (0..e as usize).rev() {
                digits[i] = (m % p as u64) as u32;
                m /= p as u64;
            }
            let mut cand: Vec<u32> = digits;
            cand.push(1); // monic of degree e
            if polycore::is_irreducible(&ctx, &cand) {
                return cand;
            }
        }
        unreachable!("an irreducible of degree {e} over F_{p} exists")
    }

    fn digits(p: u32, e: u32, x: u32) -> Vec<u32> {
        let mut d = vec![0u32; e as usize];
        let mut m = x;
        for slot in d.iter_mut() {
            *slot = m % p;
            m /= p;
        }
        d
    }

    fn undigits(p: u32, d: &[u32]) -> u32 {
        let mut x = 0u32;
        for &c in d.iter().rev() {
            x = x * p + c;
        }
        x
    }

    fn raw_mul(p: u32, e: u32, modulus: Option<&[u32]>, a: u32, b: u32) -> u32 {
        if e == 1 {
            return ((a as u64 * b as u64) % p as u64) as u32;
        }
        let ctx = Fp(p);
        let f = modulus.unwrap();
        let da = Self::digits(p, e, a);
        let db = Self::digits(p, e, b);
        let mut prod = polycore::mul(&ctx, &da, &db);
        let (_, r) = polycore::divrem(&ctx, &prod, f);
        prod = r;
        prod.resize(e as usize, 0);
        Self::undigits(p, &prod)
    }

    fn build_tables(p: u32, e: u32, q: u32, modulus: Option<&[u32]>) -> (u32, Vec<u32>, Vec<u32>) {
        let order = (q - 1) as u64;
        let factors = prime_factors_u64(order);
        let pow = |mut base: u32, mut n: u64| -> u32 {
            let mut acc = 1u32;
            while n > 0 {
                if n & 1 == 1 {
                    acc = Self::raw_mul(p, e, modulus, acc, base);
                }
                base = Self::raw_mul(p, e, modulus, base, base);
                n >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| pow(g, order / r) != 1))
            .expect("F_q* is cyclic");

        let mut exp = vec![0u32; 2 * (q as usize - 1)];
        let mut log = vec![u32::MAX; q as usize];
        let mut acc = 1u32;
        for (i, slot) in exp.iter_mut().enumerate().take(q as usize - 1) {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = Self::raw_mul(p, e, modulus, acc, generator);
        }
        for i in (q as usize - 1)..2 * (q as usize - 1) {
            exp[i] = exp[i - (q as usize - 1)];
        }
        (generator, exp, log)
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    pub fn elem(&self, v: u32) -> FqElem {
        assert!(v < self.q, "encoding {v} out of range for F_{}", self.q);
        FqElem(v)
    }

    /// Residue of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        let r = n.rem_euclid(self.p as i64) as u32;
        FqElem(r)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    /// The image of the power-basis root w (only for e > 1).
    pub fn gen_w(&self) -> FqElem {
        assert!(self.e > 1);
        FqElem(self.p)
    }

    pub fn multiplicative_generator(&self) -> FqElem {
        FqElem(self.generator)
    }

    pub fn pow(&self, a: FqElem, n: u64) -> FqElem {
        self.pow_u64(&a, n)
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> FqElem {
        let bi = self.inv(&b).expect("division by zero in F_q");
        self.mul(&a, &bi)
    }

    /// Digit coordinates of x over F_p, little-endian, length e.
    pub fn coords(&self, x: FqElem) -> Vec<u32> {
        Self::digits(self.p, self.e, x.0)
    }

    pub fn from_coords(&self, d: &[u32]) -> FqElem {
        assert!(d.len() <= self.e as usize && d.iter().all(|&c| c < self.p));
        let mut full = d.to_vec();
        full.resize(self.e as usize, 0);
        FqElem(Self::undigits(self.p, &full))
    }

    /// Render an element: residues for prime fields, w-expressions otherwise.
    pub fn fmt_elem(&self, x: FqElem) -> String {
        if self.e == 1 {
            return x.0.to_string();
        }
        if x.0 == 0 {
            return "0".into();
        }
        let d = self.coords(x);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let s = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "w".into(),
                (1, c) => format!("{c}*w"),
                (i, 1) => format!("w^{i}"),
                (i, c) => format!("{c}*w^{i}"),
            };
            parts.push(s);
        }
        parts.join("+")
    }
}

impl FieldCtx for Fq {
    type El = FqElem;

    fn zero(&self) -> FqElem {
        FqElem(0)
    }
    fn one(&self) -> FqElem {
        FqElem(1)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.0 == 0
    }

    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        if self.e == 1 {
            return FqElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, p) = (a.0, b.0, self.p);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FqElem(out)
    }

    fn neg(&self, a: &FqElem) -> FqElem {
        if self.p == 2 {
            return *a;
        }
        if self.e == 1 {
            return FqElem((self.p - a.0) % self.p);
        }
        let (mut x, p) = (a.0, self.p);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FqElem(out)
    }

    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem(0);
        }
        let i = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FqElem(self.exp[i])
    }

    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        let l = self.log[a.0 as usize];
        Some(FqElem(self.exp[(self.q - 1 - l) as usize]))
    }

    fn size_big(&self) -> BigUint {
        BigUint::from(self.q)
    }
}
