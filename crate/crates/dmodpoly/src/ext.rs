//! Extension fields of F_q.
//!
//! Two layers: [`ExtField`] is an absolute extension F_{q^m} with a canonical
//! defining modulus and a hard size cap (these are the fields exposed on the
//! public surface), while [`SplitExt`] is a relative extension of an ExtField
//! used internally for torsion computations. Relative extensions keep the
//! residue field as their coefficient ring, so lifting constants into them is
//! free and no root finding in large fields is ever needed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::linalg;
use crate::polycore::{self, FieldCtx};

/// Size cap for absolutely represented extension fields.
pub const EXT_SIZE_CAP: u64 = 1 << 20;
/// Cap on the F_q-dimension of internal relative extensions.
pub const SPLIT_DIM_CAP: usize = 512;

/// Element of an [`ExtField`]; coordinate vector of fixed length m over F_q.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtElem(pub Vec<FqElem>);

impl PartialOrd for ExtElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of elements as base-q integers (most significant coordinate last).
impl Ord for ExtElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

pub struct ExtField {
    pub base: Arc<Fq>,
    pub m: usize,
    /// Monic defining modulus over F_q, little-endian, length m + 1.
    pub modulus: Vec<FqElem>,
    /// red[i] = x^(m+i) reduced mod the modulus, as a length-m vector.
    red: Vec<Vec<FqElem>>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        *self.base == *other.base && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for ExtField {}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField(q={}, m={})", self.base.q, self.m)
    }
}

fn reduction_rows<F: FieldCtx>(f: &F, modulus: &[F::El], m: usize) -> Vec<Vec<F::El>> {
    // first row: x^m = -(low part of modulus)
    let mut rows: Vec<Vec<F::El>> = Vec::with_capacity(m.max(1));
    let mut cur: Vec<F::El> = modulus[..m].iter().map(|c| f.neg(c)).collect();
    rows.push(cur.clone());
    for _ in 1..m {
        // multiply by x and fold the overflow through row 0
        let top = cur[m - 1].clone();
        let mut next = Vec::with_capacity(m);
        next.push(f.zero());
        next.extend_from_slice(&cur[..m - 1]);
        for (slot, r0) in next.iter_mut().zip(rows[0].iter()) {
            *slot = f.add(slot, &f.mul(&top, r0));
        }
        cur = next;
        rows.push(cur.clone());
    }
    rows
}

fn size_checked(q: u64, m: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(q)?;
        if acc > EXT_SIZE_CAP {
            return None;
        }
    }
    Some(acc)
}

impl ExtField {
    /// Validated constructor; the modulus must be monic irreducible of degree m.
    pub fn new(base: Arc<Fq>, modulus: Vec<FqElem>) -> Result<Arc<ExtField>> {
        let fq = &*base;
        let d = polycore::deg(fq, &modulus).ok_or(Error::ZeroPolynomial)?;
        if d == 0 {
            return Err(Error::UnsupportedField("modulus must have degree >= 1".into()));
        }
        if modulus[d] != fq.one() {
            return Err(Error::NotMonic("extension modulus".into()));
        }
        if size_checked(base.q as u64, d).is_none() {
            return Err(Error::SizeCapExceeded(format!(
                "extension field size {}^{} exceeds 2^20",
                base.q, d
            )));
        }
        if !polycore::is_irreducible(fq, &modulus) {
            return Err(Error::UnsupportedField("extension modulus is reducible".into()));
        }
        let mut modulus = modulus;
        modulus.truncate(d + 1);
        let red = reduction_rows(fq, &modulus, d);
        Ok(Arc::new(ExtField { base, m: d, modulus, red }))
    }

    /// The canonical F_{q^m}: first monic irreducible of degree m in
    /// coefficient-vector order (constant coefficient most significant).
    pub fn canonical(base: Arc<Fq>, m: usize) -> Result<Arc<ExtField>> {
        let q = base.q as u64;
        let total = size_checked(q, m).ok_or_else(|| {
            Error::SizeCapExceeded(format!("extension field size {}^{m} exceeds 2^20", base.q))
        })?;
        let fq = &*base;
        for n in 0..total {
            let mut cand = vec![fq.zero(); m + 1];
            let mut v = n;
            for i in (0..m).rev() {
                cand[i] = FqElem((v % q) as u32);
                v /= q;
            }
            cand[m] = fq.one();
            if polycore::is_irreducible(fq, &cand) {
                let red = reduction_rows(fq, &cand, m);
                return Ok(Arc::new(ExtField { base, m, modulus: cand, red }));
            }
        }
        unreachable!("irreducibles of every degree exist")
    }

    pub fn size(&self) -> u64 {
        (self.base.q as u64).pow(self.m as u32)
    }

    pub fn const_from(&self, c: FqElem) -> ExtElem {
        let mut v = vec![self.base.zero(); self.m];
        v[0] = c;
        ExtElem(v)
    }

    pub fn from_int(&self, n: i64) -> ExtElem {
        self.const_from(self.base.from_int(n))
    }

    /// Image of x mod the modulus (for m = 1 this is a constant).
    pub fn gen(&self) -> ExtElem {
        if self.m == 1 {
            self.const_from(self.base.neg(&self.modulus[0]))
        } else {
            let mut v = vec![self.base.zero(); self.m];
            v[1] = self.base.one();
            ExtElem(v)
        }
    }

    pub fn from_coeffs(&self, mut v: Vec<FqElem>) -> ExtElem {
        assert!(v.len() <= self.m, "coefficient vector longer than the degree");
        v.resize(self.m, self.base.zero());
        ExtElem(v)
    }

    /// Element number idx in base-q counting order.
    pub fn from_index(&self, idx: u64) -> ExtElem {
        let q = self.base.q as u64;
        let mut v = Vec::with_capacity(self.m);
        let mut n = idx;
        for _ in 0..self.m {
            v.push(FqElem((n % q) as u32));
            n /= q;
        }
        assert!(n == 0, "index out of range");
        ExtElem(v)
    }

    pub fn index_of(&self, x: &ExtElem) -> u64 {
        let q = self.base.q as u64;
        let mut n = 0u64;
        for c in x.0.iter().rev() {
            n = n * q + c.0 as u64;
        }
        n
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        (0..self.size()).map(|i| self.from_index(i))
    }

    pub fn scale_base(&self, x: &ExtElem, c: FqElem) -> ExtElem {
        ExtElem(x.0.iter().map(|a| self.base.mul(a, &c)).collect())
    }

    /// Printable form matching the parse grammar: generator 'w' over a prime
    /// base, 'v' when the base is itself an extension.
    pub fn render(&self, x: &ExtElem) -> String {
        let var = if self.base.e == 1 { "w" } else { "v" };
        let mut parts = Vec::new();
        for (i, &c) in x.0.iter().enumerate().rev() {
            if self.base.is_zero(&c) {
                continue;
            }
            let cs = self.base.fmt_elem(c);
            let cs = if cs.contains('+') || cs.contains('*') {
                format!("({cs})")
            } else {
                cs
            };
            let part = match (i, cs.as_str()) {
                (0, _) => cs.clone(),
                (1, "1") => var.to_string(),
                (1, _) => format!("{cs}*{var}"),
                (_, "1") => format!("{var}^{i}"),
                (_, _) => format!("{cs}*{var}^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    pub fn is_constant(&self, x: &ExtElem) -> bool {
        x.0[1..].iter().all(|c| self.base.is_zero(c))
    }

    pub fn to_base(&self, x: &ExtElem) -> Option<FqElem> {
        if self.is_constant(x) {
            Some(x.0[0])
        } else {
            None
        }
    }

    pub fn frobenius(&self, x: &ExtElem) -> ExtElem {
        self.pow_u64(x, self.base.q as u64)
    }

    /// Multiply two raw coordinate vectors and reduce through the table rows.
    fn mul_red(&self, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
        let fq = &*self.base;
        let m = self.m;
        let conv = polycore::mul(fq, a, b);
        let mut out = vec![fq.zero(); m];
        for (i, c) in conv.iter().enumerate() {
            if fq.is_zero(c) {
                continue;
            }
            if i < m {
                out[i] = fq.add(&out[i], c);
            } else {
                for (slot, r) in out.iter_mut().zip(self.red[i - m].iter()) {
                    *slot = fq.add(slot, &fq.mul(c, r));
                }
            }
        }
        out
    }

    /// Render as a polynomial in the generator: w over a prime base, v above
    /// a composite base (whose own elements keep the letter w).
    pub fn fmt_elem(&self, x: &ExtElem) -> String {
        let var = if self.base.e == 1 { "w" } else { "v" };
        if self.m == 1 {
            return self.base.fmt_elem(x.0[0]);
        }
        if x.0.iter().all(|c| self.base.is_zero(c)) {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in x.0.iter().enumerate().rev() {
            if self.base.is_zero(&c) {
                continue;
            }
            let cs = self.base.fmt_elem(c);
            let cs = if cs.contains('+') || cs.contains('*') { format!("({cs})") } else { cs };
            let s = match (i, cs.as_str()) {
                (0, _) => cs,
                (1, "1") => var.to_string(),
                (1, _) => format!("{cs}*{var}"),
                (i, "1") => format!("{var}^{i}"),
                (i, _) => format!("{cs}*{var}^{i}"),
            };
            parts.push(s);
        }
        parts.join("+")
    }

    /// All roots in this field of a nonzero polynomial over this field,
    /// with multiplicity, in element order. Exhaustive scan; the field size
    /// cap keeps this affordable.
    pub fn find_roots(&self, poly: &[ExtElem]) -> Result<Vec<(ExtElem, usize)>> {
        if polycore::is_zero_poly(self, poly) {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        let mut cur: Vec<ExtElem> = poly.to_vec();
        polycore::trim(self, &mut cur);
        for i in 0..self.size() {
            if polycore::deg(self, &cur).unwrap_or(0) == 0 {
                break;
            }
            let e = self.from_index(i);
            let mut mult = 0usize;
            loop {
                if !self.is_zero(&polycore::eval(self, &cur, &e)) {
                    break;
                }
                let lin = vec![self.neg(&e), self.one()];
                let (quo, rem) = polycore::divrem(self, &cur, &lin);
                assert!(rem.is_empty());
                cur = quo;
                mult += 1;
            }
            if mult > 0 {
                out.push((e, mult));
            }
        }
        Ok(out)
    }
}

impl FieldCtx for ExtField {
    type El = ExtElem;

    fn zero(&self) -> ExtElem {
        ExtElem(vec![self.base.zero(); self.m])
    }
    fn one(&self) -> ExtElem {
        self.const_from(self.base.one())
    }
    fn is_zero(&self, a: &ExtElem) -> bool {
        a.0.iter().all(|c| self.base.is_zero(c))
    }
    fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().zip(b.0.iter()).map(|(x, y)| self.base.add(x, y)).collect())
    }
    fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().zip(b.0.iter()).map(|(x, y)| self.base.sub(x, y)).collect())
    }
    fn neg(&self, a: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().map(|x| self.base.neg(x)).collect())
    }
    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(self.mul_red(&a.0, &b.0))
    }
    fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            return None;
        }
        let fq = &*self.base;
        let mut av = a.0.clone();
        polycore::trim(fq, &mut av);
        let (g, s, _) = polycore::xgcd(fq, &av, &self.modulus);
        debug_assert_eq!(polycore::deg(fq, &g), Some(0));
        let gi = fq.inv(&g[0]).unwrap();
        let mut v = polycore::scale(fq, &s, &gi);
        v.resize(self.m, fq.zero());
        Some(ExtElem(v))
    }
    fn size_big(&self) -> BigUint {
        BigUint::from(self.base.q).pow(self.m as u32)
    }
}

/// A compatible system of canonical extensions of one base field.
///
/// Embeddings between tower levels are built only along chains of prime-degree
/// steps taken in ascending order, each step determined by the fixed root
/// search schedule, so composing partial embeddings always agrees with the
/// directly built one.
pub struct Tower {
    pub base: Arc<Fq>,
    fields: Mutex<BTreeMap<usize, Arc<ExtField>>>,
    steps: Mutex<BTreeMap<(usize, usize), Arc<Vec<ExtElem>>>>,
}

/// An embedding between tower levels, stored as the chain of power tables of
/// the prime-degree steps it is composed of.
pub struct Embedding {
    pub src_m: usize,
    pub dst_m: usize,
    chain: Vec<(Arc<ExtField>, Arc<Vec<ExtElem>>)>,
}

impl Embedding {
    pub fn apply(&self, x: &ExtElem) -> ExtElem {
        let mut cur = x.clone();
        for (dst, powers) in &self.chain {
            let mut acc = dst.zero();
            for (i, c) in cur.0.iter().enumerate() {
                if !dst.base.is_zero(c) {
                    acc = dst.add(&acc, &dst.scale_base(&powers[i], *c));
                }
            }
            cur = acc;
        }
        cur
    }
}

impl Tower {
    pub fn new(base: Arc<Fq>) -> Tower {
        Tower { base, fields: Mutex::new(BTreeMap::new()), steps: Mutex::new(BTreeMap::new()) }
    }

    pub fn field(&self, m: usize) -> Result<Arc<ExtField>> {
        assert!(m >= 1);
        let mut map = self.fields.lock().unwrap();
        if let Some(f) = map.get(&m) {
            return Ok(f.clone());
        }
        let f = ExtField::canonical(self.base.clone(), m)?;
        map.insert(m, f.clone());
        Ok(f)
    }

    /// Power table of the one-step embedding src -> dst (dst_m/src_m prime):
    /// powers[i] is the image of w_src^i.
    fn step(&self, src_m: usize, dst_m: usize) -> Result<Arc<Vec<ExtElem>>> {
        if let Some(t) = self.steps.lock().unwrap().get(&(src_m, dst_m)) {
            return Ok(t.clone());
        }
        let src = self.field(src_m)?;
        let dst = self.field(dst_m)?;
        // lift the source modulus to dst as constants and take a root there
        let lifted: Vec<ExtElem> = src.modulus.iter().map(|c| dst.const_from(*c)).collect();
        let char_two = dst.base.p == 2;
        let abs_dim = dst.base.e * dst.m as u32;
        let dstc = dst.clone();
        let alpha =
            polycore::one_root(&*dst, &lifted, char_two, abs_dim, &|i| dstc.from_index(i % dstc.size()));
        debug_assert!(dst.is_zero(&polycore::eval(&*dst, &lifted, &alpha)));
        let mut powers = Vec::with_capacity(src_m);
        let mut cur = dst.one();
        for _ in 0..src_m {
            powers.push(cur.clone());
            cur = dst.mul(&cur, &alpha);
        }
        let t = Arc::new(powers);
        self.steps.lock().unwrap().insert((src_m, dst_m), t.clone());
        Ok(t)
    }

    pub fn embedding(&self, src_m: usize, dst_m: usize) -> Result<Embedding> {
        if dst_m % src_m != 0 {
            return Err(Error::PreconditionViolated(format!(
                "no embedding: {src_m} does not divide {dst_m}"
            )));
        }
        let mut chain = Vec::new();
        let mut cur = src_m;
        for p in crate::fq::prime_factors_u64((dst_m / src_m) as u64) {
            let mut left = (dst_m / src_m) as u64;
            let mut mult = 0;
            while left % p == 0 {
                left /= p;
                mult += 1;
            }
            for _ in 0..mult {
                let next = cur * p as usize;
                let table = self.step(cur, next)?;
                chain.push((self.field(next)?, table));
                cur = next;
            }
        }
        Ok(Embedding { src_m, dst_m, chain })
    }

    /// Inverse image under embedding(src_m, dst_m), if x lies in the image.
    pub fn pullback(&self, emb: &Embedding, x: &ExtElem) -> Result<Option<ExtElem>> {
        let src = self.field(emb.src_m)?;
        let dst = self.field(emb.dst_m)?;
        let fq = &*self.base;
        // columns: coordinates of the images of the source power basis
        let mut cols = Vec::with_capacity(src.m);
        let mut basis = src.one();
        let w = src.gen();
        for _ in 0..src.m {
            cols.push(emb.apply(&basis).0.clone());
            basis = src.mul(&basis, &w);
        }
        Ok(linalg::solve_columns(fq, &cols, &x.0, dst.m).map(|v| src.from_coeffs(v)))
    }
}

/// Element of a [`SplitExt`]; coordinate vector of fixed length k over the base.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SplitElem(pub Vec<ExtElem>);

impl PartialOrd for SplitElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SplitElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

/// Relative extension of an [`ExtField`], used as a splitting field for
/// torsion points. Constants of the base embed coordinatewise, so modules
/// defined over the base lift without any computation.
pub struct SplitExt {
    pub base: Arc<ExtField>,
    pub k: usize,
    pub modulus: Vec<ExtElem>,
    red: Vec<Vec<ExtElem>>,
}

impl PartialEq for SplitExt {
    fn eq(&self, other: &Self) -> bool {
        *self.base == *other.base && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for SplitExt {}

impl fmt::Debug for SplitExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SplitExt(q={}, m={}, k={})", self.base.base.q, self.base.m, self.k)
    }
}

impl SplitExt {
    /// First monic irreducible of degree k over the base, in coefficient-vector
    /// order with the constant coefficient most significant.
    pub fn canonical(base: Arc<ExtField>, k: usize) -> Result<Arc<SplitExt>> {
        assert!(k >= 1);
        let dim = k * base.m * base.base.e as usize;
        if dim > SPLIT_DIM_CAP {
            return Err(Error::SizeCapExceeded(format!(
                "splitting extension dimension {dim} exceeds {SPLIT_DIM_CAP}"
            )));
        }
        let size = base.size() as u128;
        let mut n: u128 = 0;
        loop {
            let mut cand = vec![base.zero(); k + 1];
            let mut v = n;
            for i in (0..k).rev() {
                cand[i] = base.from_index((v % size) as u64);
                v /= size;
            }
            if v > 0 {
                return Err(Error::IterationCapExceeded(
                    "no irreducible found for the splitting extension".into(),
                ));
            }
            cand[k] = base.one();
            if polycore::is_irreducible(&*base, &cand) {
                let red = reduction_rows(&*base, &cand, k);
                return Ok(Arc::new(SplitExt { base, k, modulus: cand, red }));
            }
            n += 1;
        }
    }

    /// Size of the base coefficient field F_q (not of the residue base).
    pub fn q(&self) -> u64 {
        self.base.base.q as u64
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.base.base
    }

    /// Printable form with 'u' for the splitting generator; base-field
    /// coordinates use their own generator letter.
    pub fn render(&self, x: &SplitElem) -> String {
        let mut parts = Vec::new();
        for (i, c) in x.0.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.render(c);
            let cs = if cs.contains('+') || cs.contains('*') {
                format!("({cs})")
            } else {
                cs
            };
            let part = match (i, cs.as_str()) {
                (0, _) => cs.clone(),
                (1, "1") => "u".to_string(),
                (1, _) => format!("{cs}*u"),
                (_, "1") => format!("u^{i}"),
                (_, _) => format!("{cs}*u^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Dimension over F_q.
    pub fn fq_dim(&self) -> usize {
        self.k * self.base.m
    }

    pub fn fq_coords(&self, x: &SplitElem) -> Vec<FqElem> {
        let mut out = Vec::with_capacity(self.fq_dim());
        for c in &x.0 {
            out.extend_from_slice(&c.0);
        }
        out
    }

    pub fn from_fq_coords(&self, v: &[FqElem]) -> SplitElem {
        assert_eq!(v.len(), self.fq_dim());
        let m = self.base.m;
        SplitElem((0..self.k).map(|i| ExtElem(v[i * m..(i + 1) * m].to_vec())).collect())
    }

    pub fn const_from(&self, c: &ExtElem) -> SplitElem {
        let mut v = vec![self.base.zero(); self.k];
        v[0] = c.clone();
        SplitElem(v)
    }

    pub fn to_const(&self, x: &SplitElem) -> Option<ExtElem> {
        if x.0[1..].iter().all(|c| self.base.is_zero(c)) {
            Some(x.0[0].clone())
        } else {
            None
        }
    }

    /// q-power Frobenius over F_q.
    pub fn frob(&self, x: &SplitElem) -> SplitElem {
        self.pow_u64(x, self.q())
    }

    fn mul_red(&self, a: &[ExtElem], b: &[ExtElem]) -> Vec<ExtElem> {
        let bf = &*self.base;
        let k = self.k;
        let conv = polycore::mul(bf, a, b);
        let mut out = vec![bf.zero(); k];
        for (i, c) in conv.iter().enumerate() {
            if bf.is_zero(c) {
                continue;
            }
            if i < k {
                out[i] = bf.add(&out[i], c);
            } else {
                for (slot, r) in out.iter_mut().zip(self.red[i - k].iter()) {
                    *slot = bf.add(slot, &bf.mul(c, r));
                }
            }
        }
        out
    }
}

impl FieldCtx for SplitExt {
    type El = SplitElem;

    fn zero(&self) -> SplitElem {
        SplitElem(vec![self.base.zero(); self.k])
    }
    fn one(&self) -> SplitElem {
        self.const_from(&self.base.one())
    }
    fn is_zero(&self, a: &SplitElem) -> bool {
        a.0.iter().all(|c| self.base.is_zero(c))
    }
    fn add(&self, a: &SplitElem, b: &SplitElem) -> SplitElem {
        SplitElem(a.0.iter().zip(b.0.iter()).map(|(x, y)| self.base.add(x, y)).collect())
    }
    fn sub(&self, a: &SplitElem, b: &SplitElem) -> SplitElem {
        SplitElem(a.0.iter().zip(b.0.iter()).map(|(x, y)| self.base.sub(x, y)).collect())
    }
    fn neg(&self, a: &SplitElem) -> SplitElem {
        SplitElem(a.0.iter().map(|x| self.base.neg(x)).collect())
    }
    fn mul(&self, a: &SplitElem, b: &SplitElem) -> SplitElem {
        SplitElem(self.mul_red(&a.0, &b.0))
    }
    fn inv(&self, a: &SplitElem) -> Option<SplitElem> {
        if self.is_zero(a) {
            return None;
        }
        let bf = &*self.base;
        let mut av = a.0.clone();
        polycore::trim(bf, &mut av);
        let (g, s, _) = polycore::xgcd(bf, &av, &self.modulus);
        debug_assert_eq!(polycore::deg(bf, &g), Some(0));
        let gi = bf.inv(&g[0]).unwrap();
        let mut v = polycore::scale(bf, &s, &gi);
        v.resize(self.k, bf.zero());
        Some(SplitElem(v))
    }
    fn size_big(&self) -> BigUint {
        self.base.size_big().pow(self.k as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }

    #[test]
    fn canonical_moduli_are_least() {
        let f4 = ExtField::canonical(f2(), 2).unwrap();
        assert_eq!(f4.modulus, vec![FqElem(1), FqElem(1), FqElem(1)]);
        let f16 = ExtField::canonical(f2(), 4).unwrap();
        // scanning in coefficient order the first irreducible quartic is x^4+x^3+1
        assert_eq!(f16.modulus, vec![FqElem(1), FqElem(0), FqElem(0), FqElem(1), FqElem(1)]);
        let f3 = Fq::new(3, 1).unwrap();
        let f9 = ExtField::canonical(f3, 2).unwrap();
        assert_eq!(f9.modulus, vec![FqElem(1), FqElem(0), FqElem(1)]);
    }

    #[test]
    fn field_axioms_f16() {
        let f = ExtField::canonical(f2(), 4).unwrap();
        let els: Vec<_> = f.elements().collect();
        for a in &els {
            assert_eq!(f.add(a, &f.neg(a)), f.zero());
            if !f.is_zero(a) {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, &ai), f.one());
            }
        }
        // spot-check associativity and distributivity on a subset
        for a in els.iter().step_by(3) {
            for b in els.iter().step_by(5) {
                for c in els.iter().step_by(7) {
                    assert_eq!(f.mul(a, &f.mul(b, c)), f.mul(&f.mul(a, b), c));
                    assert_eq!(
                        f.mul(a, &f.add(b, c)),
                        f.add(&f.mul(a, b), &f.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_order() {
        let f = ExtField::canonical(f2(), 4).unwrap();
        let w = f.gen();
        let mut x = w.clone();
        for _ in 0..4 {
            x = f.frobenius(&x);
        }
        assert_eq!(x, w);
        assert_ne!(f.frobenius(&f.frobenius(&w)), w);
    }

    #[test]
    fn embeddings_are_homomorphisms_and_compose() {
        let tower = Tower::new(f2());
        let f2e = tower.field(2).unwrap();
        let f4e = tower.field(4).unwrap();
        let emb = tower.embedding(2, 4).unwrap();
        // the image of w_(F_4) satisfies the F_4 modulus inside F_16
        let img = emb.apply(&f2e.gen());
        let lifted: Vec<ExtElem> = f2e.modulus.iter().map(|c| f4e.const_from(*c)).collect();
        assert!(f4e.is_zero(&polycore::eval(&*f4e, &lifted, &img)));
        for a in f2e.elements() {
            for b in f2e.elements() {
                assert_eq!(emb.apply(&f2e.mul(&a, &b)), f4e.mul(&emb.apply(&a), &emb.apply(&b)));
                assert_eq!(emb.apply(&f2e.add(&a, &b)), f4e.add(&emb.apply(&a), &emb.apply(&b)));
            }
        }
        // composition along 1 -> 2 -> 4 equals the direct chain 1 -> 4
        let e14 = tower.embedding(1, 4).unwrap();
        let e12 = tower.embedding(1, 2).unwrap();
        let f1 = tower.field(1).unwrap();
        for a in f1.elements() {
            assert_eq!(e14.apply(&a), emb.apply(&e12.apply(&a)));
        }
        // pullback inverts the embedding on its image
        for a in f2e.elements() {
            let up = emb.apply(&a);
            assert_eq!(tower.pullback(&emb, &up).unwrap(), Some(a));
        }
        // elements outside the image have no pullback
        let outside = f4e.gen();
        assert_eq!(tower.pullback(&emb, &outside).unwrap(), None);
    }

    #[test]
    fn find_roots_with_multiplicity() {
        let f = ExtField::canonical(f2(), 2).unwrap();
        let w = f.gen();
        // (x - w)^2 (x - 1) over F_4
        let lin_w = vec![f.neg(&w), f.one()];
        let lin_1 = vec![f.one(), f.one()];
        let p = polycore::mul(&*f, &polycore::mul(&*f, &lin_w, &lin_w), &lin_1);
        let roots = f.find_roots(&p).unwrap();
        assert_eq!(roots, vec![(f.one(), 1), (w, 2)]);
    }

    #[test]
    fn split_ext_is_a_field_over_its_base() {
        let f4 = ExtField::canonical(f2(), 2).unwrap();
        let e = SplitExt::canonical(f4.clone(), 3).unwrap();
        assert_eq!(e.fq_dim(), 6);
        // constants multiply as in the base
        let w = f4.gen();
        let cw = e.const_from(&w);
        assert_eq!(e.to_const(&e.mul(&cw, &cw)), Some(f4.mul(&w, &w)));
        // x + w mixes both levels, so its frobenius orbit has the full size 6
        let mut g = SplitElem(vec![w.clone(), f4.one(), f4.zero()]);
        let start = g.clone();
        let mut order = 0;
        loop {
            g = e.frob(&g);
            order += 1;
            if g == start {
                break;
            }
            assert!(order < 100);
        }
        assert_eq!(order, 6);
        // inverses
        let x = SplitElem(vec![w.clone(), f4.one(), f4.gen()]);
        let xi = e.inv(&x).unwrap();
        assert_eq!(e.mul(&x, &xi), e.one());
        // coordinate flattening round-trips
        let coords = e.fq_coords(&x);
        assert_eq!(e.from_fq_coords(&coords), x);
    }

    #[test]
    fn split_k1_behaves_like_base() {
        let f4 = ExtField::canonical(f2(), 2).unwrap();
        let e = SplitExt::canonical(f4.clone(), 1).unwrap();
        // modulus x: every element is a constant
        for a in f4.elements() {
            for b in f4.elements() {
                let p = e.mul(&e.const_from(&a), &e.const_from(&b));
                assert_eq!(e.to_const(&p), Some(f4.mul(&a, &b)));
            }
        }
    }
}
