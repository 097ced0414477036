//! Rank-2 Drinfeld modules over finite A-fields: twisted polynomials in the
//! q-power Frobenius, the module structure on torsion, enumeration of cyclic
//! submodules, and isogeny quotients with their j-invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::arith::{enumerate_cn, psi, CNMatrix};
use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField, SplitElem, SplitExt};
use crate::fq::{Fq, FqElem};
use crate::linalg::{kernel_of_columns, solve_columns};
use crate::poly::{polys_below, PolyA};
use crate::polycore::FieldCtx;

/// Field with a designated F_q structure map, so twisted polynomials can be
/// written over it: the twist exponent and the embedding of scalar
/// coefficients.
pub trait FqAlgebra: FieldCtx {
    fn frob_q(&self) -> u64;
    fn from_fq(&self, c: FqElem) -> Self::El;
}

impl FqAlgebra for Fq {
    fn frob_q(&self) -> u64 {
        self.q as u64
    }
    fn from_fq(&self, c: FqElem) -> FqElem {
        c
    }
}

impl FqAlgebra for ExtField {
    fn frob_q(&self) -> u64 {
        self.base.q as u64
    }
    fn from_fq(&self, c: FqElem) -> ExtElem {
        self.const_from(c)
    }
}

impl FqAlgebra for SplitExt {
    fn frob_q(&self) -> u64 {
        self.q()
    }
    fn from_fq(&self, c: FqElem) -> SplitElem {
        self.const_from(&self.base.const_from(c))
    }
}

/// Finite A-field: a realized finite field L together with the image of t,
/// hence a ring morphism A -> L whose kernel is (char_poly).
pub struct AFieldFinite {
    pub field: Arc<ExtField>,
    pub theta: ExtElem,
    pub char_poly: PolyA,
}

impl AFieldFinite {
    pub fn new(field: Arc<ExtField>, theta: ExtElem) -> Result<AFieldFinite> {
        let fq = field.base.clone();
        let m = field.m;
        // minimal polynomial of theta: first linear dependence among its powers
        let mut pows: Vec<ExtElem> = vec![field.one()];
        for _ in 0..m {
            pows.push(field.mul(pows.last().unwrap(), &theta));
        }
        let coords = |x: &ExtElem| -> Vec<FqElem> { x.0.clone() };
        let mut char_poly = None;
        for d in 1..=m {
            let cols: Vec<Vec<FqElem>> = pows[..d].iter().map(&coords).collect();
            if let Some(sol) = solve_columns(&fq, &cols, &coords(&pows[d]), m) {
                let mut c: Vec<FqElem> = sol.iter().map(|s| fq.neg(s)).collect();
                c.push(fq.one());
                char_poly = Some(PolyA::from_coeffs(&fq, c));
                break;
            }
        }
        let char_poly = char_poly.expect("theta satisfies a degree <= m relation");
        assert!(char_poly.is_irreducible());
        Ok(AFieldFinite { field, theta, char_poly })
    }

    /// a(theta), the structure morphism.
    pub fn eval(&self, a: &PolyA) -> ExtElem {
        let f = &*self.field;
        a.eval_in(f, &self.theta, |c| f.from_fq(c))
    }
}

/// Twisted polynomial sum c_i tau^i with tau x = x^q tau.
#[derive(Clone, Debug)]
pub struct SkewPoly<F: FqAlgebra> {
    field: Arc<F>,
    c: Vec<F::El>,
}

impl<F: FqAlgebra> PartialEq for SkewPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}
impl<F: FqAlgebra> Eq for SkewPoly<F> where F::El: PartialEq {}

impl<F: FqAlgebra> SkewPoly<F> {
    pub fn new(field: Arc<F>, mut c: Vec<F::El>) -> SkewPoly<F> {
        while c.last().is_some_and(|x| field.is_zero(x)) {
            c.pop();
        }
        SkewPoly { field, c }
    }

    pub fn zero(field: Arc<F>) -> SkewPoly<F> {
        SkewPoly { field, c: Vec::new() }
    }

    pub fn constant(field: Arc<F>, c: F::El) -> SkewPoly<F> {
        SkewPoly::new(field, vec![c])
    }

    pub fn one(field: Arc<F>) -> SkewPoly<F> {
        let c = field.one();
        SkewPoly::constant(field, c)
    }

    pub fn tau(field: Arc<F>) -> SkewPoly<F> {
        let c = vec![field.zero(), field.one()];
        SkewPoly::new(field, c)
    }

    pub fn field(&self) -> &Arc<F> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in tau; NEG_INF for zero.
    pub fn deg_tau(&self) -> i64 {
        if self.c.is_empty() {
            crate::NEG_INF
        } else {
            (self.c.len() - 1) as i64
        }
    }

    pub fn coeff(&self, i: usize) -> F::El {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn lead(&self) -> Option<&F::El> {
        self.c.last()
    }

    fn frob_iter(&self, x: &F::El, n: usize) -> F::El {
        let f = &*self.field;
        let q = f.frob_q();
        let mut out = x.clone();
        for _ in 0..n {
            out = f.pow_u64(&out, q);
        }
        out
    }

    pub fn add(&self, other: &SkewPoly<F>) -> SkewPoly<F> {
        let f = &*self.field;
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(|| f.zero());
            let b = other.c.get(i).cloned().unwrap_or_else(|| f.zero());
            out.push(f.add(&a, &b));
        }
        SkewPoly::new(self.field.clone(), out)
    }

    pub fn sub(&self, other: &SkewPoly<F>) -> SkewPoly<F> {
        let f = &*self.field;
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(|| f.zero());
            let b = other.c.get(i).cloned().unwrap_or_else(|| f.zero());
            out.push(f.sub(&a, &b));
        }
        SkewPoly::new(self.field.clone(), out)
    }

    /// Product; tau^i c = c^(q^i) tau^i carries the twist.
    pub fn mul(&self, other: &SkewPoly<F>) -> SkewPoly<F> {
        let f = &*self.field;
        if self.is_zero() || other.is_zero() {
            return SkewPoly::zero(self.field.clone());
        }
        // frobs[j] starts at other.c[j] and is raised q-fold per outer row
        let mut frobs: Vec<F::El> = other.c.clone();
        let mut out = vec![f.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if i > 0 {
                let q = f.frob_q();
                for x in frobs.iter_mut() {
                    *x = f.pow_u64(x, q);
                }
            }
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in frobs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        SkewPoly::new(self.field.clone(), out)
    }

    /// a = q b + r with deg_tau r < deg_tau b. Leading coefficients are
    /// units, so the division is exact field arithmetic.
    pub fn right_divmod(&self, b: &SkewPoly<F>) -> Result<(SkewPoly<F>, SkewPoly<F>)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &*self.field;
        let db = b.c.len() - 1;
        let mut r = self.c.clone();
        let mut quot = vec![f.zero(); self.c.len().saturating_sub(db)];
        while r.len() > db {
            if f.is_zero(r.last().unwrap()) {
                r.pop();
                continue;
            }
            let k = r.len() - 1 - db;
            // (x tau^k)(b_db tau^db) has top coefficient x b_db^(q^k)
            let blk = self.frob_iter(&b.c[db], k);
            let x = f.mul(r.last().unwrap(), &f.inv(&blk).expect("unit leading coefficient"));
            quot[k] = f.add(&quot[k], &x);
            for (j, bj) in b.c.iter().enumerate() {
                let t = f.mul(&x, &self.frob_iter(bj, k));
                r[k + j] = f.sub(&r[k + j], &t);
            }
            assert!(f.is_zero(r.last().unwrap()));
            r.pop();
        }
        Ok((
            SkewPoly::new(self.field.clone(), quot),
            SkewPoly::new(self.field.clone(), r),
        ))
    }

    /// Value of the additive map sum c_i x^(q^i) at x.
    pub fn eval(&self, x: &F::El) -> F::El {
        let f = &*self.field;
        let q = f.frob_q();
        let mut acc = f.zero();
        let mut xp = x.clone();
        for (i, c) in self.c.iter().enumerate() {
            if i > 0 {
                xp = f.pow_u64(&xp, q);
            }
            if !f.is_zero(c) {
                acc = f.add(&acc, &f.mul(c, &xp));
            }
        }
        acc
    }
}

impl SkewPoly<ExtField> {
    pub fn lift(&self, ext: &Arc<SplitExt>) -> SkewPoly<SplitExt> {
        assert!(*ext.base == *self.field);
        let c = self.c.iter().map(|x| ext.const_from(x)).collect();
        SkewPoly::new(ext.clone(), c)
    }
}

impl<F: FqAlgebra> fmt::Display for SkewPoly<F>
where
    F::El: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

/// phi_t = theta + g tau + Delta tau^2 with Delta != 0.
#[derive(Clone, Debug)]
pub struct DrinfeldMod2<F: FqAlgebra> {
    pub field: Arc<F>,
    pub theta: F::El,
    pub g: F::El,
    pub delta: F::El,
}

impl<F: FqAlgebra> DrinfeldMod2<F> {
    pub fn new(field: Arc<F>, theta: F::El, g: F::El, delta: F::El) -> Result<DrinfeldMod2<F>> {
        if field.is_zero(&delta) {
            return Err(Error::PreconditionViolated(
                "rank-2 module needs a nonzero top coefficient".into(),
            ));
        }
        Ok(DrinfeldMod2 { field, theta, g, delta })
    }

    pub fn phi_t(&self) -> SkewPoly<F> {
        SkewPoly::new(
            self.field.clone(),
            vec![self.theta.clone(), self.g.clone(), self.delta.clone()],
        )
    }

    /// phi_a for a in A, by Horner in phi_t. deg_tau = 2 deg a.
    pub fn phi_action(&self, a: &PolyA) -> SkewPoly<F> {
        let f = &*self.field;
        let phit = self.phi_t();
        let mut acc = SkewPoly::zero(self.field.clone());
        for co in a.coeffs().iter().rev() {
            acc = acc.mul(&phit);
            if !a.fq().is_zero(co) {
                acc = acc.add(&SkewPoly::constant(self.field.clone(), f.from_fq(*co)));
            }
        }
        if !a.is_zero() {
            assert_eq!(acc.deg_tau(), 2 * a.deg());
        }
        acc
    }

    pub fn j_invariant(&self) -> F::El {
        let f = &*self.field;
        let q = f.frob_q();
        let gq1 = f.mul(&f.pow_u64(&self.g, q), &self.g);
        f.mul(&gq1, &f.inv(&self.delta).expect("nonzero discriminant"))
    }

    /// Isomorphic twist (g, Delta) -> (c^(q-1) g, c^(q^2-1) Delta), c != 0.
    pub fn twist(&self, c: &F::El) -> Result<DrinfeldMod2<F>> {
        let f = &*self.field;
        let q = f.frob_q();
        let cinv = f.inv(c).ok_or(Error::DivisionByZero)?;
        let cq1 = f.mul(&f.pow_u64(c, q), &cinv);
        let cq21 = f.mul(&f.pow_u64(c, q * q), &cinv);
        DrinfeldMod2::new(
            self.field.clone(),
            self.theta.clone(),
            f.mul(&cq1, &self.g),
            f.mul(&cq21, &self.delta),
        )
    }
}

impl DrinfeldMod2<ExtField> {
    pub fn lift(&self, ext: &Arc<SplitExt>) -> DrinfeldMod2<SplitExt> {
        assert!(*ext.base == *self.field);
        DrinfeldMod2 {
            field: ext.clone(),
            theta: ext.const_from(&self.theta),
            g: ext.const_from(&self.g),
            delta: ext.const_from(&self.delta),
        }
    }
}

/// The module with j-invariant j0: (g, Delta) = (1, 1/j0), or (0, 1) at j0 = 0.
pub fn module_from_j<F: FqAlgebra>(field: &Arc<F>, theta: &F::El, j0: &F::El) -> DrinfeldMod2<F> {
    let f = &**field;
    let (g, delta) = if f.is_zero(j0) {
        (f.zero(), f.one())
    } else {
        (f.one(), f.inv(j0).expect("nonzero j"))
    };
    DrinfeldMod2::new(field.clone(), theta.clone(), g, delta).unwrap()
}

/// Full N-torsion realized in one splitting extension: a basis (x, y) of
/// phi[N] = (A/N)^2 plus the sorted point list.
pub struct TorsionModule {
    pub ext: Arc<SplitExt>,
    pub x: SplitElem,
    pub y: SplitElem,
    pub points: Vec<SplitElem>,
    pub n: PolyA,
}

const SPLIT_DEG_CAP: usize = 64;

/// The roots of the additive polynomial as an F_q-kernel: columns are the
/// images of an F_q-basis of the field.
fn additive_kernel(ext: &Arc<SplitExt>, u: &SkewPoly<SplitExt>) -> Vec<Vec<FqElem>> {
    let fq = ext.fq().clone();
    let dim = ext.fq_dim();
    let mut cols = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut e = vec![fq.zero(); dim];
        e[i] = fq.one();
        let img = u.eval(&ext.from_fq_coords(&e));
        cols.push(ext.fq_coords(&img));
    }
    kernel_of_columns(&fq, &cols, dim)
}

fn span_points(ext: &Arc<SplitExt>, basis: &[Vec<FqElem>]) -> Vec<SplitElem> {
    let fq = ext.fq().clone();
    let scalars: Vec<FqElem> = fq.elements().collect();
    let q = scalars.len();
    let dim = ext.fq_dim();
    let mut out = Vec::with_capacity(q.pow(basis.len() as u32));
    for idx in 0..q.pow(basis.len() as u32) {
        let mut v = vec![fq.zero(); dim];
        let mut rem = idx;
        for b in basis {
            let s = scalars[rem % q];
            rem /= q;
            if !fq.is_zero(&s) {
                for (slot, coord) in v.iter_mut().zip(b.iter()) {
                    *slot = fq.add(slot, &fq.mul(&s, coord));
                }
            }
        }
        out.push(ext.from_fq_coords(&v));
    }
    out.sort();
    out
}

/// phi_(n/P) for each prime P | n; a point has exact order n iff none of
/// these kills it.
fn cofactor_maps(
    phi: &DrinfeldMod2<ExtField>,
    ext: &Arc<SplitExt>,
    n: &PolyA,
) -> Result<Vec<SkewPoly<SplitExt>>> {
    let mut out = Vec::new();
    for (p, _) in n.factor_monic()? {
        let (cof, rem) = n.divrem(&p)?;
        assert!(rem.is_zero());
        out.push(phi.phi_action(&cof).lift(ext));
    }
    Ok(out)
}

pub fn torsion_basis(
    af: &AFieldFinite,
    phi: &DrinfeldMod2<ExtField>,
    n: &PolyA,
) -> Result<TorsionModule> {
    assert!(*af.field == *phi.field, "module must live over the given A-field");
    if !n.is_monic() {
        return Err(Error::NotMonic(format!("{n}")));
    }
    if n.is_one() {
        let ext = SplitExt::canonical(af.field.clone(), 1)?;
        let zero = ext.zero();
        return Ok(TorsionModule {
            ext,
            x: zero.clone(),
            y: zero.clone(),
            points: vec![zero],
            n: n.clone(),
        });
    }
    if !af.char_poly.coprime(n) {
        return Err(Error::TorsionNotEtale(format!(
            "the characteristic {} divides {n}",
            af.char_poly
        )));
    }
    let dn = n.deg() as usize;
    let fq = af.field.base.clone();
    let phin = phi.phi_action(n);
    assert!(!af.field.is_zero(&phin.coeff(0)), "kernel polynomial is separable");

    for k in 1..=SPLIT_DEG_CAP {
        let ext = SplitExt::canonical(af.field.clone(), k)?;
        let kernel = additive_kernel(&ext, &phin.lift(&ext));
        assert!(kernel.len() <= 2 * dn);
        if kernel.len() < 2 * dn {
            continue;
        }
        let points = span_points(&ext, &kernel);
        let cofs = cofactor_maps(phi, &ext, n)?;
        let exact = |p: &SplitElem| cofs.iter().all(|c| !ext.is_zero(&c.eval(p)));
        let y = points
            .iter()
            .find(|p| exact(p))
            .expect("a free module has exact-order points")
            .clone();

        // residues mod n index both coordinates of the module
        let residues = polys_below(&fq, dn);
        let maps: Vec<SkewPoly<SplitExt>> =
            residues.iter().map(|a| phi.phi_action(a).lift(&ext)).collect();
        let ay: Vec<SplitElem> = maps.iter().map(|m| m.eval(&y)).collect();
        let full = points.len();
        let x = points
            .iter()
            .find(|cand| {
                let ax: Vec<SplitElem> = maps.iter().map(|m| m.eval(cand)).collect();
                let mut span = BTreeSet::new();
                for a in &ax {
                    for b in &ay {
                        span.insert(ext.add(a, b));
                    }
                }
                span.len() == full
            })
            .expect("basis completion exists")
            .clone();
        return Ok(TorsionModule { ext, x, y, points, n: n.clone() });
    }
    Err(Error::SizeCapExceeded(format!(
        "torsion of {n} did not split within relative degree {SPLIT_DEG_CAP}"
    )))
}

/// Rank-1 free A/N-submodule of the torsion: its point set, a point of exact
/// order N, and the frame (a, b, d) that produced it.
pub struct CyclicSubmodule {
    pub ext: Arc<SplitExt>,
    pub points: Vec<SplitElem>,
    pub generator: SplitElem,
    pub frame: CNMatrix,
}

pub fn cyclic_submodules(
    af: &AFieldFinite,
    phi: &DrinfeldMod2<ExtField>,
    n: &PolyA,
) -> Result<Vec<CyclicSubmodule>> {
    let tor = torsion_basis(af, phi, n)?;
    let ext = tor.ext.clone();
    if n.is_one() {
        return Ok(vec![CyclicSubmodule {
            ext: ext.clone(),
            points: vec![ext.zero()],
            generator: ext.zero(),
            frame: enumerate_cn(n)?.pop().expect("one frame at level one"),
        }]);
    }
    let fq = af.field.base.clone();
    let dn = n.deg() as usize;
    let residues = polys_below(&fq, dn);
    let maps: Vec<SkewPoly<SplitExt>> =
        residues.iter().map(|a| phi.phi_action(a).lift(&ext)).collect();
    let cofs = cofactor_maps(phi, &ext, n)?;
    let exact = |p: &SplitElem| cofs.iter().all(|c| !ext.is_zero(&c.eval(p)));
    let phit = phi.phi_t().lift(&ext);

    let mut out: Vec<CyclicSubmodule> = Vec::new();
    for frame in enumerate_cn(n)? {
        let g1 = ext.add(
            &phi.phi_action(&frame.a).lift(&ext).eval(&tor.x),
            &phi.phi_action(&frame.b).lift(&ext).eval(&tor.y),
        );
        let g2 = phi.phi_action(&frame.d).lift(&ext).eval(&tor.y);
        let e1: Vec<SplitElem> = maps.iter().map(|m| m.eval(&g1)).collect();
        let e2: Vec<SplitElem> = maps.iter().map(|m| m.eval(&g2)).collect();
        let mut set = BTreeSet::new();
        for a in &e1 {
            for b in &e2 {
                set.insert(ext.add(a, b));
            }
        }
        let points: Vec<SplitElem> = set.into_iter().collect();
        assert_eq!(points.len(), residues.len(), "submodule is free of rank one");
        for p in &points {
            let image = phit.eval(p);
            assert!(points.binary_search(&image).is_ok(), "submodule is phi-stable");
        }
        let generator = points
            .iter()
            .find(|p| exact(p))
            .expect("cyclic submodule has a generator")
            .clone();
        out.push(CyclicSubmodule { ext: ext.clone(), points, generator, frame });
    }
    for i in 0..out.len() {
        for j in (i + 1)..out.len() {
            assert_ne!(out[i].points, out[j].points, "submodules must be distinct");
        }
    }
    let count = BigInt::from(out.len());
    assert_eq!(count, psi(n)?, "submodule count");
    Ok(out)
}

/// Quotient isogeny: u(x) = prod over C of (x - c) collapses to a twisted
/// polynomial because C is an F_q-subspace, and phi'_t is the exact quotient
/// in u phi_t = phi'_t u.
pub fn quotient_by(
    phi: &DrinfeldMod2<ExtField>,
    c: &CyclicSubmodule,
) -> Result<(DrinfeldMod2<SplitExt>, SkewPoly<SplitExt>)> {
    let ext = c.ext.clone();
    let f = &*ext;
    // expand prod (x - c_i) as an ordinary polynomial
    let mut coeffs: Vec<SplitElem> = vec![f.one()];
    for p in &c.points {
        let mut next = vec![f.zero(); coeffs.len() + 1];
        for (i, co) in coeffs.iter().enumerate() {
            next[i + 1] = f.add(&next[i + 1], co);
            let neg = f.mul(p, co);
            next[i] = f.sub(&next[i], &neg);
        }
        coeffs = next;
    }
    // only exponents q^i may survive
    let q = f.frob_q() as usize;
    let mut skew = Vec::new();
    let mut power = 1usize;
    for (i, co) in coeffs.iter().enumerate() {
        if i == power {
            skew.push(co.clone());
            power *= q;
        } else if !f.is_zero(co) {
            return Err(Error::NonLinearizedKernel);
        }
    }
    let u = SkewPoly::new(ext.clone(), skew);
    assert_eq!(u.deg_tau(), c.frame.a.deg() + c.frame.d.deg(), "deg_tau u = deg N");

    let lifted = phi.lift(&ext);
    let (quot, rem) = u.mul(&lifted.phi_t()).right_divmod(&u)?;
    if !rem.is_zero() {
        return Err(Error::NonzeroRemainder);
    }
    assert_eq!(quot.deg_tau(), 2);
    assert_eq!(quot.coeff(0), lifted.theta, "quotient keeps the A-field structure");
    let out = DrinfeldMod2::new(ext, lifted.theta, quot.coeff(1), quot.coeff(2))?;
    Ok((out, u))
}

/// prod over C of (X - j(phi/C)) as a monic polynomial over L, low to high
/// degree; the coefficient descent to L is asserted.
pub fn quotient_j_poly(
    af: &AFieldFinite,
    phi: &DrinfeldMod2<ExtField>,
    n: &PolyA,
) -> Result<Vec<ExtElem>> {
    let subs = cyclic_submodules(af, phi, n)?;
    let ext = subs[0].ext.clone();
    let f = &*ext;
    let mut coeffs: Vec<SplitElem> = vec![f.one()];
    for c in &subs {
        let (quot, _) = quotient_by(phi, c)?;
        let j = quot.j_invariant();
        let mut next = vec![f.zero(); coeffs.len() + 1];
        for (i, co) in coeffs.iter().enumerate() {
            next[i + 1] = f.add(&next[i + 1], co);
            let neg = f.mul(&j, co);
            next[i] = f.sub(&next[i], &neg);
        }
        coeffs = next;
    }
    Ok(coeffs
        .iter()
        .map(|co| {
            ext.to_const(co)
                .expect("isogenous j-invariants are Galois stable over the base")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ext_elem, parse_poly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }

    fn af_q2_m2() -> AFieldFinite {
        let field = ExtField::canonical(f2(), 2).unwrap();
        let theta = field.gen();
        AFieldFinite::new(field, theta).unwrap()
    }

    #[test]
    fn twist_relation_and_carlitz_square() {
        let field = ExtField::canonical(f2(), 4).unwrap();
        let tau = SkewPoly::tau(field.clone());
        for c in field.elements() {
            let lhs = tau.mul(&SkewPoly::constant(field.clone(), c.clone()));
            let rhs = SkewPoly::new(field.clone(), vec![field.zero(), field.frobenius(&c)]);
            assert_eq!(lhs, rhs);
        }

        let theta = field.gen();
        let ct = SkewPoly::new(field.clone(), vec![theta.clone(), field.one()]);
        let sq = ct.mul(&ct);
        let t2 = field.mul(&theta, &theta);
        let expect = SkewPoly::new(
            field.clone(),
            vec![t2.clone(), field.add(&t2, &theta), field.one()],
        );
        assert_eq!(sq, expect);
        // cross-check as additive maps on all of F_16
        for x in field.elements() {
            assert_eq!(sq.eval(&x), ct.eval(&ct.eval(&x)));
        }
        // and divide back
        let (q, r) = sq.right_divmod(&ct).unwrap();
        assert_eq!(q, ct);
        assert!(r.is_zero());
    }

    #[test]
    fn phi_is_a_ring_morphism() {
        let af = af_q2_m2();
        let field = af.field.clone();
        let w = field.gen();
        let phi =
            DrinfeldMod2::new(field.clone(), af.theta.clone(), field.one(), w.clone()).unwrap();

        assert_eq!(phi.phi_action(&PolyA::one(&f2())), SkewPoly::one(field.clone()));
        assert_eq!(phi.phi_action(&PolyA::t(&f2())), phi.phi_t());
        let t2 = parse_poly(&f2(), "t^2").unwrap();
        assert_eq!(phi.phi_action(&t2), phi.phi_t().mul(&phi.phi_t()));

        let samples = ["t^2+t", "t^3+1", "t+1", "t^2+t+1", "t^4+t"];
        for a in samples {
            for b in samples {
                let pa = parse_poly(&f2(), a).unwrap();
                let pb = parse_poly(&f2(), b).unwrap();
                assert_eq!(
                    phi.phi_action(&pa.add(&pb)),
                    phi.phi_action(&pa).add(&phi.phi_action(&pb))
                );
                assert_eq!(
                    phi.phi_action(&pa.mul(&pb)),
                    phi.phi_action(&pa).mul(&phi.phi_action(&pb))
                );
            }
        }

        // leading coefficient has the predicted norm shape
        let q = 2u64;
        for a in ["t^2", "t^3+t+1"] {
            let pa = parse_poly(&f2(), a).unwrap();
            let d = pa.deg() as u32;
            let e = (0..d).map(|i| q.pow(2 * i)).sum::<u64>();
            let lead = phi.phi_action(&pa).lead().unwrap().clone();
            assert_eq!(lead, field.pow_u64(&phi.delta, e));
        }
    }

    #[test]
    fn torsion_of_t_over_f4() {
        let af = af_q2_m2();
        let field = af.field.clone();
        let n = PolyA::t(&f2());
        for js in ["w", "w+1", "1"] {
            let j0 = parse_ext_elem(&field, js).unwrap();
            let phi = module_from_j(&field, &af.theta, &j0);
            let tor = torsion_basis(&af, &phi, &n).unwrap();
            assert_eq!(tor.points.len(), 4);
            assert!(tor.ext.k <= 6);
            let phin = phi.phi_action(&n).lift(&tor.ext);
            for p in &tor.points {
                assert!(tor.ext.is_zero(&phin.eval(p)));
            }
            assert!(!tor.ext.is_zero(&tor.x));
            assert!(!tor.ext.is_zero(&tor.y));
            assert_ne!(tor.x, tor.y);
        }
    }

    #[test]
    fn torsion_needs_good_characteristic() {
        let field = ExtField::canonical(f2(), 1).unwrap();
        let af = AFieldFinite::new(field.clone(), field.one()).unwrap();
        assert_eq!(af.char_poly, parse_poly(&f2(), "t+1").unwrap());
        let phi = DrinfeldMod2::new(field.clone(), af.theta.clone(), field.one(), field.one())
            .unwrap();
        let n = parse_poly(&f2(), "t+1").unwrap();
        assert!(matches!(torsion_basis(&af, &phi, &n), Err(Error::TorsionNotEtale(_))));
        let nt = parse_poly(&f2(), "t^2+t").unwrap();
        assert!(matches!(torsion_basis(&af, &phi, &nt), Err(Error::TorsionNotEtale(_))));
    }

    #[test]
    fn submodule_counts() {
        let af = af_q2_m2();
        let field = af.field.clone();
        let j0 = field.gen();
        let phi = module_from_j(&field, &af.theta, &j0);
        for (ns, want) in [("t", 3), ("t+1", 3), ("t^2", 6)] {
            let n = parse_poly(&f2(), ns).unwrap();
            let subs = cyclic_submodules(&af, &phi, &n).unwrap();
            assert_eq!(subs.len(), want, "N = {ns}");
            for c in &subs {
                assert!(c.points.binary_search(&c.generator).is_ok());
            }
        }

        let f3 = Fq::new(3, 1).unwrap();
        let field3 = ExtField::canonical(f3.clone(), 2).unwrap();
        let af3 = AFieldFinite::new(field3.clone(), field3.gen()).unwrap();
        let phi3 = module_from_j(&field3, &af3.theta, &field3.gen());
        let n = PolyA::t(&f3);
        assert_eq!(cyclic_submodules(&af3, &phi3, &n).unwrap().len(), 4);
    }

    #[test]
    fn quotient_contract() {
        let af = af_q2_m2();
        let field = af.field.clone();
        let phi = module_from_j(&field, &af.theta, &field.gen());
        let n = PolyA::t(&f2());
        for c in cyclic_submodules(&af, &phi, &n).unwrap() {
            let (quot, u) = quotient_by(&phi, &c).unwrap();
            assert_eq!(u.deg_tau(), 1);
            for p in &c.points {
                assert!(c.ext.is_zero(&u.eval(p)), "kernel point survives");
            }
            assert!(!c.ext.is_zero(&quot.delta));
        }

        // level one: the quotient is the module itself
        let one = PolyA::one(&f2());
        let c = cyclic_submodules(&af, &phi, &one).unwrap().pop().unwrap();
        let (quot, u) = quotient_by(&phi, &c).unwrap();
        assert_eq!(u.deg_tau(), 0);
        assert_eq!(quot.j_invariant(), c.ext.const_from(&phi.j_invariant()));
    }

    #[test]
    fn quotients_are_isomorphism_invariant() {
        let af = af_q2_m2();
        let field = af.field.clone();
        let phi = module_from_j(&field, &af.theta, &field.gen());
        let n = PolyA::t(&f2());
        let base = quotient_j_poly(&af, &phi, &n).unwrap();
        assert_eq!(base.len() - 1, 3);
        for cs in ["w", "w+1"] {
            let c = parse_ext_elem(&field, cs).unwrap();
            let twisted = phi.twist(&c).unwrap();
            assert_eq!(twisted.j_invariant(), phi.j_invariant());
            assert_eq!(quotient_j_poly(&af, &twisted, &n).unwrap(), base);
        }
    }

    #[test]
    fn j_round_trip() {
        let field = ExtField::canonical(f2(), 4).unwrap();
        let theta = field.gen();
        assert_eq!(
            module_from_j(&field, &theta, &field.zero()).j_invariant(),
            field.zero()
        );
        assert_eq!(
            module_from_j(&field, &theta, &field.one()).j_invariant(),
            field.one()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let j0 = field.from_index(rng.gen_range(0..field.size()));
            assert_eq!(module_from_j(&field, &theta, &j0).j_invariant(), j0);
        }
    }
}
