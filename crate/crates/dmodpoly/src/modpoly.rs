//! The level-N modular polynomial over A = F_q[t], assembled by
//! evaluation/interpolation over finite A-fields and CRT in t, with its
//! height, the degree/symmetry checks, the root relation, and the height
//! specialization witness.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{lambda, psi, height_band};
use crate::drinfeld::{module_from_j, quotient_j_poly, AFieldFinite, FqAlgebra};
use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField};
use crate::fq::{Fq, FqElem};
use crate::linalg::solve_columns;
use crate::parse::parse_poly;
use crate::poly::{crt, irreducibles, PolyA};
use crate::polycore::{self, FieldCtx};
use crate::Rat;

/// Element of A[X, Y], stored sparsely; monic in X of degree psi, Y-degree
/// psi, symmetric once deg N > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPolyA {
    pub q: u32,
    pub n: PolyA,
    pub psi: usize,
    pub coeffs: BTreeMap<(usize, usize), PolyA>,
    /// Places used to assemble the coefficients; empty on deserialized data.
    pub places: Vec<PolyA>,
}

impl BivarPolyA {
    pub fn coeff(&self, i: usize, j: usize) -> PolyA {
        self.coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| PolyA::zero(self.n.fq()))
    }

    /// Max t-degree over all coefficients; log_q of the sup of coefficient
    /// absolute values.
    pub fn height(&self) -> i64 {
        self.coeffs.values().map(|c| c.deg()).max().unwrap_or(0)
    }

    pub fn deg_x(&self) -> usize {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> usize {
        self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |b: bool, msg: &str| {
            if b {
                Ok(())
            } else {
                Err(Error::PreconditionViolated(msg.into()))
            }
        };
        ok(self.deg_x() == self.psi, "X-degree must equal psi")?;
        ok(self.deg_y() == self.psi, "Y-degree must equal psi")?;
        ok(self.coeff(self.psi, 0).is_one(), "leading X-coefficient must be one")?;
        for (&(i, j), c) in &self.coeffs {
            ok(!c.is_zero(), "stored coefficients are nonzero")?;
            if i == self.psi {
                ok(j == 0, "monic in X")?;
            }
        }
        if self.n.deg() > 0 {
            for (&(i, j), c) in &self.coeffs {
                ok(self.coeff(j, i) == *c, "symmetric in X and Y")?;
            }
        }
        Ok(())
    }

    /// Value at (x, y) after pushing the coefficients through t -> theta.
    pub fn eval_in<F: FqAlgebra>(&self, f: &F, theta: &F::El, x: &F::El, y: &F::El) -> F::El {
        let mut xp = vec![f.one()];
        let mut yp = vec![f.one()];
        for _ in 0..self.psi {
            xp.push(f.mul(xp.last().unwrap(), x));
            yp.push(f.mul(yp.last().unwrap(), y));
        }
        let mut acc = f.zero();
        for (&(i, j), c) in &self.coeffs {
            let ct = c.eval_in(f, theta, |e| f.from_fq(e));
            acc = f.add(&acc, &f.mul(&ct, &f.mul(&xp[i], &yp[j])));
        }
        acc
    }

    /// The univariate Phi(X, y0) with coefficients in L, low to high X-power.
    pub fn specialize_y(&self, field: &Arc<ExtField>, y0: &ExtElem) -> Vec<Vec<ExtElem>> {
        let f = &**field;
        let mut yp = vec![f.one()];
        for _ in 0..self.psi {
            yp.push(f.mul(yp.last().unwrap(), y0));
        }
        // entry i is the t-coefficient vector of the X^i coefficient
        let mut out: Vec<Vec<ExtElem>> = vec![Vec::new(); self.psi + 1];
        for (&(i, j), c) in &self.coeffs {
            for (d, co) in c.coeffs().iter().enumerate() {
                if c.fq().is_zero(co) {
                    continue;
                }
                while out[i].len() <= d {
                    out[i].push(f.zero());
                }
                let term = f.mul(&f.from_fq(*co), &yp[j]);
                out[i][d] = f.add(&out[i][d], &term);
            }
        }
        for v in out.iter_mut() {
            while v.last().is_some_and(|c| f.is_zero(c)) {
                v.pop();
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| json!({"i": i, "j": j, "c": c.to_string()}))
            .collect();
        json!({
            "q": self.q,
            "N": self.n.to_string(),
            "psi": self.psi,
            "coeffs": coeffs,
            "height": self.height(),
        })
    }

    pub fn from_json(v: &Value) -> Result<BivarPolyA> {
        let bad = |msg: &str| Error::CacheCorrupt(msg.into());
        let q = v["q"].as_u64().ok_or_else(|| bad("missing q"))? as u32;
        let fq = Fq::from_q(q)?;
        let n = parse_poly(&fq, v["N"].as_str().ok_or_else(|| bad("missing N"))?)?;
        let psi = v["psi"].as_u64().ok_or_else(|| bad("missing psi"))? as usize;
        let mut coeffs = BTreeMap::new();
        for e in v["coeffs"].as_array().ok_or_else(|| bad("missing coeffs"))? {
            let i = e["i"].as_u64().ok_or_else(|| bad("bad index"))? as usize;
            let j = e["j"].as_u64().ok_or_else(|| bad("bad index"))? as usize;
            let c = parse_poly(&fq, e["c"].as_str().ok_or_else(|| bad("bad coefficient"))?)?;
            if c.is_zero() {
                return Err(bad("zero coefficient stored"));
            }
            coeffs.insert((i, j), c);
        }
        let height = v["height"].as_i64().ok_or_else(|| bad("missing height"))?;
        let out = BivarPolyA { q, n, psi, coeffs, places: Vec::new() };
        if out.height() != height {
            return Err(bad("height does not match the coefficients"));
        }
        out.validate().map_err(|_| bad("invariants fail"))?;
        Ok(out)
    }

    /// Plain-text rendering, X-major term order.
    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for (&(i, j), c) in self.coeffs.iter().rev() {
            let mut part = String::new();
            let cs = c.to_string();
            if cs != "1" || (i == 0 && j == 0) {
                if cs.contains('+') {
                    part.push_str(&format!("({cs})"));
                } else {
                    part.push_str(&cs);
                }
            }
            for (var, e) in [("X", i), ("Y", j)] {
                if e == 0 {
                    continue;
                }
                if !part.is_empty() {
                    part.push('*');
                }
                if e == 1 {
                    part.push_str(var);
                } else {
                    part.push_str(&format!("{var}^{e}"));
                }
            }
            terms.push(part);
        }
        terms.join(" + ")
    }
}

/// Phi_N mod P: the coefficient table over A/P, entries reduced to degree
/// below deg P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedPhi {
    pub place: PolyA,
    pub psi: usize,
    pub table: BTreeMap<(usize, usize), PolyA>,
}

fn psi_usize(n: &PolyA) -> Result<usize> {
    Ok(psi(n)?.to_usize().expect("psi fits in usize"))
}

/// Least root of p in the field; the field must contain the degree-(deg p)
/// subfield.
fn least_root(field: &Arc<ExtField>, p: &PolyA) -> Result<ExtElem> {
    let lifted: Vec<ExtElem> = p.coeffs().iter().map(|c| field.const_from(*c)).collect();
    let roots = field.find_roots(&lifted)?;
    roots
        .into_iter()
        .map(|(r, _)| r)
        .min()
        .ok_or_else(|| Error::PreconditionViolated(format!("{p} has no root in the work field")))
}

fn lagrange(field: &Arc<ExtField>, pts: &[(ExtElem, ExtElem)]) -> Vec<ExtElem> {
    let f = &**field;
    let mut acc: Vec<ExtElem> = Vec::new();
    for (k, (xk, yk)) in pts.iter().enumerate() {
        let mut num: Vec<ExtElem> = vec![f.one()];
        let mut den = f.one();
        for (l, (xl, _)) in pts.iter().enumerate() {
            if l == k {
                continue;
            }
            num = polycore::mul(f, &num, &[f.neg(xl), f.one()]);
            den = f.mul(&den, &f.sub(xk, xl));
        }
        let s = f.mul(yk, &f.inv(&den).expect("distinct interpolation nodes"));
        acc = polycore::add(f, &acc, &polycore::scale(f, &num, &s));
    }
    acc
}

/// Express a Frobenius-invariant element of the degree-m subfield in the
/// theta-power basis, i.e. as an element of A/(p).
fn descend(field: &Arc<ExtField>, theta: &ExtElem, m: usize, x: &ExtElem) -> PolyA {
    let fq = field.base.clone();
    let mut fr = x.clone();
    for _ in 0..m {
        fr = field.frobenius(&fr);
    }
    assert_eq!(&fr, x, "coefficient must lie in the residue subfield");
    let mut cols = Vec::with_capacity(m);
    let mut pw = field.one();
    for _ in 0..m {
        cols.push(pw.0.clone());
        pw = field.mul(&pw, theta);
    }
    let sol = solve_columns(&fq, &cols, &x.0, field.m)
        .expect("invariant element is a polynomial in theta");
    PolyA::from_coeffs(&fq, sol)
}

pub fn specialize_phi(n: &PolyA, p: &PolyA) -> Result<SpecializedPhi> {
    let fq = n.fq().clone();
    if !p.is_monic() {
        return Err(Error::NotMonic(format!("{p}")));
    }
    if !p.is_irreducible() {
        return Err(Error::PreconditionViolated(format!("{p} is not irreducible")));
    }
    if !p.coprime(n) {
        return Err(Error::CharDividesN);
    }
    let psi_n = psi_usize(n)?;
    let m = p.deg() as usize;
    // the work field must hold psi + 1 distinct nonzero sample values
    let mut s = m;
    while crate::q_pow(fq.q, s as u64) <= num_bigint::BigInt::from(psi_n as u64 + 1) {
        s += m;
    }
    let field = ExtField::canonical(fq.clone(), s)?;
    let theta = least_root(&field, p)?;
    let af = AFieldFinite::new(field.clone(), theta.clone())?;
    assert_eq!(af.char_poly, *p);

    let jvals: Vec<ExtElem> = field
        .elements()
        .filter(|x| !field.is_zero(x))
        .take(psi_n + 1)
        .collect();
    assert_eq!(jvals.len(), psi_n + 1);
    let mut fibers = Vec::with_capacity(jvals.len());
    for j0 in &jvals {
        let phi = module_from_j(&field, &theta, j0);
        let fiber = quotient_j_poly(&af, &phi, n)?;
        assert_eq!(fiber.len(), psi_n + 1);
        fibers.push(fiber);
    }

    let mut table = BTreeMap::new();
    for i in 0..=psi_n {
        let pts: Vec<(ExtElem, ExtElem)> = jvals
            .iter()
            .zip(fibers.iter())
            .map(|(j0, f)| (j0.clone(), f[i].clone()))
            .collect();
        let cy = lagrange(&field, &pts);
        assert!(cy.len() <= psi_n + 1, "Y-degree stays within psi");
        for (j, c) in cy.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            table.insert((i, j), descend(&field, &theta, m, c));
        }
    }
    assert!(table.get(&(psi_n, 0)).is_some_and(|c| c.is_one()));
    Ok(SpecializedPhi { place: p.clone(), psi: psi_n, table })
}

/// Monic irreducibles coprime to n in (degree, coefficient) order.
fn place_pool(n: &PolyA) -> impl Iterator<Item = PolyA> {
    let n = n.clone();
    let fq = n.fq().clone();
    (1usize..).flat_map(move |d| {
        let n = n.clone();
        irreducibles(&fq, d)
            .into_iter()
            .filter(move |p| p.coprime(&n))
    })
}

fn combine(n: &PolyA, psi_n: usize, legs: &[SpecializedPhi]) -> Result<BivarPolyA> {
    let fq = n.fq().clone();
    let mut keys = std::collections::BTreeSet::new();
    for leg in legs {
        keys.extend(leg.table.keys().copied());
    }
    let mut coeffs = BTreeMap::new();
    for key in keys {
        let pairs: Vec<(PolyA, PolyA)> = legs
            .iter()
            .map(|leg| {
                let r = leg.table.get(&key).cloned().unwrap_or_else(|| PolyA::zero(&fq));
                (r, leg.place.clone())
            })
            .collect();
        let c = crt(&pairs)?;
        if !c.is_zero() {
            coeffs.insert(key, c);
        }
    }
    let out = BivarPolyA {
        q: fq.q,
        n: n.clone(),
        psi: psi_n,
        coeffs,
        places: legs.iter().map(|l| l.place.clone()).collect(),
    };
    out.validate()?;
    Ok(out)
}

const STABILITY_EXTENSIONS: usize = 4;

/// Assemble Phi_N over A: enough places to cover the height bound plus
/// slack, then one extra place as a stability check (extended further only
/// if the check ever fails).
pub fn crt_phi(n: &PolyA) -> Result<BivarPolyA> {
    if !n.is_monic() {
        return Err(Error::NotMonic(format!("{n}")));
    }
    let psi_n = psi_usize(n)?;
    let (_, upper) = height_band(n)?;
    let target = upper.floor().to_integer().to_i64().expect("small band") + 2;

    let mut pool = place_pool(n);
    let mut legs: Vec<SpecializedPhi> = Vec::new();
    let mut total = 0i64;
    while total < target {
        let p = pool.next().expect("infinitely many places");
        total += p.deg();
        legs.push(specialize_phi(n, &p)?);
    }
    let mut cur = combine(n, psi_n, &legs)?;
    for _ in 0..STABILITY_EXTENSIONS {
        let p = pool.next().expect("infinitely many places");
        legs.push(specialize_phi(n, &p)?);
        let next = combine(n, psi_n, &legs)?;
        if next.coeffs == cur.coeffs {
            // record the full verified set of places
            cur.places = next.places;
            assert_eq!(cur.coeff(0, psi_n).is_one(), n.deg() > 0 || psi_n == 1);
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::SizeCapExceeded(
        "coefficients kept changing as places were added".into(),
    ))
}

/// The place list crt_phi would use for n, including every stability
/// extension it could have consumed; anything outside this list is fresh.
pub fn reserved_places(n: &PolyA) -> Result<Vec<PolyA>> {
    let (_, upper) = height_band(n)?;
    let target = upper.floor().to_integer().to_i64().expect("small band") + 2;
    let mut out = Vec::new();
    let mut total = 0i64;
    for p in place_pool(n) {
        if total >= target {
            out.push(p);
            if out.len() >= STABILITY_EXTENSIONS {
                break;
            }
            continue;
        }
        total += p.deg();
        out.push(p.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BandReport {
    pub height: i64,
    pub lower: Rat,
    pub upper: Rat,
    pub pass: bool,
    pub implied_b: Rat,
}

/// Height band and the implied per-module constant
/// b = 2h/((q^2-1) psi) - deg N + 2 lambda_N.
pub fn band_report(phi: &BivarPolyA) -> Result<BandReport> {
    let (lower, upper) = height_band(&phi.n)?;
    let h = phi.height();
    let hr = Rat::from_integer(h.into());
    let q = phi.q;
    let psi_r = Rat::from_integer(psi(&phi.n)?);
    let qsq = Rat::from_integer(crate::q_pow(q, 2) - num_bigint::BigInt::from(1));
    let implied_b = Rat::from_integer(2.into()) * &hr / (&qsq * &psi_r)
        - Rat::from_integer(phi.n.deg().into())
        + Rat::from_integer(2.into()) * lambda(&phi.n)?;
    let pass = lower <= hr && hr <= upper;
    Ok(BandReport { height: h, lower, upper, pass, implied_b })
}

/// Per-trial re-derivation of the isogeny fiber over a fresh place: the
/// specialized Phi(X, j0) must equal prod (X - j(phi/C)), and every
/// (j(phi/C), j0) must be a root of Phi.
pub fn verify_root_relation(phi: &BivarPolyA, trials: usize, seed: u64) -> Result<usize> {
    let fq = phi.n.fq().clone();
    let avoid: Vec<PolyA> = if phi.places.is_empty() {
        reserved_places(&phi.n)?
    } else {
        phi.places.clone()
    };
    let fresh: Vec<PolyA> = place_pool(&phi.n)
        .filter(|p| !avoid.contains(p))
        .take(8)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0usize;
    for _ in 0..trials {
        let p = &fresh[rng.gen_range(0..fresh.len())];
        let m = p.deg() as usize;
        let psi_n = phi.psi;
        let mut s = m;
        while crate::q_pow(fq.q, s as u64) <= num_bigint::BigInt::from(psi_n as u64 + 1) {
            s += m;
        }
        let field = ExtField::canonical(fq.clone(), s)?;
        let theta = least_root(&field, p)?;
        let af = AFieldFinite::new(field.clone(), theta.clone())?;
        // a sample point of the residue field A/(p)
        let mut j0 = field.zero();
        let mut pw = field.one();
        for _ in 0..m {
            let c = FqElem(rng.gen_range(0..fq.q));
            j0 = field.add(&j0, &field.scale_base(&pw, c));
            pw = field.mul(&pw, &theta);
        }
        let module = module_from_j(&field, &theta, &j0);
        let fiber = quotient_j_poly(&af, &module, &phi.n)?;
        let spec = phi.specialize_y(&field, &j0);
        let mut ok = true;
        for (i, f) in fiber.iter().enumerate() {
            let c = spec[i]
                .iter()
                .rev()
                .fold(field.zero(), |acc, co| field.add(&field.mul(&acc, &theta), co));
            ok &= c == *f;
        }
        // root relation, checked in the splitting field of the torsion
        let subs = crate::drinfeld::cyclic_submodules(&af, &module, &phi.n)?;
        for c in &subs {
            let (quot, _) = crate::drinfeld::quotient_by(&module, c)?;
            let jc = quot.j_invariant();
            let ext = c.ext.clone();
            let v = phi.eval_in(
                &*ext,
                &ext.const_from(&theta),
                &jc,
                &ext.const_from(&j0),
            );
            ok &= ext.is_zero(&v);
        }
        if ok {
            passes += 1;
        }
    }
    Ok(passes)
}

#[derive(Clone, Debug)]
pub struct HeightWitness {
    pub field: Arc<ExtField>,
    pub k: usize,
    pub y: ExtElem,
    pub height: i64,
}

/// t-degree of Phi(X, y0) for y0 in an extension of F_q.
pub fn specialized_height(phi: &BivarPolyA, field: &Arc<ExtField>, y0: &ExtElem) -> i64 {
    phi.specialize_y(field, y0)
        .iter()
        .map(|v| v.len() as i64 - 1)
        .max()
        .unwrap_or(0)
}

/// A scalar y with h(Phi(X, y)) equal to h(Phi) exactly: scan small
/// extensions for a point avoiding the zeros of every top-degree form.
pub fn specialization_height_witness(phi: &BivarPolyA) -> Result<HeightWitness> {
    let fq = phi.n.fq().clone();
    let h = phi.height();
    // b_i(Y) = [t^h] (X^i-coefficient), a form over F_q
    let mut forms: Vec<PolyA> = Vec::new();
    for i in 0..=phi.psi {
        let mut cy = vec![fq.zero(); phi.psi + 1];
        for j in 0..=phi.psi {
            cy[j] = phi.coeff(i, j).coeff(h as usize);
        }
        let b = PolyA::from_coeffs(&fq, cy);
        if !b.is_zero() {
            forms.push(b);
        }
    }
    assert!(!forms.is_empty(), "some coefficient attains the height");
    for k in 1..=4usize {
        let field = ExtField::canonical(fq.clone(), k)?;
        let witness = field.elements().find(|y| {
            forms
                .iter()
                .all(|b| !field.is_zero(&b.eval_in(&*field, y, |c| field.const_from(c))))
        });
        if let Some(y) = witness {
            let hy = specialized_height(phi, &field, &y);
            assert_eq!(hy, h, "witness must reproduce the height exactly");
            return Ok(HeightWitness { field, k, y, height: hy });
        }
    }
    Err(Error::WitnessNotFound(
        "no height witness in extensions of degree up to 4".into(),
    ))
}

/// Shared test fixture: the level-t modular polynomial over F_2, built once
/// per test binary.
#[cfg(test)]
pub(crate) fn phi_t_q2_fixture() -> &'static BivarPolyA {
    use std::sync::OnceLock;
    static CELL: OnceLock<BivarPolyA> = OnceLock::new();
    CELL.get_or_init(|| {
        let f2 = Fq::new(2, 1).unwrap();
        crt_phi(&PolyA::t(&f2)).unwrap()
    })
}
