//! Heights over F = F_q(t): places and local absolute values, Gauss norms of
//! specialized modular polynomials, the Hecke-image height sum, the gap band
//! with exact integer power comparisons, and root-magnitude bookkeeping at
//! the place at infinity.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, CNMatrix};
use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField};
use crate::modpoly::BivarPolyA;
use crate::omega::OmegaPoint;
use crate::poly::PolyA;
use crate::polycore::{self, FieldCtx};
use crate::ratfun::RatF;
use crate::{Rat, NEG_INF, POS_INF};

/// Exact rational measured in units of log_q; nonnegative for Weil heights.
pub type HeightValue = Rat;

fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A place of F_q(t): a monic irreducible of A, or the place at infinity
/// (residue degree 1, uniformizer 1/t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceF {
    Finite(PolyA),
    Infinity,
}

impl PlaceF {
    /// Wraps a monic irreducible as a finite place.
    pub fn finite(p: &PolyA) -> Result<PlaceF> {
        if !p.is_monic() || p.deg() < 1 || !p.is_irreducible() {
            return Err(Error::PreconditionViolated(format!(
                "{p} is not a monic irreducible"
            )));
        }
        Ok(PlaceF::Finite(p.clone()))
    }

    /// Residue degree; the weight of the place in global sums.
    pub fn deg(&self) -> i64 {
        match self {
            PlaceF::Finite(p) => p.deg(),
            PlaceF::Infinity => 1,
        }
    }
}

impl fmt::Display for PlaceF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceF::Finite(p) => write!(f, "({p})"),
            PlaceF::Infinity => write!(f, "inf"),
        }
    }
}

/// Valuation ord_v(x); POS_INF for x = 0. At a finite P this is the net
/// multiplicity of P, at infinity it is deg den - deg num.
pub fn ord_at(x: &RatF, v: &PlaceF) -> i64 {
    if x.is_zero() {
        return POS_INF;
    }
    match v {
        PlaceF::Finite(p) => x.num().ord_at(p) as i64 - x.den().ord_at(p) as i64,
        PlaceF::Infinity => x.v_inf(),
    }
}

/// log_q |x|_v = -ord_v(x) for nonzero x, normalized so a uniformizer has
/// absolute value 1/q. Residue degrees enter global sums as separate
/// weights, never here.
pub fn log_abs_at(x: &RatF, v: &PlaceF) -> Rat {
    assert!(!x.is_zero(), "log of zero");
    rat_i(-ord_at(x, v))
}

/// log_q max(1, |x|_v); zero for x = 0.
pub fn log_plus_at(x: &RatF, v: &PlaceF) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    rat_i((-ord_at(x, v)).max(0))
}

/// Weil height of x: max(deg num, deg den) in lowest terms. Recomputed from
/// the local contributions (denominator primes plus infinity) and
/// cross-checked before returning.
pub fn weil_height(x: &RatF) -> Result<HeightValue> {
    let direct = x.num().deg().max(x.den().deg()).max(0);
    let mut by_places = log_plus_at(x, &PlaceF::Infinity);
    if !x.is_zero() {
        for (p, _) in x.den().factor_monic()? {
            by_places += rat_i(p.deg()) * log_plus_at(x, &PlaceF::Finite(p));
        }
    }
    assert_eq!(
        by_places,
        rat_i(direct),
        "place decomposition of the height disagrees with the degree formula for {x}"
    );
    Ok(by_places)
}

/// log_q of the largest |coefficient|_v of a nonzero polynomial in X over F;
/// the polynomial must be monic in X, so the result is >= 0.
pub fn gauss_lognorm(p: &[RatF], v: &PlaceF) -> Result<Rat> {
    let Some(top) = p.iter().rposition(|c| !c.is_zero()) else {
        return Err(Error::ZeroPolynomial);
    };
    if p[top] != RatF::one(p[top].fq()) {
        return Err(Error::NotMonic(format!(
            "leading X-coefficient is {}",
            p[top]
        )));
    }
    // the leading 1 contributes log 0, so the maximum is at least 0
    let mut best = 0i64;
    for c in &p[..top] {
        if !c.is_zero() {
            best = best.max(-ord_at(c, v));
        }
    }
    Ok(rat_i(best))
}

/// Coefficients of Phi(X, j0) in F, low to high X-power.
pub fn specialize_rational(phi: &BivarPolyA, j0: &RatF) -> Vec<RatF> {
    let fq = j0.fq();
    let mut pows = vec![RatF::one(fq)];
    for _ in 0..phi.deg_y() {
        pows.push(pows.last().unwrap().mul(j0));
    }
    let mut out = vec![RatF::zero(fq); phi.deg_x() + 1];
    for (&(i, j), c) in &phi.coeffs {
        if !c.is_zero() {
            out[i] = out[i].add(&RatF::from_poly(c.clone()).mul(&pows[j]));
        }
    }
    out
}

/// Finite places where some coefficient is non-integral, in increasing order.
fn denominator_places(coeffs: &[RatF]) -> Result<Vec<PolyA>> {
    let mut set = BTreeSet::new();
    for c in coeffs {
        if !c.is_zero() && c.den().deg() > 0 {
            for (p, _) in c.den().factor_monic()? {
                set.insert(p);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Sum over all places of deg(v) * gauss_lognorm(Phi(X, j0), v). Only the
/// denominator primes of the specialized coefficients and the place at
/// infinity can contribute: everywhere else the coefficients are integral
/// and the monic leading term pins the maximum at exactly 1.
pub fn hecke_height_sum(phi: &BivarPolyA, j0: &RatF) -> Result<HeightValue> {
    let spec = specialize_rational(phi, j0);
    let mut total = gauss_lognorm(&spec, &PlaceF::Infinity)?;
    for p in denominator_places(&spec)? {
        let w = rat_i(p.deg());
        total += w * gauss_lognorm(&spec, &PlaceF::Finite(p))?;
    }
    Ok(total)
}

/// Per-place breakdown of [`hecke_height_sum`]: every contributing place with
/// its weighted term, infinity last. The terms add up to the sum exactly.
pub fn hecke_height_terms(phi: &BivarPolyA, j0: &RatF) -> Result<Vec<(PlaceF, Rat)>> {
    let spec = specialize_rational(phi, j0);
    let mut rows = Vec::new();
    for p in denominator_places(&spec)? {
        let w = rat_i(p.deg());
        let term = w * gauss_lognorm(&spec, &PlaceF::Finite(p.clone()))?;
        rows.push((PlaceF::Finite(p), term));
    }
    rows.push((
        PlaceF::Infinity,
        gauss_lognorm(&spec, &PlaceF::Infinity)?,
    ));
    Ok(rows)
}

/// Local height identity at a finite place: psi * log+|j0|_v must equal the
/// Gauss norm of Phi(X, j0) at v.
pub fn check_local_identity(phi: &BivarPolyA, j0: &RatF, v: &PlaceF) -> Result<bool> {
    if matches!(v, PlaceF::Infinity) {
        return Err(Error::PreconditionViolated(
            "the local identity is a finite-place statement".into(),
        ));
    }
    let lhs = rat_i(phi.psi as i64) * log_plus_at(j0, v);
    let rhs = gauss_lognorm(&specialize_rational(phi, j0), v)?;
    Ok(lhs == rhs)
}

/// Outcome of the gap band check for one specialization value.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub q: u32,
    pub n: PolyA,
    pub h_j0: Rat,
    pub gap: Rat,
    pub lower: Rat,
    /// Exact enclosure of the upper endpoint. The endpoint contains
    /// log_q(h/q + 1), which is irrational unless h/q + 1 is a q-power, so
    /// it is reported as an interval of width at most 1/64.
    pub upper: (Rat, Rat),
    /// Band membership, decided exactly by integer power comparison (never
    /// through the enclosure).
    pub pass: bool,
    /// Set when the upper comparison fails but gap <= q still holds; the
    /// failure is then attributable to the log normalization inside the min
    /// term rather than to the height data, since the endpoint tends to q
    /// as the log base drops towards 1.
    pub marginal: bool,
}

/// gap = h(j0) - (1/psi) * hecke_height_sum, banded below by
/// c (2 lambda - deg N - b_q) and above by
/// q + c min(0, 2 lambda - deg N + log_q(h/q + 1)), where c = (q^2 - 1)/2.
/// All logs are base q; the comparison against the irrational upper endpoint
/// is decided exactly as an integer power inequality.
pub fn gap_band(phi: &BivarPolyA, j0: &RatF) -> Result<GapReport> {
    let q = phi.q;
    let h = weil_height(j0)?;
    let gap = h.clone() - hecke_height_sum(phi, j0)? / rat_i(phi.psi as i64);
    let c = Rat::new(crate::q_pow(q, 2) - BigInt::one(), BigInt::from(2));
    let base = rat_i(2) * arith::lambda(&phi.n)? - rat_i(phi.n.deg());
    let lower = c.clone() * (base.clone() - arith::bq_upper(q));
    let cap = rat_i(q as i64);
    let x = h.clone() / cap.clone() + Rat::one(); // log argument, >= 1
    // min(0, base + log_q x) collapses to 0 exactly when x >= q^(-base)
    let (upper, upper_ok) = if q_pow_le_rat(q, &-base.clone(), &x) {
        ((cap.clone(), cap.clone()), gap <= cap)
    } else {
        let (lo, hi) = log_q_bracket(q, &x, 64);
        let ends = (
            cap.clone() + c.clone() * (base.clone() + lo),
            cap.clone() + c.clone() * (base.clone() + hi),
        );
        // gap <= q + c (base + log_q x)  <=>  q^((gap - q)/c - base) <= x
        let e = (gap.clone() - cap.clone()) / c - base;
        (ends, q_pow_le_rat(q, &e, &x))
    };
    let pass = lower <= gap && upper_ok;
    let marginal = !pass && lower <= gap && gap <= cap;
    Ok(GapReport {
        q,
        n: phi.n.clone(),
        h_j0: h,
        gap,
        lower,
        upper,
        pass,
        marginal,
    })
}

fn big_pow(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow(b.clone(), usize::try_from(e).expect("exponent overflow"))
}

/// Decide q^e <= x for rational e and rational x > 0 by clearing both
/// denominators into big-integer powers.
pub fn q_pow_le_rat(q: u32, e: &Rat, x: &Rat) -> bool {
    assert!(x.is_positive(), "power comparison against x <= 0");
    let r = e.denom().to_u64().expect("exponent denominator overflow");
    let p = e.numer();
    let xn = big_pow(x.numer(), r);
    let xd = big_pow(x.denom(), r);
    let qb = BigInt::from(q);
    if p.is_negative() {
        let pe = (-p).to_u64().expect("exponent overflow");
        xd <= big_pow(&qb, pe) * xn
    } else {
        let pe = p.to_u64().expect("exponent overflow");
        big_pow(&qb, pe) * xd <= xn
    }
}

/// Enclose log_q(x) for rational x >= 1 between consecutive multiples of
/// 1/d, collapsing to a point when x^d is an exact q-power.
pub fn log_q_bracket(q: u32, x: &Rat, d: u32) -> (Rat, Rat) {
    assert!(*x >= Rat::one(), "log bracket needs x >= 1");
    let num = big_pow(x.numer(), d as u64);
    let den = big_pow(x.denom(), d as u64);
    let qb = BigInt::from(q);
    let mut a = 0u64;
    let mut qa_den = den; // q^a * den(x^d)
    loop {
        let next = &qa_den * &qb;
        if next <= num {
            qa_den = next;
            a += 1;
        } else {
            break;
        }
    }
    let lo = Rat::new(BigInt::from(a), BigInt::from(d));
    if qa_den == num {
        (lo.clone(), lo)
    } else {
        (lo, Rat::new(BigInt::from(a + 1), BigInt::from(d)))
    }
}

/// Both sides of the covolume scaling law under an upper-triangular integral
/// matrix: the left entry is log D of the lattice of gamma z, the right is
/// log(|a|/|d|) + log D of the lattice of z. They must agree exactly.
pub fn covolume_transport(z: &OmegaPoint, gamma: &CNMatrix, target: &Rat) -> Result<(Rat, Rat)> {
    let before = z.lattice_profile()?;
    let after = z
        .apply_gl2(&gamma.to_mat().to_f(), target)?
        .lattice_profile()?;
    let scale = rat_i(gamma.a.deg() - gamma.d.deg());
    Ok((after.covolume_log, scale + before.covolume_log))
}

/// Multiset of log_q root magnitudes of a monic univariate polynomial, read
/// off the lower valuation polygon at the place at infinity. Input is the
/// t-degree of each X-power coefficient, NEG_INF marking a zero coefficient;
/// the leading entry must be 0 (unit leading coefficient). Returned as
/// (log magnitude, multiplicity) pairs, largest first; roots at 0 (from a
/// vanishing constant term) are omitted.
pub fn infty_root_profile(degs: &[i64]) -> Result<Vec<(Rat, i64)>> {
    if degs.is_empty() || degs.iter().all(|&d| d <= NEG_INF) {
        return Err(Error::ZeroPolynomial);
    }
    if *degs.last().unwrap() != 0 {
        return Err(Error::NotMonic(
            "leading coefficient must have degree 0".into(),
        ));
    }
    let pts: Vec<(i64, i64)> = degs
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d > NEG_INF)
        .map(|(i, &d)| (i as i64, -d))
        .collect();
    // lower convex hull, abscissa increasing
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let (i0, v0) = w[0];
        let (i1, v1) = w[1];
        // the i1 - i0 roots on this segment all have log magnitude = slope
        out.push((
            Rat::new(BigInt::from(v1 - v0), BigInt::from(i1 - i0)),
            i1 - i0,
        ));
    }
    out.reverse();
    Ok(out)
}

/// Sum of log_q max(1, |root|) over all roots, from the polygon profile.
pub fn infty_root_mass(degs: &[i64]) -> Result<Rat> {
    let mut mass = Rat::zero();
    for (slope, count) in infty_root_profile(degs)? {
        if slope.is_positive() {
            mass += slope * rat_i(count);
        }
    }
    Ok(mass)
}

/// Candidate budget for the exhaustive polynomial-root search.
const SPLIT_SEARCH_CAP: u64 = 1 << 18;

/// Splits a monic f in (L[t])[X] into linear factors with roots in L[t], by
/// exhausting candidates up to the degree bound forced by the coefficient
/// degrees. Coefficients are t-coefficient vectors over L, low to high
/// X-power. Returns the roots with multiplicity when f splits completely
/// over L[t]; None when some root lies outside L[t] or the candidate count
/// exceeds the search cap.
pub fn constant_field_split(
    field: &Arc<ExtField>,
    f: &[Vec<ExtElem>],
) -> Result<Option<Vec<Vec<ExtElem>>>> {
    let l = &**field;
    if f.len() < 2 {
        return Err(Error::ZeroPolynomial);
    }
    let lead = f.last().unwrap();
    if lead.len() != 1 || *lead != vec![l.one()] {
        return Err(Error::NotMonic(
            "leading X-coefficient must be the constant 1".into(),
        ));
    }
    let n = f.len() - 1;
    // any root r satisfies deg r <= max_i ceil(deg c_i / (n - i))
    let mut bound = 0i64;
    for (i, c) in f.iter().enumerate().take(n) {
        if !c.is_empty() {
            let d = c.len() as i64 - 1;
            let slots = (n - i) as i64;
            bound = bound.max((d + slots - 1) / slots);
        }
    }
    let size = match l.size_big().to_u64() {
        Some(s) => s,
        None => return Ok(None),
    };
    let mut count: u64 = 1;
    for _ in 0..=bound {
        count = match count.checked_mul(size) {
            Some(c) if c <= SPLIT_SEARCH_CAP => c,
            _ => return Ok(None),
        };
    }
    let decode = |mut idx: u64| -> Vec<ExtElem> {
        let mut r = Vec::with_capacity(bound as usize + 1);
        for _ in 0..=bound {
            r.push(l.from_index(idx % size));
            idx /= size;
        }
        polycore::trim(l, &mut r);
        r
    };
    let eval = |g: &[Vec<ExtElem>], r: &[ExtElem]| -> bool {
        let mut acc: Vec<ExtElem> = g.last().unwrap().clone();
        for c in g.iter().rev().skip(1) {
            acc = polycore::add(l, &polycore::mul(l, &acc, r), c);
        }
        acc.is_empty()
    };
    let mut rem: Vec<Vec<ExtElem>> = f.to_vec();
    let mut roots = Vec::new();
    'next_root: while rem.len() > 1 {
        for idx in 0..count {
            let r = decode(idx);
            if eval(&rem, &r) {
                // synthetic division by X - r
                let m = rem.len() - 1;
                let mut g: Vec<Vec<ExtElem>> = vec![Vec::new(); m];
                g[m - 1] = rem[m].clone();
                for i in (1..m).rev() {
                    g[i - 1] = polycore::add(l, &rem[i], &polycore::mul(l, &r, &g[i]));
                }
                rem = g;
                roots.push(r);
                continue 'next_root;
            }
        }
        return Ok(None);
    }
    Ok(Some(roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::enumerate_cn;
    use crate::fq::Fq;
    use crate::modpoly::phi_t_q2_fixture;
    use crate::parse::{parse_poly, parse_puiseux, parse_ratf};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn rf(s: &str) -> RatF {
        parse_ratf(&f2(), s).unwrap()
    }

    fn place(s: &str) -> PlaceF {
        PlaceF::finite(&parse_poly(&f2(), s).unwrap()).unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, fq: &Arc<Fq>, max_deg: usize) -> PolyA {
        let d = rng.gen_range(0..=max_deg);
        let c: Vec<i64> = (0..=d).map(|_| rng.gen_range(0..fq.q as i64)).collect();
        PolyA::from_ints(fq, &c)
    }

    #[test]
    fn place_construction_and_degree() {
        let t = place("t");
        assert_eq!(t.deg(), 1);
        assert_eq!(t.to_string(), "(t)");
        assert_eq!(PlaceF::Infinity.deg(), 1);
        assert_eq!(PlaceF::Infinity.to_string(), "inf");
        let quad = place("t^2+t+1");
        assert_eq!(quad.deg(), 2);
        // reducible and non-monic inputs are rejected
        let bad = parse_poly(&f2(), "t^2+t").unwrap();
        assert!(PlaceF::finite(&bad).is_err());
        let unit = parse_poly(&f2(), "1").unwrap();
        assert!(PlaceF::finite(&unit).is_err());
    }

    #[test]
    fn weil_height_examples() {
        assert_eq!(weil_height(&rf("(t^3+1)/t")).unwrap(), rat(3, 1));
        assert_eq!(weil_height(&rf("t")).unwrap(), rat(1, 1));
        assert_eq!(weil_height(&rf("1")).unwrap(), rat(0, 1));
        assert_eq!(weil_height(&rf("0")).unwrap(), rat(0, 1));
        // reduction happens before the degree formula
        assert_eq!(weil_height(&rf("(t^2+t)/(t+1)")).unwrap(), rat(1, 1));
        assert_eq!(weil_height(&rf("1/(t^5+t^2+1)")).unwrap(), rat(5, 1));
    }

    #[test]
    fn weil_height_random_vs_degree_formula() {
        // the place-sum cross-check runs inside weil_height on every call
        for q in [2u32, 3] {
            let fq = Fq::from_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11 + q as u64);
            let mut done = 0;
            while done < 100 {
                let num = random_poly(&mut rng, &fq, 6);
                let den = random_poly(&mut rng, &fq, 6);
                if den.is_zero() {
                    continue;
                }
                let x = RatF::new(num, den).unwrap();
                let h = weil_height(&x).unwrap();
                let expect = x.num().deg().max(x.den().deg()).max(0);
                assert_eq!(h, rat(expect, 1));
                done += 1;
            }
        }
    }

    #[test]
    fn product_formula_over_all_places() {
        let fq = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 50 {
            let num = random_poly(&mut rng, &fq, 5);
            let den = random_poly(&mut rng, &fq, 5);
            if num.is_zero() || den.is_zero() {
                continue;
            }
            let x = RatF::new(num, den).unwrap();
            let mut total: i64 = x.v_inf();
            for src in [x.num(), x.den()] {
                if src.deg() > 0 {
                    for (p, _) in src.factor_monic().unwrap() {
                        total += p.deg() * ord_at(&x, &PlaceF::Finite(p.clone()));
                    }
                }
            }
            assert_eq!(total, 0, "product formula broke for {x}");
            done += 1;
        }
    }

    #[test]
    fn gauss_lognorm_examples() {
        let p = vec![rf("t").neg(), rf("1")]; // X - t
        assert_eq!(gauss_lognorm(&p, &PlaceF::Infinity).unwrap(), rat(1, 1));
        assert_eq!(gauss_lognorm(&p, &place("t")).unwrap(), rat(0, 1));
        // integral coefficients give 0 at their own primes too
        let integral = vec![rf("t^4+t"), rf("t^2"), rf("1")];
        assert_eq!(gauss_lognorm(&integral, &place("t")).unwrap(), rat(0, 1));
        // denominators push the norm up
        let sharp = vec![rf("1/(t^3)"), rf("1")];
        assert_eq!(gauss_lognorm(&sharp, &place("t")).unwrap(), rat(3, 1));
        assert_eq!(gauss_lognorm(&sharp, &place("t+1")).unwrap(), rat(0, 1));
        // error cases
        let zero = vec![rf("0")];
        assert!(matches!(
            gauss_lognorm(&zero, &PlaceF::Infinity),
            Err(Error::ZeroPolynomial)
        ));
        let lopsided = vec![rf("1"), rf("t")];
        assert!(matches!(
            gauss_lognorm(&lopsided, &PlaceF::Infinity),
            Err(Error::NotMonic(_))
        ));
    }

    #[test]
    fn local_identity_at_the_computed_level() {
        let phi = phi_t_q2_fixture();
        let j0 = rf("1/t");
        let spec = specialize_rational(phi, &j0);
        // log+|j0| at (t) is 1, psi = 3, so the Gauss norm must be exactly 3
        assert_eq!(log_plus_at(&j0, &place("t")), rat(1, 1));
        assert_eq!(gauss_lognorm(&spec, &place("t")).unwrap(), rat(3, 1));
        assert!(check_local_identity(phi, &j0, &place("t")).unwrap());
        // good-reduction places: both sides vanish
        for v in ["t+1", "t^2+t+1"] {
            assert_eq!(log_plus_at(&j0, &place(v)), rat(0, 1));
            assert_eq!(gauss_lognorm(&spec, &place(v)).unwrap(), rat(0, 1));
            assert!(check_local_identity(phi, &j0, &place(v)).unwrap());
        }
        // the identity is about finite places only
        assert!(check_local_identity(phi, &j0, &PlaceF::Infinity).is_err());
    }

    #[test]
    fn local_identity_random_sweep() {
        let phi = phi_t_q2_fixture();
        let fq = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let fixed = [place("t"), place("t+1"), place("t^2+t+1")];
        let mut done = 0;
        while done < 20 {
            let num = random_poly(&mut rng, &fq, 3);
            let den = random_poly(&mut rng, &fq, 3);
            if den.is_zero() {
                continue;
            }
            let j0 = RatF::new(num, den).unwrap();
            let mut places: Vec<PlaceF> = fixed.to_vec();
            if j0.den().deg() > 0 {
                for (p, _) in j0.den().factor_monic().unwrap() {
                    places.push(PlaceF::Finite(p));
                }
            }
            for v in &places {
                assert!(
                    check_local_identity(phi, &j0, v).unwrap(),
                    "local identity failed at {v} for j0 = {j0}"
                );
            }
            done += 1;
        }
    }

    #[test]
    fn height_sum_collapses_for_level_one() {
        // Phi_1 = X - Y: the Hecke sum is the plain height
        let fq = f2();
        let mut coeffs = std::collections::BTreeMap::new();
        coeffs.insert((1usize, 0usize), PolyA::one(&fq));
        coeffs.insert((0usize, 1usize), PolyA::one(&fq).neg());
        let phi1 = BivarPolyA {
            q: 2,
            n: PolyA::one(&fq),
            psi: 1,
            coeffs,
            places: Vec::new(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut done = 0;
        while done < 10 {
            let num = random_poly(&mut rng, &fq, 4);
            let den = random_poly(&mut rng, &fq, 4);
            if den.is_zero() {
                continue;
            }
            let j0 = RatF::new(num, den).unwrap();
            assert_eq!(
                hecke_height_sum(&phi1, &j0).unwrap(),
                weil_height(&j0).unwrap()
            );
            done += 1;
        }
    }

    #[test]
    fn constant_j0_contributes_only_at_infinity() {
        let phi = phi_t_q2_fixture();
        let j0 = rf("1");
        let spec = specialize_rational(phi, &j0);
        assert!(denominator_places(&spec).unwrap().is_empty());
        let terms = hecke_height_terms(phi, &j0).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(matches!(terms[0].0, PlaceF::Infinity));
        assert_eq!(
            hecke_height_sum(phi, &j0).unwrap(),
            gauss_lognorm(&spec, &PlaceF::Infinity).unwrap()
        );
    }

    #[test]
    fn term_breakdown_adds_up() {
        let phi = phi_t_q2_fixture();
        for s in ["1/t", "(t^2+1)/(t^3+t+1)", "t^5"] {
            let j0 = rf(s);
            let total = hecke_height_sum(phi, &j0).unwrap();
            let sum: Rat = hecke_height_terms(phi, &j0)
                .unwrap()
                .into_iter()
                .map(|(_, term)| term)
                .sum();
            assert_eq!(total, sum);
        }
    }

    #[test]
    fn gap_band_examples() {
        let phi = phi_t_q2_fixture();
        // small height
        let r1 = gap_band(phi, &rf("1/t")).unwrap();
        assert!(r1.pass, "gap {} outside [{}, {:?}]", r1.gap, r1.lower, r1.upper);
        assert!(r1.lower < r1.gap);
        // large height: the log term clamps the min at 0, upper = q exactly
        let r2 = gap_band(phi, &rf("t^40")).unwrap();
        assert!(r2.pass);
        assert_eq!(r2.h_j0, rat(40, 1));
        assert_eq!(r2.upper, (rat(2, 1), rat(2, 1)));
        // constant j0: h = 0, the min term goes negative and the enclosure
        // is a point because log_q(1) = 0
        let r3 = gap_band(phi, &rf("1")).unwrap();
        assert!(r3.pass, "gap {} outside [{}, {:?}]", r3.gap, r3.lower, r3.upper);
        assert_eq!(r3.upper.0, r3.upper.1);
        assert_eq!(r3.upper.0, rat(2, 1) + rat(3, 2) * (rat(2, 3) - rat(1, 1)));
    }

    #[test]
    fn power_comparison_and_bracket() {
        // 2^(3/2) <= 3 since 8 <= 9
        assert!(q_pow_le_rat(2, &rat(3, 2), &rat(3, 1)));
        assert!(!q_pow_le_rat(2, &rat(3, 2), &rat(14, 5)));
        // negative exponents
        assert!(q_pow_le_rat(2, &rat(-1, 2), &rat(3, 4)));
        assert!(!q_pow_le_rat(2, &rat(-1, 2), &rat(7, 10)));
        // brackets enclose and collapse on exact powers
        let (lo, hi) = log_q_bracket(2, &rat(3, 2), 64);
        assert!(lo < hi);
        assert!(q_pow_le_rat(2, &lo, &rat(3, 2)));
        assert!(!q_pow_le_rat(2, &hi, &rat(3, 2)) || lo == hi);
        let (lo, hi) = log_q_bracket(2, &rat(8, 1), 64);
        assert_eq!(lo, rat(3, 1));
        assert_eq!(hi, rat(3, 1));
        let (lo, hi) = log_q_bracket(3, &rat(1, 1), 64);
        assert_eq!((lo, hi), (rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn covolume_transport_identity() {
        let fq = f2();
        let field = ExtField::canonical(fq.clone(), 2).unwrap();
        let samples = ["w", "w*t", "pi+w*pi^2", "w*t^2+t", "pi+pi^3+w*pi^6"];
        let mut gammas = enumerate_cn(&PolyA::t(&fq)).unwrap();
        gammas.extend(enumerate_cn(&parse_poly(&fq, "t+1").unwrap()).unwrap());
        assert_eq!(gammas.len(), 6);
        for s in samples {
            let z = OmegaPoint::new(parse_puiseux(&field, s).unwrap()).unwrap();
            let target = z.default_target() + rat(24, 1);
            for g in &gammas {
                let (lhs, rhs) = covolume_transport(&z, g, &target).unwrap();
                assert_eq!(lhs, rhs, "covolume law failed for z = {s}");
            }
        }
    }

    #[test]
    fn scaling_degree_sum_matches_closed_form() {
        // per-level sum of log(|d|/|a|) over the quotient frames
        for (q, levels) in [(2u32, vec!["t", "t+1", "t^2+t+1"]), (3, vec!["t", "t+2"])] {
            let fq = Fq::from_q(q).unwrap();
            for s in levels {
                let n = parse_poly(&fq, s).unwrap();
                let mut total = Rat::zero();
                for g in enumerate_cn(&n).unwrap() {
                    total += rat(g.d.deg() - g.a.deg(), 1);
                }
                assert_eq!(total, arith::s_n_closed(&n).unwrap());
            }
        }
    }

    #[test]
    fn root_profile_examples() {
        // X - t: one root of magnitude q
        assert_eq!(infty_root_profile(&[1, 0]).unwrap(), vec![(rat(1, 1), 1)]);
        // X^2 + (deg 2) X: the zero root is omitted
        assert_eq!(
            infty_root_profile(&[NEG_INF, 2, 0]).unwrap(),
            vec![(rat(2, 1), 1)]
        );
        // interior point above the hull: one segment of slope 3/2
        assert_eq!(
            infty_root_profile(&[3, 1, 0]).unwrap(),
            vec![(rat(3, 2), 2)]
        );
        // interior point below the chord: two segments, slopes 2 then 1
        assert_eq!(
            infty_root_profile(&[3, 2, 0]).unwrap(),
            vec![(rat(2, 1), 1), (rat(1, 1), 1)]
        );
        // all roots inside the unit disc contribute no mass
        assert_eq!(infty_root_mass(&[-2, 0]).unwrap(), rat(0, 1));
        // fractional slope from a skipped middle coefficient
        assert_eq!(
            infty_root_profile(&[3, NEG_INF, 0]).unwrap(),
            vec![(rat(3, 2), 2)]
        );
        assert!(matches!(
            infty_root_profile(&[]),
            Err(Error::ZeroPolynomial)
        ));
        assert!(matches!(
            infty_root_profile(&[0, 1]),
            Err(Error::NotMonic(_))
        ));
    }

    fn coeff_degs(f: &[Vec<ExtElem>]) -> Vec<i64> {
        f.iter()
            .map(|c| if c.is_empty() { NEG_INF } else { c.len() as i64 - 1 })
            .collect()
    }

    #[test]
    fn split_recovers_known_roots() {
        // (X - t)(X - t - 1)(X - 1) over F_2[t]
        let fq = f2();
        let field = ExtField::canonical(fq.clone(), 1).unwrap();
        let l = &*field;
        let lift = |s: &str| -> Vec<ExtElem> {
            parse_poly(&fq, s)
                .unwrap()
                .coeffs()
                .iter()
                .map(|c| l.const_from(*c))
                .collect()
        };
        let roots_in: Vec<Vec<ExtElem>> = vec![lift("t"), lift("t+1"), lift("1")];
        let mut f: Vec<Vec<ExtElem>> = vec![vec![l.one()]];
        for r in &roots_in {
            // multiply by (X - r) = (X + r) in characteristic 2
            let mut next = vec![Vec::new(); f.len() + 1];
            for (i, c) in f.iter().enumerate() {
                next[i + 1] = polycore::add(l, &next[i + 1], c);
                next[i] = polycore::add(l, &next[i], &polycore::mul(l, c, r));
            }
            f = next;
        }
        let mut found = constant_field_split(&field, &f).unwrap().unwrap();
        let mut expect = roots_in.clone();
        found.sort();
        expect.sort();
        assert_eq!(found, expect);
        // mass agrees with the height of the product
        let mass = infty_root_mass(&coeff_degs(&f)).unwrap();
        assert_eq!(mass, rat(2, 1));
        let h = coeff_degs(&f).iter().copied().max().unwrap();
        assert_eq!(mass, rat(h, 1));
    }

    #[test]
    fn mahler_direction_on_specializations() {
        let phi = phi_t_q2_fixture();
        let fq = f2();
        for m in [1usize, 2] {
            let field = ExtField::canonical(fq.clone(), m).unwrap();
            for idx in 0..(1u64 << m) {
                let y0 = field.from_index(idx);
                let f = phi.specialize_y(&field, &y0);
                let degs = coeff_degs(&f);
                let h = crate::modpoly::specialized_height(phi, &field, &y0);
                assert_eq!(
                    infty_root_mass(&degs).unwrap(),
                    rat(h, 1),
                    "mass/height split at y index {idx} over degree {m}"
                );
                // when the roots happen to be polynomials, check them head-on
                if let Some(roots) = constant_field_split(&field, &f).unwrap() {
                    let direct: i64 = roots
                        .iter()
                        .map(|r| (r.len() as i64 - 1).max(0))
                        .sum();
                    assert_eq!(rat(direct, 1), rat(h, 1));
                }
            }
        }
    }
}
