//! Farey fractions of bounded order over F_q[t], the disk decomposition of
//! the open unit ball they induce, exact ball counting, and the small
//! representative attached to an upper-triangular matrix.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{euler_phi, CNMatrix};
use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::omega::OmegaPoint;
use crate::poly::{monic_polys, polys_below, PolyA};
use crate::polycore::FieldCtx;
use crate::ratfun::{Mat2A, RatF, TailElement};
use crate::{q_pow, Rat};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// A fraction h/f with f monic, deg h < deg f, gcd(h,f) = 1. The zero
/// fraction is written 0/1; it is the only member with h = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareyFraction {
    h: PolyA,
    f: PolyA,
}

impl FareyFraction {
    pub fn new(h: PolyA, f: PolyA) -> Result<FareyFraction> {
        if !f.is_monic() {
            return Err(Error::NotMonic(f.to_string()));
        }
        if h.deg() >= f.deg() {
            return Err(Error::PreconditionViolated(format!(
                "numerator degree must drop: got {h} over {f}"
            )));
        }
        if h.is_zero() {
            if !f.is_one() {
                return Err(Error::PreconditionViolated(
                    "zero numerator only pairs with denominator 1".into(),
                ));
            }
        } else if !h.gcd(&f).is_one() {
            return Err(Error::PreconditionViolated(format!(
                "{h} and {f} share a factor"
            )));
        }
        Ok(FareyFraction { h, f })
    }

    pub fn h(&self) -> &PolyA {
        &self.h
    }

    pub fn f(&self) -> &PolyA {
        &self.f
    }

    pub fn value(&self) -> RatF {
        RatF::new(self.h.clone(), self.f.clone()).expect("monic denominator")
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// (deg f, f, h) so listings are deterministic
impl Ord for FareyFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f.cmp(&other.f).then_with(|| self.h.cmp(&other.h))
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &PolyA| {
            let s = p.to_string();
            if s.contains('+') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(out, "{}/{}", wrap(&self.h), wrap(&self.f))
    }
}

/// Closed ball around h/f of radius q^-(deg f + m + 1).
#[derive(Clone, Debug)]
pub struct FareyBall {
    pub center: FareyFraction,
    pub m: i64,
}

impl FareyBall {
    pub fn new(center: FareyFraction, m: i64) -> Result<FareyBall> {
        if m < 1 || center.f.deg() > m {
            return Err(Error::PreconditionViolated(format!(
                "order {m} ball needs 1 <= deg f <= m, got f = {}",
                center.f
            )));
        }
        Ok(FareyBall { center, m })
    }

    /// Members are exactly the zeta with v_inf(zeta - h/f) at least this.
    pub fn radius_valuation(&self) -> i64 {
        self.center.f.deg() + self.m + 1
    }

    pub fn contains(&self, zeta: &RatF) -> bool {
        zeta.sub(&self.center.value()).v_inf() >= self.radius_valuation()
    }
}

/// All Farey fractions of order m, sorted by (deg f, f, h).
pub fn enumerate_fm(fq: &Arc<Fq>, m: i64) -> Result<Vec<FareyFraction>> {
    if m < 1 {
        return Err(Error::PreconditionViolated(format!(
            "order must be at least 1, got {m}"
        )));
    }
    let mut out = vec![FareyFraction::new(PolyA::zero(fq), PolyA::one(fq))?];
    for df in 1..=m {
        for f in monic_polys(fq, df as usize) {
            for h in polys_below(fq, df as usize) {
                if h.is_zero() || !h.gcd(&f).is_one() {
                    continue;
                }
                out.push(FareyFraction { h, f: f.clone() });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The unique order-m ball containing zeta, via the continued-fraction
/// convergents of zeta: the ball radius is below 1/|f|^2, so its center must
/// be a convergent.
pub fn locate_ball(zeta: &RatF, m: i64) -> Result<FareyFraction> {
    if m < 1 {
        return Err(Error::PreconditionViolated(format!(
            "order must be at least 1, got {m}"
        )));
    }
    if zeta.v_inf() < 1 {
        return Err(Error::NotInUnitBall);
    }
    let fq = zeta.num().fq().clone();
    // h_k = a_k h_{k-1} + h_{k-2}, same for f; a_0 = 0 since |zeta| < 1
    let mut prev = (PolyA::one(&fq), PolyA::zero(&fq));
    let mut cur = (PolyA::zero(&fq), PolyA::one(&fq));
    let mut convergents = vec![cur.clone()];
    let mut a = zeta.den().clone();
    let mut b = zeta.num().clone();
    while !b.is_zero() {
        let (q, r) = a.divrem(&b)?;
        let next = (q.mul(&cur.0).add(&prev.0), q.mul(&cur.1).add(&prev.1));
        prev = cur;
        cur = next;
        convergents.push(cur.clone());
        a = b;
        b = r;
    }
    let mut found: Option<FareyFraction> = None;
    for (h, f) in convergents {
        if f.deg() > m {
            continue;
        }
        let lc_inv = fq.inv(&f.coeff(f.deg() as usize)).expect("nonzero leading coefficient");
        let cand = FareyFraction::new(h.scale(lc_inv), f.scale(lc_inv))?;
        if zeta.sub(&cand.value()).v_inf() >= cand.f.deg() + m + 1 {
            assert!(found.is_none(), "order-{m} balls are disjoint");
            found = Some(cand);
        }
    }
    Ok(found.expect("order-m balls cover the unit ball"))
}

pub fn locate_ball_tail(zeta: &TailElement, m: i64) -> Result<FareyFraction> {
    locate_ball(&zeta.to_ratf(), m)
}

/// Brute-force locate used as an independent cross-check: scans every ball.
pub fn locate_ball_scan(zeta: &RatF, m: i64) -> Result<FareyFraction> {
    if zeta.v_inf() < 1 {
        return Err(Error::NotInUnitBall);
    }
    let fq = zeta.num().fq().clone();
    let mut found: Option<FareyFraction> = None;
    for c in enumerate_fm(&fq, m)? {
        if FareyBall::new(c.clone(), m)?.contains(zeta) {
            assert!(found.is_none(), "order-{m} balls are disjoint");
            found = Some(c);
        }
    }
    Ok(found.expect("order-m balls cover the unit ball"))
}

fn check_count_inputs(d: &PolyA, e_d: &PolyA, ball: &FareyBall) -> Result<i64> {
    if !d.is_monic() {
        return Err(Error::NotMonic(d.to_string()));
    }
    if !e_d.is_monic() {
        return Err(Error::NotMonic(e_d.to_string()));
    }
    let (_, r) = d.divrem(e_d)?;
    if !r.is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "{e_d} does not divide {d}"
        )));
    }
    let ex = d.deg() - e_d.deg() - ball.center.f.deg() - ball.m;
    if ex < 0 {
        return Err(Error::PreconditionViolated(format!(
            "count formula |d|/(|e||f|q^m) would be q^{ex} < 1"
        )));
    }
    Ok(ex)
}

/// Number of b with deg b < deg d, b = r (mod e_d), b/d in the ball:
/// exactly |d| / (|e_d| |f| q^m). With `check` set the count is also
/// enumerated directly and compared.
pub fn count_in_ball(
    d: &PolyA,
    e_d: &PolyA,
    r: &PolyA,
    ball: &FareyBall,
    check: bool,
) -> Result<BigInt> {
    let ex = check_count_inputs(d, e_d, ball)?;
    let fq = d.fq().clone();
    let count = q_pow(fq.q, ex as u64);
    if check {
        let r0 = r.rem_by(e_d)?;
        let mut seen = BigInt::from(0);
        for u in polys_below(&fq, (d.deg() - e_d.deg()) as usize) {
            let b = r0.add(&u.mul(e_d));
            if ball.contains(&RatF::new(b, d.clone())?) {
                seen += 1;
            }
        }
        assert_eq!(seen, count, "ball count formula mismatch");
    }
    Ok(count)
}

/// Variant counting only b coprime to e_d: phi(e_d) residue classes, each
/// contributing the same formula count.
pub fn count_in_ball_coprime(
    d: &PolyA,
    e_d: &PolyA,
    ball: &FareyBall,
    check: bool,
) -> Result<BigInt> {
    let ex = check_count_inputs(d, e_d, ball)?;
    let fq = d.fq().clone();
    let count = euler_phi(e_d)? * q_pow(fq.q, ex as u64);
    if check {
        let mut seen = BigInt::from(0);
        for b in polys_below(&fq, d.deg() as usize) {
            let coprime = if b.is_zero() {
                e_d.is_one()
            } else {
                b.gcd(e_d).is_one()
            };
            if coprime && ball.contains(&RatF::new(b, d.clone())?) {
                seen += 1;
            }
        }
        assert_eq!(seen, count, "coprime ball count formula mismatch");
    }
    Ok(count)
}

/// Small representative of gamma(z) for z in the fundamental domain and
/// gamma = (a b; 0 d) with |d|^2 > |det| |z|_i. Locates b/d in a Farey ball
/// of order M = ceil(deg d - (deg det + log|z|_i)/2), completes its center
/// h/f to delta = (alpha beta; f -h) with unit determinant, and returns
/// (delta(gamma(z)), delta, M). The output always satisfies
/// |zhat|_i >= q^-2 and log|zhat|_i <= 2 deg d - deg det - log|z|_i - 2 deg f.
pub fn farey_representative(
    z: &OmegaPoint,
    gamma: &CNMatrix,
) -> Result<(OmegaPoint, Mat2A, i64)> {
    let im = z.im_abs();
    if z.log_abs() != im || im < rat(0, 1) {
        return Err(Error::PreconditionViolated(
            "input must lie in the fundamental domain: |z| = |z|_i >= 1".into(),
        ));
    }
    let n = gamma.a.mul(&gamma.d);
    let gap = rat(2 * gamma.d.deg() - n.deg(), 1) - im.clone();
    if gap <= rat(0, 1) {
        return Err(Error::SmallD(format!(
            "need |d|^2 > |det| |z|_i, got deg d = {} against deg det = {} and log|z|_i = {im}",
            gamma.d.deg(),
            n.deg()
        )));
    }
    let m = (gap / rat(2, 1))
        .ceil()
        .to_integer()
        .to_i64()
        .expect("ball order fits in i64");
    let zeta = RatF::new(gamma.b.clone(), gamma.d.clone())?;
    let center = locate_ball(&zeta, m)?;
    let (h, f) = (center.h().clone(), center.f().clone());
    let df = f.deg();
    let (g, alpha, beta) = h.xgcd(&f)?;
    assert!(g.is_one());
    let delta = Mat2A::new(alpha, beta, f, h.neg());
    debug_assert!(delta.is_unimodular());
    let combined = delta.mul(&gamma.to_mat());
    let target = z.default_target() + rat(2 * (n.deg() + gamma.d.deg()) + 8, 1);
    let zhat = z.apply_gl2(&combined.to_f(), &target)?;
    let hat_im = zhat.im_abs();
    assert!(hat_im >= rat(-2, 1), "representative dropped below q^-2");
    let bound = rat(2 * gamma.d.deg() - n.deg() - 2 * df, 1) - im;
    assert!(hat_im <= bound, "representative exceeds its size bound");
    Ok((zhat, delta, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtField;
    use crate::parse::parse_poly;
    use crate::puiseux::Puiseux;

    fn f2() -> Arc<Fq> {
        Fq::new(2, 1).unwrap()
    }

    fn f3() -> Arc<Fq> {
        Fq::new(3, 1).unwrap()
    }

    fn p(fq: &Arc<Fq>, s: &str) -> PolyA {
        parse_poly(fq, s).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let fm = enumerate_fm(&f2(), 1).unwrap();
        let shown: Vec<String> = fm.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["0/1", "1/t", "1/(t+1)"]);

        // order 2 over F_2: 1 + 2 + sum of unit counts over monic quadratics
        let fm2 = enumerate_fm(&f2(), 2).unwrap();
        assert_eq!(fm2.len(), 11);
        for w in fm2.windows(2) {
            assert!(w[0] < w[1]);
        }

        let fm3 = enumerate_fm(&f3(), 1).unwrap();
        assert_eq!(fm3.len(), 7);
        assert_eq!(fm3[0].to_string(), "0/1");
        assert_eq!(fm3[1].to_string(), "1/t");
        assert_eq!(fm3[2].to_string(), "2/t");
        assert_eq!(fm3[6].to_string(), "2/(t+2)");
    }

    #[test]
    fn locate_examples() {
        let fq = f2();
        let zero = RatF::from_poly(PolyA::zero(&fq));
        assert_eq!(locate_ball(&zero, 1).unwrap().to_string(), "0/1");
        assert_eq!(locate_ball(&zero, 3).unwrap().to_string(), "0/1");

        // 1/t + 1/t^3 stays in the ball around 1/t
        let z1 = RatF::new(p(&fq, "t^2+1"), p(&fq, "t^3")).unwrap();
        assert_eq!(locate_ball(&z1, 1).unwrap().to_string(), "1/t");

        // 1/t + 1/t^2 = (t+1)/t^2 matches the expansion of 1/(t+1)
        let z2 = RatF::new(p(&fq, "t+1"), p(&fq, "t^2")).unwrap();
        assert_eq!(locate_ball(&z2, 1).unwrap().to_string(), "1/(t+1)");

        let big = RatF::new(p(&fq, "t+1"), p(&fq, "t")).unwrap();
        assert!(matches!(locate_ball(&big, 1), Err(Error::NotInUnitBall)));
        assert!(matches!(
            locate_ball(&RatF::from_poly(PolyA::one(&fq)), 2),
            Err(Error::NotInUnitBall)
        ));
    }

    #[test]
    fn locate_agrees_with_scan() {
        for fq in [f2(), f3()] {
            for m in 1..=2 {
                for dd in 1..=(m + 2) {
                    for d in monic_polys(&fq, dd as usize) {
                        for b in polys_below(&fq, dd as usize) {
                            let zeta = RatF::new(b, d.clone()).unwrap();
                            let fast = locate_ball(&zeta, m).unwrap();
                            let slow = locate_ball_scan(&zeta, m).unwrap();
                            assert_eq!(fast, slow);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn balls_are_pairwise_disjoint() {
        for fq in [f2(), f3()] {
            for m in 1..=2 {
                let fm = enumerate_fm(&fq, m).unwrap();
                for i in 0..fm.len() {
                    for j in (i + 1)..fm.len() {
                        let bi = FareyBall::new(fm[i].clone(), m).unwrap();
                        let bj = FareyBall::new(fm[j].clone(), m).unwrap();
                        let sep = fm[i].value().sub(&fm[j].value()).v_inf();
                        // closed ultrametric balls meet iff the centers are
                        // within the larger radius
                        assert!(
                            sep < bi.radius_valuation().min(bj.radius_valuation()),
                            "{} and {} overlap at order {m}",
                            fm[i],
                            fm[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn count_examples() {
        let fq = f2();
        let d1 = FareyBall::new(
            FareyFraction::new(PolyA::one(&fq), p(&fq, "t")).unwrap(),
            1,
        )
        .unwrap();
        let one = PolyA::one(&fq);
        let zero = PolyA::zero(&fq);
        let c = count_in_ball(&p(&fq, "t^2"), &one, &zero, &d1, true).unwrap();
        assert_eq!(c, BigInt::from(1));
        let c = count_in_ball(&p(&fq, "t^3"), &one, &zero, &d1, true).unwrap();
        assert_eq!(c, BigInt::from(2));
        assert!(matches!(
            count_in_ball(&p(&fq, "t"), &one, &zero, &d1, true),
            Err(Error::PreconditionViolated(_))
        ));

        let c = count_in_ball_coprime(&p(&fq, "t^3"), &p(&fq, "t"), &d1, true).unwrap();
        assert_eq!(c, BigInt::from(1));
    }

    #[test]
    fn count_formula_exhaustive_small() {
        for fq in [f2(), f3()] {
            for m in 1..=2 {
                let fm = enumerate_fm(&fq, m).unwrap();
                for dd in 1..=(m + 2) {
                    for d in monic_polys(&fq, dd as usize) {
                        for e in monic_polys(&fq, 1).into_iter().chain([PolyA::one(&fq)]) {
                            if !d.rem_by(&e).unwrap().is_zero() {
                                continue;
                            }
                            for center in &fm {
                                let ball = FareyBall::new(center.clone(), m).unwrap();
                                if d.deg() - e.deg() - center.f().deg() - m < 0 {
                                    continue;
                                }
                                for r in polys_below(&fq, e.deg() as usize) {
                                    // check mode asserts formula == enumeration
                                    count_in_ball(&d, &e, &r, &ball, true).unwrap();
                                }
                                count_in_ball_coprime(&d, &e, &ball, true).unwrap();
                            }
                        }
                    }
                }
            }
        }
    }

    fn omega_w() -> OmegaPoint {
        let ext = ExtField::canonical(f2(), 2).unwrap();
        let w = Puiseux::monomial(ext.clone(), ext.gen(), 0, 1);
        OmegaPoint::new(w).unwrap()
    }

    #[test]
    fn representative_worked_example() {
        let fq = f2();
        let z = omega_w();
        let gamma = CNMatrix {
            a: PolyA::one(&fq),
            b: p(&fq, "t^2"),
            d: p(&fq, "t^3"),
        };
        let (zhat, delta, m) = farey_representative(&z, &gamma).unwrap();
        assert_eq!(m, 2);
        // b/d = 1/t, so delta completes h/f = 1/t
        assert_eq!(delta.c, p(&fq, "t"));
        assert_eq!(delta.d, PolyA::one(&fq));
        assert!(delta.is_unimodular());
        assert_eq!(zhat.im_abs(), rat(1, 1));

        let low = CNMatrix {
            a: p(&fq, "t^3"),
            b: PolyA::zero(&fq),
            d: PolyA::one(&fq),
        };
        assert!(matches!(
            farey_representative(&z, &low),
            Err(Error::SmallD(_))
        ));
    }

    #[test]
    fn representative_bridges_to_reduction() {
        let fq = f2();
        let z = omega_w();
        for gamma in crate::arith::enumerate_cn(&p(&fq, "t^3")).unwrap() {
            if rat(2 * gamma.d.deg() - 3, 1) <= rat(0, 1) {
                continue;
            }
            let (zhat, _, _) = farey_representative(&z, &gamma).unwrap();
            let target = z.default_target() + rat(20, 1);
            let gz = z.apply_gl2(&gamma.to_mat().to_f(), &target).unwrap();
            let (tilde, _) = gz.reduce_to_fundamental().unwrap();
            // the reduced point can exceed the representative by at most q^4
            assert!(tilde.im_abs() <= rat(4, 1) + zhat.im_abs());
        }
    }
}
