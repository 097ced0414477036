//! Points of the upper half plane at infinity: certified membership (a
//! witness term that no element of F_inf can cancel), the imaginary
//! absolute value, Moebius action with the exact transformation identity,
//! reduction into the fundamental domain {|z| = |z|_i >= 1}, and rank-2
//! lattice profiles (successive minima, covolume, reducedness).

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ext::ExtField;
use crate::fq::FqElem;
use crate::poly::PolyA;
use crate::puiseux::Puiseux;
use crate::ratfun::{Mat2A, Mat2F, RatF};
use crate::Rat;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Smallest exponent whose term cannot be cancelled by subtracting an
/// element of F_inf: non-integral exponent, or coefficient outside F_q.
fn first_witness(z: &Puiseux) -> Option<Rat> {
    let (den, terms, _) = z.raw_parts();
    for (k, c) in terms {
        if k.rem_euclid(den) != 0 || !z.field().is_constant(&c) {
            return Some(rat(k, den));
        }
    }
    None
}

/// The greedy polynomial head: leading terms that are monomials of A
/// (integral exponent <= 0, coefficient in F_q), scanned from the leading
/// term down, stopping at the first term that is not such a monomial.
fn greedy_a_head(z: &Puiseux) -> PolyA {
    let fq = z.field().base.clone();
    let (den, terms, _) = z.raw_parts();
    let mut coeffs: Vec<(usize, FqElem)> = Vec::new();
    for (k, c) in terms {
        let integral = k.rem_euclid(den) == 0;
        if !(integral && k <= 0) {
            break;
        }
        match z.field().to_base(&c) {
            Some(cc) => coeffs.push(((-k / den) as usize, cc)),
            None => break,
        }
    }
    let mut v = Vec::new();
    for (deg, c) in coeffs {
        if v.len() <= deg {
            v.resize(deg + 1, fq.zero());
        }
        v[deg] = c;
    }
    PolyA::from_coeffs(&fq, v)
}

fn poly_to_puiseux(p: &PolyA, field: &Arc<ExtField>) -> Puiseux {
    Puiseux::from_ratf(&RatF::from_poly(p.clone()), field, &rat(0, 1))
}

/// Low/high exponent window of the visible terms (and precision marker).
fn exponent_window(z: &Puiseux) -> (Rat, Rat) {
    let (den, terms, prec) = z.raw_parts();
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for (k, _) in &terms {
        let e = rat(*k, den);
        if lo.as_ref().map_or(true, |l| e < *l) {
            lo = Some(e.clone());
        }
        if hi.as_ref().map_or(true, |h| e > *h) {
            hi = Some(e);
        }
    }
    if let Some(p) = prec {
        let e = rat(p, den);
        if lo.is_none() {
            lo = Some(e.clone());
        }
        if hi.as_ref().map_or(true, |h| e > *h) {
            hi = Some(e);
        }
    }
    let lo = lo.unwrap_or_else(|| rat(0, 1));
    let hi = hi.unwrap_or_else(|| rat(0, 1));
    (lo, hi)
}

/// A point certified to lie outside F_inf.
#[derive(Clone, Debug)]
pub struct OmegaPoint {
    z: Puiseux,
    witness_exp: Rat,
}

impl OmegaPoint {
    pub fn new(z: Puiseux) -> Result<OmegaPoint> {
        match first_witness(&z) {
            Some(witness_exp) => Ok(OmegaPoint { z, witness_exp }),
            None => {
                if z.is_exact() {
                    Err(Error::NotOmegaPoint("every term is an F_inf monomial".into()))
                } else {
                    Err(Error::PrecisionInsufficient(
                        "no term below the precision bound certifies the point outside F_inf"
                            .into(),
                    ))
                }
            }
        }
    }

    pub fn value(&self) -> &Puiseux {
        &self.z
    }

    pub fn field(&self) -> &Arc<ExtField> {
        self.z.field()
    }

    /// log_q |z|: negative of the leading exponent.
    pub fn log_abs(&self) -> Rat {
        -self.z.valuation_rat().expect("certified point has a leading term")
    }

    /// log_q |z|_i: negative of the first non-cancellable exponent.
    pub fn im_abs(&self) -> Rat {
        -self.witness_exp.clone()
    }

    /// Default working precision for Moebius images of this point.
    pub fn default_target(&self) -> Rat {
        let (lo, hi) = exponent_window(&self.z);
        let den = self.z.ram_den();
        hi - lo + rat(8, den)
    }

    /// Moebius action with the exact imaginary-part transformation law
    /// checked whenever both sides are certifiable.
    pub fn apply_gl2(&self, g: &Mat2F, target: &Rat) -> Result<OmegaPoint> {
        let det = g.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let out = OmegaPoint::new(self.z.moebius(g, target)?)?;
        // |gz|_i = |det| / |cz+d|^2 * |z|_i
        let den_series = Puiseux::from_ratf(&g.c, self.field(), target)
            .mul(&self.z)
            .add(&Puiseux::from_ratf(&g.d, self.field(), target));
        if let Some((v, _)) = den_series.leading() {
            let expected =
                rat(-det.v_inf(), 1) + rat(2, 1) * v + self.im_abs();
            assert_eq!(
                out.im_abs(),
                expected,
                "imaginary-part transformation law failed"
            );
        }
        Ok(out)
    }

    /// Gamma-reduction: returns (z_tilde, gamma) with z_tilde = gamma(z),
    /// |z_tilde| = |z_tilde|_i >= 1. Alternates greedy A-translation with
    /// inversion by (0 1; 1 0); iteration cap 4 (span + degree range).
    pub fn reduce_to_fundamental(&self) -> Result<(OmegaPoint, Mat2A)> {
        let fq = self.field().base.clone();
        let (lo, hi) = exponent_window(&self.z);
        let span = hi.clone() - lo.clone();
        let dr = {
            let la = if lo < rat(0, 1) { -lo.clone() } else { lo.clone() };
            let ha = if hi < rat(0, 1) { -hi.clone() } else { hi.clone() };
            if la > ha {
                la
            } else {
                ha
            }
        };
        let cap: i64 = (rat(4, 1) * (span.clone() + dr.clone()))
            .ceil()
            .to_integer()
            .try_into()
            .unwrap_or(i64::MAX / 2);
        let target = span + rat(2, 1) * dr + rat(8, 1);
        let swap = Mat2A::swap(&fq);
        let swap_f = swap.to_f();

        let mut z = self.z.clone();
        let mut gamma = Mat2A::identity(&fq);
        let mut iters: i64 = 0;
        let tilde = loop {
            let head = greedy_a_head(&z);
            if !head.is_zero() {
                z = z.sub(&poly_to_puiseux(&head, self.field()));
                gamma = Mat2A::translation(head.neg()).mul(&gamma);
            }
            let p = OmegaPoint::new(z.clone())?;
            let la = p.log_abs();
            if la >= rat(0, 1) && la == p.im_abs() {
                break p;
            }
            if iters >= cap {
                return Err(Error::IterationCapExceeded(format!(
                    "fundamental-domain reduction exceeded {cap} inversions"
                )));
            }
            // inverting a series of valuation v > 0 known to precision p
            // yields precision p - 2v, so clamp the request accordingly
            let step_target = match (z.prec_rat(), z.valuation_rat()) {
                (Some(pz), Some(v)) => {
                    let reach = pz - rat(2, 1) * v;
                    if reach < target { reach } else { target.clone() }
                }
                _ => target.clone(),
            };
            z = z.moebius(&swap_f, &step_target)?;
            gamma = swap.mul(&gamma);
            iters += 1;
        };
        // cross-check: gamma really maps z to the reduced point, compared a
        // few digits past its leading term (skipped only if the input's own
        // precision cannot certify even that much)
        let check_target = -tilde.log_abs() + rat(4, 1);
        match self.z.moebius(&gamma.to_f(), &check_target) {
            Ok(back) => {
                let diff = back.sub(&tilde.z);
                assert!(
                    diff.is_apparently_zero(),
                    "reduction witness does not reproduce the reduced point"
                );
            }
            Err(Error::PrecisionInsufficient(_)) => {}
            Err(e) => return Err(e),
        }
        Ok((tilde, gamma))
    }

    /// Successive minima of Lambda_z = A z + A via reduction: if
    /// z~ = gamma(z) is fundamental then (cz+d, az+b) realize the minima and
    /// the covolume is |z|_i.
    pub fn lattice_profile(&self) -> Result<LatticeProfile> {
        let (tilde, gamma) = self.reduce_to_fundamental()?;
        let field = self.field();
        let target = self.default_target() + rat(8, 1);
        let lift = |p: &PolyA| Puiseux::from_ratf(&RatF::from_poly(p.clone()), field, &target);
        let w1 = lift(&gamma.c).mul(&self.z).add(&lift(&gamma.d));
        let w2 = lift(&gamma.a).mul(&self.z).add(&lift(&gamma.b));
        let min1 = -w1
            .valuation_rat()
            .ok_or_else(|| Error::PrecisionInsufficient("first minimum not visible".into()))?;
        let min2 = min1.clone() + tilde.im_abs();
        // the second witness realizes min2
        let w2log = -w2
            .valuation_rat()
            .ok_or_else(|| Error::PrecisionInsufficient("second minimum not visible".into()))?;
        assert_eq!(w2log, min2, "second minimum witness has the wrong size");
        assert!(min1 <= min2);
        let covolume_log = self.im_abs();
        assert_eq!(covolume_log, min1.clone() + min2.clone());
        let reduced = min1 == rat(0, 1) && min2 >= rat(0, 1);
        assert_eq!(reduced, self.im_abs() >= rat(0, 1));
        Ok(LatticeProfile {
            min1,
            min2,
            covolume_log,
            reduced,
            witness_basis: (w1, w2),
        })
    }
}

#[derive(Clone, Debug)]
pub struct LatticeProfile {
    pub min1: Rat,
    pub min2: Rat,
    pub covolume_log: Rat,
    pub reduced: bool,
    pub witness_basis: (Puiseux, Puiseux),
}

// The five equivalent reducedness predicates, implemented as independently
// as practical so their agreement is a real check.

/// Lambda_z is reduced: first minimum 0 attained by 1, second >= 0.
pub fn pred_lattice_reduced(z: &OmegaPoint) -> Result<bool> {
    let p = z.lattice_profile()?;
    Ok(p.min1 == rat(0, 1) && p.min2 >= rat(0, 1))
}

/// |z|_i >= 1.
pub fn pred_im_ge_one(z: &OmegaPoint) -> bool {
    z.im_abs() >= rat(0, 1)
}

/// Some b in A translates z into the fundamental domain.
pub fn pred_translate_into_f(z: &OmegaPoint) -> Result<bool> {
    let head = greedy_a_head(z.value());
    let moved = z.value().sub(&poly_to_puiseux(&head, z.field()));
    let p = OmegaPoint::new(moved)?;
    Ok(p.log_abs() == p.im_abs() && p.log_abs() >= rat(0, 1))
}

/// Some z' in the fundamental domain spans the same lattice (z' = u z + b).
pub fn pred_lattice_rep_in_f(z: &OmegaPoint) -> Result<bool> {
    let fq = z.field().base.clone();
    for u in fq.elements().into_iter().skip(1) {
        let zu = z.value().scale(&z.field().const_from(u));
        let head = greedy_a_head(&zu);
        let moved = zu.sub(&poly_to_puiseux(&head, z.field()));
        let p = OmegaPoint::new(moved)?;
        if p.log_abs() == p.im_abs() && p.log_abs() >= rat(0, 1) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Reduction to the fundamental domain preserves |z|_i.
pub fn pred_reduction_preserves_im(z: &OmegaPoint) -> Result<bool> {
    let (tilde, _) = z.reduce_to_fundamental()?;
    Ok(tilde.im_abs() == z.im_abs())
}
