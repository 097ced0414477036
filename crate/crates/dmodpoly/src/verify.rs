//! Self-check suites: each one exercises a module against exactly-known
//! answers and identities, reporting cases, failures, and runtime in a
//! machine-readable form. Sampling is fully determined by the seed.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith;
use crate::btree;
use crate::cache;
use crate::error::{Error, Result};
use crate::ext::ExtField;
use crate::farey;
use crate::fq::Fq;
use crate::heights;
use crate::modpoly::{self, BivarPolyA};
use crate::omega::OmegaPoint;
use crate::parse::{parse_poly, parse_puiseux};
use crate::poly::{monic_polys, PolyA};
use crate::ratfun::{Mat2A, RatF, TailElement};
use crate::Rat;

pub const SUITES: [&str; 6] = ["arith", "farey", "btree", "omega", "modpoly", "heights"];

/// Everything a suite run depends on; the same config always reproduces the
/// same sampled inputs and the same verdicts.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub q: u32,
    pub seed: u64,
    /// Reuse cached tables from here when present; never required.
    pub cache_dir: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            q: 2,
            seed: 7,
            cache_dir: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub runtime_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "cases": self.cases,
            "failures": self.failures,
            "runtime_ms": self.runtime_ms,
        })
    }
}

struct Checker {
    cases: usize,
    failures: Vec<String>,
}

impl Checker {
    fn new() -> Checker {
        Checker {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self, name: &str, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    /// A case that may error out; errors fail the case with the message.
    fn case_res(&mut self, name: &str, r: Result<bool>) {
        match r {
            Ok(ok) => self.case(name, ok),
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{name}: {e}"));
            }
        }
    }

    fn finish(self, suite: &str, start: Instant) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            cases: self.cases,
            failures: self.failures,
            runtime_ms: start.elapsed().as_millis(),
        }
    }
}

/// Run one named suite, or all of them in canonical order for "all".
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    match name {
        "all" => SUITES.iter().map(|s| run_one(s, cfg)).collect(),
        _ => Ok(vec![run_one(name, cfg)?]),
    }
}

fn run_one(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let fq = Fq::from_q(cfg.q)?;
    match name {
        "arith" => Ok(suite_arith(&fq, cfg)),
        "farey" => Ok(suite_farey(&fq, cfg)),
        "btree" => Ok(suite_btree(&fq, cfg)),
        "omega" => Ok(suite_omega(&fq, cfg)),
        "modpoly" => Ok(suite_modpoly(&fq, cfg)),
        "heights" => Ok(suite_heights(&fq, cfg)),
        other => Err(Error::SuiteUnknown(other.to_string())),
    }
}

fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn random_poly(rng: &mut ChaCha8Rng, fq: &Arc<Fq>, max_deg: usize) -> PolyA {
    let d = rng.gen_range(0..=max_deg);
    let c: Vec<i64> = (0..=d).map(|_| rng.gen_range(0..fq.q as i64)).collect();
    PolyA::from_ints(fq, &c)
}

fn random_monic(rng: &mut ChaCha8Rng, fq: &Arc<Fq>, deg: usize) -> PolyA {
    let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(0..fq.q as i64)).collect();
    c.push(1);
    PolyA::from_ints(fq, &c)
}

fn suite_arith(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    // the degree-sum identity on every monic level of degree <= 3
    for d in 1..=3usize {
        for n in monic_polys(fq, d) {
            let name = format!("degree-sum {n}");
            ck.case_res(
                &name,
                (|| Ok(arith::s_n_enumerated(&n)? == arith::s_n_closed(&n)?))(),
            );
        }
    }
    // psi counts the frames
    for d in 1..=2usize {
        for n in monic_polys(fq, d) {
            let name = format!("frame count {n}");
            ck.case_res(
                &name,
                (|| {
                    Ok(BigInt::from(arith::enumerate_cn(&n)?.len()) == arith::psi(&n)?)
                })(),
            );
        }
    }
    // multiplicativity of the degree sum on seeded coprime pairs
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa1);
    let mut done = 0;
    while done < 10 {
        let dm = rng.gen_range(1..=2);
        let dn = rng.gen_range(1..=2);
        let m = random_monic(&mut rng, fq, dm);
        let n = random_monic(&mut rng, fq, dn);
        if !m.coprime(&n) {
            continue;
        }
        done += 1;
        let name = format!("multiplicativity ({m}, {n})");
        ck.case_res(
            &name,
            (|| {
                let lhs = arith::s_n_closed(&m.mul(&n))?;
                let rhs = Rat::from_integer(arith::psi(&n)?) * arith::s_n_closed(&m)?
                    + Rat::from_integer(arith::psi(&m)?) * arith::s_n_closed(&n)?;
                Ok(lhs == rhs)
            })(),
        );
    }
    // band endpoints are ordered and the slack constant is positive
    ck.case("slack constant positive", arith::bq_upper(fq.q) > Rat::zero());
    ck.case_res(
        "band ordered for t",
        (|| {
            let (lo, hi) = arith::height_band(&PolyA::t(fq))?;
            Ok(lo < hi)
        })(),
    );
    ck.finish("arith", start)
}

fn suite_farey(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    // exhaustive partition of sampled points for small M
    for m in 1..=2i64 {
        let name = format!("partition M={m}");
        ck.case_res(
            &name,
            (|| {
                let balls = farey::enumerate_fm(fq, m)?;
                // every b/d with deg d <= m+2 lands in exactly one ball
                for d in monic_polys(fq, (m + 2) as usize) {
                    for b in crate::poly::polys_below(fq, d.deg() as usize) {
                        if b.is_zero() || !b.coprime(&d) {
                            continue;
                        }
                        let zeta = RatF::new(b, d.clone())?;
                        let mut hits = 0;
                        for f in &balls {
                            let ball = farey::FareyBall::new(f.clone(), m)?;
                            if ball.contains(&zeta) {
                                hits += 1;
                            }
                        }
                        if hits != 1 {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            })(),
        );
    }
    // locate_ball agrees with the scanning fallback on seeded samples
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xfa);
    let mut done = 0;
    while done < 20 {
        let dd = rng.gen_range(1..=4);
        let d = random_monic(&mut rng, fq, dd);
        let b = random_poly(&mut rng, fq, d.deg() as usize - 1);
        if b.is_zero() || !b.coprime(&d) {
            continue;
        }
        done += 1;
        let m = rng.gen_range(1..=3i64);
        let zeta = RatF::new(b, d).expect("nonzero denominator");
        let name = format!("locate {zeta} M={m}");
        ck.case_res(
            &name,
            (|| Ok(farey::locate_ball(&zeta, m)? == farey::locate_ball_scan(&zeta, m)?))(),
        );
    }
    ck.finish("farey", start)
}

fn suite_btree(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    let _ = cfg;
    // reduction witnesses on a small vertex grid
    for k in -2..=3i64 {
        for u_poly in crate::poly::polys_below(fq, 2) {
            let tails: Vec<Vec<(i64, u32)>> = vec![vec![], vec![(1, 1)], vec![(2, 1)]];
            for tail in tails {
                let pairs: Vec<(i64, crate::fq::FqElem)> = tail
                    .iter()
                    .filter(|(j, _)| *j < k)
                    .map(|&(j, c)| (j, crate::fq::FqElem(c)))
                    .collect();
                let u = TailElement::new(u_poly.clone(), pairs);
                let v = match btree::TreeVertex::new(k, u) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let name = format!("reduce {v}");
                ck.case_res(
                    &name,
                    (|| {
                        let w = btree::reduce_vertex(&v)?;
                        if !w.verify(&v)? {
                            return Ok(false);
                        }
                        let (exact, lower) = btree::expected_spine_level(&v);
                        match exact {
                            Some(e) => Ok(w.k_prime == e),
                            None => Ok(w.k_prime >= lower),
                        }
                    })(),
                );
            }
        }
    }
    // a translate of a spine vertex reduces back to the same level
    ck.case_res(
        "translate reduces to the same level",
        (|| {
            let v0 = btree::TreeVertex::new(0, TailElement::zero(fq))?;
            let g = Mat2A::translation(PolyA::t(fq));
            let shifted = btree::vertex_translate(&g, &v0)?;
            let w = btree::reduce_vertex(&shifted)?;
            Ok(w.verify(&shifted)? && w.k_prime == 0)
        })(),
    );
    ck.finish("btree", start)
}

fn suite_omega(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    let _ = cfg;
    let field = match ExtField::canonical(fq.clone(), 2) {
        Ok(f) => f,
        Err(e) => {
            let mut c = Checker::new();
            c.cases = 1;
            c.failures.push(format!("field construction: {e}"));
            return c.finish("omega", start);
        }
    };
    let pts = ["w", "w*t", "w*t^2+t", "pi+w*pi^2", "pi+pi^3+w*pi^6"];
    for s in pts {
        let name = format!("reduce {s}");
        ck.case_res(
            &name,
            (|| {
                let z = OmegaPoint::new(parse_puiseux(&field, s)?)?;
                let (zt, gamma) = z.reduce_to_fundamental()?;
                // the reduced point is in the fundamental domain and the
                // witness really moves z onto it
                if zt.im_abs() != zt.log_abs() || zt.im_abs() < Rat::zero() {
                    return Ok(false);
                }
                if !gamma.to_f().det().is_zero() {
                    let moved = z.apply_gl2(&gamma.to_f(), &(z.default_target() + rat_i(16)))?;
                    return Ok(moved.im_abs() == zt.im_abs());
                }
                Ok(false)
            })(),
        );
    }
    // the reference lattice profile: both minima at q^-3, not reduced
    ck.case_res(
        "lattice profile reference point",
        (|| {
            let z = OmegaPoint::new(parse_puiseux(&field, "pi+pi^3+w*pi^6")?)?;
            let profile = z.lattice_profile()?;
            Ok(profile.covolume_log == rat_i(-6)
                && z.im_abs() == rat_i(-6)
                && !profile.reduced)
        })(),
    );
    ck.finish("omega", start)
}

/// Strict cache use: an existing table must load and validate, so a
/// corrupted file surfaces as a named failing case instead of being
/// recomputed away.
fn load_phi_for(cfg: &VerifyConfig, n: &PolyA) -> Result<BivarPolyA> {
    match &cfg.cache_dir {
        Some(dir) => {
            if cache::phi_path(dir, n.fq().q, n).exists() {
                cache::load_phi(dir, n.fq().q, n)
            } else {
                let phi = modpoly::crt_phi(n)?;
                let _ = cache::store_phi(dir, &phi);
                Ok(phi)
            }
        }
        None => modpoly::crt_phi(n),
    }
}

fn suite_modpoly(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    let n = PolyA::t(fq);
    let phi = match load_phi_for(cfg, &n) {
        Ok(p) => p,
        Err(e) => {
            ck.cases += 1;
            ck.failures.push(format!("build phi_t: {e}"));
            return ck.finish("modpoly", start);
        }
    };
    ck.case("monic and symmetric", phi.validate().is_ok());
    ck.case(
        "x-degree equals psi",
        phi.deg_x() == phi.psi && phi.deg_y() == phi.psi,
    );
    ck.case_res(
        "height inside the band",
        (|| {
            let report = modpoly::band_report(&phi)?;
            Ok(report.pass)
        })(),
    );
    ck.case_res(
        "implied slack nonnegative",
        (|| Ok(modpoly::band_report(&phi)?.implied_b >= Rat::zero()))(),
    );
    ck.case_res(
        "root relation on fresh primes",
        (|| Ok(modpoly::verify_root_relation(&phi, 5, cfg.seed)? == 5))(),
    );
    ck.case_res(
        "specialization height witness",
        (|| {
            let w = modpoly::specialization_height_witness(&phi)?;
            Ok(w.height == phi.height())
        })(),
    );
    ck.finish("modpoly", start)
}

fn suite_heights(fq: &Arc<Fq>, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut ck = Checker::new();
    // height degree formula on seeded rational functions
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x8e);
    let mut done = 0;
    while done < 25 {
        let num = random_poly(&mut rng, fq, 5);
        let den = random_poly(&mut rng, fq, 5);
        if den.is_zero() {
            continue;
        }
        done += 1;
        let x = RatF::new(num, den).expect("nonzero denominator");
        let name = format!("weil height {x}");
        ck.case_res(
            &name,
            (|| {
                let h = heights::weil_height(&x)?;
                Ok(h == rat_i(x.num().deg().max(x.den().deg()).max(0)))
            })(),
        );
    }
    // covolume transport across the level-t frames
    let field = match ExtField::canonical(fq.clone(), 2) {
        Ok(f) => f,
        Err(e) => {
            ck.cases += 1;
            ck.failures.push(format!("field construction: {e}"));
            return ck.finish("heights", start);
        }
    };
    let gammas = match arith::enumerate_cn(&PolyA::t(fq)) {
        Ok(g) => g,
        Err(e) => {
            ck.cases += 1;
            ck.failures.push(format!("frames: {e}"));
            return ck.finish("heights", start);
        }
    };
    for s in ["w", "w*t", "pi+w*pi^2"] {
        for g in &gammas {
            let name = format!("covolume transport {s} by ({},{};0,{})", g.a, g.b, g.d);
            ck.case_res(
                &name,
                (|| {
                    let z = OmegaPoint::new(parse_puiseux(&field, s)?)?;
                    let target = z.default_target() + rat_i(24);
                    let (lhs, rhs) = heights::covolume_transport(&z, g, &target)?;
                    Ok(lhs == rhs)
                })(),
            );
        }
    }
    // local identity and the gap band against the computed level-t table
    let n = PolyA::t(fq);
    match load_phi_for(cfg, &n) {
        Err(e) => {
            ck.cases += 1;
            ck.failures.push(format!("build phi_t: {e}"));
        }
        Ok(phi) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x11e);
            let mut done = 0;
            while done < 5 {
                let num = random_poly(&mut rng, fq, 3);
                let den = random_poly(&mut rng, fq, 3);
                if den.is_zero() {
                    continue;
                }
                done += 1;
                let j0 = RatF::new(num, den).expect("nonzero denominator");
                let name = format!("local identity j0 = {j0}");
                ck.case_res(
                    &name,
                    (|| {
                        let mut places = vec![
                            parse_poly(fq, "t")?,
                            PolyA::t(fq).add(&PolyA::one(fq)),
                        ];
                        if j0.den().deg() > 0 {
                            for (p, _) in j0.den().factor_monic()? {
                                places.push(p);
                            }
                        }
                        for p in places {
                            let v = heights::PlaceF::finite(&p)?;
                            if !heights::check_local_identity(&phi, &j0, &v)? {
                                return Ok(false);
                            }
                        }
                        Ok(true)
                    })(),
                );
                let j1 = j0.clone();
                let name = format!("gap band j0 = {j1}");
                ck.case_res(&name, (|| Ok(heights::gap_band(&phi, &j1)?.pass))());
            }
        }
    }
    ck.finish("heights", start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = VerifyConfig::default();
        assert!(matches!(
            run_suite("nope", &cfg),
            Err(Error::SuiteUnknown(_))
        ));
    }

    #[test]
    fn light_suites_run_clean() {
        let cfg = VerifyConfig::default();
        for name in ["arith", "farey", "btree", "omega"] {
            let reports = run_suite(name, &cfg).unwrap();
            assert_eq!(reports.len(), 1);
            let r = &reports[0];
            assert!(r.cases > 0);
            assert!(
                r.passed(),
                "suite {name} failed: {:?}",
                r.failures
            );
        }
    }

    #[test]
    fn heavy_suites_run_clean() {
        let cfg = VerifyConfig::default();
        for name in ["modpoly", "heights"] {
            let r = &run_suite(name, &cfg).unwrap()[0];
            assert!(r.passed(), "suite {name} failed: {:?}", r.failures);
        }
    }

    #[test]
    fn q3_arith_suite_runs_clean() {
        let cfg = VerifyConfig {
            q: 3,
            ..VerifyConfig::default()
        };
        let r = &run_suite("arith", &cfg).unwrap()[0];
        assert!(r.passed(), "failures: {:?}", r.failures);
    }
}
