//! Multiplicative arithmetic over A = F_q[t]: psi/phi/sigma, the lambda and
//! kappa sums, the canonical upper-triangular matrix set C_N, the degree sum
//! S_N (computed twice: enumeration and closed form), and the height band
//! endpoints it feeds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::PolyA;
use crate::ratfun::Mat2A;
use crate::{q_pow, Rat};

/// Upper-triangular (a b; 0 d) with ad = N, deg b < deg d, gcd(a,b,d) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CNMatrix {
    pub a: PolyA,
    pub b: PolyA,
    pub d: PolyA,
}

impl CNMatrix {
    pub fn to_mat(&self) -> Mat2A {
        Mat2A::new(
            self.a.clone(),
            self.b.clone(),
            PolyA::zero(self.a.fq()),
            self.d.clone(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct ArithProfile {
    pub n: PolyA,
    pub deg_n: i64,
    pub psi: BigInt,
    pub euler_phi: BigInt,
    pub sigma1: BigInt,
    pub lambda: Rat,
    pub kappa: Rat,
    pub s_n: Rat,
    /// monic divisor d -> e_d = gcd(d, N/d)
    pub ed_table: BTreeMap<PolyA, PolyA>,
    pub bq_upper: Rat,
}

fn require_monic(n: &PolyA) -> Result<()> {
    if !n.is_monic() {
        return Err(Error::NotMonic(n.to_string()));
    }
    Ok(())
}

/// All monic divisors of N, ascending in the polynomial order.
pub fn monic_divisors(n: &PolyA) -> Result<Vec<PolyA>> {
    require_monic(n)?;
    if n.is_one() {
        return Ok(vec![PolyA::one(n.fq())]);
    }
    let fac = n.factor_monic()?;
    let mut divs = vec![PolyA::one(n.fq())];
    for (p, mult) in &fac {
        let mut next = Vec::new();
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..*mult {
                cur = cur.mul(p);
                next.push(cur.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

pub fn psi(n: &PolyA) -> Result<BigInt> {
    require_monic(n)?;
    let q = n.fq().q;
    let mut out = BigInt::one();
    if n.is_one() {
        return Ok(out);
    }
    for (p, m) in n.factor_monic()? {
        let dp = p.deg() as u64;
        let m = m as u64;
        out *= q_pow(q, m * dp) + q_pow(q, (m - 1) * dp);
    }
    Ok(out)
}

pub fn euler_phi(n: &PolyA) -> Result<BigInt> {
    require_monic(n)?;
    let q = n.fq().q;
    let mut out = BigInt::one();
    if n.is_one() {
        return Ok(out);
    }
    for (p, m) in n.factor_monic()? {
        let dp = p.deg() as u64;
        let m = m as u64;
        out *= q_pow(q, m * dp) - q_pow(q, (m - 1) * dp);
    }
    Ok(out)
}

pub fn sigma1(n: &PolyA) -> Result<BigInt> {
    require_monic(n)?;
    let q = n.fq().q;
    let mut out = BigInt::one();
    if n.is_one() {
        return Ok(out);
    }
    for (p, m) in n.factor_monic()? {
        let dp = p.deg() as u64;
        let mut s = BigInt::from(0);
        for i in 0..=(m as u64) {
            s += q_pow(q, i * dp);
        }
        out *= s;
    }
    Ok(out)
}

/// lambda_N = sum over P^n || N of (|P|^n - 1) / (|P|^(n-1) (|P|^2 - 1)) * deg P.
pub fn lambda(n: &PolyA) -> Result<Rat> {
    require_monic(n)?;
    let q = n.fq().q;
    let mut out = Rat::from_integer(BigInt::from(0));
    if n.is_one() {
        return Ok(out);
    }
    for (p, m) in n.factor_monic()? {
        let dp = p.deg() as u64;
        let m = m as u64;
        let num = (q_pow(q, m * dp) - BigInt::one()) * BigInt::from(dp);
        let den = q_pow(q, (m - 1) * dp) * (q_pow(q, 2 * dp) - BigInt::one());
        out += Rat::new(num, den);
    }
    Ok(out)
}

/// kappa_N = sum over primes P | N of deg P / |P|.
pub fn kappa(n: &PolyA) -> Result<Rat> {
    require_monic(n)?;
    let q = n.fq().q;
    let mut out = Rat::from_integer(BigInt::from(0));
    if n.is_one() {
        return Ok(out);
    }
    for (p, _) in n.factor_monic()? {
        let dp = p.deg() as u64;
        out += Rat::new(BigInt::from(dp), q_pow(q, dp));
    }
    Ok(out)
}

/// The canonical matrix set: for each monic d | N, a = N/d, all b with
/// deg b < deg d and gcd(a,b,d) = 1. Ordered by (d, b).
pub fn enumerate_cn(n: &PolyA) -> Result<Vec<CNMatrix>> {
    require_monic(n)?;
    let fq = n.fq();
    let mut out = Vec::new();
    for d in monic_divisors(n)? {
        let a = n.divrem(&d)?.0;
        let e = a.gcd(&d);
        let bound = d.deg().max(0) as usize;
        for b in crate::poly::polys_below(fq, bound) {
            if e.gcd(&b).is_one() || (b.is_zero() && e.is_one()) {
                out.push(CNMatrix { a: a.clone(), b, d: d.clone() });
            }
        }
    }
    Ok(out)
}

/// Sum of log_q(|d|/|a|) over C_N, by direct enumeration.
pub fn s_n_enumerated(n: &PolyA) -> Result<Rat> {
    let mut s: i64 = 0;
    for m in enumerate_cn(n)? {
        s += m.d.deg() - m.a.deg();
    }
    Ok(Rat::from_integer(BigInt::from(s)))
}

/// Closed form psi(N) (deg N - 2 lambda_N).
pub fn s_n_closed(n: &PolyA) -> Result<Rat> {
    let deg = Rat::from_integer(BigInt::from(n.deg()));
    let two = Rat::from_integer(BigInt::from(2));
    Ok(Rat::from_integer(psi(n)?) * (deg - two * lambda(n)?))
}

/// The slack constant b_q of the height band: 4 + (2q^3 + q^2 - 2q + 1) / (q (q-1)^2).
pub fn bq_upper(q: u32) -> Rat {
    let q = BigInt::from(q);
    let num = BigInt::from(2) * &q * &q * &q + &q * &q - BigInt::from(2) * &q + BigInt::one();
    let den = &q * (&q - BigInt::one()) * (&q - BigInt::one());
    Rat::from_integer(BigInt::from(4)) + Rat::new(num, den)
}

/// Slightly smaller variant of the slack constant (numerator ends in -2q-1
/// instead of +1); exposed for comparison only.
pub fn bq_upper_variant(q: u32) -> Rat {
    let q = BigInt::from(q);
    let num = BigInt::from(2) * &q * &q * &q + &q * &q - BigInt::from(2) * &q - BigInt::one();
    let den = &q * (&q - BigInt::one()) * (&q - BigInt::one());
    Rat::from_integer(BigInt::from(4)) + Rat::new(num, den)
}

pub fn arith_profile(n: &PolyA) -> Result<ArithProfile> {
    require_monic(n)?;
    let q = n.fq().q;
    let s_enum = s_n_enumerated(n)?;
    let s_closed = s_n_closed(n)?;
    assert_eq!(s_enum, s_closed, "degree-sum identity failed for {n}");
    let mut ed_table = BTreeMap::new();
    for d in monic_divisors(n)? {
        let a = n.divrem(&d)?.0;
        ed_table.insert(d.clone(), d.gcd(&a));
    }
    Ok(ArithProfile {
        n: n.clone(),
        deg_n: n.deg(),
        psi: psi(n)?,
        euler_phi: euler_phi(n)?,
        sigma1: sigma1(n)?,
        lambda: lambda(n)?,
        kappa: kappa(n)?,
        s_n: s_enum,
        ed_table,
        bq_upper: bq_upper(q),
    })
}

/// Height band endpoints: lower = ((q^2-1)/2) psi (deg N - 2 lambda),
/// upper = lower + ((q^2-1)/2) psi bq_upper.
pub fn height_band(n: &PolyA) -> Result<(Rat, Rat)> {
    require_monic(n)?;
    let q = n.fq().q;
    let half_qsq = Rat::new(q_pow(q, 2) - BigInt::one(), BigInt::from(2));
    let psi_r = Rat::from_integer(psi(n)?);
    let lower = half_qsq.clone() * s_n_closed(n)?;
    let upper = lower.clone() + half_qsq * psi_r * bq_upper(q);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::parse::parse_poly;
    use std::sync::Arc;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn fq(q: u32) -> Arc<Fq> {
        Fq::from_q(q).unwrap()
    }

    #[test]
    fn cn_counts_match_psi() {
        let f2 = fq(2);
        let t = parse_poly(&f2, "t").unwrap();
        let cn = enumerate_cn(&t).unwrap();
        assert_eq!(cn.len(), 3);
        let shown: Vec<String> = cn
            .iter()
            .map(|m| format!("({},{},{})", m.a, m.b, m.d))
            .collect();
        assert!(shown.contains(&"(t,0,1)".to_string()));
        assert!(shown.contains(&"(1,0,t)".to_string()));
        assert!(shown.contains(&"(1,1,t)".to_string()));

        let t2 = parse_poly(&f2, "t^2").unwrap();
        assert_eq!(enumerate_cn(&t2).unwrap().len(), 6);

        let f3 = fq(3);
        let t3 = parse_poly(&f3, "t").unwrap();
        assert_eq!(enumerate_cn(&t3).unwrap().len(), 4);

        // counts equal psi for everything monic of low degree
        for q in [2u32, 3, 4] {
            let f = fq(q);
            for n in crate::poly::monic_polys(&f, 1)
                .into_iter()
                .chain(crate::poly::monic_polys(&f, 2))
            {
                let cn = enumerate_cn(&n).unwrap();
                assert_eq!(BigInt::from(cn.len()), psi(&n).unwrap(), "N = {n}");
                // invariants on each matrix
                for m in &cn {
                    assert!(m.a.is_monic() && m.d.is_monic());
                    assert_eq!(m.a.mul(&m.d), n);
                    assert!(m.b.deg() < m.d.deg());
                    assert!(m.a.gcd(&m.b).gcd(&m.d).is_one());
                }
            }
        }
    }

    #[test]
    fn profile_values() {
        let f2 = fq(2);
        let t = parse_poly(&f2, "t").unwrap();
        let pr = arith_profile(&t).unwrap();
        assert_eq!(pr.psi, BigInt::from(3));
        assert_eq!(pr.lambda, rat(1, 3));
        assert_eq!(pr.s_n, rat(1, 1));
        assert_eq!(pr.kappa, rat(1, 2));

        let t2 = parse_poly(&f2, "t^2").unwrap();
        let pr2 = arith_profile(&t2).unwrap();
        assert_eq!(pr2.psi, BigInt::from(6));
        assert_eq!(pr2.lambda, rat(1, 2));
        assert_eq!(pr2.s_n, rat(6, 1));

        let f3 = fq(3);
        let t3 = parse_poly(&f3, "t").unwrap();
        assert_eq!(arith_profile(&t3).unwrap().lambda, rat(1, 4));
    }

    #[test]
    fn band_values() {
        let f2 = fq(2);
        let t = parse_poly(&f2, "t").unwrap();
        let (lo, hi) = height_band(&t).unwrap();
        assert_eq!(lo, rat(3, 2));
        assert_eq!(hi, rat(231, 4));
        assert_eq!(bq_upper(2), rat(25, 2));
        assert_eq!(bq_upper(3), rat(53, 6));
        assert!(bq_upper_variant(2) < bq_upper(2));

        let f3 = fq(3);
        let t3 = parse_poly(&f3, "t").unwrap();
        let (lo3, _) = height_band(&t3).unwrap();
        assert_eq!(lo3, rat(8, 1));
    }

    #[test]
    fn multiplicativity() {
        let f2 = fq(2);
        let m = parse_poly(&f2, "t^2").unwrap();
        let n = parse_poly(&f2, "t+1").unwrap();
        let mn = m.mul(&n);
        let (pm, pn, pmn) = (psi(&m).unwrap(), psi(&n).unwrap(), psi(&mn).unwrap());
        assert_eq!(pmn, &pm * &pn);
        let (sm, sn, smn) = (
            s_n_enumerated(&m).unwrap(),
            s_n_enumerated(&n).unwrap(),
            s_n_enumerated(&mn).unwrap(),
        );
        assert_eq!(
            smn,
            Rat::from_integer(pn) * sm + Rat::from_integer(pm) * sn
        );
        assert_eq!(
            euler_phi(&mn).unwrap(),
            euler_phi(&m).unwrap() * euler_phi(&n).unwrap()
        );
        assert_eq!(sigma1(&mn).unwrap(), sigma1(&m).unwrap() * sigma1(&n).unwrap());
    }

    #[test]
    fn phi_counts_units() {
        // phi(N) equals the number of residues mod N coprime to N
        for q in [2u32, 3] {
            let f = fq(q);
            for deg in 1..=3usize {
                for n in crate::poly::monic_polys(&f, deg) {
                    let count = crate::poly::polys_below(&f, deg)
                        .into_iter()
                        .filter(|b| b.gcd(&n).is_one())
                        .count();
                    assert_eq!(BigInt::from(count), euler_phi(&n).unwrap(), "N = {n}");
                }
            }
        }
    }

    #[test]
    fn prime_power_closed_form() {
        // S_{P^r} = [|P|^{r-1}(|P|+1) r - 2(|P^r|-1)/(|P|-1)] deg P
        for q in [2u32, 3] {
            let f = fq(q);
            for p in crate::poly::irreducibles(&f, 1)
                .into_iter()
                .chain(crate::poly::irreducibles(&f, 2))
            {
                for r in 1..=3u32 {
                    if (p.deg() * r as i64) > 4 {
                        continue;
                    }
                    let n = p.pow(r);
                    let dp = p.deg() as u64;
                    let ap = q_pow(q, dp);
                    let closed = (q_pow(q, (r as u64 - 1) * dp) * (&ap + BigInt::one())
                        * BigInt::from(r))
                        - BigInt::from(2) * (q_pow(q, r as u64 * dp) - BigInt::one())
                            / (&ap - BigInt::one());
                    let closed = Rat::from_integer(closed * BigInt::from(dp));
                    assert_eq!(s_n_enumerated(&n).unwrap(), closed, "P = {p}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_monic() {
        let f3 = fq(3);
        let n = parse_poly(&f3, "2*t+1").unwrap();
        assert!(matches!(arith_profile(&n), Err(Error::NotMonic(_))));
    }
}
