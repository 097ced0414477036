//! Arithmetic functions of a level N in F_q[t]: psi (frame count), the
//! polynomial Euler phi, sigma, the ratios lambda and kappa, and the
//! degree-weighted frame sum S_N with its closed form.

use dmodpoly::arith::{arith_profile, enumerate_cn, s_n_closed, s_n_enumerated};
use dmodpoly::fq::Fq;
use dmodpoly::parse::parse_poly;

fn main() {
    let fq = Fq::from_q(2).unwrap();

    for level in ["t", "t+1", "t^2", "t^2+t+1", "t^3+t+1"] {
        let n = parse_poly(&fq, level).unwrap();
        let p = arith_profile(&n).unwrap();
        println!("N = {n}");
        println!("  psi     = {}", p.psi);
        println!("  phi     = {}", p.euler_phi);
        println!("  sigma1  = {}", p.sigma1);
        println!("  lambda  = {}", p.lambda);
        println!("  kappa   = {}", p.kappa);
        println!("  S_N     = {}", p.s_n);

        // S_N has a closed form; the enumeration over all psi(N) frames
        // must reproduce it exactly.
        assert_eq!(s_n_enumerated(&n).unwrap(), s_n_closed(&n).unwrap());

        // and S_N = psi(N) (deg N - 2 lambda_N)
        let psi = dmodpoly::Rat::from_integer(p.psi.clone());
        let expect = psi * (dmodpoly::Rat::from_integer(p.deg_n.into())
            - dmodpoly::Rat::from_integer(2.into()) * p.lambda.clone());
        assert_eq!(p.s_n, expect);
    }

    // every frame (a b; 0 d) of level t^2: ad = t^2, deg b < deg d, gcd(a,b,d)=1
    let n = parse_poly(&fq, "t^2").unwrap();
    println!("frames of level {n}:");
    for g in enumerate_cn(&n).unwrap() {
        println!("  ({}, {}; 0, {})", g.a, g.b, g.d);
    }
}
