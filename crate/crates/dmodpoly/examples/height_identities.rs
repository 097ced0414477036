//! Exact height machinery over F_q(t): places, the product formula, local
//! Gauss norms, and root magnitudes at infinity from the Newton polygon.

use dmodpoly::fq::Fq;
use dmodpoly::heights::{
    check_local_identity, infty_root_mass, infty_root_profile, log_abs_at, specialize_rational,
    weil_height, PlaceF,
};
use dmodpoly::modpoly::crt_phi;
use dmodpoly::parse::{parse_poly, parse_ratf};
use dmodpoly::poly::irreducibles;
use dmodpoly::Rat;

fn main() {
    let fq = Fq::from_q(2).unwrap();

    // h(x) = max(deg num, deg den) equals the sum over places of
    // deg(v) max(0, -ord_v x)
    let x = parse_ratf(&fq, "(t^3+1)/(t^2+t)").unwrap();
    println!("h({x}) = {}", weil_height(&x).unwrap());

    // product formula: sum over all places of deg(v) log|x|_v = 0
    let mut total = Rat::from_integer(0.into());
    let mut places = vec![PlaceF::Infinity];
    for d in 1..=3usize {
        for p in irreducibles(&fq, d) {
            places.push(PlaceF::finite(&p).unwrap());
        }
    }
    for v in &places {
        let contribution = Rat::from_integer((v.deg()).into()) * log_abs_at(&x, v);
        if contribution != Rat::from_integer(0.into()) {
            println!("  deg(v) log|x|_v at {v} = {contribution}");
        }
        total += contribution;
    }
    assert_eq!(total, Rat::from_integer(0.into()));
    println!("product formula: total 0");

    // at every finite place, psi(N) log+ |j0|_v equals the Gauss norm of
    // Phi_N(X, j0)
    let n = parse_poly(&fq, "t").unwrap();
    let phi = crt_phi(&n).unwrap();
    let j0 = parse_ratf(&fq, "1/t").unwrap();
    let v = PlaceF::finite(&parse_poly(&fq, "t").unwrap()).unwrap();
    assert!(check_local_identity(&phi, &j0, &v).unwrap());
    println!("local identity holds for j0 = {j0} at v = {v}");

    // Newton polygon at infinity: the root log-magnitudes of Phi_N(X, j0)
    // and their multiplicities, over any splitting field
    let coeffs = specialize_rational(&phi, &j0);
    let degs: Vec<i64> = coeffs
        .iter()
        .map(|c| c.num().deg() - c.den().deg())
        .collect();
    let profile = infty_root_profile(&degs).unwrap();
    println!("root magnitudes of Phi_N(X, {j0}):");
    for (slope, count) in &profile {
        println!("  log|root| = {slope} with multiplicity {count}");
    }
    // summing the positive part recovers the height of the specialization
    println!("mass = {}", infty_root_mass(&degs).unwrap());
}
