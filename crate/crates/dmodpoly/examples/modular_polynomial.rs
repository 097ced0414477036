//! The level-N Drinfeld modular polynomial Phi_N(X, Y) over F_q[t],
//! assembled from specializations over finite A-fields by CRT in t.

use dmodpoly::fq::Fq;
use dmodpoly::modpoly::{band_report, crt_phi, specialization_height_witness, verify_root_relation};
use dmodpoly::parse::parse_poly;

fn main() {
    let fq = Fq::from_q(2).unwrap();
    let n = parse_poly(&fq, "t").unwrap();

    let phi = crt_phi(&n).unwrap();
    println!(
        "Phi_N for N = {n} over F_2: degree {} in X and Y, {} nonzero coefficients",
        phi.deg_x(),
        phi.coeffs.len()
    );
    for (&(i, j), c) in phi.coeffs.iter().rev() {
        println!("  X^{i} Y^{j}: {c}");
    }

    // monic in X, symmetric in (X, Y), degree psi(N) in each variable
    phi.validate().unwrap();
    assert_eq!(phi.deg_x(), phi.psi);

    // the height (max coefficient degree) sits inside the proven band
    let band = band_report(&phi).unwrap();
    println!(
        "height = {}   band [{}, {}]   implied slack constant {}",
        band.height, band.lower, band.upper, band.implied_b
    );
    assert!(band.pass);

    // over fresh primes P the specialization mod P factors through the
    // isogeny j-invariants: Phi_N(X, j0) = prod (X - j(phi/C)) mod P
    let ok = verify_root_relation(&phi, 5, 7).unwrap();
    println!("root relation verified on {ok}/5 fresh primes");
    assert_eq!(ok, 5);

    // some y in a small extension field attains the full height exactly
    let w = specialization_height_witness(&phi).unwrap();
    println!(
        "height witness: y in F_(2^{}) with h(Phi_N(X, y)) = {}",
        w.k, w.height
    );
    assert_eq!(w.height, phi.height());
}
