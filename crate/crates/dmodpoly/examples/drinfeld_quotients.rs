//! Rank-2 Drinfeld modules over a finite A-field: N-torsion, its cyclic
//! A/N-submodules, and the j-invariants of the quotient modules.

use dmodpoly::drinfeld::{
    cyclic_submodules, module_from_j, quotient_by, quotient_j_poly, AFieldFinite,
};
use dmodpoly::ext::ExtField;
use dmodpoly::fq::Fq;
use dmodpoly::parse::{parse_ext_elem, parse_poly};

fn main() {
    let fq = Fq::from_q(2).unwrap();
    // A-field L = F_4, theta = image of t, so the A-characteristic is the
    // minimal polynomial of w over F_2 (degree 2, prime to the level t)
    let field = ExtField::canonical(fq.clone(), 2).unwrap();
    let theta = field.gen();
    let af = AFieldFinite::new(field.clone(), theta.clone()).unwrap();

    let j0 = parse_ext_elem(&field, "w+1").unwrap();
    let phi = module_from_j(&field, &theta, &j0);
    println!("phi over F_4 with j = {}", field.render(&phi.j_invariant()));

    let n = parse_poly(&fq, "t").unwrap();
    let subs = cyclic_submodules(&af, &phi, &n).unwrap();
    println!("level N = {n}: {} cyclic submodules", subs.len());

    for c in &subs {
        let (quot, kernel) = quotient_by(&phi, c).unwrap();
        // the kernel polynomial is q-linearized of tau-degree deg N
        assert_eq!(kernel.deg_tau(), n.deg());
        println!(
            "  frame ({}, {}; 0, {})  ->  j(phi/C) = {}",
            c.frame.a,
            c.frame.b,
            c.frame.d,
            c.ext.render(&quot.j_invariant())
        );
    }

    // prod over C of (X - j(phi/C)) has coefficients in L, not just in the
    // splitting field of the torsion
    let poly = quotient_j_poly(&af, &phi, &n).unwrap();
    let rendered: Vec<String> = poly.iter().map(|c| field.render(c)).collect();
    println!("prod (X - j(phi/C)) coefficients, low to high: {rendered:?}");
    assert_eq!(poly.len(), subs.len() + 1);
}
