//! Points of the Drinfeld upper half plane as Puiseux series: reduction to
//! the fundamental domain |z| = |z|_i >= 1 and the rank-2 lattice profile
//! of A + A z.

use dmodpoly::ext::ExtField;
use dmodpoly::fq::Fq;
use dmodpoly::omega::OmegaPoint;
use dmodpoly::parse::parse_puiseux;
use dmodpoly::Rat;

fn main() {
    let fq = Fq::from_q(2).unwrap();
    // coefficients in F_4 = F_2(w); 'pi' stands for 1/t
    let field = ExtField::canonical(fq, 2).unwrap();

    for s in ["w", "w*t^3+t^2", "pi+w*pi^2", "pi+pi^3+w*pi^6"] {
        let z = OmegaPoint::new(parse_puiseux(&field, s).unwrap()).unwrap();
        let (zt, gamma) = z.reduce_to_fundamental().unwrap();
        println!("z = {s}");
        println!("  |z|   = q^{}", z.log_abs());
        println!("  |z|_i = q^{}", z.im_abs());
        println!("  reduced to {} with |.|_i = q^{}", zt.value(), zt.im_abs());
        println!(
            "  gamma = ({}, {}; {}, {})",
            gamma.a, gamma.b, gamma.c, gamma.d
        );

        // fundamental domain: |z| = |z|_i >= 1, i.e. both logs equal and >= 0
        assert_eq!(zt.log_abs(), zt.im_abs());
        assert!(zt.im_abs() >= Rat::from_integer(0.into()));

        let p = z.lattice_profile().unwrap();
        println!(
            "  lattice minima q^{}, q^{}; covolume q^{}; reduced basis: {}",
            p.min1, p.min2, p.covolume_log, p.reduced
        );
        // the covolume always splits over the successive minima
        assert_eq!(p.covolume_log, p.min1.clone() + p.min2.clone());
    }
}
