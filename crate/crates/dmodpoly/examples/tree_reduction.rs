//! Vertices of the GL_2 tree over F_q((1/t)) in the normal form [pi^k, u],
//! reduced to the central spine by an explicit unit-determinant matrix.

use dmodpoly::btree::{building_map, expected_spine_level, reduce_vertex, TreeVertex};
use dmodpoly::ext::ExtField;
use dmodpoly::fq::Fq;
use dmodpoly::omega::OmegaPoint;
use dmodpoly::parse::{parse_puiseux, parse_tail};

fn main() {
    let fq = Fq::from_q(2).unwrap();

    for (k, u) in [
        (3, "t+pi^1"),
        (2, "t^2+t"),
        (0, "0"),
        (-2, "t^3"),
        (4, "t^2+pi^2+pi^3"),
    ] {
        let tail = parse_tail(&fq, u).unwrap();
        let v = TreeVertex::canonical(k, &tail);
        let w = reduce_vertex(&v).unwrap();
        assert!(w.verify(&v).unwrap());
        println!(
            "{v}  ->  spine level {}   gamma = ({}, {}; {}, {})",
            w.k_prime, w.gamma.a, w.gamma.b, w.gamma.c, w.gamma.d
        );

        // the case analysis predicts the landing level (or a lower bound)
        let (exact, lower) = expected_spine_level(&v);
        match exact {
            Some(e) => assert_eq!(w.k_prime, e),
            None => assert!(w.k_prime >= lower),
        }
    }

    // a point of the upper half plane maps to a vertex or an edge of the tree
    let field = ExtField::canonical(fq, 2).unwrap();
    for s in ["w*t^2", "w*t^2+t", "pi+w*pi^2"] {
        let z = OmegaPoint::new(parse_puiseux(&field, s).unwrap()).unwrap();
        println!("lambda({s}) = {}", building_map(&z).unwrap());
    }
}
