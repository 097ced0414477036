//! Farey fractions of order M over F_q(t) and the disjoint ball cover they
//! induce on the unit interval of the completion at infinity.

use dmodpoly::farey::{enumerate_fm, locate_ball, locate_ball_scan, FareyBall};
use dmodpoly::fq::Fq;
use dmodpoly::parse::parse_ratf;
use dmodpoly::poly::{monic_polys, polys_below};
use dmodpoly::ratfun::RatF;

fn main() {
    let fq = Fq::from_q(2).unwrap();
    let m = 2i64;

    let fractions = enumerate_fm(&fq, m).unwrap();
    println!("|F_{m}| = {} fractions over F_2:", fractions.len());
    for f in &fractions {
        println!("  {f}   ball radius q^-{}", f.f().deg() + m + 1);
    }

    // partition: every reduced b/d with deg d <= 4 lies in exactly one ball
    let balls: Vec<FareyBall> = fractions
        .iter()
        .map(|f| FareyBall::new(f.clone(), m).unwrap())
        .collect();
    let mut checked = 0;
    for d in 1..=4usize {
        for den in monic_polys(&fq, d) {
            for b in polys_below(&fq, d) {
                if b.is_zero() || !b.coprime(&den) {
                    continue;
                }
                let zeta = RatF::new(b, den.clone()).unwrap();
                let hits = balls.iter().filter(|ball| ball.contains(&zeta)).count();
                assert_eq!(hits, 1, "{zeta} hit {hits} balls");
                checked += 1;
            }
        }
    }
    println!("partition verified on {checked} points");

    // locating a point by continued-fraction convergents agrees with the scan
    let zeta = parse_ratf(&fq, "(t^2+1)/(t^4+t^3+1)").unwrap();
    let fast = locate_ball(&zeta, m).unwrap();
    let slow = locate_ball_scan(&zeta, m).unwrap();
    assert_eq!(fast, slow);
    println!("{zeta} lies in the ball around {fast}");
}
