//! Command-line surface. Every subcommand reads flags, computes with the
//! library, and prints deterministic JSON (CSV for place tables); the only
//! environment knob is CACHE_DIR.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use dmodpoly::arith;
use dmodpoly::btree;
use dmodpoly::cache;
use dmodpoly::drinfeld;
use dmodpoly::error::{Error, Result};
use dmodpoly::ext::ExtField;
use dmodpoly::farey;
use dmodpoly::fq::Fq;
use dmodpoly::heights;
use dmodpoly::modpoly::{self, BivarPolyA};
use dmodpoly::omega::OmegaPoint;
use dmodpoly::parse::{parse_ext_elem, parse_poly, parse_puiseux, parse_ratf, parse_tail};
use dmodpoly::poly::polys_below;
use dmodpoly::ratfun::{Mat2A, RatF};
use dmodpoly::verify::{self, VerifyConfig};
use dmodpoly::Rat;

#[derive(Parser)]
#[command(name = "dmodpoly", version, about = "Drinfeld modular polynomials over F_q[t]: exact arithmetic, reduction, and height reports")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Arithmetic profile of a level: psi, phi, sigma, lambda, kappa, S_N,
    /// the divisor table, and the height-band slack constant.
    Arith {
        #[arg(long)]
        q: u32,
        #[arg(long = "N")]
        level: String,
    },
    /// Farey fractions of order M and the ball partition they induce.
    Farey {
        #[arg(long)]
        q: u32,
        #[arg(long = "M")]
        order: i64,
        /// Check that every reduced b/d with deg d <= DEPTH lies in exactly
        /// one ball.
        #[arg(long = "verify-partition", value_name = "DEPTH")]
        verify_partition: Option<usize>,
    },
    /// Reduce a point of the Drinfeld upper half plane to the fundamental
    /// domain and report the witness matrix.
    OmegaReduce {
        #[arg(long)]
        q: u32,
        /// Coefficient field degree over F_q for parsing z.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        z: String,
        /// Also report the rank-2 lattice profile of (A + A z).
        #[arg(long)]
        profile: bool,
    },
    /// Reduce a tree vertex [pi^k, u] to the spine and emit the witness.
    BtReduce {
        #[arg(long)]
        q: u32,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        u: String,
    },
    /// j-invariants of the quotients of a Drinfeld module by its cyclic
    /// N-torsion submodules, over the A-field F_{q^m}.
    DrinfeldQuotients {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: usize,
        /// Image of t in F_{q^m}.
        #[arg(long)]
        theta: String,
        /// j-invariant of the source module.
        #[arg(long)]
        j: String,
        #[arg(long = "N")]
        level: String,
    },
    /// Compute (or load from cache) the level-N modular polynomial.
    Modpoly {
        #[arg(long)]
        q: u32,
        #[arg(long = "N")]
        level: String,
        /// Write the JSON table here; stdout then shows the pretty form.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the self-checks ("all"): invariants, height band, root
        /// relation on fresh primes, specialization witness.
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Place-by-place height table of Phi_N(X, j0) and the gap band report.
    HeckeHeights {
        #[arg(long)]
        q: u32,
        #[arg(long = "N")]
        level: String,
        #[arg(long)]
        j: String,
        /// Write the CSV table here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a named self-check suite (arith, farey, btree, omega, modpoly,
    /// heights, or all).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Include runtime_ms in the JSON (off by default so identical
        /// configs give byte-identical output). Timings always go to stderr.
        #[arg(long)]
        timings: bool,
    },
    /// Inspect or manage the table cache.
    Cache {
        #[command(subcommand)]
        action: CacheCmd,
    },
}

#[derive(Subcommand)]
enum CacheCmd {
    /// List cached files with sizes.
    List,
    /// Remove all cached files.
    Clear,
    /// Print the cache directory.
    Path,
    /// Compute and store the level-N table.
    Warm {
        #[arg(long)]
        q: u32,
        #[arg(long = "N")]
        level: String,
    },
}

fn rs(r: &Rat) -> String {
    r.to_string()
}

fn mat_json(g: &Mat2A) -> Value {
    json!({
        "a": g.a.to_string(),
        "b": g.b.to_string(),
        "c": g.c.to_string(),
        "d": g.d.to_string(),
    })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

/// Pretty polynomial form, X-major, highest monomials first.
fn pretty_phi(phi: &BivarPolyA) -> String {
    let mut parts = Vec::new();
    for (&(i, j), c) in phi.coeffs.iter().rev() {
        let cs = c.to_string();
        let coeff = if cs == "1" && (i, j) != (0, 0) {
            String::new()
        } else if cs.contains('+') {
            format!("({cs})")
        } else {
            cs
        };
        let mut mono = Vec::new();
        if !coeff.is_empty() {
            mono.push(coeff);
        }
        if i > 0 {
            mono.push(if i == 1 { "X".into() } else { format!("X^{i}") });
        }
        if j > 0 {
            mono.push(if j == 1 { "Y".into() } else { format!("Y^{j}") });
        }
        parts.push(mono.join("*"));
    }
    parts.join(" + ")
}

fn cmd_arith(q: u32, level: &str) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let n = parse_poly(&fq, level)?;
    let p = arith::arith_profile(&n)?;
    let ed: Vec<Value> = p
        .ed_table
        .iter()
        .map(|(d, e)| json!({"d": d.to_string(), "e": e.to_string()}))
        .collect();
    print_json(&json!({
        "q": q,
        "N": p.n.to_string(),
        "deg_N": p.deg_n,
        "psi": p.psi.to_string(),
        "euler_phi": p.euler_phi.to_string(),
        "sigma1": p.sigma1.to_string(),
        "lambda": rs(&p.lambda),
        "kappa": rs(&p.kappa),
        "s_N": rs(&p.s_n),
        "e_d": ed,
        "bq_upper": rs(&p.bq_upper),
    }));
    Ok(0)
}

fn cmd_farey(q: u32, order: i64, verify_partition: Option<usize>) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let fractions = farey::enumerate_fm(&fq, order)?;
    let listed: Vec<Value> = fractions
        .iter()
        .map(|f| {
            json!({
                "h": f.h().to_string(),
                "f": f.f().to_string(),
                "radius_log": -(f.f().deg() + order + 1),
            })
        })
        .collect();
    let mut doc = json!({
        "q": q,
        "M": order,
        "count": fractions.len(),
        "fractions": listed,
    });
    let mut code = 0;
    if let Some(depth) = verify_partition {
        let balls: Vec<farey::FareyBall> = fractions
            .iter()
            .map(|f| farey::FareyBall::new(f.clone(), order))
            .collect::<Result<_>>()?;
        let mut points = 0u64;
        let mut off = Vec::new();
        for d in 1..=depth {
            for den in dmodpoly::poly::monic_polys(&fq, d) {
                for b in polys_below(&fq, d) {
                    if b.is_zero() || !b.coprime(&den) {
                        continue;
                    }
                    let zeta = RatF::new(b, den.clone())?;
                    points += 1;
                    let hits = balls.iter().filter(|ball| ball.contains(&zeta)).count();
                    if hits != 1 {
                        off.push(format!("{zeta}: {hits} balls"));
                    }
                }
            }
        }
        let pass = off.is_empty();
        doc["partition"] = json!({
            "depth": depth,
            "points": points,
            "violations": off,
            "pass": pass,
        });
        if !pass {
            code = 1;
        }
    }
    print_json(&doc);
    Ok(code)
}

fn cmd_omega_reduce(q: u32, m: usize, z: &str, profile: bool) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let field = ExtField::canonical(fq, m)?;
    let point = OmegaPoint::new(parse_puiseux(&field, z)?)?;
    let (reduced, gamma) = point.reduce_to_fundamental()?;
    let mut doc = json!({
        "q": q,
        "m": m,
        "z": point.value().to_string(),
        "reduced_z": reduced.value().to_string(),
        "gamma": mat_json(&gamma),
        "log_abs": rs(&reduced.log_abs()),
        "im_abs": rs(&reduced.im_abs()),
    });
    if profile {
        let lp = point.lattice_profile()?;
        doc["profile"] = json!({
            "min1": rs(&lp.min1),
            "min2": rs(&lp.min2),
            "covolume_log": rs(&lp.covolume_log),
            "reduced": lp.reduced,
            "witness_basis": [lp.witness_basis.0.to_string(), lp.witness_basis.1.to_string()],
        });
    }
    print_json(&doc);
    Ok(0)
}

fn cmd_bt_reduce(q: u32, k: i64, u: &str) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let tail = parse_tail(&fq, u)?;
    let v = btree::TreeVertex::canonical(k, &tail);
    let w = btree::reduce_vertex(&v)?;
    if !w.verify(&v)? {
        return Err(Error::WitnessNotFound(format!(
            "reduction witness for {v} does not verify"
        )));
    }
    print_json(&json!({
        "q": q,
        "vertex": v.to_string(),
        "k_prime": w.k_prime,
        "gamma": mat_json(&w.gamma),
        "verified": true,
    }));
    Ok(0)
}

fn cmd_drinfeld_quotients(q: u32, m: usize, theta: &str, j: &str, level: &str) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let field = ExtField::canonical(fq.clone(), m)?;
    let theta_el = parse_ext_elem(&field, theta)?;
    let j_el = parse_ext_elem(&field, j)?;
    let n = parse_poly(&fq, level)?;
    let af = drinfeld::AFieldFinite::new(field.clone(), theta_el.clone())?;
    let phi = drinfeld::module_from_j(&field, &theta_el, &j_el);
    let subs = drinfeld::cyclic_submodules(&af, &phi, &n)?;
    let mut listed = Vec::new();
    for c in &subs {
        let (quot, _) = drinfeld::quotient_by(&phi, c)?;
        let jq = quot.j_invariant();
        listed.push(json!({
            "frame": {
                "a": c.frame.a.to_string(),
                "b": c.frame.b.to_string(),
                "d": c.frame.d.to_string(),
            },
            "j": c.ext.render(&jq),
        }));
    }
    let product: Vec<String> = drinfeld::quotient_j_poly(&af, &phi, &n)?
        .iter()
        .map(|co| field.render(co))
        .collect();
    print_json(&json!({
        "q": q,
        "m": m,
        "theta": field.render(&theta_el),
        "j": field.render(&j_el),
        "N": n.to_string(),
        "quotients": listed,
        "product_over_base": product,
    }));
    Ok(0)
}

fn cmd_modpoly(q: u32, level: &str, out: Option<&PathBuf>, check: Option<&str>, seed: u64) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let n = parse_poly(&fq, level)?;
    let dir = cache::cache_dir();
    let phi = cache::load_or_compute_phi(&dir, &n)?;
    let _ = cache::store_phi(&dir, &phi);
    if let Some(mode) = check {
        if mode != "all" {
            return Err(Error::PreconditionViolated(format!(
                "unknown check mode {mode}; only \"all\" is supported"
            )));
        }
        phi.validate()?;
        eprintln!("check invariants: ok");
        let band = modpoly::band_report(&phi)?;
        if !band.pass {
            return Err(Error::PreconditionViolated(format!(
                "height {} is outside the band [{}, {}]",
                band.height,
                rs(&band.lower),
                rs(&band.upper)
            )));
        }
        eprintln!("check height band: ok");
        let trials = 10;
        let hits = modpoly::verify_root_relation(&phi, trials, seed)?;
        if hits != trials {
            return Err(Error::PreconditionViolated(format!(
                "root relation held for {hits}/{trials} primes"
            )));
        }
        eprintln!("check root relation: ok ({trials} primes)");
        let w = modpoly::specialization_height_witness(&phi)?;
        if w.height != phi.height() {
            return Err(Error::PreconditionViolated(
                "specialization witness does not reach the height".into(),
            ));
        }
        eprintln!("check specialization witness: ok (extension degree {})", w.k);
    }
    match out {
        Some(path) => {
            let doc = serde_json::to_string_pretty(&phi.to_json()).expect("serializable");
            std::fs::write(path, doc + "\n")?;
            println!("{}", pretty_phi(&phi));
        }
        None => print_json(&phi.to_json()),
    }
    Ok(0)
}

fn cmd_hecke_heights(q: u32, level: &str, j: &str, report: Option<&PathBuf>) -> Result<i32> {
    let fq = Fq::from_q(q)?;
    let n = parse_poly(&fq, level)?;
    let j0 = parse_ratf(&fq, j)?;
    let dir = cache::cache_dir();
    let phi = cache::load_or_compute_phi(&dir, &n)?;
    let terms = heights::hecke_height_terms(&phi, &j0)?;
    let mut csv = String::from("place,local_term\n");
    for (place, term) in &terms {
        csv.push_str(&format!("{place},{}\n", rs(term)));
    }
    let gap = heights::gap_band(&phi, &j0)?;
    let summary = json!({
        "q": q,
        "N": n.to_string(),
        "j": j0.to_string(),
        "h_j0": rs(&gap.h_j0),
        "gap": rs(&gap.gap),
        "band": {
            "lower": rs(&gap.lower),
            "upper_enclosure": [rs(&gap.upper.0), rs(&gap.upper.1)],
        },
        "pass": gap.pass,
        "marginal": gap.marginal,
    });
    match report {
        Some(path) => {
            std::fs::write(path, &csv)?;
            print_json(&summary);
        }
        None => {
            print!("{csv}");
            println!();
            print_json(&summary);
        }
    }
    Ok(if gap.pass { 0 } else { 1 })
}

fn cmd_verify(suite: &str, q: u32, seed: u64, timings: bool) -> Result<i32> {
    let cfg = VerifyConfig {
        q,
        seed,
        cache_dir: Some(cache::cache_dir()),
    };
    let reports = verify::run_suite(suite, &cfg)?;
    let failed = reports.iter().any(|r| !r.passed());
    let rendered: Vec<Value> = reports
        .iter()
        .map(|r| {
            eprintln!(
                "suite {}: {} cases, {} failures, {} ms",
                r.suite,
                r.cases,
                r.failures.len(),
                r.runtime_ms
            );
            let mut v = r.to_json();
            if !timings {
                v.as_object_mut().expect("report object").remove("runtime_ms");
            }
            v
        })
        .collect();
    if rendered.len() == 1 {
        print_json(&rendered[0]);
    } else {
        print_json(&Value::Array(rendered));
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_cache(action: &CacheCmd) -> Result<i32> {
    let dir = cache::cache_dir();
    match action {
        CacheCmd::List => {
            let entries: Vec<Value> = cache::list(&dir)?
                .iter()
                .map(|(name, bytes)| json!({"file": name, "bytes": bytes}))
                .collect();
            print_json(&json!({"dir": dir.display().to_string(), "entries": entries}));
        }
        CacheCmd::Clear => {
            let removed = cache::clear(&dir)?;
            print_json(&json!({"dir": dir.display().to_string(), "removed": removed}));
        }
        CacheCmd::Path => {
            print_json(&json!({"dir": dir.display().to_string()}));
        }
        CacheCmd::Warm { q, level } => {
            let fq = Fq::from_q(*q)?;
            let n = parse_poly(&fq, level)?;
            let phi = cache::load_or_compute_phi(&dir, &n)?;
            let path = cache::store_phi(&dir, &phi)?;
            print_json(&json!({
                "path": path.display().to_string(),
                "height": phi.height(),
                "psi": phi.psi,
            }));
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Arith { q, level } => cmd_arith(*q, level),
        Cmd::Farey {
            q,
            order,
            verify_partition,
        } => cmd_farey(*q, *order, *verify_partition),
        Cmd::OmegaReduce { q, m, z, profile } => cmd_omega_reduce(*q, *m, z, *profile),
        Cmd::BtReduce { q, k, u } => cmd_bt_reduce(*q, *k, u),
        Cmd::DrinfeldQuotients {
            q,
            m,
            theta,
            j,
            level,
        } => cmd_drinfeld_quotients(*q, *m, theta, j, level),
        Cmd::Modpoly {
            q,
            level,
            out,
            check,
            seed,
        } => cmd_modpoly(*q, level, out.as_ref(), check.as_deref(), *seed),
        Cmd::HeckeHeights {
            q,
            level,
            j,
            report,
        } => cmd_hecke_heights(*q, level, j, report.as_ref()),
        Cmd::Verify { suite, q, seed, timings } => cmd_verify(suite, *q, *seed, *timings),
        Cmd::Cache { action } => cmd_cache(action),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
