//! Brute-force REE next to the closed form for a few reference states.

use std::time::Instant;

use xstate_ree::oracle::{oracle_ree_from, oracle_validate, OracleConfig};
use xstate_ree::{compute_ree, NamedState};

pub fn run_example() -> xstate_ree::Result<()> {
    let cfg = OracleConfig { rng_seed: 7, ..OracleConfig::default() };
    let states = [
        NamedState::BellDiagonal([0.0, 0.0, 1.0, 0.0]),
        NamedState::Rains,
        NamedState::Vp([0.5, 0.3, 0.2]),
        NamedState::Horodecki([0.6, 0.25, 0.15]),
        NamedState::Theorem3Example { p: 0.66, q1: 0.16, q2: 0.03, q3: 0.06, q4: 0.09 },
    ];
    println!("{:<48} {:>12} {:>12} {:>12} {:>10} {:>8}", "state", "closed", "oracle", "cold", "|diff|", "secs");
    for s in &states {
        let p = s.x_params()?;
        let closed = compute_ree(&p)?;
        let t = Instant::now();
        let report = oracle_validate(&p, &closed, &cfg)?;
        println!(
            "{:<48} {:>12.8} {:>12.8} {:>12.8} {:>10.2e} {:>8.2}",
            s.to_string(),
            closed.ree.unwrap_or(f64::NAN),
            report.oracle_ree,
            report.cold_start_ree,
            report.difference.unwrap_or(f64::NAN),
            t.elapsed().as_secs_f64()
        );
    }

    let failure = NamedState::Theorem3Example { p: 0.66, q1: 0.05, q2: 0.07, q3: 0.04, q4: 0.18 };
    let rho = failure.density_matrix()?;
    let out = oracle_ree_from(&rho, &cfg, None)?;
    println!("\n{failure}: closed form {}, oracle upper bound {:.8}", compute_ree(&failure.x_params()?)?.branch, out.ree_upper_bound);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
