//! REE and closest separable state of the state Rains studied.
//!
//! ```bash
//! cargo run --example rains_css
//! ```

use xstate_ree::qmath::relative_entropy;
use xstate_ree::ree::ree_from_css;
use xstate_ree::states::to_density_matrix;
use xstate_ree::{compute_ree, NamedState};

pub fn run_example() -> xstate_ree::Result<()> {
    let p = NamedState::Rains.x_params()?;
    println!("A = ({:.6}, {:.6}, {:.6}, {:.6}), D = {:.6}", p.a1, p.a2, p.a3, p.a4, p.d);

    let r = compute_ree(&p)?;
    let css = r.css.expect("rains has an ansatz CSS");
    println!("branch {}", r.branch);
    println!("r1 = {:.12}  (1/6    = {:.12})", css.r1, 1.0 / 6.0);
    println!("r2 = {:.12}  (55/144 = {:.12})", css.r2, 55.0 / 144.0);
    println!("r3 = {:.12}  (41/144 = {:.12})", css.r3, 41.0 / 144.0);
    println!("y  = {:.12}", css.y);

    // the same number two ways
    let closed = ree_from_css(&p, &css)?;
    let spectral = relative_entropy(&to_density_matrix(&p)?, &css.density_matrix()?)?;
    println!("REE = {closed:.15} nats, spectral S(rho||pi) = {spectral:.15}");
    println!("residual {:.2e}, edge eigenvalue {:.2e}", r.residual_max, r.edge_min_eig.unwrap_or(f64::NAN));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
