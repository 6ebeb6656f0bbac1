//! Building a family member from Bloch and correlation parameters, then
//! checking entanglement three ways: `D² > A1 A4`, the partial transpose and
//! the REE itself.

use xstate_ree::qmath::min_eig_pt;
use xstate_ree::states::{is_entangled, to_density_matrix, x_state_from_bloch};
use xstate_ree::{compute_ree, BlochZParams};

pub fn run_example() -> xstate_ree::Result<()> {
    for gx in [0.1, 0.3, 0.5, 0.6] {
        let b = BlochZParams { r: 0.1, s: -0.2, gx, gz: -0.4, phi: 0.3 };
        let p = x_state_from_bloch(&b)?;
        let pt = min_eig_pt(&to_density_matrix(&p)?)?;
        let r = compute_ree(&p)?;
        println!(
            "gx = {gx:.1}: D = {:.4}, entangled {:<5}, min eig of rho^T_B {:+.4}, {} REE {}",
            p.d,
            is_entangled(&p),
            pt,
            r.branch,
            r.ree.map_or("-".to_string(), |v| format!("{v:.6}"))
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
