//! Bell-diagonal, VP and Horodecki states: solver output against their
//! known closed forms.

use xstate_ree::ree::closed_form_family_ree;
use xstate_ree::{compute_ree, NamedState};

pub fn run_example() -> xstate_ree::Result<()> {
    let families = [
        NamedState::BellDiagonal([0.1, 0.1, 0.7, 0.1]),
        NamedState::BellDiagonal([0.0, 0.0, 1.0, 0.0]),
        NamedState::Vp([0.5, 0.3, 0.2]),
        NamedState::Vp([0.5, 0.2, 0.3]),
        NamedState::Horodecki([0.6, 0.25, 0.15]),
        NamedState::Horodecki([0.6, 0.15, 0.25]),
    ];
    println!("{:<28} {:>10} {:>16} {:>16} {:>9}", "state", "branch", "solver", "closed form", "|diff|");
    for f in &families {
        let r = compute_ree(&f.x_params()?)?;
        let closed = closed_form_family_ree(f)?;
        let ree = r.ree.unwrap_or(f64::NAN);
        println!(
            "{:<28} {:>10} {:>16.12} {:>16.12} {:>9.1e}",
            f.to_string(),
            r.branch,
            ree,
            closed,
            (ree - closed).abs()
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
