//! General case `A2 ≠ A3`: the CSS comes from a one-dimensional root search.
//! Prints the CSS as a mixture of `|β3⟩` and the product basis.

use xstate_ree::{compute_ree, NamedState};

pub fn run_example() -> xstate_ree::Result<()> {
    let s = NamedState::Theorem3Example { p: 0.66, q1: 0.16, q2: 0.03, q3: 0.06, q4: 0.09 };
    let r = compute_ree(&s.x_params()?)?;
    println!("{s}: branch {}, REE {:.10} nats", r.branch, r.ree.unwrap_or(f64::NAN));
    println!("{}", r.diagnostics);
    if let Some(css) = r.css {
        let w = css.mixture_weights();
        for (name, v) in ["p'", "q1'", "q2'", "q3'", "q4'"].iter().zip(w) {
            println!("  {name:<4} {v:.6}");
        }
        println!("  x = {:.6}, residual {:.1e}", css.x, r.residual_max);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
