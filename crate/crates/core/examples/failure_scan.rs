//! Walks the straight line between a state with an ansatz CSS and one without,
//! printing where the solver stops finding a valid root.

use xstate_ree::cli::scan::{self, Grid, Space};
use xstate_ree::Tolerances;

pub fn run_example() -> xstate_ree::Result<()> {
    let from = [0.66, 0.16, 0.03, 0.06, 0.09];
    let to = [0.66, 0.05, 0.07, 0.04, 0.18];
    let grid = Grid::Line { from, to, points: 21 };
    let rows = scan::evaluate(Space::Theorem3, &grid, 1000, &Tolerances::default())?;
    let mut last = String::new();
    for row in rows.into_iter().flatten() {
        // columns: index, p, q1..q4, A1..A4, D, branch, ree, residual_max
        let branch = &row[11];
        let mark = if *branch != last && !last.is_empty() { "  <- flips" } else { "" };
        println!("q1 = {:<22} {:<15} {}{mark}", row[2], branch, row[12]);
        last = branch.clone();
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
