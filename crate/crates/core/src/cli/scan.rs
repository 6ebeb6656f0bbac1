use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ree::compute_ree_with;
use crate::states::{NamedState, XStateParams};
use crate::tolerances::Tolerances;

use super::input::parse_floats;

/// Coordinates of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Space {
    /// `p |β3⟩⟨β3| + q1 |01⟩⟨01| + q2 |10⟩⟨10| + q3 |00⟩⟨00| + q4 |11⟩⟨11|`
    Theorem3,
    /// `A1, A2, A3, A4, D` directly, with `φ = 0`
    Raw,
}

impl Space {
    pub fn coordinates(self) -> [&'static str; 5] {
        match self {
            Self::Theorem3 => ["p", "q1", "q2", "q3", "q4"],
            Self::Raw => ["a1", "a2", "a3", "a4", "d"],
        }
    }

    /// Coordinates that sum to one; one of them may be left to the complement.
    fn simplex(self) -> std::ops::Range<usize> {
        match self {
            Self::Theorem3 => 0..5,
            Self::Raw => 0..4,
        }
    }

    pub fn header(self) -> Vec<&'static str> {
        let mut h = vec!["index"];
        if self == Self::Theorem3 {
            h.extend(self.coordinates());
        }
        h.extend(["A1", "A2", "A3", "A4", "D", "branch", "ree", "residual_max"]);
        h
    }

    fn to_params(self, c: &[f64; 5]) -> Result<XStateParams> {
        match self {
            Self::Theorem3 => {
                NamedState::Theorem3Example { p: c[0], q1: c[1], q2: c[2], q3: c[3], q4: c[4] }.x_params()
            }
            Self::Raw => XStateParams::new(c[0], c[1], c[2], c[3], c[4], 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    fn values(&self) -> Result<Vec<f64>> {
        match *self {
            Self::Fixed(v) => Ok(vec![v]),
            Self::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) {
                    return Err(Error::Parse(format!("axis range {start}:{stop}:{step} is empty")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

/// `name=value` or `name=start:stop:step`.
pub fn parse_axis(s: &str) -> Result<(String, Axis)> {
    let (name, rhs) = s.split_once('=').ok_or_else(|| Error::Parse(format!("axis {s:?}: expected name=value")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("axis {name}: {t:?}: {e}")));
    let parts: Vec<&str> = rhs.split(':').collect();
    let axis = match parts.as_slice() {
        [v] => Axis::Fixed(num(v)?),
        [a, b, c] => Axis::Range { start: num(a)?, stop: num(b)?, step: num(c)? },
        _ => return Err(Error::Parse(format!("axis {name}: expected value or start:stop:step"))),
    };
    Ok((name.trim().to_ascii_lowercase(), axis))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// `points` evenly spaced points from `from` to `to`, both included.
    Line { from: [f64; 5], to: [f64; 5], points: usize },
    /// Cartesian product in lexicographic order of the space's coordinates.
    Axes(Vec<(String, Axis)>),
}

pub fn parse_line(s: &str) -> Result<([f64; 5], [f64; 5])> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::Parse("--line expects FROM:TO".into()))?;
    let five = |t: &str| -> Result<[f64; 5]> {
        let v = parse_floats(t)?;
        v.try_into().map_err(|v: Vec<f64>| Error::Parse(format!("--line endpoint needs 5 values, got {}", v.len())))
    };
    Ok((five(a)?, five(b)?))
}

/// Grid points in output order. Off-simplex points are kept and skipped later.
pub fn points(space: Space, grid: &Grid, cap: usize) -> Result<Vec<[f64; 5]>> {
    let pts = match grid {
        Grid::Line { from, to, points } => {
            if *points < 2 {
                return Err(Error::Parse("--points must be at least 2".into()));
            }
            if *points > cap {
                return Err(Error::Parse(format!("{points} points exceed the cap of {cap}")));
            }
            (0..*points)
                .map(|i| {
                    let t = i as f64 / (*points - 1) as f64;
                    std::array::from_fn(|k| from[k] + t * (to[k] - from[k]))
                })
                .collect()
        }
        Grid::Axes(axes) => {
            let names = space.coordinates();
            for (n, _) in axes {
                if !names.contains(&n.as_str()) {
                    return Err(Error::Parse(format!("unknown axis {n:?} for this space (expected {names:?})")));
                }
            }
            let mut values: Vec<Option<Vec<f64>>> = Vec::with_capacity(5);
            for name in names {
                let mut found = axes.iter().filter(|(n, _)| n == name);
                let v = match (found.next(), found.next()) {
                    (Some(_), Some(_)) => return Err(Error::Parse(format!("axis {name} given twice"))),
                    (Some((_, a)), None) => Some(a.values()?),
                    (None, _) => None,
                };
                values.push(v);
            }
            let missing: Vec<usize> = (0..5).filter(|&k| values[k].is_none()).collect();
            let complement = match missing.as_slice() {
                [] => None,
                [k] if space.simplex().contains(k) => Some(*k),
                _ => {
                    return Err(Error::Parse(format!(
                        "every axis must be given except at most one simplex coordinate (missing {:?})",
                        missing.iter().map(|&k| names[k]).collect::<Vec<_>>()
                    )))
                }
            };
            let total = values.iter().flatten().map(Vec::len).try_fold(1usize, |a, n| a.checked_mul(n));
            match total {
                Some(t) if t <= cap => {}
                _ => return Err(Error::Parse(format!("grid exceeds the cap of {cap} points"))),
            }
            let mut pts = vec![[0.0; 5]];
            for k in 0..5 {
                let Some(vs) = &values[k] else { continue };
                pts = pts
                    .into_iter()
                    .flat_map(|p| {
                        vs.iter().map(move |&v| {
                            let mut q = p;
                            q[k] = v;
                            q
                        })
                    })
                    .collect();
            }
            if let Some(k) = complement {
                for p in pts.iter_mut() {
                    p[k] = 1.0 - space.simplex().filter(|&j| j != k).map(|j| p[j]).sum::<f64>();
                }
            }
            pts
        }
    };
    Ok(pts)
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        String::new()
    }
}

/// One CSV row per grid point, `None` for infeasible points, in grid order.
pub fn evaluate(space: Space, grid: &Grid, cap: usize, tol: &Tolerances) -> Result<Vec<Option<Vec<String>>>> {
    let pts = points(space, grid, cap)?;
    Ok(pts
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let p = space.to_params(c).ok()?;
            let r = compute_ree_with(&p, tol).ok()?;
            let mut row = vec![i.to_string()];
            if space == Space::Theorem3 {
                row.extend(c.iter().map(|&v| fmt(v)));
            }
            row.extend([p.a1, p.a2, p.a3, p.a4, p.d].iter().map(|&v| fmt(v)));
            row.push(r.branch.as_str().to_string());
            row.push(r.ree.map_or_else(String::new, fmt));
            row.push(fmt(r.residual_max));
            Some(row)
        })
        .collect())
}

/// Writes the header and rows, returning the number of skipped points.
pub fn write_csv(space: Space, rows: Vec<Option<Vec<String>>>, out: &mut dyn Write) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(space.header()).map_err(csv_err)?;
    let mut skipped = 0;
    for row in rows {
        match row {
            Some(r) => w.write_record(&r).map_err(csv_err)?,
            None => skipped += 1,
        }
    }
    w.flush().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(skipped)
}

/// [`evaluate`] followed by [`write_csv`].
pub fn run(space: Space, grid: &Grid, cap: usize, tol: &Tolerances, out: &mut dyn Write) -> Result<usize> {
    write_csv(space, evaluate(space, grid, cap, tol)?, out)
}
