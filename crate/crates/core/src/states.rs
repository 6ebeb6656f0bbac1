//! The X-like state family with z-directional Bloch vectors, plus the named
//! reference states used throughout the test suites.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, projector, CMat4, CVec4, DensityMatrix};

const PARAM_TOL: f64 = 1e-12;
const SPARSITY_TOL: f64 = 1e-10;
const ENTANGLEMENT_SLACK: f64 = 1e-14;

/// Populations `A1..A4`, coherence magnitude `D` and phase `phi` of
///
/// ```text
/// ⎡A1  0        0        0 ⎤
/// ⎢0   A2       D e^{iφ} 0 ⎥
/// ⎢0   D e^{-iφ} A3      0 ⎥
/// ⎣0   0        0        A4⎦
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub d: f64,
    #[serde(default)]
    pub phi: f64,
}

impl XStateParams {
    /// Validates normalization and positivity. Values within `1e-12` below zero
    /// are clamped to zero.
    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64, d: f64, phi: f64) -> Result<Self> {
        let vals = [a1, a2, a3, a4, d, phi];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite parameter in {vals:?}")));
        }
        let mut a = [a1, a2, a3, a4];
        for (i, x) in a.iter_mut().enumerate() {
            if *x < -PARAM_TOL {
                return Err(Error::InvalidState(format!("A{} = {} is negative", i + 1, *x)));
            }
            *x = x.max(0.0);
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > PARAM_TOL {
            return Err(Error::InvalidState(format!("A1+A2+A3+A4 = {sum}, expected 1")));
        }
        if d < -PARAM_TOL {
            return Err(Error::InvalidState(format!("D = {d} is negative")));
        }
        let d = d.max(0.0);
        let bound = (a[1] * a[2]).sqrt();
        if d > bound + PARAM_TOL {
            return Err(Error::InvalidState(format!(
                "D = {d} exceeds sqrt(A2 A3) = {bound}; matrix would not be positive"
            )));
        }
        Ok(Self { a1: a[0], a2: a[1], a3: a[2], a4: a[3], d, phi })
    }

    /// Same state with the coherence phase removed.
    pub fn canonical(&self) -> Self {
        Self { phi: 0.0, ..*self }
    }

    /// Exchanges the `|00⟩` and `|11⟩` populations.
    pub fn swap_a1_a4(&self) -> Self {
        Self { a1: self.a4, a4: self.a1, ..*self }
    }
}

/// `r = (0,0,r)`, `s = (0,0,s)`, `g = (g_x, g_x, g_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochZParams {
    pub r: f64,
    pub s: f64,
    pub gx: f64,
    pub gz: f64,
    #[serde(default)]
    pub phi: f64,
}

/// Converts Bloch/correlation parameters to the matrix parameters.
///
/// A negative `g_x / (2 cos φ)` is folded into the phase (`φ + π`) so that `D`
/// stays non-negative.
pub fn x_state_from_bloch(b: &BlochZParams) -> Result<XStateParams> {
    let cos_phi = b.phi.cos();
    if cos_phi.abs() < 1e-9 {
        return Err(Error::SingularPhase { cos_phi });
    }
    let mut a = [
        (1.0 + b.r + b.s + b.gz) / 4.0,
        (1.0 + b.r - b.s - b.gz) / 4.0,
        (1.0 - b.r + b.s - b.gz) / 4.0,
        (1.0 - b.r - b.s + b.gz) / 4.0,
    ];
    for (i, x) in a.iter().enumerate() {
        if *x < -PARAM_TOL {
            return Err(Error::InvalidState(format!("A{} = {} is negative", i + 1, x)));
        }
    }
    if a.iter().any(|x| *x < 0.0) {
        for x in a.iter_mut() {
            *x = x.max(0.0);
        }
        let sum: f64 = a.iter().sum();
        for x in a.iter_mut() {
            *x /= sum;
        }
    }
    let mut d = b.gx / (2.0 * cos_phi);
    let mut phi = b.phi;
    if d < 0.0 {
        d = -d;
        phi = wrap_phase(phi + PI);
    }
    XStateParams::new(a[0], a[1], a[2], a[3], d, phi)
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

pub fn to_density_matrix(p: &XStateParams) -> Result<DensityMatrix> {
    let p = XStateParams::new(p.a1, p.a2, p.a3, p.a4, p.d, p.phi)?;
    Ok(DensityMatrix::new_unchecked(x_matrix(p.a1, p.a2, p.a3, p.a4, p.d, p.phi)))
}

pub(crate) fn x_matrix(a1: f64, a2: f64, a3: f64, a4: f64, d: f64, phi: f64) -> CMat4 {
    let mut m = CMat4::zeros();
    m[(0, 0)] = c(a1);
    m[(1, 1)] = c(a2);
    m[(2, 2)] = c(a3);
    m[(3, 3)] = c(a4);
    m[(1, 2)] = Complex64::from_polar(d, phi);
    m[(2, 1)] = Complex64::from_polar(d, -phi);
    m
}

/// Entries outside the X-state sparsity pattern with magnitude above `tol`.
pub fn off_pattern_entries(m: &CMat4, tol: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let allowed = i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
            if !allowed && m[(i, j)].norm() >= tol {
                out.push((i, j, m[(i, j)].norm()));
            }
        }
    }
    out
}

/// Reads the parameters back off a matrix of the family.
pub fn from_density_matrix(rho: &DensityMatrix) -> Result<XStateParams> {
    let m = rho.matrix();
    let entries = off_pattern_entries(m, SPARSITY_TOL);
    if !entries.is_empty() {
        return Err(Error::NotInFamily { entries });
    }
    let z = m[(1, 2)];
    let (d, phi) = if z.norm() == 0.0 { (0.0, 0.0) } else { (z.norm(), z.arg()) };
    XStateParams::new(m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re, d, phi)
}

/// `D² > A1 A4`. The boundary `D² = A1 A4` counts as separable.
pub fn is_entangled(p: &XStateParams) -> bool {
    p.d * p.d > p.a1 * p.a4 + ENTANGLEMENT_SLACK
}

/// The four Bell states, `|β1⟩..|β4⟩` at indices 0..3.
pub fn bell_ket(k: usize) -> CVec4 {
    let h = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    match k {
        0 => CVec4::new(h, z, z, h),
        1 => CVec4::new(h, z, z, -h),
        2 => CVec4::new(z, h, h, z),
        3 => CVec4::new(z, h, -h, z),
        _ => panic!("Bell state index {k} out of range"),
    }
}

fn basis_projector(k: usize) -> CMat4 {
    let mut m = CMat4::zeros();
    m[(k, k)] = c(1.0);
    m
}

/// Named reference states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// `Σ λ_k |β_k⟩⟨β_k|`.
    BellDiagonal([f64; 4]),
    /// `λ1 |β3⟩⟨β3| + λ2 |01⟩⟨01| + λ3 |10⟩⟨10|`.
    Vp([f64; 3]),
    /// `λ1 |β3⟩⟨β3| + λ2 |00⟩⟨00| + λ3 |11⟩⟨11|`.
    Horodecki([f64; 3]),
    /// `p |ψ⟩⟨ψ| + q1 |01⟩⟨01| + q2 |10⟩⟨10|` with `|ψ⟩ = α|01⟩ + β|10⟩`.
    Theorem1Example { p: f64, alpha: f64, beta: f64, q1: f64, q2: f64 },
    /// `p1 |β3⟩⟨β3| + p2 |β4⟩⟨β4| + q1 |00⟩⟨00| + q2 |11⟩⟨11|`.
    Theorem2Example { p1: f64, p2: f64, q1: f64, q2: f64 },
    /// The state Rains studied, with `ξ = 1/ln(73/23)`.
    Rains,
    /// `p |β3⟩⟨β3| + q1 |01⟩⟨01| + q2 |10⟩⟨10| + q3 |00⟩⟨00| + q4 |11⟩⟨11|`.
    Theorem3Example { p: f64, q1: f64, q2: f64, q3: f64, q4: f64 },
}

fn check_simplex(name: &str, w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !x.is_finite() || *x < -PARAM_TOL) {
        return Err(Error::Domain(format!("{name}: weights {w:?} must be non-negative")));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > PARAM_TOL {
        return Err(Error::Domain(format!("{name}: weights {w:?} sum to {sum}, expected 1")));
    }
    Ok(())
}

impl NamedState {
    pub fn name(&self) -> &'static str {
        match self {
            Self::BellDiagonal(_) => "bell_diagonal",
            Self::Vp(_) => "vp",
            Self::Horodecki(_) => "horodecki",
            Self::Theorem1Example { .. } => "theorem1_example",
            Self::Theorem2Example { .. } => "theorem2_example",
            Self::Rains => "rains",
            Self::Theorem3Example { .. } => "theorem3_example",
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match *self {
            Self::BellDiagonal(l) => l.to_vec(),
            Self::Vp(l) | Self::Horodecki(l) => l.to_vec(),
            Self::Theorem1Example { p, alpha, beta, q1, q2 } => vec![p, alpha, beta, q1, q2],
            Self::Theorem2Example { p1, p2, q1, q2 } => vec![p1, p2, q1, q2],
            Self::Rains => vec![],
            Self::Theorem3Example { p, q1, q2, q3, q4 } => vec![p, q1, q2, q3, q4],
        }
    }

    pub fn from_name_weights(name: &str, w: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if w.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("family {name} takes {n} weights, got {}", w.len())))
            }
        };
        Ok(match name {
            "bell_diagonal" => {
                need(4)?;
                Self::BellDiagonal([w[0], w[1], w[2], w[3]])
            }
            "vp" => {
                need(3)?;
                Self::Vp([w[0], w[1], w[2]])
            }
            "horodecki" => {
                need(3)?;
                Self::Horodecki([w[0], w[1], w[2]])
            }
            "theorem1_example" => {
                need(5)?;
                Self::Theorem1Example { p: w[0], alpha: w[1], beta: w[2], q1: w[3], q2: w[4] }
            }
            "theorem2_example" => {
                need(4)?;
                Self::Theorem2Example { p1: w[0], p2: w[1], q1: w[2], q2: w[3] }
            }
            "rains" => {
                need(0)?;
                Self::Rains
            }
            "theorem3_example" => {
                need(5)?;
                Self::Theorem3Example { p: w[0], q1: w[1], q2: w[2], q3: w[3], q4: w[4] }
            }
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        })
    }

    /// Builds the density matrix.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        named_state(self)
    }

    /// Parameters of the state; fails for members outside the X-state family.
    pub fn x_params(&self) -> Result<XStateParams> {
        from_density_matrix(&named_state(self)?)
    }
}

pub fn named_state(s: &NamedState) -> Result<DensityMatrix> {
    let bell = |k: usize| projector(&bell_ket(k));
    let m = match *s {
        NamedState::BellDiagonal(l) => {
            check_simplex("bell_diagonal", &l)?;
            (0..4).fold(CMat4::zeros(), |acc, k| acc + bell(k) * c(l[k]))
        }
        NamedState::Vp(l) => {
            check_simplex("vp", &l)?;
            bell(2) * c(l[0]) + basis_projector(1) * c(l[1]) + basis_projector(2) * c(l[2])
        }
        NamedState::Horodecki(l) => {
            check_simplex("horodecki", &l)?;
            bell(2) * c(l[0]) + basis_projector(0) * c(l[1]) + basis_projector(3) * c(l[2])
        }
        NamedState::Theorem1Example { p, alpha, beta, q1, q2 } => {
            check_simplex("theorem1_example", &[p, q1, q2])?;
            let norm = alpha * alpha + beta * beta;
            if (norm - 1.0).abs() > PARAM_TOL {
                return Err(Error::Domain(format!(
                    "theorem1_example: |alpha|^2 + |beta|^2 = {norm}, expected 1"
                )));
            }
            let psi = CVec4::new(c(0.0), c(alpha), c(beta), c(0.0));
            projector(&psi) * c(p) + basis_projector(1) * c(q1) + basis_projector(2) * c(q2)
        }
        NamedState::Theorem2Example { p1, p2, q1, q2 } => {
            check_simplex("theorem2_example", &[p1, p2, q1, q2])?;
            bell(2) * c(p1)
                + bell(3) * c(p2)
                + basis_projector(0) * c(q1)
                + basis_projector(3) * c(q2)
        }
        NamedState::Rains => rains_matrix(),
        NamedState::Theorem3Example { p, q1, q2, q3, q4 } => {
            check_simplex("theorem3_example", &[p, q1, q2, q3, q4])?;
            bell(2) * c(p)
                + basis_projector(1) * c(q1)
                + basis_projector(2) * c(q2)
                + basis_projector(0) * c(q3)
                + basis_projector(3) * c(q4)
        }
    };
    DensityMatrix::new(m)
}

fn rains_matrix() -> CMat4 {
    let xi = 1.0 / (73.0f64 / 23.0).ln();
    let a2 = 45907.0 / 90000.0 - 7.0 * xi / 150.0;
    let a3 = 29093.0 / 90000.0 + 7.0 * xi / 150.0;
    let d = 1201.0 / 3750.0 + 49.0 * xi / 3600.0;
    x_matrix(1.0 / 12.0, a2, a3, 1.0 / 12.0, d, 0.0)
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.weights();
        if w.is_empty() {
            write!(f, "{}", self.name())
        } else {
            let list: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            write!(f, "{}:{}", self.name(), list.join(","))
        }
    }
}

/// Parses `NAME` or `NAME:w1,w2,...`.
impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let weights = if rest.is_empty() {
            vec![]
        } else {
            rest.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("weight {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_name_weights(name, &weights)
    }
}
