//! Dense 4×4 complex Hermitian linear algebra for two-qubit states.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ throughout. Everything is natural-log
//! based, so entropies come out in nats.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat4 = Matrix4<Complex64>;
pub type CVec4 = Vector4<Complex64>;
pub type CVec2 = Vector2<Complex64>;

/// Eigenvalues at or below this are treated as exact zeros in `x ln x`.
pub const ENTROPY_CLAMP: f64 = 1e-15;
/// Eigenvalues of `sigma` below this are outside its support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Largest weight `rho` may put on the null space of `sigma`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `x ln x` with the `0 ln 0 = 0` convention.
pub fn xlnx(x: f64) -> f64 {
    if x <= ENTROPY_CLAMP {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn max_abs(m: &CMat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|v⟩⟨v|`.
pub fn projector(v: &CVec4) -> CMat4 {
    v * v.adjoint()
}

/// Tensor product of two single-qubit kets.
pub fn kron(a: &CVec2, b: &CVec2) -> CVec4 {
    CVec4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

/// Single-qubit pure state at polar angle `theta` and azimuth `phi` on the Bloch sphere.
pub fn bloch_ket(theta: f64, phi: f64) -> CVec2 {
    let (s, cth) = (0.5 * theta).sin_cos();
    CVec2::new(c(cth), Complex64::from_polar(s, phi))
}

pub fn hermitian_part(m: &CMat4) -> CMat4 {
    (m + m.adjoint()) * c(0.5)
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMat4);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-10;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMat4) -> Result<Self> {
        let herm_err = max_abs(&(m - m.adjoint()));
        if !herm_err.is_finite() || herm_err > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (max |m - m†| = {herm_err:e})"
            )));
        }
        let m = hermitian_part(&m);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let eig = hermitian_eig(&m)?;
        if eig.values[0] < -Self::PSD_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not positive semidefinite (smallest eigenvalue {:e})",
                eig.values[0]
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller has already established to be a state.
    pub(crate) fn new_unchecked(m: CMat4) -> Self {
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(CMat4::identity() * c(0.25))
    }

    /// Pure state `|v⟩⟨v|`; `v` is normalized first.
    pub fn pure(v: &CVec4) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        Ok(Self(projector(&(v / c(n)))))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p: [f64; 4]) -> Result<Self> {
        Self::new(CMat4::from_diagonal(&Vector4::from(p).map(c)))
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        hermitian_eig(&self.0)
    }
}

impl AsRef<CMat4> for DensityMatrix {
    fn as_ref(&self) -> &CMat4 {
        &self.0
    }
}

/// Spectrum in ascending order, with eigenvectors stored as the matching columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: [f64; 4],
    pub vectors: CMat4,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> CVec4 {
        self.vectors.column(k).into_owned()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> CMat4 {
        self.map(|x| x)
    }

    /// Applies `f` to the spectrum: `Σ f(λ_k) v_k v_k†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat4 {
        let diag = CMat4::from_diagonal(&Vector4::from(self.values.map(|x| c(f(x)))));
        self.vectors * diag * self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// The input is symmetrized as `(m + m†)/2` first. Each rotation removes the
/// phase of the pivot `a_pq` and then applies a real Jacobi rotation, so the
/// accumulated transform stays unitary.
pub fn hermitian_eig(m: &CMat4) -> Result<EigenSystem> {
    let mut a = hermitian_part(m);
    let mut v = CMat4::identity();
    let scale = a.norm().max(1.0);

    let off_norm = |a: &CMat4| {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if !off.is_finite() {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        if off < OFF_DIAGONAL_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;

                // U restricted to (p, q): [[c, s], [-s e^{-iθ}, c e^{-iθ}]]
                let u_qp = -phase.conj() * sn;
                let u_qq = phase.conj() * cs;

                // a <- a U, v <- v U
                for k in 0..4 {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * cs + akq * u_qp;
                    a[(k, q)] = akp * sn + akq * u_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * cs + vkq * u_qp;
                    v[(k, q)] = vkp * sn + vkq * u_qq;
                }
                // a <- U† a
                for k in 0..4 {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * cs + aqk * u_qp.conj();
                    a[(q, k)] = apk * sn + aqk * u_qq.conj();
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.map(|i| a[(i, i)].re);
    let mut vectors = CMat4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(EigenSystem { values, vectors })
}

/// `−tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.eig()?;
    Ok(-eig.values.iter().map(|&x| xlnx(x)).sum::<f64>())
}

/// `S(ρ‖σ) = tr ρ ln ρ − tr ρ ln σ`, with `ln σ` taken on the support of `σ`.
///
/// Returns [`Error::InfiniteDivergence`] when `ρ` puts weight on the null space
/// of `σ`; [`relative_entropy_or_inf`] maps that to `+∞`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let er = rho.eig()?;
    let es = sigma.eig()?;
    let rho_ln_rho: f64 = er.values.iter().map(|&x| xlnx(x)).sum();

    let mut rho_ln_sigma = 0.0;
    let mut leaked = 0.0;
    for k in 0..4 {
        let v = es.vector(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        let mu = es.values[k];
        if mu < SUPPORT_CUTOFF {
            if w >= SUPPORT_LEAK_TOL {
                leaked += w;
            }
        } else {
            rho_ln_sigma += w * mu.ln();
        }
    }
    if leaked > 0.0 {
        return Err(Error::InfiniteDivergence { leaked });
    }
    Ok(rho_ln_rho - rho_ln_sigma)
}

pub fn relative_entropy_or_inf(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    match relative_entropy(rho, sigma) {
        Err(Error::InfiniteDivergence { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Transposes the second qubit: `(2a+b, 2c+d) -> (2a+d, 2c+b)`.
pub fn partial_transpose(m: &CMat4) -> CMat4 {
    let mut out = CMat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    out[(2 * a + d, 2 * cc + b)] = m[(2 * a + b, 2 * cc + d)];
                }
            }
        }
    }
    out
}

/// Smallest eigenvalue of `ρ^Γ`; negative exactly when a two-qubit state is entangled.
pub fn min_eig_pt(rho: &DensityMatrix) -> Result<f64> {
    Ok(hermitian_eig(&partial_transpose(rho.matrix()))?.values[0])
}

/// `H(p) = −p ln p − (1−p) ln(1−p)` in nats.
///
/// Evaluated through the distance from ½ so that `H(p)` and `H(1−p)` share
/// one code path.
pub fn binary_entropy(p: f64) -> Result<f64> {
    const DOMAIN_TOL: f64 = 1e-12;
    if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&p) {
        return Err(Error::Domain(format!("binary entropy argument {p} outside [0, 1]")));
    }
    let p = p.clamp(0.0, 1.0);
    let d = if p <= 0.5 { 0.5 - p } else { p - 0.5 };
    Ok(-(xlnx(0.5 + d) + xlnx(0.5 - d)))
}

/// Reduced state of one qubit (`which` = 0 traces out the second qubit).
pub fn reduced_state(m: &CMat4, which: usize) -> Matrix2<Complex64> {
    let mut r = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                if which == 0 {
                    r[(i, j)] += m[(2 * i + k, 2 * j + k)];
                } else {
                    r[(i, j)] += m[(2 * k + i, 2 * k + j)];
                }
            }
        }
    }
    r
}

/// Bloch vector `(x, y, z)` of a single-qubit density matrix.
pub fn bloch_vector(r: &Matrix2<Complex64>) -> [f64; 3] {
    [2.0 * r[(0, 1)].re, -2.0 * r[(0, 1)].im, (r[(0, 0)] - r[(1, 1)]).re]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn beta3() -> CVec4 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CVec4::new(c(0.0), c(h), c(h), c(0.0))
    }

    fn random_hermitian(seed: u64) -> CMat4 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = CMat4::from_fn(|_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        hermitian_part(&m)
    }

    #[test]
    fn identity_quarter_spectrum() {
        let eig = DensityMatrix::maximally_mixed().eig().unwrap();
        for v in eig.values {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_projector_spectrum() {
        let rho = DensityMatrix::pure(&beta3()).unwrap();
        let eig = rho.eig().unwrap();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{:?}", eig.values);
        }
    }

    #[test]
    fn reconstruction_and_orthonormality_on_random_inputs() {
        for seed in 0..1000 {
            let m = random_hermitian(seed);
            let eig = hermitian_eig(&m).unwrap();
            assert!(max_abs(&(eig.reconstruct() - m)) < 1e-10, "seed {seed}");
            let gram = eig.vectors.adjoint() * eig.vectors;
            assert!(max_abs(&(gram - CMat4::identity())) < 1e-10, "seed {seed}");
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn diagonal_input_needs_no_rotation() {
        let m = CMat4::from_diagonal(&Vector4::new(c(0.4), c(0.1), c(0.3), c(0.2)));
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.values, [0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn non_finite_input_reports_no_convergence() {
        let mut m = CMat4::identity();
        m[(0, 1)] = c(f64::NAN);
        m[(1, 0)] = c(f64::NAN);
        assert!(matches!(hermitian_eig(&m), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn entropies_of_extremes() {
        let pure = DensityMatrix::pure(&beta3()).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed();
        assert!((von_neumann_entropy(&mixed).unwrap() - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_basics() {
        let pure = DensityMatrix::pure(&beta3()).unwrap();
        let mixed = DensityMatrix::maximally_mixed();
        assert!(relative_entropy(&pure, &pure).unwrap().abs() < 1e-12);
        assert!((relative_entropy(&pure, &mixed).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn support_violation_is_infinite() {
        let mixed = DensityMatrix::maximally_mixed();
        let pure = DensityMatrix::pure(&beta3()).unwrap();
        assert!(matches!(
            relative_entropy(&mixed, &pure),
            Err(Error::InfiniteDivergence { .. })
        ));
        assert_eq!(relative_entropy_or_inf(&mixed, &pure).unwrap(), f64::INFINITY);
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let pure = DensityMatrix::pure(&beta3()).unwrap();
        let pt = partial_transpose(pure.matrix());
        let eig = hermitian_eig(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!((min_eig_pt(&pure).unwrap() + 0.5).abs() < 1e-14);
        assert!((min_eig_pt(&DensityMatrix::maximally_mixed()).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_an_exact_involution() {
        for seed in 0..50 {
            let m = random_hermitian(seed);
            assert_eq!(partial_transpose(&partial_transpose(&m)), m);
            assert_eq!(partial_transpose(&m).trace(), m.trace());
        }
    }

    #[test]
    fn product_states_are_ppt() {
        let zero = bloch_ket(0.0, 0.0);
        let plus = bloch_ket(std::f64::consts::FRAC_PI_2, 0.0);
        let rho = DensityMatrix::pure(&kron(&zero, &plus)).unwrap();
        assert!(min_eig_pt(&rho).unwrap() > -1e-14);
    }

    #[test]
    fn binary_entropy_values() {
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let direct = -0.55 * 0.55f64.ln() - 0.45 * 0.45f64.ln();
        assert!((binary_entropy(0.55).unwrap() - direct).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.1), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(-1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = CMat4::identity() * c(0.25);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(CMat4::identity() * c(0.3)).is_err());
        assert!(DensityMatrix::diagonal([1.2, -0.2, 0.0, 0.0]).is_err());
        assert!(DensityMatrix::diagonal([0.7, 0.3, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn bloch_vectors_of_reduced_states() {
        let plus = bloch_ket(std::f64::consts::FRAC_PI_2, 0.0);
        let zero = bloch_ket(0.0, 0.0);
        let m = projector(&kron(&plus, &zero));
        let a = bloch_vector(&reduced_state(&m, 0));
        let b = bloch_vector(&reduced_state(&m, 1));
        assert!((a[0] - 1.0).abs() < 1e-15 && a[2].abs() < 1e-15);
        assert!((b[2] - 1.0).abs() < 1e-15);
    }
}
