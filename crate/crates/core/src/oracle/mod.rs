//! Brute-force REE by direct minimization over the separable set.
//!
//! Candidates are explicit mixtures `σ = Σ_k p_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|` of
//! product pure states, so every iterate is separable and the returned value
//! is a certified upper bound on the REE. The weights are a softmax of `K`
//! logits and each single-qubit state is two Bloch angles, `5K` reals in all.

mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use simplex::{NelderMead, Outcome};

use crate::error::{Error, Result};
use crate::qmath::{
    bloch_ket, bloch_vector, c, hermitian_eig, kron, max_abs, min_eig_pt, projector, reduced_state,
    relative_entropy, xlnx, CMat4, DensityMatrix,
};
use crate::ree::{compute_ree, Branch, CssSolution, ReeResult};
use crate::states::{from_density_matrix, off_pattern_entries, XStateParams};

/// Weight of `I/4` mixed into `σ` while optimizing, keeping `ln σ` finite.
pub const SUPPORT_REGULARIZATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Number of product terms `K` in the mixture.
    pub num_product_terms: usize,
    /// Random starting points (the warm start, when there is one, comes on top).
    pub restarts: usize,
    /// Objective evaluations per start.
    pub max_iterations: usize,
    /// Spread of objective values across the simplex at which a run stops.
    pub convergence_tol: f64,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            num_product_terms: 16,
            restarts: 8,
            max_iterations: 30_000,
            convergence_tol: 1e-12,
            rng_seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_product_terms < 4 {
            return Err(Error::Domain(format!(
                "num_product_terms must be at least 4, got {}",
                self.num_product_terms
            )));
        }
        if self.restarts == 0 && self.max_iterations == 0 {
            return Err(Error::Domain("oracle needs at least one start and one iteration".into()));
        }
        Ok(())
    }
}

/// One term `weight · |a⟩⟨a| ⊗ |b⟩⟨b|`, each qubit given by Bloch angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub theta_a: f64,
    pub phi_a: f64,
    pub theta_b: f64,
    pub phi_b: f64,
}

impl ProductTerm {
    pub fn projector(&self) -> CMat4 {
        projector(&kron(&bloch_ket(self.theta_a, self.phi_a), &bloch_ket(self.theta_b, self.phi_b)))
    }
}

pub fn mixture_matrix(terms: &[ProductTerm]) -> CMat4 {
    terms.iter().fold(CMat4::zeros(), |acc, t| acc + t.projector() * c(t.weight))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// `S(ρ‖σ)` of the best state found, recomputed from `sigma`.
    pub ree_upper_bound: f64,
    pub sigma: DensityMatrixDoc,
    /// Explicit decomposition of `sigma`.
    pub terms: Vec<ProductTerm>,
    pub converged: bool,
    /// Objective evaluations summed over all starts.
    pub iterations_used: usize,
    /// Index of the winning start; the warm start, if any, is index `restarts`.
    pub restart_best_index: usize,
    /// Best value among the random starts alone.
    pub cold_start_best: f64,
    pub warm_started: bool,
}

impl OracleResult {
    pub fn sigma(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.sigma.to_matrix())
    }
}

/// Serializable complex matrix, rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixDoc(pub Vec<Vec<[f64; 2]>>);

impl DensityMatrixDoc {
    pub fn from_matrix(m: &CMat4) -> Self {
        Self((0..4).map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }

    pub fn to_matrix(&self) -> CMat4 {
        CMat4::from_fn(|i, j| num_complex::Complex64::new(self.0[i][j][0], self.0[i][j][1]))
    }
}

struct Objective<'a> {
    rho_ln_rho: f64,
    rho: &'a CMat4,
    k: usize,
}

impl Objective<'_> {
    fn terms(&self, x: &[f64]) -> Vec<ProductTerm> {
        let k = self.k;
        let max = x[..k].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = x[..k].iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        (0..k)
            .map(|i| {
                let a = &x[k + 4 * i..k + 4 * i + 4];
                ProductTerm { weight: w[i] / total, theta_a: a[0], phi_a: a[1], theta_b: a[2], phi_b: a[3] }
            })
            .collect()
    }

    fn regularized(m: &CMat4) -> CMat4 {
        m * c(1.0 - SUPPORT_REGULARIZATION) + CMat4::identity() * c(0.25 * SUPPORT_REGULARIZATION)
    }

    fn value_of_matrix(&self, sigma: &CMat4) -> f64 {
        let Ok(eig) = hermitian_eig(sigma) else { return f64::INFINITY };
        let mut acc = 0.0;
        for kk in 0..4 {
            let v = eig.vector(kk);
            let w = (v.adjoint() * self.rho * v)[(0, 0)].re;
            let mu = eig.values[kk];
            if mu <= 0.0 {
                if w > 0.0 {
                    return f64::INFINITY;
                }
                continue;
            }
            acc += w * mu.ln();
        }
        self.rho_ln_rho - acc
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_of_matrix(&Self::regularized(&mixture_matrix(&self.terms(x))))
    }
}

fn encode(terms: &[ProductTerm], k: usize) -> Vec<f64> {
    let mut x = vec![0.0; 5 * k];
    for i in 0..k {
        match terms.get(i) {
            Some(t) if t.weight > 0.0 => {
                x[i] = t.weight.ln();
                x[k + 4 * i..k + 4 * i + 4].copy_from_slice(&[t.theta_a, t.phi_a, t.theta_b, t.phi_b]);
            }
            _ => {
                x[i] = -60.0;
                x[k + 4 * i..k + 4 * i + 4].copy_from_slice(&[0.0, 0.0, 0.0, 0.0]);
            }
        }
    }
    x
}

/// Product-state decomposition of an X-form separable state
/// (`y ≤ √(r1 r4)`, `y ≤ √(r2 r3)`).
///
/// A phase-averaged product state over four azimuths carries the coherence;
/// the remaining populations are basis projectors. At most eight terms.
pub fn decompose_x_separable(c: &CssSolution) -> Option<Vec<ProductTerm>> {
    let (r1, r2, r3, r4, y) = (c.r1, c.r2, c.r3, c.r4, c.y);
    if [r1, r2, r3, r4, y].iter().any(|v| !v.is_finite() || *v < 0.0) {
        return None;
    }
    let mut terms = Vec::with_capacity(8);
    let (mut a, mut b, mut cc, mut d) = (0.0, 0.0, 0.0, 0.0);
    if y > 0.0 {
        if r1 <= 0.0 || r2 <= 0.0 || r3 <= 0.0 || r4 <= 0.0 {
            return None;
        }
        a = (y * (r1 / r4).sqrt()).min(r1);
        d = (y * (r4 / r1).sqrt()).min(r4);
        b = (y * (r2 / r3).sqrt()).min(r2);
        cc = (y * (r3 / r2).sqrt()).min(r3);
        let w = a + b + cc + d;
        let theta_a = 2.0 * ((a + b) / w).sqrt().min(1.0).acos();
        let theta_b = 2.0 * ((a + cc) / w).sqrt().min(1.0).acos();
        for j in 0..4 {
            let az = j as f64 * std::f64::consts::FRAC_PI_2;
            terms.push(ProductTerm { weight: 0.25 * w, theta_a, phi_a: az, theta_b, phi_b: az + c.phi });
        }
    }
    let pi = std::f64::consts::PI;
    for (rest, ta, tb) in [(r1 - a, 0.0, 0.0), (r2 - b, 0.0, pi), (r3 - cc, pi, 0.0), (r4 - d, pi, pi)] {
        if rest > 0.0 {
            terms.push(ProductTerm { weight: rest, theta_a: ta, phi_a: 0.0, theta_b: tb, phi_b: 0.0 });
        }
    }
    Some(terms)
}

fn random_start(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut x = vec![0.0; 5 * k];
    for v in x[..k].iter_mut() {
        *v = rng.random_range(-0.5..0.5);
    }
    for i in 0..k {
        let base = k + 4 * i;
        x[base] = rng.random_range(0.0..std::f64::consts::PI);
        x[base + 1] = rng.random_range(0.0..std::f64::consts::TAU);
        x[base + 2] = rng.random_range(0.0..std::f64::consts::PI);
        x[base + 3] = rng.random_range(0.0..std::f64::consts::TAU);
    }
    x
}

/// Oracle with the closed-form CSS as warm start whenever `rho` belongs to the
/// family and the analytic solver produced one.
pub fn oracle_ree(rho: &DensityMatrix, cfg: &OracleConfig) -> Result<OracleResult> {
    let warm = from_density_matrix(rho)
        .ok()
        .and_then(|p| compute_ree(&p).ok())
        .and_then(|r| if r.branch == Branch::AnsatzFailure { None } else { r.css });
    oracle_ree_from(rho, cfg, warm.as_ref())
}

/// Oracle with an explicit (optional) warm start.
pub fn oracle_ree_from(rho: &DensityMatrix, cfg: &OracleConfig, warm: Option<&CssSolution>) -> Result<OracleResult> {
    cfg.validate()?;
    let k = cfg.num_product_terms;
    let er = rho.eig()?;
    let objective = Objective { rho_ln_rho: er.values.iter().map(|&v| xlnx(v)).sum(), rho: rho.matrix(), k };
    let nm = NelderMead {
        max_evals: cfg.max_iterations,
        ftol: cfg.convergence_tol,
        step: 0.3,
        restart_gain: cfg.convergence_tol,
    };

    let mut starts: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(r as u64);
            random_start(&mut rng, k)
        })
        .collect();
    let warm_terms = warm.and_then(decompose_x_separable).filter(|t| t.len() <= k);
    let warm_started = warm_terms.is_some();
    if let Some(t) = &warm_terms {
        starts.push(encode(t, k));
    }

    let outcomes: Vec<Outcome> = starts.par_iter().map(|x0| nm.minimize(|x| objective.value(x), x0)).collect();

    let pick = |range: std::ops::Range<usize>| {
        range.min_by(|&a, &b| outcomes[a].f.total_cmp(&outcomes[b].f).then(a.cmp(&b)))
    };
    let cold = pick(0..cfg.restarts).map(|i| outcomes[i].f).unwrap_or(f64::INFINITY);
    let best = pick(0..outcomes.len()).ok_or_else(|| Error::Domain("oracle has no starting point".into()))?;
    let out = &outcomes[best];

    // report the plain mixture or its regularized version, whichever is closer
    let mut terms = objective.terms(&out.x);
    let plain = DensityMatrix::new_unchecked(mixture_matrix(&terms));
    let reg = DensityMatrix::new_unchecked(Objective::regularized(plain.matrix()));
    let plain_value = relative_entropy(rho, &plain).unwrap_or(f64::INFINITY);
    let reg_value = relative_entropy(rho, &reg)?;
    let (sigma, value) = if plain_value <= reg_value {
        (plain, plain_value)
    } else {
        for t in terms.iter_mut() {
            t.weight *= 1.0 - SUPPORT_REGULARIZATION;
        }
        let pi = std::f64::consts::PI;
        for (ta, tb) in [(0.0, 0.0), (0.0, pi), (pi, 0.0), (pi, pi)] {
            terms.push(ProductTerm {
                weight: 0.25 * SUPPORT_REGULARIZATION,
                theta_a: ta,
                phi_a: 0.0,
                theta_b: tb,
                phi_b: 0.0,
            });
        }
        (reg, reg_value)
    };

    Ok(OracleResult {
        ree_upper_bound: value,
        sigma: DensityMatrixDoc::from_matrix(sigma.matrix()),
        terms,
        converged: out.converged,
        iterations_used: outcomes.iter().map(|o| o.evals).sum(),
        restart_best_index: best,
        cold_start_best: cold,
        warm_started,
    })
}

/// How far a state is from the CSS ansatz sparsity pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureFingerprint {
    /// Largest entry outside the diagonal and the `(1,2)`/`(2,1)` pair.
    pub off_pattern_max: f64,
    /// Largest x or y component of either reduced Bloch vector.
    pub bloch_xy_max: f64,
    /// `|y − √(r1 r4)|` of the in-pattern part; diagnostic only.
    pub edge_defect: f64,
}

impl StructureFingerprint {
    pub fn of(m: &CMat4) -> Self {
        let off_pattern_max = off_pattern_entries(m, 0.0).iter().map(|e| e.2).fold(0.0, f64::max);
        let a = bloch_vector(&reduced_state(m, 0));
        let b = bloch_vector(&reduced_state(m, 1));
        let bloch_xy_max = [a[0], a[1], b[0], b[1]].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let edge_defect = (m[(1, 2)].norm() - (m[(0, 0)].re * m[(3, 3)].re).max(0.0).sqrt()).abs();
        Self { off_pattern_max, bloch_xy_max, edge_defect }
    }

    /// Violation of the ansatz sparsity structure.
    pub fn violation(&self) -> f64 {
        self.off_pattern_max.max(self.bloch_xy_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub branch: Branch,
    pub oracle_ree: f64,
    pub closed_ree: Option<f64>,
    pub difference: Option<f64>,
    pub cold_start_ree: f64,
    pub fingerprint: StructureFingerprint,
    pub oracle: OracleResult,
}

/// Runs the oracle next to an analytic result, warm-starting from its CSS.
pub fn oracle_validate(p: &XStateParams, closed: &ReeResult, cfg: &OracleConfig) -> Result<ValidationReport> {
    let rho = crate::states::to_density_matrix(p)?;
    let warm = if closed.branch == Branch::AnsatzFailure { None } else { closed.css };
    let oracle = oracle_ree_from(&rho, cfg, warm.as_ref())?;
    let fingerprint = StructureFingerprint::of(&oracle.sigma.to_matrix());
    Ok(ValidationReport {
        branch: closed.branch,
        oracle_ree: oracle.ree_upper_bound,
        closed_ree: closed.ree,
        difference: closed.ree.map(|v| (v - oracle.ree_upper_bound).abs()),
        cold_start_ree: oracle.cold_start_best,
        fingerprint,
        oracle,
    })
}

/// Checks that `sigma` is PPT and that `terms` is a convex combination reproducing it.
pub fn check_feasible(result: &OracleResult) -> Result<()> {
    let total: f64 = result.terms.iter().map(|t| t.weight).sum();
    if result.terms.iter().any(|t| t.weight < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::Internal(format!("mixture weights sum to {total}")));
    }
    let sigma = result.sigma.to_matrix();
    let gap = max_abs(&(mixture_matrix(&result.terms) - sigma));
    if gap > 1e-12 {
        return Err(Error::Internal(format!("terms do not reproduce sigma ({gap:e})")));
    }
    let pt = min_eig_pt(&DensityMatrix::new_unchecked(sigma))?;
    if pt < -1e-10 {
        return Err(Error::Internal(format!("sigma is not PPT ({pt:e})")));
    }
    Ok(())
}
