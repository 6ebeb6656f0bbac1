use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("cos(phi) = {cos_phi:e} is too close to zero; supply D directly instead of g_x")]
    SingularPhase { cos_phi: f64 },

    #[error("matrix is not in the X-state family; offending entries: {}", format_entries(.entries))]
    NotInFamily { entries: Vec<(usize, usize, f64)> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("wrong solver branch: {0}")]
    WrongBranch(String),

    #[error("log-domain violation in {0}")]
    LogDomain(String),

    /// `rho` has weight outside the support of `sigma`, so the divergence is +inf.
    #[error("support of rho is not contained in support of sigma (leaked weight {leaked:e})")]
    InfiniteDivergence { leaked: f64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_entries(entries: &[(usize, usize, f64)]) -> String {
    entries
        .iter()
        .map(|(i, j, v)| format!("({i},{j})={v:e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
