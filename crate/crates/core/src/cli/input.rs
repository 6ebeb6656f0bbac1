use std::io::BufRead;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::qmath::{CMat4, DensityMatrix};
use crate::states::{from_density_matrix, to_density_matrix, x_state_from_bloch, BlochZParams, NamedState, XStateParams};

/// One state document. Exactly one field must be present.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateInput {
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub params: Option<ParamsDoc>,
    pub bloch: Option<BlochZParams>,
    pub family: Option<FamilyDoc>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ParamsDoc {
    #[serde(alias = "a1")]
    pub A1: f64,
    #[serde(alias = "a2")]
    pub A2: f64,
    #[serde(alias = "a3")]
    pub A3: f64,
    #[serde(alias = "a4")]
    pub A4: f64,
    #[serde(alias = "d")]
    pub D: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub name: String,
    #[serde(default)]
    pub weights: Vec<f64>,
}

/// A validated input: always a density matrix, plus family parameters when
/// the matrix belongs to the X-state family.
#[derive(Debug, Clone)]
pub struct ResolvedState {
    pub rho: DensityMatrix,
    pub params: Result<XStateParams>,
}

impl StateInput {
    pub fn from_json(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedState> {
        let present = [self.matrix.is_some(), self.params.is_some(), self.bloch.is_some(), self.family.is_some()];
        let count = present.iter().filter(|&&b| b).count();
        if count != 1 {
            return Err(Error::Parse(format!(
                "state document needs exactly one of matrix, params, bloch, family (found {count})"
            )));
        }
        if let Some(m) = &self.matrix {
            let rho = DensityMatrix::new(parse_matrix(m)?)?;
            let params = from_density_matrix(&rho);
            return Ok(ResolvedState { rho, params });
        }
        let p = if let Some(p) = &self.params {
            XStateParams::new(p.A1, p.A2, p.A3, p.A4, p.D, p.phi)?
        } else if let Some(b) = &self.bloch {
            x_state_from_bloch(b)?
        } else {
            let f = self.family.as_ref().expect("one variant is present");
            NamedState::from_name_weights(&f.name, &f.weights)?.x_params()?
        };
        Ok(ResolvedState { rho: to_density_matrix(&p)?, params: Ok(p) })
    }
}

pub(crate) fn parse_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::Parse("matrix: expected 4 rows of 4 [re, im] pairs".into()));
    }
    Ok(CMat4::from_fn(|i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub(crate) fn matrix_doc(m: &CMat4) -> Vec<Vec<[f64; 2]>> {
    (0..4).map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// `a1,a2,a3,a4,d[,phi]`.
pub fn parse_params_flag(s: &str) -> Result<StateInput> {
    let v = parse_floats(s)?;
    if !(v.len() == 5 || v.len() == 6) {
        return Err(Error::Parse(format!("--params takes a1,a2,a3,a4,d[,phi], got {} values", v.len())));
    }
    let params = ParamsDoc { A1: v[0], A2: v[1], A3: v[2], A4: v[3], D: v[4], phi: v.get(5).copied().unwrap_or(0.0) };
    Ok(StateInput { params: Some(params), ..StateInput::default() })
}

/// `name:w1,w2,...`.
pub fn parse_family_flag(s: &str) -> Result<StateInput> {
    let named: NamedState = s.parse()?;
    let family = FamilyDoc { name: named.name().to_string(), weights: named.weights() };
    Ok(StateInput { family: Some(family), ..StateInput::default() })
}

pub(crate) fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}

/// Reads JSON-lines state documents; blank lines and `#` comments are skipped.
/// Each entry keeps its own parse outcome so one bad line does not hide the rest.
pub fn read_documents<R: BufRead>(r: R) -> Result<Vec<Result<StateInput>>> {
    let mut docs = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("read error: {e}")))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        docs.push(StateInput::from_json(t).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("line {}: {m}", n + 1)),
            other => other,
        }));
    }
    Ok(docs)
}
