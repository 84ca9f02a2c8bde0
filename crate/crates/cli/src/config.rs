//! JSON run configuration.

use std::collections::HashSet;
use std::path::PathBuf;

use decohere_core::linalg::{hermitian_residual, max_abs};
use decohere_core::models::OscillatorScenario;
use decohere_core::series::linspace;
use decohere_core::{
    diagonalize_hamiltonian, CMatrix, CVector, Complex64, DecoherenceParams, DensityMatrix, SpectralHamiltonian,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub hamiltonian: HamiltonianSpec,
    pub initial_state: InitialState,
    pub times: TimeGrid,
    #[serde(default)]
    pub observables: Vec<NamedObservable>,
    #[serde(default)]
    pub track_elements: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Eigenvalues(Vec<f64>),
    Matrix(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Matrix(ComplexMatrix),
    PureVector(ComplexVector),
    Coherent(CoherentSpec),
}

/// Row-major matrix; a missing `im` means a real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentSpec {
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedObservable {
    pub name: String,
    pub matrix: ComplexMatrix,
}

/// Everything a command needs, built from a validated configuration.
#[derive(Debug, Clone)]
pub struct System {
    pub params: DecoherenceParams,
    pub spec: SpectralHamiltonian,
    pub rho0: DensityMatrix,
    pub observables: Vec<(String, CMatrix)>,
    pub times: Vec<f64>,
}

/// Parse and validate a configuration document. Errors name the offending
/// field.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() || path.is_empty() || path == "." || path == "?" {
            CliError::config(format!("invalid JSON: {inner}"))
        } else {
            CliError::config(format!("{path}: {inner}"))
        }
    })?;
    cfg.build()?;
    Ok(cfg)
}

fn finite(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("{field}: value must be finite")))
    }
}

impl ComplexMatrix {
    fn to_matrix(&self, field: &str) -> CliResult<CMatrix> {
        let n = self.re.len();
        if n == 0 {
            return Err(CliError::config(format!("{field}.re: matrix is empty")));
        }
        for (r, row) in self.re.iter().enumerate() {
            if row.len() != n {
                return Err(CliError::config(format!(
                    "{field}.re[{r}]: expected {n} columns for a square matrix, found {}",
                    row.len()
                )));
            }
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|row| row.len() != n) {
                return Err(CliError::config(format!("{field}.im: shape must match re ({n} x {n})")));
            }
        }
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let re = finite(&format!("{field}.re[{r}][{c}]"), self.re[r][c])?;
                let im = match &self.im {
                    Some(im) => finite(&format!("{field}.im[{r}][{c}]"), im[r][c])?,
                    None => 0.0,
                };
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

impl ComplexVector {
    fn to_vector(&self, field: &str) -> CliResult<CVector> {
        if let Some(im) = &self.im {
            if im.len() != self.re.len() {
                return Err(CliError::config(format!("{field}.im: length must match re ({})", self.re.len())));
            }
        }
        let mut v = CVector::zeros(self.re.len());
        for k in 0..self.re.len() {
            let re = finite(&format!("{field}.re[{k}]"), self.re[k])?;
            let im = match &self.im {
                Some(im) => finite(&format!("{field}.im[{k}]"), im[k])?,
                None => 0.0,
            };
            v[k] = Complex64::new(re, im);
        }
        Ok(v)
    }
}

impl RunConfig {
    pub fn params(&self) -> CliResult<DecoherenceParams> {
        DecoherenceParams::with_hbar(self.tau1, self.tau2, self.hbar).map_err(|e| CliError::from(e).at("tau1/tau2/hbar"))
    }

    /// Validate every field and assemble the system it describes.
    pub fn build(&self) -> CliResult<System> {
        let params = self.params()?;
        let spec = match &self.hamiltonian {
            HamiltonianSpec::Eigenvalues(e) => {
                if e.is_empty() {
                    return Err(CliError::config("hamiltonian.eigenvalues: list is empty"));
                }
                for (k, &x) in e.iter().enumerate() {
                    finite(&format!("hamiltonian.eigenvalues[{k}]"), x)?;
                }
                SpectralHamiltonian::from_eigenvalues(e).map_err(|e| CliError::from(e).at("hamiltonian.eigenvalues"))?
            }
            HamiltonianSpec::Matrix(m) => {
                let h = m.to_matrix("hamiltonian.matrix")?;
                diagonalize_hamiltonian(&h).map_err(|e| CliError::from(e).at("hamiltonian.matrix"))?
            }
        };
        let n = spec.dim();
        let rho0 = match &self.initial_state {
            InitialState::Matrix(m) => {
                let m = m.to_matrix("initial_state.matrix")?;
                check_dim("initial_state.matrix", m.nrows(), n)?;
                DensityMatrix::new(m).map_err(|e| CliError::from(e).at("initial_state.matrix"))?
            }
            InitialState::PureVector(v) => {
                let v = v.to_vector("initial_state.pure_vector")?;
                check_dim("initial_state.pure_vector", v.len(), n)?;
                DensityMatrix::pure(&v).map_err(|e| CliError::from(e).at("initial_state.pure_vector"))?
            }
            InitialState::Coherent(c) => {
                check_dim("initial_state.coherent.dim", c.dim, n)?;
                let alpha = Complex64::new(
                    finite("initial_state.coherent.alpha_re", c.alpha_re)?,
                    finite("initial_state.coherent.alpha_im", c.alpha_im)?,
                );
                OscillatorScenario::new(alpha, 1.0, c.dim)
                    .and_then(|sc| sc.initial_state())
                    .map_err(|e| CliError::from(e).at("initial_state.coherent"))?
            }
        };
        let g = &self.times;
        if !(g.start.is_finite() && g.start >= 0.0) {
            return Err(CliError::config(format!("times.start: must be >= 0, got {}", g.start)));
        }
        if !(g.stop.is_finite() && g.stop > g.start) {
            return Err(CliError::config(format!("times.stop: must exceed start ({}), got {}", g.start, g.stop)));
        }
        if g.count < 2 {
            return Err(CliError::config(format!("times.count: must be at least 2, got {}", g.count)));
        }
        let times = linspace(g.start, g.stop, g.count).map_err(|e| CliError::from(e).at("times"))?;

        let mut seen = HashSet::new();
        let mut observables = Vec::new();
        for (k, o) in self.observables.iter().enumerate() {
            let field = format!("observables[{k}]");
            if o.name.is_empty() || o.name == "time" || o.name == "H" || o.name.contains([',', '\n', '"']) {
                return Err(CliError::config(format!(
                    "{field}.name: {:?} is reserved or not a valid column name",
                    o.name
                )));
            }
            if !seen.insert(o.name.clone()) {
                return Err(CliError::config(format!("{field}.name: duplicate observable {:?}", o.name)));
            }
            let m = o.matrix.to_matrix(&format!("{field}.matrix"))?;
            check_dim(&format!("{field}.matrix"), m.nrows(), n)?;
            let res = hermitian_residual(&m);
            if res > 1e-10 * max_abs(&m).max(1.0) {
                return Err(CliError::config(format!("{field}.matrix: not Hermitian (residual {res:e})")));
            }
            observables.push((o.name.clone(), m));
        }
        for (k, &[r, c]) in self.track_elements.iter().enumerate() {
            if r >= n || c >= n {
                return Err(CliError::config(format!(
                    "track_elements[{k}]: index ({r}, {c}) out of range for dimension {n}"
                )));
            }
        }
        Ok(System { params, spec, rho0, observables, times })
    }
}

fn check_dim(field: &str, found: usize, expected: usize) -> CliResult<()> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{field}: dimension {found} does not match the hamiltonian dimension {expected}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "tau1": 0.1, "tau2": 0.1,
        "hamiltonian": {"eigenvalues": [0.0, 1.0]},
        "initial_state": {"pure_vector": {"re": [1.0, 1.0]}},
        "times": {"start": 0.0, "stop": 1.0, "count": 11},
        "track_elements": [[0, 1]]
    }"#;

    fn msg(e: CliError) -> String {
        assert_eq!(e.exit_code(), 2);
        e.to_string()
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.hbar, 1.0);
        let sys = cfg.build().unwrap();
        assert_eq!(sys.times.len(), 11);
        assert!((sys.rho0.get(0, 1).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config(MINIMAL).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
        let mut odd = cfg.clone();
        odd.tau1 = 0.1 + 1e-17 * 3.0;
        odd.tau2 = std::f64::consts::PI / 10.0;
        let text = serde_json::to_string(&odd).unwrap();
        assert_eq!(parse_config(&text).unwrap(), odd);
    }

    #[test]
    fn ordering_violation_mentions_rule() {
        let text = MINIMAL.replace("\"tau1\": 0.1", "\"tau1\": 0.5");
        assert!(msg(parse_config(&text).unwrap_err()).contains("tau1 <= tau2"));
    }

    #[test]
    fn index_out_of_range() {
        let text = MINIMAL.replace("[[0, 1]]", "[[0, 5]]");
        let m = msg(parse_config(&text).unwrap_err());
        assert!(m.contains("track_elements[0]") && m.contains("out of range"), "{m}");
    }

    #[test]
    fn type_errors_name_the_path() {
        let text = MINIMAL.replace("\"count\": 11", "\"count\": \"eleven\"");
        assert!(msg(parse_config(&text).unwrap_err()).contains("times.count"));
        let text = MINIMAL.replace("\"tau2\"", "\"tau_2\"");
        assert!(msg(parse_config(&text).unwrap_err()).contains("tau_2"));
        assert!(msg(parse_config("{ not json").unwrap_err()).contains("JSON"));
    }

    #[test]
    fn dimension_mismatch() {
        let text = MINIMAL.replace("[1.0, 1.0]", "[1.0, 1.0, 0.0]");
        assert!(msg(parse_config(&text).unwrap_err()).contains("initial_state.pure_vector"));
    }

    #[test]
    fn non_hermitian_observable() {
        let text = MINIMAL.replace(
            "\"track_elements\"",
            "\"observables\": [{\"name\": \"a\", \"matrix\": {\"re\": [[0, 1], [0, 0]]}}], \"track_elements\"",
        );
        assert!(msg(parse_config(&text).unwrap_err()).contains("observables[0].matrix"));
    }

    #[test]
    fn bad_grid() {
        let text = MINIMAL.replace("\"count\": 11", "\"count\": 1");
        assert!(msg(parse_config(&text).unwrap_err()).contains("times.count"));
    }
}
