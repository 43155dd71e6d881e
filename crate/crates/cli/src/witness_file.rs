//! Witness files: a TOML description of `O = Σ_i w_i O_i`.
//!
//! ```toml
//! n_qubits = 2
//! gamma_s = 0.0
//!
//! [[term]]
//! pauli = "-XX"
//! weight = 1.0
//! shift = 1.0                        # optional
//!
//! [[term]]
//! stabilizer_projector = ["ZZ"]
//! weight = 0.5
//!
//! [[term]]
//! support = [1]
//! real = [[1.0, 0.0], [0.0, -1.0]]
//! imag = [[0.0, 0.0], [0.0, 0.0]]    # optional
//! ```

use serde::Deserialize;

use qverify::simcore::{ObservableMatrix, PauliString};
use qverify::witness::{translate_witness, SamplingTable, TermSpec, WitnessTerm};
use qverify::Complex64;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    n_qubits: usize,
    gamma_s: f64,
    term: Vec<TermFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    pauli: Option<String>,
    stabilizer_projector: Option<Vec<String>>,
    support: Option<Vec<usize>>,
    real: Option<Vec<Vec<f64>>>,
    imag: Option<Vec<Vec<f64>>>,
    weight: Option<f64>,
    shift: Option<f64>,
}

fn pauli(s: &str) -> Result<PauliString, CliError> {
    s.parse().map_err(|e| CliError::Config(format!("bad Pauli string `{s}`: {e}")))
}

impl TermFile {
    fn spec(self, index: usize) -> Result<WitnessTerm, CliError> {
        let bad = |m: &str| CliError::Config(format!("term {}: {m}", index + 1));
        let spec = match (self.pauli, self.stabilizer_projector, self.support) {
            (Some(p), None, None) => TermSpec::Pauli { string: pauli(&p)?, weight: self.weight.unwrap_or(1.0) },
            (None, Some(gens), None) => TermSpec::StabilizerProjector {
                generators: gens.iter().map(|g| pauli(g)).collect::<Result<_, _>>()?,
                weight: self.weight.unwrap_or(1.0),
            },
            (None, None, Some(support)) => {
                if self.weight.is_some() {
                    return Err(bad("matrix terms carry their scale in the entries, not `weight`"));
                }
                let re = self.real.ok_or_else(|| bad("matrix term needs `real`"))?;
                let d = re.len();
                let im = self.imag.unwrap_or_else(|| vec![vec![0.0; d]; d]);
                if re.iter().chain(&im).any(|r| r.len() != d) || im.len() != d {
                    return Err(bad("`real` and `imag` must be square and of equal size"));
                }
                let observable = ObservableMatrix::from_fn(d, |i, j| Complex64::new(re[i][j], im[i][j]));
                TermSpec::Matrix { support, observable }
            }
            _ => return Err(bad("give exactly one of `pauli`, `stabilizer_projector` or `support`")),
        };
        Ok(WitnessTerm { spec, shift: self.shift })
    }
}

pub fn load_witness(text: &str) -> Result<SamplingTable, CliError> {
    let file: WitnessFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let terms = file
        .term
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.spec(i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(translate_witness(file.n_qubits, file.gamma_s, &terms)?)
}
