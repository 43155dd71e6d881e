use std::fmt;
use std::str::FromStr;

use super::{check_label, HeaderReader};
use crate::error::{Error, Result};

const MAGIC: &str = "# qverify measurement record v1";

/// Which of the two SQST records an outcome sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqstMode {
    /// POVM `{Π_k^(m)/d : m ≥ 1}` over the non-computational bases.
    OffdiagMub,
    /// Plain computational-basis measurement.
    DiagComputational,
}

impl SqstMode {
    pub fn name(self) -> &'static str {
        match self {
            SqstMode::OffdiagMub => "offdiag_mub",
            SqstMode::DiagComputational => "diag_computational",
        }
    }
}

impl fmt::Display for SqstMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SqstMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offdiag_mub" => Ok(SqstMode::OffdiagMub),
            "diag_computational" => Ok(SqstMode::DiagComputational),
            _ => Err(Error::invalid(format!("unknown SQST mode `{s}`"))),
        }
    }
}

/// Outcomes `(k, m)` of repeated single-copy measurements: `k` is the
/// element index and `m` the basis index, with `m = 0` the computational
/// basis. Off-diagonal records hold only `m ≥ 1`, diagonal ones only `m = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub mode: SqstMode,
    pub d: usize,
    pub outcomes: Vec<(usize, usize)>,
    pub seed: u64,
    pub source_label: String,
}

impl MeasurementRecord {
    pub fn new(mode: SqstMode, d: usize, outcomes: Vec<(usize, usize)>, seed: u64) -> Result<Self> {
        let r = Self { mode, d, outcomes, seed, source_label: String::new() };
        r.validate()?;
        Ok(r)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        check_label(&label)?;
        self.source_label = label;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid("record dimension must be at least 2"));
        }
        check_label(&self.source_label)?;
        for (i, &(k, m)) in self.outcomes.iter().enumerate() {
            let ok = k < self.d
                && match self.mode {
                    SqstMode::OffdiagMub => (1..=self.d).contains(&m),
                    SqstMode::DiagComputational => m == 0,
                };
            if !ok {
                return Err(Error::invalid(format!("outcome {i} = ({k}, {m}) is invalid for a {} record", self.mode)));
            }
        }
        Ok(())
    }

    /// Concatenate another record of the same mode and dimension.
    pub fn merge(&mut self, other: &MeasurementRecord) -> Result<()> {
        if self.mode != other.mode || self.d != other.d {
            return Err(Error::invalid("only records with equal mode and dimension can be merged"));
        }
        self.outcomes.extend_from_slice(&other.outcomes);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(64 + 8 * self.outcomes.len());
        s.push_str(MAGIC);
        s.push('\n');
        s.push_str(&format!("mode {}\nd {}\ncount {}\nseed {}\nlabel {}\noutcomes\n", self.mode, self.d, self.outcomes.len(), self.seed, self.source_label));
        for (k, m) in &self.outcomes {
            s.push_str(&format!("{k} {m}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut h = HeaderReader::new(text, MAGIC)?;
        let mode: SqstMode = h.parsed("mode")?;
        let d: usize = h.parsed("d")?;
        let count: usize = h.parsed("count")?;
        let seed: u64 = h.parsed("seed")?;
        let (_, label) = h.field("label")?;
        h.marker("outcomes")?;
        let mut outcomes = Vec::with_capacity(count);
        for (line, l) in h.body() {
            let parsed = l
                .split_once(' ')
                .and_then(|(k, m)| Some((k.parse().ok()?, m.parse().ok()?)));
            outcomes.push(parsed.ok_or_else(|| Error::Parse { line, message: format!("expected `k m`, found `{l}`") })?);
        }
        if outcomes.len() != count {
            return Err(Error::Parse { line: 4, message: format!("declared {count} outcomes, found {}", outcomes.len()) });
        }
        let r = Self { mode, d, outcomes, seed, source_label: label.to_string() };
        r.validate()?;
        Ok(r)
    }
}
