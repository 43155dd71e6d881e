//! Universal measurement records and a-posteriori estimation: selective
//! state tomography over MUB POVMs and classical shadows.
//!
//! Both record types serialize to a line-oriented text format with a
//! `key value` header followed by one outcome per line, and round-trip
//! bit-exactly.

mod clifford;
mod record;
mod snapshots;
mod sqst;

pub use clifford::{random_clifford, CliffordTableau};
pub use record::{MeasurementRecord, SqstMode};
pub use snapshots::{
    shadows_collect, shadows_estimate, shadows_single_shot, ShadowEnsemble, ShadowSnapshotSet, Snapshot,
    SnapshotSampler, SnapshotSetting, MAX_CLIFFORD_QUBITS,
};
pub use sqst::{
    sqst_collect, sqst_epsilon, sqst_estimate_element, sqst_estimate_matrix, sqst_estimate_observable,
    sqst_failure_probability, sqst_observable_sample_size, sqst_sample_size, sqst_sample_size_many,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point estimate with a two-sided error guarantee:
/// `Pr[|value − truth| ≥ epsilon] ≤ delta` from `n_used` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: Complex64,
    pub epsilon: f64,
    pub delta: f64,
    pub n_used: u64,
}

impl EstimateWithError {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Reads `key value` header lines up to a terminating marker line.
struct HeaderReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> HeaderReader<'a> {
    fn new(text: &'a str, magic: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l == magic => Ok(Self { lines }),
            _ => Err(Error::Parse { line: 1, message: format!("expected header line `{magic}`") }),
        }
    }

    /// Next `key value` pair; the value is everything after the first space.
    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (i, line) = self
            .lines
            .next()
            .ok_or_else(|| Error::Parse { line: 0, message: format!("missing field `{key}`") })?;
        let (k, v) = line.split_once(' ').unwrap_or((line, ""));
        if k != key {
            return Err(Error::Parse { line: i + 1, message: format!("expected `{key}`, found `{k}`") });
        }
        Ok((i + 1, v))
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, v) = self.field(key)?;
        v.parse().map_err(|_| Error::Parse { line, message: format!("bad value `{v}` for `{key}`") })
    }

    fn marker(&mut self, marker: &str) -> Result<()> {
        match self.lines.next() {
            Some((_, l)) if l == marker => Ok(()),
            Some((i, l)) => Err(Error::Parse { line: i + 1, message: format!("expected `{marker}`, found `{l}`") }),
            None => Err(Error::Parse { line: 0, message: format!("missing `{marker}`") }),
        }
    }

    fn body(self) -> impl Iterator<Item = (usize, &'a str)> {
        self.lines.map(|(i, l)| (i + 1, l))
    }
}

fn check_label(label: &str) -> Result<()> {
    if label.contains('\n') || label.contains('\r') {
        return Err(Error::invalid("labels must fit on one line"));
    }
    Ok(())
}
