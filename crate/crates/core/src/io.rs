//! JSON documents: state files and entropy reports.
//!
//! A state file looks like
//! `{"n": 3, "terms": [{"basis": "000", "re": 0.7071, "im": 0.0}, ...]}`;
//! bitstrings are written with particle 1 first. Readers renormalize.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::Classification;
use crate::error::{Error, Result};
use crate::state::{build_state, BasisTerm, PureState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self {
            n: state.n_particles(),
            terms: state
                .to_terms()
                .into_iter()
                .map(|t| TermRecord {
                    basis: t.bitstring,
                    re: t.amplitude.re,
                    im: t.amplitude.im,
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        let terms: Vec<BasisTerm> = self
            .terms
            .iter()
            .map(|t| BasisTerm::new(t.basis.clone(), Complex64::new(t.re, t.im)))
            .collect();
        build_state(&terms, self.n)
    }
}

pub fn parse_state(json: &str) -> Result<PureState> {
    let file: StateFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_state()
}

pub fn state_to_json(state: &PureState) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(state)).expect("state file serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    /// Kept particles, comma-separated.
    pub kept: String,
    #[serde(rename = "S")]
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub n: usize,
    pub entropies: Vec<EntropyRecord>,
    pub eta: f64,
    pub verdict: String,
    pub partition: Vec<Vec<usize>>,
}

impl ReportDocument {
    pub fn from_classification(c: &Classification) -> Self {
        Self {
            n: c.report.n_particles(),
            entropies: c
                .report
                .entries()
                .iter()
                .map(|(m, s)| EntropyRecord {
                    kept: m.label(),
                    s: *s,
                })
                .collect(),
            eta: c.eta,
            verdict: c.verdict.to_string(),
            partition: c.partition.clone(),
        }
    }
}
