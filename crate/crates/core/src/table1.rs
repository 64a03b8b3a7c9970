//! Classification of every three-term, three-qubit support pattern.
//!
//! Basis vectors are labelled 1..8 in the order 000, 110, 101, 011, 111, 001,
//! 010, 100, and a pattern such as `127` is the span of vectors 1, 2 and 7.
//! Each pattern is classified from several random states with generic nonzero
//! coefficients on its support.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{classify, Verdict};
use crate::error::{Error, Result};
use crate::state::{random_on_support, SupportPattern};

/// Smallest coefficient modulus drawn for a trial state.
pub const MIN_MAGNITUDE: f64 = 0.1;

const BASIS_LABELS: [&str; 8] = ["000", "110", "101", "011", "111", "001", "010", "100"];

/// Patterns with one particle factored out.
pub const REFERENCE_CASE_I: [&str; 24] = [
    "127", "128", "136", "138", "146", "147", "167", "168", //
    "178", "235", "238", "245", "247", "257", "258", "278", //
    "345", "346", "356", "358", "368", "456", "457", "467",
];

/// Genuinely three-particle entangled patterns.
pub const REFERENCE_CASE_II: [&str; 32] = [
    "123", "124", "125", "126", "134", "135", "137", "145", //
    "148", "156", "157", "158", "234", "236", "237", "246", //
    "248", "256", "267", "268", "347", "348", "357", "367", //
    "378", "458", "468", "478", "567", "568", "578", "678",
];

/// `(label, bitstring)` pairs for labels 1..=8.
pub fn basis_label_map() -> Vec<(usize, &'static str)> {
    BASIS_LABELS
        .iter()
        .enumerate()
        .map(|(i, &b)| (i + 1, b))
        .collect()
}

/// Bitstring for a basis label in 1..=8.
pub fn basis_for_label(label: usize) -> Option<&'static str> {
    label
        .checked_sub(1)
        .and_then(|i| BASIS_LABELS.get(i).copied())
}

/// Support pattern for a label like `"127"`.
pub fn pattern_for_label(label: &str) -> Result<SupportPattern> {
    let bits = label
        .chars()
        .map(|c| {
            c.to_digit(10)
                .and_then(|d| basis_for_label(d as usize))
                .ok_or_else(|| Error::Parse(format!("invalid basis label {c:?} in {label:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    SupportPattern::from_bitstrings(&bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// Partially entangled: some particle factors out.
    I,
    /// Genuinely entangled.
    II,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub pattern_label: String,
    pub support: SupportPattern,
    pub case: Case,
    /// Partition shared by every trial, for Case I rows.
    pub witness_partition: Option<Vec<Vec<usize>>>,
}

fn classify_pattern(label: &str, trials: usize, seeds: &[u64]) -> Result<Table1Row> {
    let support = pattern_for_label(label)?;
    let mut outcomes = Vec::with_capacity(trials);
    for &seed in seeds {
        let state = random_on_support(&support, MIN_MAGNITUDE, seed)?;
        let c = classify(&state)?;
        outcomes.push((c.verdict, c.partition));
    }
    let unstable = |detail: String| Error::ClassificationUnstable {
        pattern: label.to_string(),
        detail,
    };
    let (first_verdict, first_partition) = outcomes[0].clone();
    if let Some((v, p)) = outcomes.iter().find(|o| o.1 != first_partition) {
        return Err(unstable(format!(
            "trials disagree: {first_verdict} {first_partition:?} vs {v} {p:?}"
        )));
    }
    let (case, witness_partition) = match first_verdict {
        Verdict::GenuinelyEntangled => (Case::II, None),
        Verdict::PartiallyEntangled | Verdict::FullySeparable => (Case::I, Some(first_partition)),
    };
    Ok(Table1Row {
        pattern_label: label.to_string(),
        support,
        case,
        witness_partition,
    })
}

/// Classifies all 56 three-term patterns, `trials_per_pattern` states each.
pub fn reproduce_table1(trials_per_pattern: usize, seed: u64) -> Result<Vec<Table1Row>> {
    if trials_per_pattern < 3 {
        return Err(Error::Unsupported(format!(
            "at least 3 trials per pattern are needed, got {trials_per_pattern}"
        )));
    }
    let labels: Vec<String> = (1..=8)
        .combinations(3)
        .map(|c| c.iter().map(|d| d.to_string()).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<Vec<u64>> = labels
        .iter()
        .map(|_| (0..trials_per_pattern).map(|_| rng.gen()).collect())
        .collect();
    labels
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(label, s)| classify_pattern(label, trials_per_pattern, s))
        .collect()
}

/// Row counts and differences from the reference table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Check {
    pub case_i: usize,
    pub case_ii: usize,
    /// Labels whose case differs from the reference, or that are missing.
    pub mismatches: Vec<String>,
}

impl Table1Check {
    pub fn matches_reference(&self) -> bool {
        self.case_i == REFERENCE_CASE_I.len()
            && self.case_ii == REFERENCE_CASE_II.len()
            && self.mismatches.is_empty()
    }
}

pub fn check_against_reference(rows: &[Table1Row]) -> Table1Check {
    let reference_i: BTreeSet<&str> = REFERENCE_CASE_I.into_iter().collect();
    let reference_ii: BTreeSet<&str> = REFERENCE_CASE_II.into_iter().collect();
    let found_i: BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.case == Case::I)
        .map(|r| r.pattern_label.as_str())
        .collect();
    let found_ii: BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.case == Case::II)
        .map(|r| r.pattern_label.as_str())
        .collect();
    let mismatches = reference_i
        .symmetric_difference(&found_i)
        .chain(reference_ii.symmetric_difference(&found_ii))
        .map(|s| s.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Table1Check {
        case_i: found_i.len(),
        case_ii: found_ii.len(),
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_dictionary() {
        assert_eq!(basis_for_label(1), Some("000"));
        assert_eq!(basis_for_label(5), Some("111"));
        assert_eq!(basis_for_label(8), Some("100"));
        assert_eq!(basis_for_label(0), None);
        assert_eq!(basis_for_label(9), None);
        assert_eq!(basis_label_map().len(), 8);
    }

    #[test]
    fn reference_sets_partition_all_patterns() {
        let all: BTreeSet<&str> = REFERENCE_CASE_I
            .iter()
            .chain(&REFERENCE_CASE_II)
            .copied()
            .collect();
        assert_eq!(all.len(), 56);
        for label in all {
            let digits: Vec<char> = label.chars().collect();
            assert!(digits.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn pattern_labels_parse() {
        let p = pattern_for_label("127").unwrap();
        assert_eq!(p.bitstrings(), vec!["000", "010", "110"]);
        assert!(pattern_for_label("129").is_err());
        assert!(pattern_for_label("11").is_err());
    }

    #[test]
    fn single_rows() {
        let row = classify_pattern("127", 3, &[1, 2, 3]).unwrap();
        assert_eq!(row.case, Case::I);
        assert_eq!(row.witness_partition, Some(vec![vec![1, 2], vec![3]]));
        let row = classify_pattern("123", 3, &[1, 2, 3]).unwrap();
        assert_eq!(row.case, Case::II);
        assert_eq!(row.witness_partition, None);
    }

    #[test]
    fn too_few_trials() {
        assert!(reproduce_table1(2, 0).is_err());
    }

    #[test]
    fn mismatch_detection() {
        let mut rows = reproduce_table1(3, 5).unwrap();
        assert!(check_against_reference(&rows).matches_reference());
        rows[0].case = match rows[0].case {
            Case::I => Case::II,
            Case::II => Case::I,
        };
        let check = check_against_reference(&rows);
        assert!(!check.matches_reference());
        assert_eq!(check.mismatches, vec![rows[0].pattern_label.clone()]);
    }
}
