//! Solver-model export: weighted MaxSAT (WCNF) and LP text models for the
//! trace-maximization problems, with exact rescaling manifests.
//!
//! Slot weights are rationals; both formats need integers, so weights are
//! scaled by the least common multiple of their denominators. The manifest
//! records that denominator, so an external optimum divided by it is
//! exactly comparable to the in-process rational optimum.

use crate::{Error, Int, Ratio, Result};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelManifest {
    pub format: String,
    pub variables: usize,
    pub hard_clauses: usize,
    /// Common denominator; external objective values are `scaled / denominator`.
    pub denominator: String,
    /// Scaled integer weight per variable, in variable order.
    pub scaled_weights: Vec<String>,
    /// Hard-clause weight (WCNF only): total scaled weight + 1.
    pub top: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub text: String,
    pub manifest: ModelManifest,
}

fn scale(weights: &[Ratio]) -> (Int, Vec<Int>) {
    let mut denom = Int::one();
    for w in weights {
        denom = denom.lcm(w.denom());
    }
    let scaled = weights
        .iter()
        .map(|w| (w * Ratio::from_integer(denom.clone())).to_integer())
        .collect();
    (denom, scaled)
}

/// Weighted CNF: one soft unit clause per slot, one hard clause
/// `¬A ∨ ¬B ∨ ¬C` per forbidden triple. Variables are 1-based in slot order.
pub fn wcnf_model(weights: &[Ratio], triples: &[[usize; 3]]) -> Result<Model> {
    for tr in triples {
        if tr.iter().any(|&s| s >= weights.len()) {
            return Err(Error::Precondition(format!("triple {tr:?} references unknown slot")));
        }
    }
    let (denom, scaled) = scale(weights);
    let top: Int = scaled.iter().sum::<Int>() + Int::one();
    let mut text = String::new();
    let nclauses = weights.len() + triples.len();
    writeln!(text, "c max-weight feasible trace; objective denominator {denom}").unwrap();
    writeln!(text, "p wcnf {} {} {}", weights.len(), nclauses, top).unwrap();
    for tr in triples {
        writeln!(text, "{top} -{} -{} -{} 0", tr[0] + 1, tr[1] + 1, tr[2] + 1).unwrap();
    }
    for (i, w) in scaled.iter().enumerate() {
        writeln!(text, "{w} {} 0", i + 1).unwrap();
    }
    Ok(Model {
        text,
        manifest: ModelManifest {
            format: "wcnf".into(),
            variables: weights.len(),
            hard_clauses: triples.len(),
            denominator: denom.to_string(),
            scaled_weights: scaled.iter().map(Int::to_string).collect(),
            top: Some(top.to_string()),
        },
    })
}

/// LP text model: binary variable per slot, `xA + xB + xC <= 2` per triple.
pub fn lp_model(weights: &[Ratio], triples: &[[usize; 3]]) -> Result<Model> {
    for tr in triples {
        if tr.iter().any(|&s| s >= weights.len()) {
            return Err(Error::Precondition(format!("triple {tr:?} references unknown slot")));
        }
    }
    let (denom, scaled) = scale(weights);
    let mut text = String::new();
    writeln!(text, "\\ objective denominator {denom}").unwrap();
    writeln!(text, "Maximize").unwrap();
    write!(text, " obj:").unwrap();
    for (i, w) in scaled.iter().enumerate() {
        write!(text, "{} {w} x{}", if i == 0 { " " } else { " + " }, i + 1).unwrap();
    }
    writeln!(text).unwrap();
    writeln!(text, "Subject To").unwrap();
    for (ci, tr) in triples.iter().enumerate() {
        writeln!(text, " c{}: x{} + x{} + x{} <= 2", ci + 1, tr[0] + 1, tr[1] + 1, tr[2] + 1)
            .unwrap();
    }
    writeln!(text, "Binary").unwrap();
    for i in 0..weights.len() {
        writeln!(text, " x{}", i + 1).unwrap();
    }
    writeln!(text, "End").unwrap();
    Ok(Model {
        text,
        manifest: ModelManifest {
            format: "lp".into(),
            variables: weights.len(),
            hard_clauses: triples.len(),
            denominator: denom.to_string(),
            scaled_weights: scaled.iter().map(Int::to_string).collect(),
            top: None,
        },
    })
}

/// Converts an external scaled optimum back to the exact rational objective.
pub fn rescale(manifest: &ModelManifest, scaled_optimum: Int) -> Result<Ratio> {
    let denom: Int = manifest
        .denominator
        .parse()
        .map_err(|_| Error::Precondition("bad denominator in manifest".into()))?;
    if denom <= Int::zero() {
        return Err(Error::Precondition("non-positive denominator".into()));
    }
    Ok(Ratio::new(scaled_optimum, denom))
}
