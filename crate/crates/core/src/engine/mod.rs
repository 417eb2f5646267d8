//! Deciding form (A) and (B) sentences over capped colour profiles.
//!
//! Universal blocks are fixed one type at a time, lowest type first. Each
//! block refines the level below it by membership cells, with counts capped
//! at a threshold that shrinks by at least `2^K_j` per stage; with that
//! spacing the capped leaves are exactly those of any model with at least
//! the initial threshold of atoms. Every leaf is then searched for
//! witnesses by colour.

mod matrix;
mod search;
mod state;
mod witness;


use serde::{Deserialize, Serialize};

use crate::colouring::ColourError;
use crate::model::ModelError;
use crate::stratification::{Bounds, FragmentClass};

pub use search::{decide, decide_form_a, decide_form_b, Backend, DecideOptions};
pub use state::{abstract_init, AbstractState, Block, Limits, ParamTrace};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A capped count was too coarse for a question the search asked.
    #[error("ambiguous capped count: {0}")]
    Ambiguous(String),
    #[error("not in a decidable fragment: {0}")]
    NotInFragment(String),
    #[error("abstract value {abstract_value} disagrees with concrete value {concrete} at m={m}")]
    CrossCheckMismatch { m: u64, abstract_value: bool, concrete: bool },
    #[error(transparent)]
    Colour(#[from] ColourError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ProvableInTSTI,
    RefutableInTSTI,
    OutsideFragment,
    Infeasible,
}

impl Outcome {
    pub fn from_truth(t: bool) -> Outcome {
        if t {
            Outcome::ProvableInTSTI
        } else {
            Outcome::RefutableInTSTI
        }
    }

    /// The outcome for the negated sentence.
    pub fn flip(self) -> Outcome {
        match self {
            Outcome::ProvableInTSTI => Outcome::RefutableInTSTI,
            Outcome::RefutableInTSTI => Outcome::ProvableInTSTI,
            o => o,
        }
    }
}

pub const FLAG_HEURISTIC: &str = "heuristic";
pub const FLAG_DESK_UNVERIFIED: &str = "desk-unverified level";

/// The result of deciding one sentence, with what backs it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub fragment: FragmentClass,
    pub bounds: Option<Bounds>,
    pub backend: Backend,
    /// Atoms of the model the verdict was read from; `None` when the
    /// abstract run covered every model from `abstract_atoms` up.
    pub model_size: Option<u64>,
    /// Initial threshold of the abstract run: it holds for every model with
    /// at least this many atoms.
    pub abstract_atoms: Option<u64>,
    /// Thresholds per stage of the abstract run.
    pub schedule: Vec<u64>,
    pub leaves: u64,
    /// Atom counts where abstract and concrete evaluation were compared.
    pub cross_checked: Vec<u64>,
    /// Witness literals found in the first leaf.
    pub witnesses: Vec<String>,
    /// Parameter colours of a leaf without witnesses.
    pub counterexample: Vec<String>,
    /// Set when the sentence was decided through its negation.
    pub via_negation: bool,
    pub flags: Vec<String>,
    /// Why no decision was reached, for `OutsideFragment` and `Infeasible`.
    pub reason: Option<String>,
}

impl Verdict {
    fn undecided(outcome: Outcome, fragment: FragmentClass, backend: Backend, reason: String) -> Verdict {
        Verdict {
            outcome,
            fragment,
            bounds: None,
            backend,
            model_size: None,
            abstract_atoms: None,
            schedule: vec![],
            leaves: 0,
            cross_checked: vec![],
            witnesses: vec![],
            counterexample: vec![],
            via_negation: false,
            flags: vec![],
            reason: Some(reason),
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self.outcome, Outcome::ProvableInTSTI | Outcome::RefutableInTSTI)
    }
}
