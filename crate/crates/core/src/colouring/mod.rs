//! Colourings of finite models and their capped multiplicity profiles.
//!
//! Level 0 starts with the single colour `0`. A lifted colour of a level-`(i+1)`
//! point records, for each colour `α_p` of the level below (in canonical order),
//! whether some point of colour `α_p` is inside (`f_p`) and whether some is
//! outside (`g_p`). Refinement prepends bits recording membership in
//! parameters one level up (or, at level 0, equality with atom parameters).
//!
//! Colour classes are sparse: only realized colours are listed. Two models
//! are compared over a shared `basis`, the ordered class of the level below.

mod concrete;
mod matching;
mod profile;

use std::fmt;

pub use concrete::{
    base_colouring, lift_colouring, lift_colouring_over, refine_atoms, refine_colouring, ColouringLevel,
};
pub use matching::match_parameters;
pub use profile::{classify_colour, lift_profile, profile, similar, CappedCount, ColourKind, MultiplicityProfile};

use crate::model::ModelError;

/// The part of a colour below any refinement bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Core {
    /// The level-0 colour `0`.
    Base,
    /// `⟨f_1..f_q, g_1..g_q⟩`.
    Lift(Box<[bool]>),
}

/// Colours order lexicographically on their bit-vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Colour {
    /// Refinement bits, newest first.
    pub refine: Box<[bool]>,
    pub core: Core,
}

impl Colour {
    pub fn base() -> Colour {
        Colour { refine: Box::new([]), core: Core::Base }
    }

    pub fn lift(f: &[bool], g: &[bool]) -> Colour {
        assert_eq!(f.len(), g.len());
        Colour { refine: Box::new([]), core: Core::Lift(f.iter().chain(g).copied().collect()) }
    }

    /// Prepends refinement bits.
    pub fn refined(&self, bits: &[bool]) -> Colour {
        Colour { refine: bits.iter().chain(self.refine.iter()).copied().collect(), core: self.core.clone() }
    }

    /// `(f_p, g_p)` for a lifted colour.
    pub fn fg(&self, p: usize) -> Option<(bool, bool)> {
        match &self.core {
            Core::Lift(b) if p < b.len() / 2 => Some((b[p], b[b.len() / 2 + p])),
            _ => None,
        }
    }

    /// `q` for a lifted colour over a class of `q` colours.
    pub fn width(&self) -> Option<usize> {
        match &self.core {
            Core::Lift(b) => Some(b.len() / 2),
            Core::Base => None,
        }
    }

    /// Parses the [`Display`](fmt::Display) form.
    pub fn parse(text: &str) -> Option<Colour> {
        let bits = |s: &str| -> Option<Vec<bool>> {
            s.chars()
                .filter(|&c| c != ',')
                .map(|c| match c {
                    '0' => Some(false),
                    '1' => Some(true),
                    _ => None,
                })
                .collect()
        };
        let (refine, core) = match text.rsplit_once(';') {
            Some((r, c)) => (bits(r)?, c),
            None => (Vec::new(), text),
        };
        let core = if core == "0" {
            Core::Base
        } else {
            let b = bits(core.trim_start_matches('<').trim_end_matches('>'))?;
            if b.len() % 2 == 1 {
                return None;
            }
            Core::Lift(b.into())
        };
        Some(Colour { refine: refine.into(), core })
    }
}

/// `0` for the base colour, `<bits>` for a lift, refinement bits then `;`.
impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |v: &[bool]| v.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
        if !self.refine.is_empty() {
            write!(f, "{};", b(&self.refine))?;
        }
        match &self.core {
            Core::Base => f.write_str("0"),
            Core::Lift(v) => write!(f, "<{}>", b(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ColourError {
    #[error("colourings are over different bases")]
    ClassMismatch,
    #[error("colour {colour} does not fit a class of {q} colours")]
    OrderingMismatch { colour: String, q: usize },
    #[error("expected level {expected}, got level {found}")]
    LevelMismatch { expected: u32, found: u32 },
    #[error("threshold {0} is too small to classify colours (need at least 2)")]
    ThresholdTooSmall(u64),
    #[error("threshold {threshold} is below the similarity degree {j}")]
    ThresholdBelowDegree { threshold: u64, j: u64 },
    #[error("lifting would produce more than {0} colours")]
    TooManyColours(usize),
    #[error("cannot match parameters: {0}")]
    Matching(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[cfg(test)]
mod tests;
