//! Finitely generated models: the iterated power sets over `m` atoms.
//!
//! Level 0 holds the atoms `0..m`; an element of level `n+1` is a subset of
//! level `n`, stored as a bit-vector indexed by level-`n` ranks. The rank of
//! a set is the integer value of its bit-vector.

mod bits;
mod embed;
mod eval;
mod symmetry;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::formula::{Formula, TypedFormula, TypedVar};

pub use bits::Bits;
pub use embed::{embed, EmbedError, EmbeddingMaps};
pub use eval::{eval_sentence, eval_sentence_with, full_expansion_work, EvalOptions};

/// Most elements a level may have to be enumerated, and widest set we store.
pub const MATERIALIZE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("level {level} has {size} elements, over the budget of {budget}")]
    InfeasibleLevel { level: u32, size: String, budget: u64 },
    #[error("variable {var} expects a level-{expected} element, got level {found}")]
    LevelMismatch { var: String, expected: u32, found: u32 },
    #[error("invalid level-{level} element: {reason}")]
    InvalidElement { level: u32, reason: String },
    #[error("no value for variable {0}")]
    Unbound(String),
    #[error("expected a quantifier-free formula")]
    NotQuantifierFree,
}

/// A point of the model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Atom(u32),
    Set { level: u32, members: Bits },
}

impl Element {
    pub fn level(&self) -> u32 {
        match self {
            Element::Atom(_) => 0,
            Element::Set { level, .. } => *level,
        }
    }

    /// Canonical rank within its level, when it fits.
    pub fn rank(&self) -> Option<u64> {
        match self {
            Element::Atom(a) => Some(u64::from(*a)),
            Element::Set { members, .. } => members.to_u64(),
        }
    }

    pub fn members(&self) -> Option<&Bits> {
        match self {
            Element::Atom(_) => None,
            Element::Set { members, .. } => Some(members),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Atom(a) => write!(f, "a{a}"),
            Element::Set { level, members } => write!(f, "{level}:{}", members.to_hex()),
        }
    }
}

/// The model finitely generated by `m` atoms, up to level `max_level`.
pub struct Model {
    atoms: u32,
    max_level: u32,
    sizes: Vec<Option<u64>>,
    symmetry: OnceLock<Option<symmetry::Tables>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model").field("atoms", &self.atoms).field("max_level", &self.max_level).finish()
    }
}

/// Builds the model lazily; nothing is materialized until asked for.
pub fn build_model(m: u32, max_level: u32) -> Model {
    let mut sizes = vec![Some(u64::from(m))];
    for n in 0..max_level as usize {
        sizes.push(match sizes[n] {
            Some(s) if s < 64 => Some(1u64 << s),
            _ => None,
        });
    }
    Model { atoms: m, max_level, sizes, symmetry: OnceLock::new() }
}

impl Model {
    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// `|level n|` when it fits a `u64`.
    pub fn level_size(&self, n: u32) -> Option<u64> {
        self.sizes.get(n as usize).copied().flatten()
    }

    /// `|level n|` as text, using a power-of-two tower once it stops fitting.
    pub fn level_size_expr(&self, n: u32) -> String {
        match self.level_size(n) {
            Some(s) => s.to_string(),
            None => format!("2^({})", self.level_size_expr(n - 1)),
        }
    }

    fn check_level(&self, n: u32) -> Result<(), ModelError> {
        if n > self.max_level {
            return Err(ModelError::InvalidElement {
                level: n,
                reason: format!("model only has levels 0..={}", self.max_level),
            });
        }
        Ok(())
    }

    /// `|level n|`, if the level can be enumerated within budget.
    pub fn materializable(&self, n: u32) -> Result<u64, ModelError> {
        self.check_level(n)?;
        match self.level_size(n) {
            Some(s) if s <= MATERIALIZE_BUDGET => Ok(s),
            _ => {
                Err(ModelError::InfeasibleLevel { level: n, size: self.level_size_expr(n), budget: MATERIALIZE_BUDGET })
            }
        }
    }

    /// Bit width of level-`n` sets (`n ≥ 1`), if representable.
    pub fn width(&self, n: u32) -> Result<usize, ModelError> {
        assert!(n >= 1, "atoms have no width");
        self.check_level(n)?;
        self.materializable(n - 1).map(|s| s as usize)
    }

    /// All elements of level `n`, in rank order.
    pub fn elements(&self, n: u32) -> Result<impl Iterator<Item = Element> + '_, ModelError> {
        let size = self.materializable(n)?;
        Ok((0..size).map(move |r| self.element_unchecked(n, r)))
    }

    fn element_unchecked(&self, n: u32, rank: u64) -> Element {
        if n == 0 {
            Element::Atom(rank as u32)
        } else {
            Element::Set { level: n, members: Bits::from_u64(rank, self.level_size(n - 1).unwrap() as usize) }
        }
    }

    /// The level-`n` element with the given rank.
    pub fn element(&self, n: u32, rank: u64) -> Result<Element, ModelError> {
        self.check_level(n)?;
        if n > 0 {
            self.width(n)?;
        }
        match self.level_size(n) {
            Some(s) if rank < s => Ok(self.element_unchecked(n, rank)),
            Some(_) => Err(ModelError::InvalidElement { level: n, reason: format!("rank {rank} out of range") }),
            None => Ok(self.element_unchecked(n, rank)),
        }
    }

    /// The set of level `n ≥ 1` whose members have the given ranks.
    pub fn set_of(&self, n: u32, members: impl IntoIterator<Item = usize>) -> Result<Element, ModelError> {
        let w = self.width(n)?;
        let mut b = Bits::zeros(w);
        for i in members {
            if i >= w {
                return Err(ModelError::InvalidElement { level: n, reason: format!("member rank {i} ≥ {w}") });
            }
            b.set(i, true);
        }
        Ok(Element::Set { level: n, members: b })
    }

    /// `∅^n`.
    pub fn empty_set(&self, n: u32) -> Result<Element, ModelError> {
        Ok(Element::Set { level: n, members: Bits::zeros(self.width(n)?) })
    }

    /// `V^n`, the level-`n` set containing every level-`(n-1)` point.
    pub fn full_set(&self, n: u32) -> Result<Element, ModelError> {
        Ok(Element::Set { level: n, members: Bits::ones(self.width(n)?) })
    }

    /// Checks that `e` is a well-formed element of this model.
    pub fn validate(&self, e: &Element) -> Result<(), ModelError> {
        match e {
            Element::Atom(a) if *a < self.atoms => Ok(()),
            Element::Atom(a) => {
                Err(ModelError::InvalidElement { level: 0, reason: format!("atom {a} ≥ {}", self.atoms) })
            }
            Element::Set { level: 0, .. } => {
                Err(ModelError::InvalidElement { level: 0, reason: "level-0 points are atoms".into() })
            }
            Element::Set { level, members } => {
                let w = self.width(*level)?;
                if members.len() != w {
                    return Err(ModelError::InvalidElement {
                        level: *level,
                        reason: format!("width {} but level below has {w} points", members.len()),
                    });
                }
                Ok(())
            }
        }
    }

    /// `x ∈ y`; both must be valid and on consecutive levels.
    pub fn member(&self, x: &Element, y: &Element) -> Result<bool, ModelError> {
        self.validate(x)?;
        self.validate(y)?;
        if y.level() != x.level() + 1 {
            return Err(ModelError::LevelMismatch { var: y.to_string(), expected: x.level() + 1, found: y.level() });
        }
        // Ranks of x are < width(y) ≤ budget, so they fit.
        let r = x.rank().expect("member of a representable set has a small rank") as usize;
        Ok(y.members().unwrap().get(r))
    }

    /// Debug dump of a level: one `level rank hex` line per element.
    pub fn dump(&self, n: u32) -> Result<String, ModelError> {
        let mut out = String::new();
        for (r, e) in self.elements(n)?.enumerate() {
            let hex = match &e {
                Element::Atom(a) => format!("{a:x}"),
                Element::Set { members, .. } => members.to_hex(),
            };
            out.push_str(&format!("{n} {r} {hex}\n"));
        }
        Ok(out)
    }

    pub(crate) fn symmetry_tables(&self) -> Option<&symmetry::Tables> {
        self.symmetry.get_or_init(|| symmetry::Tables::build(self)).as_ref()
    }
}

/// Truth of a quantifier-free formula under `env`.
pub fn eval_qf(model: &Model, theta: &TypedFormula, env: &BTreeMap<TypedVar, Element>) -> Result<bool, ModelError> {
    let look = |v: &TypedVar| -> Result<&Element, ModelError> {
        let e = env.get(v).ok_or_else(|| ModelError::Unbound(v.to_string()))?;
        if e.level() != v.ty {
            return Err(ModelError::LevelMismatch { var: v.to_string(), expected: v.ty, found: e.level() });
        }
        model.validate(e)?;
        Ok(e)
    };
    Ok(match theta {
        Formula::Mem(x, y) => model.member(look(x)?, look(y)?)?,
        Formula::Eq(x, y) => look(x)? == look(y)?,
        Formula::Not(g) => !eval_qf(model, g, env)?,
        Formula::And(a, b) => eval_qf(model, a, env)? && eval_qf(model, b, env)?,
        Formula::Or(a, b) => eval_qf(model, a, env)? || eval_qf(model, b, env)?,
        Formula::Implies(a, b) => !eval_qf(model, a, env)? || eval_qf(model, b, env)?,
        Formula::Iff(a, b) => eval_qf(model, a, env)? == eval_qf(model, b, env)?,
        Formula::Forall(..) | Formula::Exists(..) => return Err(ModelError::NotQuantifierFree),
    })
}

#[cfg(test)]
mod tests;
