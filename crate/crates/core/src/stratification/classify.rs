use std::fmt;

use crate::formula::{PrenexSentence, QuantKind};

/// Which decidable fragment a prenex sentence falls into.
///
/// Universal types are kept sorted ascending. Existentials of a ∀*∃*
/// prefix commute, so their types are listed descending; those of an ∃*∀*
/// prefix keep prefix order.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "form")]
pub enum FragmentClass {
    /// ∀*∃* with strictly decreasing existential types.
    FormA {
        universal_types: Vec<u32>,
        existential_types: Vec<u32>,
    },
    /// ∀*∃* with all existential types equal (`s` is `None` when l = 0).
    FormB {
        universal_types: Vec<u32>,
        l: usize,
        s: Option<u32>,
    },
    /// ∃*∀*: existential block first, then universal.
    ExistsForallShape {
        existential_types: Vec<u32>,
        universal_types: Vec<u32>,
    },
    Outside {
        reason: String,
    },
}

impl FragmentClass {
    pub fn name(&self) -> &'static str {
        match self {
            FragmentClass::FormA { .. } => "FormA",
            FragmentClass::FormB { .. } => "FormB",
            FragmentClass::ExistsForallShape { .. } => "ExistsForallShape",
            FragmentClass::Outside { .. } => "Outside",
        }
    }

    /// Sorted universal types of a ∀*∃* class.
    pub fn universal_types(&self) -> Option<&[u32]> {
        match self {
            FragmentClass::FormA { universal_types, .. } | FragmentClass::FormB { universal_types, .. } => {
                Some(universal_types)
            }
            _ => None,
        }
    }

    /// Existential types in prefix order, for a ∀*∃* class.
    pub fn existential_types(&self) -> Option<Vec<u32>> {
        match self {
            FragmentClass::FormA { existential_types, .. } => Some(existential_types.clone()),
            FragmentClass::FormB { l, s, .. } => Some(s.map(|s| vec![s; *l]).unwrap_or_default()),
            _ => None,
        }
    }
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentClass::FormA { universal_types, existential_types } => {
                write!(f, "FormA (forall types {universal_types:?}, exists types {existential_types:?})")
            }
            FragmentClass::FormB { universal_types, l, s } => match s {
                Some(s) => write!(f, "FormB (forall types {universal_types:?}, {l} exists of type {s})"),
                None => write!(f, "FormB (forall types {universal_types:?}, no exists)"),
            },
            FragmentClass::ExistsForallShape { existential_types, universal_types } => {
                write!(f, "ExistsForallShape (exists types {existential_types:?}, forall types {universal_types:?})")
            }
            FragmentClass::Outside { reason } => write!(f, "Outside ({reason})"),
        }
    }
}

/// Classifies by prefix alone; the matrix is not inspected.
pub fn classify(p: &PrenexSentence) -> FragmentClass {
    let kinds: Vec<QuantKind> = p.prefix.iter().map(|q| q.kind).collect();
    let alternations = kinds.windows(2).filter(|w| w[0] != w[1]).count();
    if alternations > 1 {
        return FragmentClass::Outside { reason: format!("quantifier prefix alternates {alternations} times") };
    }
    let types_of = |k: QuantKind| -> Vec<u32> { p.prefix.iter().filter(|q| q.kind == k).map(|q| q.var.ty).collect() };
    let mut universal = types_of(QuantKind::Forall);
    let mut existential = types_of(QuantKind::Exists);
    universal.sort_unstable();
    let exists_first = kinds.first() == Some(&QuantKind::Exists);
    if exists_first {
        return FragmentClass::ExistsForallShape { existential_types: existential, universal_types: universal };
    }
    existential.sort_unstable_by(|a, b| b.cmp(a));
    if existential.windows(2).all(|w| w[0] == w[1]) {
        return FragmentClass::FormB {
            universal_types: universal,
            l: existential.len(),
            s: existential.first().copied(),
        };
    }
    if existential.windows(2).all(|w| w[0] > w[1]) {
        return FragmentClass::FormA { universal_types: universal, existential_types: existential };
    }
    FragmentClass::Outside {
        reason: format!("existential types {existential:?} are neither all equal nor strictly decreasing"),
    }
}
