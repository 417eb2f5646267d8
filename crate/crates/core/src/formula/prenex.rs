use std::fmt;

use super::{Formula, TypedFormula, TypedVar, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum QuantKind {
    Forall,
    Exists,
}

impl QuantKind {
    pub fn dual(self) -> Self {
        match self {
            QuantKind::Forall => QuantKind::Exists,
            QuantKind::Exists => QuantKind::Forall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub var: TypedVar,
}

/// A sentence in prenex form: a quantifier prefix over a quantifier-free matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrenexSentence {
    pub prefix: Vec<Quantifier>,
    pub matrix: TypedFormula,
}

impl PrenexSentence {
    pub fn to_formula(&self) -> TypedFormula {
        self.prefix.iter().rev().fold(self.matrix.clone(), |body, q| match q.kind {
            QuantKind::Forall => Formula::forall(q.var.clone(), body),
            QuantKind::Exists => Formula::exists(q.var.clone(), body),
        })
    }

    /// The prenex form of the negation: dual prefix, negated matrix.
    pub fn negate(&self) -> PrenexSentence {
        PrenexSentence {
            prefix: self.prefix.iter().map(|q| Quantifier { kind: q.kind.dual(), var: q.var.clone() }).collect(),
            matrix: match &self.matrix {
                Formula::Not(inner) => (**inner).clone(),
                m => Formula::not(m.clone()),
            },
        }
    }

    pub fn max_type(&self) -> u32 {
        self.prefix.iter().map(|q| q.var.ty).max().unwrap_or(0)
    }
}

impl fmt::Display for PrenexSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Converts a typed sentence to prenex form.
///
/// Bound variables are first renamed apart (left to right, `name_N`
/// suffixes). A biconditional with quantifiers on either side is expanded
/// into two implications, the second copy renamed again. Quantifiers are
/// pulled out left to right; implication antecedents and negations dualize
/// them. Quantifiers whose variable does not occur in the matrix are
/// dropped, so the prefix covers exactly the matrix's variables.
pub fn to_prenex(f: &TypedFormula) -> PrenexSentence {
    let expanded = expand_quantified_iff(f);
    let apart = expanded.rename_apart();
    let mut prefix = Vec::new();
    let matrix = pull(&apart, false, &mut prefix);
    let used = matrix.variables();
    prefix.retain(|q| used.contains(&q.var));
    PrenexSentence { prefix, matrix }
}

fn expand_quantified_iff<V: Variable>(f: &Formula<V>) -> Formula<V> {
    match f {
        Formula::Mem(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(expand_quantified_iff(g)),
        Formula::And(a, b) => Formula::and(expand_quantified_iff(a), expand_quantified_iff(b)),
        Formula::Or(a, b) => Formula::or(expand_quantified_iff(a), expand_quantified_iff(b)),
        Formula::Implies(a, b) => Formula::implies(expand_quantified_iff(a), expand_quantified_iff(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (expand_quantified_iff(a), expand_quantified_iff(b));
            if a.is_quantifier_free() && b.is_quantifier_free() {
                Formula::iff(a, b)
            } else {
                Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
            }
        }
        Formula::Forall(x, g) => Formula::forall(x.clone(), expand_quantified_iff(g)),
        Formula::Exists(x, g) => Formula::exists(x.clone(), expand_quantified_iff(g)),
    }
}

/// Returns the matrix; appends quantifiers to `prefix`. `negated` tracks
/// whether we are under an odd number of negations/antecedents.
fn pull(f: &TypedFormula, negated: bool, prefix: &mut Vec<Quantifier>) -> TypedFormula {
    let polar = |k: QuantKind| if negated { k.dual() } else { k };
    match f {
        Formula::Mem(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(pull(g, !negated, prefix)),
        Formula::And(a, b) => {
            let a = pull(a, negated, prefix);
            Formula::and(a, pull(b, negated, prefix))
        }
        Formula::Or(a, b) => {
            let a = pull(a, negated, prefix);
            Formula::or(a, pull(b, negated, prefix))
        }
        Formula::Implies(a, b) => {
            let a = pull(a, !negated, prefix);
            Formula::implies(a, pull(b, negated, prefix))
        }
        // Only quantifier-free biconditionals survive expansion.
        Formula::Iff(..) => f.clone(),
        Formula::Forall(x, g) => {
            prefix.push(Quantifier { kind: polar(QuantKind::Forall), var: x.clone() });
            pull(g, negated, prefix)
        }
        Formula::Exists(x, g) => {
            prefix.push(Quantifier { kind: polar(QuantKind::Exists), var: x.clone() });
            pull(g, negated, prefix)
        }
    }
}
