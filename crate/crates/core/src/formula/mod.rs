//! Abstract syntax for the untyped language of set theory and the typed
//! language of type theory, with parsing, printing and prenexing.

mod parse;
mod prenex;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse_typed, parse_typed_sentence, parse_untyped, parse_untyped_sentence, ParseError};
pub use prenex::{to_prenex, PrenexSentence, QuantKind, Quantifier};

/// A variable of the typed language: a name together with its type index.
///
/// Two typed variables with the same name and different types are different
/// variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedVar {
    pub name: String,
    pub ty: u32,
}

impl TypedVar {
    pub fn new(name: impl Into<String>, ty: u32) -> Self {
        TypedVar { name: name.into(), ty }
    }
}

impl fmt::Display for TypedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// Variables that can appear in a [`Formula`].
pub trait Variable: Clone + Eq + Ord + std::hash::Hash + fmt::Display + fmt::Debug {
    fn name(&self) -> &str;
    /// Same variable kind, different name.
    fn with_name(&self, name: String) -> Self;
}

impl Variable for String {
    fn name(&self) -> &str {
        self
    }
    fn with_name(&self, name: String) -> Self {
        name
    }
}

impl Variable for TypedVar {
    fn name(&self) -> &str {
        &self.name
    }
    fn with_name(&self, name: String) -> Self {
        TypedVar { name, ty: self.ty }
    }
}

/// First-order formula over membership and equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula<V = String> {
    Mem(V, V),
    Eq(V, V),
    Not(Box<Formula<V>>),
    And(Box<Formula<V>>, Box<Formula<V>>),
    Or(Box<Formula<V>>, Box<Formula<V>>),
    Implies(Box<Formula<V>>, Box<Formula<V>>),
    Iff(Box<Formula<V>>, Box<Formula<V>>),
    Forall(V, Box<Formula<V>>),
    Exists(V, Box<Formula<V>>),
}

/// A formula of the typed language.
pub type TypedFormula = Formula<TypedVar>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("membership atom requires consecutive types: `{atom}` has types {left} and {right}")]
    NonConsecutiveMembership { atom: String, left: u32, right: u32 },
    #[error("equality atom requires equal types: `{atom}` has types {left} and {right}")]
    UnequalEquality { atom: String, left: u32, right: u32 },
}

impl<V: Variable> Formula<V> {
    pub fn mem(x: V, y: V) -> Self {
        Formula::Mem(x, y)
    }
    pub fn eq(x: V, y: V) -> Self {
        Formula::Eq(x, y)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Self, b: Self) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Self, b: Self) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Self, b: Self) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn forall(x: V, body: Self) -> Self {
        Formula::Forall(x, Box::new(body))
    }
    pub fn exists(x: V, body: Self) -> Self {
        Formula::Exists(x, Box::new(body))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Mem(..) | Formula::Eq(..))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Mem(..) | Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// Every variable occurring in the formula, bound or free.
    pub fn variables(&self) -> BTreeSet<V> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Variables in order of first occurrence, left to right (binders included).
    pub fn variables_in_order(&self) -> Vec<V> {
        let mut out: Vec<V> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        });
        out
    }

    fn visit_vars(&self, visit: &mut impl FnMut(&V)) {
        match self {
            Formula::Mem(x, y) | Formula::Eq(x, y) => {
                visit(x);
                visit(y);
            }
            Formula::Not(f) => f.visit_vars(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_vars(visit);
                b.visit_vars(visit);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                visit(x);
                f.visit_vars(visit);
            }
        }
    }

    pub fn free_variables(&self) -> BTreeSet<V> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<V>, out: &mut BTreeSet<V>) {
        match self {
            Formula::Mem(x, y) | Formula::Eq(x, y) => {
                for v in [x, y] {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Applies `f` to every variable occurrence, binders included.
    pub fn map_vars<W: Variable>(&self, f: &mut impl FnMut(&V) -> W) -> Formula<W> {
        match self {
            Formula::Mem(x, y) => Formula::Mem(f(x), f(y)),
            Formula::Eq(x, y) => Formula::Eq(f(x), f(y)),
            Formula::Not(g) => Formula::not(g.map_vars(f)),
            Formula::And(a, b) => Formula::and(a.map_vars(f), b.map_vars(f)),
            Formula::Or(a, b) => Formula::or(a.map_vars(f), b.map_vars(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_vars(f), b.map_vars(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_vars(f), b.map_vars(f)),
            Formula::Forall(x, g) => {
                let x = f(x);
                Formula::forall(x, g.map_vars(f))
            }
            Formula::Exists(x, g) => {
                let x = f(x);
                Formula::exists(x, g.map_vars(f))
            }
        }
    }

    /// Renames bound variables so that every quantifier binds a variable
    /// that is bound nowhere else and does not clash with a free variable.
    ///
    /// Binders are visited left to right; the first binder of a name keeps
    /// it, later ones get the lowest unused `name_N` suffix.
    pub fn rename_apart(&self) -> Self {
        let mut used: BTreeSet<String> = self.variables().iter().map(|v| v.name().to_owned()).collect();
        let mut taken: BTreeSet<V> = self.free_variables();
        let mut scope: Vec<(V, V)> = Vec::new();
        self.rename_apart_rec(&mut scope, &mut taken, &mut used, false)
    }

    /// Renames only binders that shadow an enclosing binder of the same
    /// variable; sibling binders keep their names.
    pub fn rename_shadowed(&self) -> Self {
        let mut used: BTreeSet<String> = self.variables().iter().map(|v| v.name().to_owned()).collect();
        let mut taken = BTreeSet::new();
        let mut scope: Vec<(V, V)> = Vec::new();
        self.rename_apart_rec(&mut scope, &mut taken, &mut used, true)
    }

    fn rename_apart_rec(
        &self,
        scope: &mut Vec<(V, V)>,
        taken: &mut BTreeSet<V>,
        used: &mut BTreeSet<String>,
        shadow_only: bool,
    ) -> Self {
        let lookup = |scope: &Vec<(V, V)>, v: &V| {
            scope.iter().rev().find(|(from, _)| from == v).map(|(_, to)| to.clone()).unwrap_or_else(|| v.clone())
        };
        match self {
            Formula::Mem(x, y) => Formula::Mem(lookup(scope, x), lookup(scope, y)),
            Formula::Eq(x, y) => Formula::Eq(lookup(scope, x), lookup(scope, y)),
            Formula::Not(g) => Formula::not(g.rename_apart_rec(scope, taken, used, shadow_only)),
            Formula::And(a, b) => Formula::and(
                a.rename_apart_rec(scope, taken, used, shadow_only),
                b.rename_apart_rec(scope, taken, used, shadow_only),
            ),
            Formula::Or(a, b) => Formula::or(
                a.rename_apart_rec(scope, taken, used, shadow_only),
                b.rename_apart_rec(scope, taken, used, shadow_only),
            ),
            Formula::Implies(a, b) => Formula::implies(
                a.rename_apart_rec(scope, taken, used, shadow_only),
                b.rename_apart_rec(scope, taken, used, shadow_only),
            ),
            Formula::Iff(a, b) => Formula::iff(
                a.rename_apart_rec(scope, taken, used, shadow_only),
                b.rename_apart_rec(scope, taken, used, shadow_only),
            ),
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                let clash = if shadow_only { scope.iter().any(|(from, _)| from == x) } else { taken.contains(x) };
                let fresh = if clash {
                    let v = x.with_name(fresh_name(x.name(), used));
                    used.insert(v.name().to_owned());
                    v
                } else {
                    x.clone()
                };
                taken.insert(fresh.clone());
                scope.push((x.clone(), fresh.clone()));
                let body = g.rename_apart_rec(scope, taken, used, shadow_only);
                scope.pop();
                if matches!(self, Formula::Forall(..)) {
                    Formula::forall(fresh, body)
                } else {
                    Formula::exists(fresh, body)
                }
            }
        }
    }
}

/// Lowest `base_N` (N ≥ 1) not in `used`.
pub(crate) fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|n| !used.contains(n)).expect("unbounded search")
}

impl TypedFormula {
    /// Checks the type side-conditions on every atom in one pass.
    pub fn check_types(&self) -> Result<(), TypeError> {
        match self {
            Formula::Mem(x, y) => {
                if y.ty == x.ty + 1 {
                    Ok(())
                } else {
                    Err(TypeError::NonConsecutiveMembership { atom: format!("{x} in {y}"), left: x.ty, right: y.ty })
                }
            }
            Formula::Eq(x, y) => {
                if x.ty == y.ty {
                    Ok(())
                } else {
                    Err(TypeError::UnequalEquality { atom: format!("{x} = {y}"), left: x.ty, right: y.ty })
                }
            }
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.check_types(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.check_types()?;
                b.check_types()
            }
        }
    }

    pub fn max_type(&self) -> u32 {
        self.variables().iter().map(|v| v.ty).max().unwrap_or(0)
    }
}

impl<V: Variable> fmt::Display for Formula<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

/// Renders an untyped formula in the concrete syntax.
pub fn render_untyped(f: &Formula) -> String {
    render::render(f)
}

/// Renders a typed formula in the concrete syntax.
pub fn render_typed(f: &TypedFormula) -> String {
    render::render(f)
}
