//! Stratifications of untyped formulas, and the bridge to the typed language.

mod bounds;
mod classify;
mod union_find;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::formula::{fresh_name, Formula, TypedFormula, TypedVar};

pub use bounds::{binom2, compute_bounds, g_sequence, BoundOverflow, Bounds};
pub use classify::{classify, FragmentClass};
pub use union_find::{Merge, OffsetUnionFind};

/// A type assignment to variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Stratification(pub BTreeMap<String, u32>);

impl Stratification {
    pub fn get(&self, name: &str) -> Option<u32> {
        self.0.get(name).copied()
    }

    pub fn insert(&mut self, name: impl Into<String>, ty: u32) {
        self.0.insert(name.into(), ty);
    }

    /// Restriction to the given names.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> Stratification {
        Stratification(names.into_iter().filter_map(|n| self.0.get(n).map(|&t| (n.clone(), t))).collect())
    }
}

impl<S: Into<String>> FromIterator<(S, u32)> for Stratification {
    fn from_iter<I: IntoIterator<Item = (S, u32)>>(iter: I) -> Self {
        Stratification(iter.into_iter().map(|(n, t)| (n.into(), t)).collect())
    }
}

impl fmt::Display for Stratification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{t}")?;
        }
        f.write_str("}")
    }
}

/// One constraint `σ(upper) = σ(lower) + offset` contributed by an atom.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Constraint {
    pub lower: String,
    pub upper: String,
    pub offset: u32,
    pub atom: String,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset == 0 {
            write!(f, "σ({}) = σ({})  [{}]", self.upper, self.lower, self.atom)
        } else {
            write!(f, "σ({}) = σ({}) + {}  [{}]", self.upper, self.lower, self.offset, self.atom)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("formula is not stratifiable; conflicting cycle: {}", display_cycle(.cycle))]
pub struct Unstratifiable {
    /// Constraints forming a cycle whose offsets do not sum to zero.
    pub cycle: Vec<Constraint>,
}

fn display_cycle(c: &[Constraint]) -> String {
    c.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn atom_constraints(f: &Formula) -> Vec<Constraint> {
    let mut out = Vec::new();
    collect_atoms(f, &mut out);
    out
}

fn collect_atoms(f: &Formula, out: &mut Vec<Constraint>) {
    match f {
        Formula::Mem(x, y) => {
            out.push(Constraint { lower: x.clone(), upper: y.clone(), offset: 1, atom: format!("{x} in {y}") })
        }
        Formula::Eq(x, y) => {
            out.push(Constraint { lower: x.clone(), upper: y.clone(), offset: 0, atom: format!("{x} = {y}") })
        }
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => collect_atoms(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

/// Infers the normalized stratification of `f`.
///
/// Every variable (free or bound, by name) gets a type. Each connected
/// component of the constraint graph has minimum type 0; variables in no
/// atom get 0.
pub fn stratify(f: &Formula) -> Result<Stratification, Unstratifiable> {
    let names: Vec<String> = f.variables_in_order();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut uf = OffsetUnionFind::new(names.len());
    let mut accepted: Vec<Vec<(usize, usize)>> = vec![Vec::new(); names.len()];
    let constraints = atom_constraints(f);
    for (ci, c) in constraints.iter().enumerate() {
        let (a, b) = (index[c.lower.as_str()], index[c.upper.as_str()]);
        match uf.merge(a, b, c.offset as i64) {
            Merge::Joined => {
                accepted[a].push((b, ci));
                accepted[b].push((a, ci));
            }
            Merge::Redundant => {}
            Merge::Conflict { .. } => {
                let mut cycle: Vec<Constraint> =
                    tree_path(&accepted, a, b).into_iter().map(|i| constraints[i].clone()).collect();
                cycle.push(c.clone());
                return Err(Unstratifiable { cycle });
            }
        }
    }
    let found: Vec<(usize, i64)> = (0..names.len()).map(|i| uf.find(i)).collect();
    let mut min: HashMap<usize, i64> = HashMap::new();
    for &(r, o) in &found {
        let m = min.entry(r).or_insert(o);
        *m = (*m).min(o);
    }
    Ok(names.into_iter().zip(found).map(|(n, (r, o))| (n, (o - min[&r]) as u32)).collect())
}

// Constraint indices along the unique path from `a` to `b` in the spanning forest.
fn tree_path(adj: &[Vec<(usize, usize)>], a: usize, b: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &(v, ci) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, ci));
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = b;
    while let Some((u, ci)) = prev[cur] {
        path.push(ci);
        cur = u;
    }
    path.reverse();
    path
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecorateError {
    #[error("stratification has no type for variable {0}")]
    MissingVariable(String),
    #[error("not a stratification: atom {atom} violates its type constraint")]
    NotAStratification { atom: String },
}

/// Attaches `σ(x)` to every variable `x` of `f`.
pub fn decorate(f: &Formula, sigma: &Stratification) -> Result<TypedFormula, DecorateError> {
    for n in f.variables() {
        if sigma.get(&n).is_none() {
            return Err(DecorateError::MissingVariable(n));
        }
    }
    for c in atom_constraints(f) {
        let (lo, hi) = (sigma.get(&c.lower).unwrap(), sigma.get(&c.upper).unwrap());
        if hi as i64 != lo as i64 + c.offset as i64 {
            return Err(DecorateError::NotAStratification { atom: c.atom });
        }
    }
    Ok(f.map_vars(&mut |n: &String| TypedVar { name: n.clone(), ty: sigma.get(n).unwrap() }))
}

/// Deletes types, renaming so that distinct typed variables stay distinct.
///
/// Typed variables are visited in order of first occurrence; the first one
/// with a given name keeps it, later ones get fresh `name_N` names.
pub fn erase(f: &TypedFormula) -> (Formula, Stratification) {
    let vars = f.variables_in_order();
    let mut used: BTreeSet<String> = vars.iter().map(|v| v.name.clone()).collect();
    let mut claimed: BTreeSet<String> = BTreeSet::new();
    let mut rename: HashMap<TypedVar, String> = HashMap::new();
    let mut sigma = Stratification::default();
    for v in vars {
        let name = if claimed.insert(v.name.clone()) {
            v.name.clone()
        } else {
            let fresh = fresh_name(&v.name, &used);
            used.insert(fresh.clone());
            claimed.insert(fresh.clone());
            fresh
        };
        sigma.insert(name.clone(), v.ty);
        rename.insert(v, name);
    }
    (f.map_vars(&mut |v: &TypedVar| rename[v].clone()), sigma)
}
