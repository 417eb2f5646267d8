use std::collections::HashMap;

use rayon::prelude::*;

use super::symmetry::Tables;
use super::{Model, ModelError};
use crate::formula::{Formula, PrenexSentence, QuantKind, TypedFormula, TypedVar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Enumerate only orbit representatives under atom permutations fixing
    /// the earlier quantified values.
    pub symmetry: bool,
    /// Fan out over the outermost quantifier.
    pub parallel: bool,
}

// Matrix over variable slots; values are level ranks.
enum Expr {
    Mem(usize, usize),
    Eq(usize, usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, v: &[u64]) -> bool {
        match self {
            Expr::Mem(x, y) => v[*x] < 64 && (v[*y] >> v[*x]) & 1 == 1,
            Expr::Eq(x, y) => v[*x] == v[*y],
            Expr::Not(a) => !a.eval(v),
            Expr::And(a, b) => a.eval(v) && b.eval(v),
            Expr::Or(a, b) => a.eval(v) || b.eval(v),
            Expr::Implies(a, b) => !a.eval(v) || b.eval(v),
            Expr::Iff(a, b) => a.eval(v) == b.eval(v),
        }
    }
}

fn compile(f: &TypedFormula, slots: &HashMap<&TypedVar, usize>) -> Result<Expr, ModelError> {
    let slot = |x: &TypedVar| slots.get(x).copied().ok_or_else(|| ModelError::Unbound(x.to_string()));
    let bx = |g: &TypedFormula| compile(g, slots).map(Box::new);
    Ok(match f {
        Formula::Mem(x, y) => Expr::Mem(slot(x)?, slot(y)?),
        Formula::Eq(x, y) => Expr::Eq(slot(x)?, slot(y)?),
        Formula::Not(a) => Expr::Not(bx(a)?),
        Formula::And(a, b) => Expr::And(bx(a)?, bx(b)?),
        Formula::Or(a, b) => Expr::Or(bx(a)?, bx(b)?),
        Formula::Implies(a, b) => Expr::Implies(bx(a)?, bx(b)?),
        Formula::Iff(a, b) => Expr::Iff(bx(a)?, bx(b)?),
        Formula::Forall(..) | Formula::Exists(..) => return Err(ModelError::NotQuantifierFree),
    })
}

struct Plan<'a> {
    kinds: Vec<QuantKind>,
    levels: Vec<u32>,
    sizes: Vec<u64>,
    matrix: Expr,
    tables: Option<&'a Tables>,
}

/// Number of matrix evaluations a full expansion may need.
pub fn full_expansion_work(model: &Model, p: &PrenexSentence) -> Option<u128> {
    p.prefix.iter().try_fold(1u128, |acc, q| {
        let s = model.level_size(q.var.ty).filter(|&s| s <= super::MATERIALIZE_BUDGET)?;
        acc.checked_mul(u128::from(s))
    })
}

/// Truth of a prenex sentence by full expansion.
pub fn eval_sentence(model: &Model, p: &PrenexSentence) -> Result<bool, ModelError> {
    eval_sentence_with(model, p, EvalOptions { symmetry: false, parallel: true })
}

pub fn eval_sentence_with(model: &Model, p: &PrenexSentence, opts: EvalOptions) -> Result<bool, ModelError> {
    let mut sizes = Vec::new();
    for q in &p.prefix {
        sizes.push(model.materializable(q.var.ty)?);
    }
    let slots: HashMap<&TypedVar, usize> = p.prefix.iter().enumerate().map(|(i, q)| (&q.var, i)).collect();
    let plan = Plan {
        kinds: p.prefix.iter().map(|q| q.kind).collect(),
        levels: p.prefix.iter().map(|q| q.var.ty).collect(),
        sizes,
        matrix: compile(&p.matrix, &slots)?,
        tables: if opts.symmetry { model.symmetry_tables() } else { None },
    };
    if plan.kinds.is_empty() {
        return Ok(plan.matrix.eval(&[]));
    }
    let stab: Option<Vec<u16>> = plan.tables.map(|t| (1..t.group_order() as u16).collect());
    let candidates = plan.candidates(0, stab.as_deref());
    let branch = |(r, st): (u64, Option<Vec<u16>>)| {
        let mut vals = vec![0u64; plan.kinds.len()];
        vals[0] = r;
        plan.run(1, &mut vals, st.as_deref())
    };
    let exists = plan.kinds[0] == QuantKind::Exists;
    Ok(match (opts.parallel, exists) {
        (true, true) => candidates.into_par_iter().any(branch),
        (true, false) => candidates.into_par_iter().all(branch),
        (false, true) => candidates.into_iter().any(branch),
        (false, false) => candidates.into_iter().all(branch),
    })
}

impl Plan<'_> {
    /// Values for slot `i`, each with the stabilizer it leaves (non-identity
    /// elements only). With no symmetry every rank is a candidate.
    fn candidates(&self, i: usize, stab: Option<&[u16]>) -> Vec<(u64, Option<Vec<u16>>)> {
        let (n, size) = (self.levels[i], self.sizes[i]);
        match (self.tables, stab) {
            (Some(t), Some(g)) if !g.is_empty() => (0..size)
                .filter_map(|r| {
                    let mut fixing = Vec::new();
                    for &p in g {
                        let img = t.act(p as usize, n, r);
                        if img < r {
                            return None;
                        }
                        if img == r {
                            fixing.push(p);
                        }
                    }
                    Some((r, Some(fixing)))
                })
                .collect(),
            _ => (0..size).map(|r| (r, None)).collect(),
        }
    }

    fn run(&self, i: usize, vals: &mut [u64], stab: Option<&[u16]>) -> bool {
        if i == self.kinds.len() {
            return self.matrix.eval(vals);
        }
        let exists = self.kinds[i] == QuantKind::Exists;
        let symmetric = matches!(stab, Some(g) if !g.is_empty());
        if !symmetric {
            for r in 0..self.sizes[i] {
                vals[i] = r;
                if self.run(i + 1, vals, None) == exists {
                    return exists;
                }
            }
            return !exists;
        }
        for (r, st) in self.candidates(i, stab) {
            vals[i] = r;
            if self.run(i + 1, vals, st.as_deref()) == exists {
                return exists;
            }
        }
        !exists
    }
}
