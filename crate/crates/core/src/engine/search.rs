use std::ops::ControlFlow;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::state::{abstract_init, AbstractState, Block, Limits};
use super::witness::{colour_classes, find_witnesses, LeafCache, Plan};
use super::{EngineError, Outcome, Verdict, FLAG_DESK_UNVERIFIED, FLAG_HEURISTIC};
use crate::colouring::CappedCount;
use crate::formula::PrenexSentence;
use crate::model::{build_model, eval_sentence_with, full_expansion_work, EvalOptions};
use crate::stratification::{classify, compute_bounds, Bounds, FragmentClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Concrete,
    Abstract,
    Both,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub backend: Backend,
    /// Read the verdict from this many atoms instead of the certified bound.
    pub atoms: Option<u64>,
    pub limits: Limits,
    /// Leaves allowed in one abstract run.
    pub max_leaves: u64,
    /// Leaves allowed when trying the widely spaced threshold schedule.
    pub geometric_leaves: u64,
    /// Matrix evaluations allowed for one concrete evaluation.
    pub concrete_work: u128,
    /// Atom counts for the abstract/concrete cross-check.
    pub cross_check: Vec<u64>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            backend: Backend::Both,
            atoms: None,
            limits: Limits::default(),
            max_leaves: 1 << 20,
            geometric_leaves: 1 << 8,
            concrete_work: 1 << 24,
            cross_check: vec![2, 3, 4],
        }
    }
}

struct Prepared {
    matrix: Matrix,
    plan: Plan,
    blocks: Vec<Block>,
    top: u32,
    witnesses: usize,
}

impl Prepared {
    fn new(p: &PrenexSentence) -> Prepared {
        let matrix = Matrix::compile(p);
        let mut types: Vec<u32> =
            (0..matrix.vars.len()).filter(|&v| matrix.universal[v]).map(|v| matrix.level(v)).collect();
        types.sort_unstable();
        types.dedup();
        let blocks = types
            .into_iter()
            .map(|level| Block {
                level,
                vars: (0..matrix.vars.len()).filter(|&v| matrix.universal[v] && matrix.level(v) == level).collect(),
            })
            .collect();
        let plan = Plan::new(&matrix);
        let witnesses = matrix.witnesses().len();
        Prepared { top: p.max_type().saturating_sub(1), plan, blocks, witnesses, matrix }
    }

    fn big_k(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).chain([self.witnesses]).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Base {
    Exact(u64),
    /// Any number of atoms from the initial threshold up.
    Large,
}

#[derive(Clone, Debug, Default)]
struct AbstractRun {
    truth: bool,
    leaves: u64,
    schedule: Vec<u64>,
    witnesses: Vec<String>,
    counterexample: Vec<String>,
}

const MAX_THRESHOLD: u64 = 1 << 40;

/// `T_j = (2^K)^(k'-j+2)` for `j = 0..=k'`.
fn geometric_schedule(k_prime: usize, big_k: usize) -> Option<Vec<u64>> {
    (0..=k_prime)
        .map(|j| {
            let exp = big_k.checked_mul(k_prime - j + 2)?;
            (exp < 41).then(|| 1u64 << exp).filter(|&t| t <= MAX_THRESHOLD)
        })
        .collect()
}

/// The tightest exact schedule: each stage divides by `2^K_j`.
fn tight_schedule(blocks: &[Block], t_final: u64) -> Option<Vec<u64>> {
    let mut out = vec![t_final];
    for b in blocks.iter().rev() {
        let next = out.last()?.checked_shl(b.vars.len() as u32).filter(|&t| t <= MAX_THRESHOLD)?;
        out.push(next);
    }
    out.reverse();
    Some(out)
}

struct Dfs<'a> {
    prep: &'a Prepared,
    limits: Limits,
    schedule: &'a [u64],
    max_leaves: u64,
    run: AbstractRun,
    cache: LeafCache,
    /// Take only the first refinement at the last stage.
    probe: bool,
}

impl Dfs<'_> {
    fn visit(&mut self, s: AbstractState, j: usize) -> Result<ControlFlow<()>, EngineError> {
        if j == self.prep.blocks.len() {
            self.run.leaves += 1;
            if self.run.leaves > self.max_leaves {
                return Err(EngineError::Infeasible(format!("more than {} leaves", self.max_leaves)));
            }
            return Ok(match find_witnesses(&self.prep.matrix, &self.prep.plan, &s, &mut self.cache)? {
                Some(w) => {
                    if self.run.leaves == 1 {
                        self.run.witnesses = w;
                    }
                    ControlFlow::Continue(())
                }
                None => {
                    self.run.counterexample = s
                        .params
                        .iter()
                        .map(|p| format!("{} coloured {}", self.prep.matrix.vars[p.var], p.colour))
                        .collect();
                    ControlFlow::Break(())
                }
            });
        }
        let block = self.prep.blocks[j].clone();
        let t_new = self.schedule[j + 1];
        let limits = self.limits;
        let last = j + 1 == self.prep.blocks.len();
        let classes =
            (last && limits.symmetry && block.level > 0).then(|| colour_classes(&self.prep.plan, &s, block.level - 1));
        if last && self.probe {
            let mut refuted = false;
            let _ = s.for_each_refinement(&block, t_new, &limits, classes.as_deref(), &mut |child| {
                refuted = self.visit(child, j + 1)?.is_break();
                Ok(ControlFlow::Break(()))
            })?;
            return Ok(if refuted { ControlFlow::Break(()) } else { ControlFlow::Continue(()) });
        }
        s.for_each_refinement(&block, t_new, &limits, classes.as_deref(), &mut |child| self.visit(child, j + 1))
    }
}

fn run_schedule(
    prep: &Prepared,
    base: Base,
    schedule: &[u64],
    limits: Limits,
    max_leaves: u64,
) -> Result<AbstractRun, EngineError> {
    let count = match base {
        Base::Exact(m) => CappedCount::Exact(m),
        Base::Large => CappedCount::AtLeast(schedule[0]),
    };
    let init = abstract_init(count, prep.top, schedule[0], &limits)?;
    let mut dfs = Dfs {
        prep,
        limits,
        schedule,
        max_leaves,
        run: AbstractRun::default(),
        cache: LeafCache::default(),
        probe: true,
    };
    // A cheap pass first: refutations often do not depend on the last block.
    let mut flow = dfs.visit(init.clone(), 0)?;
    if flow.is_continue() && !prep.blocks.is_empty() {
        dfs.probe = false;
        dfs.run.leaves = 0;
        flow = dfs.visit(init, 0)?;
    }
    dfs.run.truth = flow.is_continue();
    dfs.run.schedule = schedule.to_vec();
    Ok(dfs.run)
}

fn run_abstract(prep: &Prepared, base: Base, opts: &DecideOptions) -> Result<AbstractRun, EngineError> {
    if let Some(schedule) = geometric_schedule(prep.blocks.len(), prep.big_k().max(1)) {
        match run_schedule(prep, base, &schedule, opts.limits, opts.geometric_leaves) {
            Ok(run) => return Ok(run),
            Err(EngineError::Infeasible(_) | EngineError::Ambiguous(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut t_final = (prep.witnesses as u64).max(2);
    loop {
        let schedule = tight_schedule(&prep.blocks, t_final)
            .ok_or_else(|| EngineError::Infeasible(format!("thresholds above {MAX_THRESHOLD}")))?;
        match run_schedule(prep, base, &schedule, opts.limits, opts.max_leaves) {
            Err(EngineError::Ambiguous(_)) if t_final < 1 << 10 => t_final *= 2,
            r => return r,
        }
    }
}

/// Truth at `m` atoms by full expansion; `None` when over the work budget.
fn concrete_truth(p: &PrenexSentence, m: u64, work: u128) -> Result<Option<bool>, EngineError> {
    let Ok(atoms) = u32::try_from(m) else { return Ok(None) };
    let model = build_model(atoms, p.max_type());
    if full_expansion_work(&model, p).is_none_or(|w| w > work) {
        return Ok(None);
    }
    Ok(Some(eval_sentence_with(&model, p, EvalOptions { symmetry: true, parallel: false })?))
}

fn below_certified(m: u64, b: &Bounds) -> bool {
    BigUint::from(m) < b.certified_m
}

fn is_forall_exists(c: &FragmentClass) -> bool {
    matches!(c, FragmentClass::FormA { .. } | FragmentClass::FormB { .. })
}

fn base_verdict(
    outcome: Outcome,
    fragment: FragmentClass,
    bounds: Bounds,
    backend: Backend,
    p: &PrenexSentence,
) -> Verdict {
    let mut v = Verdict::undecided(outcome, fragment, backend, String::new());
    v.reason = None;
    v.bounds = Some(bounds);
    if p.max_type() >= 3 {
        v.flags.push(FLAG_DESK_UNVERIFIED.into());
    }
    v
}

fn fill(v: &mut Verdict, run: AbstractRun) {
    v.outcome = Outcome::from_truth(run.truth);
    v.leaves = run.leaves;
    v.schedule = run.schedule;
    v.witnesses = run.witnesses;
    v.counterexample = run.counterexample;
}

fn infeasible(mut v: Verdict, reason: String) -> Verdict {
    v.outcome = Outcome::Infeasible;
    v.reason = Some(reason);
    v
}

// Abstract run at `m` atoms, compared with full expansion when that is affordable.
fn cross_check(
    p: &PrenexSentence,
    prep: &Prepared,
    m: u64,
    opts: &DecideOptions,
) -> Result<(AbstractRun, bool), EngineError> {
    let run = run_abstract(prep, Base::Exact(m), opts)?;
    let checked = match concrete_truth(p, m, opts.concrete_work)? {
        Some(c) if c != run.truth => {
            return Err(EngineError::CrossCheckMismatch { m, abstract_value: run.truth, concrete: c })
        }
        Some(_) => true,
        None => false,
    };
    Ok((run, checked))
}

fn decide_forall_exists(
    p: &PrenexSentence,
    fragment: FragmentClass,
    opts: &DecideOptions,
) -> Result<Verdict, EngineError> {
    let bounds = match compute_bounds(&fragment) {
        Ok(b) => b,
        Err(e) => return Ok(Verdict::undecided(Outcome::Infeasible, fragment, opts.backend, e.to_string())),
    };
    let mut v = base_verdict(Outcome::Infeasible, fragment, bounds.clone(), opts.backend, p);
    if opts.atoms.is_some_and(|m| below_certified(m, &bounds)) {
        v.flags.push(FLAG_HEURISTIC.into());
    }
    let prep = Prepared::new(p);
    let attempt = (|| -> Result<Verdict, EngineError> {
        match (opts.backend, opts.atoms) {
            (Backend::Concrete, atoms) => {
                let Some(m) = atoms.or_else(|| bounds.certified_m_u64()) else {
                    return Ok(infeasible(v.clone(), "certified atom count does not fit a machine word".into()));
                };
                v.model_size = Some(m);
                match concrete_truth(p, m, opts.concrete_work)? {
                    Some(t) => v.outcome = Outcome::from_truth(t),
                    None => return Ok(infeasible(v.clone(), format!("full expansion at m={m} is over budget"))),
                }
            }
            (Backend::Abstract, Some(m)) => {
                v.model_size = Some(m);
                fill(&mut v, run_abstract(&prep, Base::Exact(m), opts)?);
            }
            (Backend::Both, Some(m)) => {
                v.model_size = Some(m);
                let (run, checked) = cross_check(p, &prep, m, opts)?;
                if checked {
                    v.cross_checked.push(m);
                }
                fill(&mut v, run);
            }
            (backend, None) => {
                let run = run_abstract(&prep, Base::Large, opts)?;
                v.abstract_atoms = run.schedule.first().copied();
                fill(&mut v, run);
                if backend == Backend::Both {
                    for &m in &opts.cross_check {
                        if cross_check(p, &prep, m, opts)?.1 {
                            v.cross_checked.push(m);
                        }
                    }
                }
            }
        }
        Ok(v.clone())
    })();
    match attempt {
        Err(EngineError::Infeasible(r) | EngineError::Ambiguous(r)) => Ok(infeasible(v, r)),
        other => other,
    }
}

/// Decides a form (A) sentence.
pub fn decide_form_a(p: &PrenexSentence, opts: &DecideOptions) -> Result<Verdict, EngineError> {
    match classify(p) {
        c @ FragmentClass::FormA { .. } => decide_forall_exists(p, c, opts),
        c => Err(EngineError::NotInFragment(format!("expected form A, got {c}"))),
    }
}

/// Decides a form (B) sentence.
pub fn decide_form_b(p: &PrenexSentence, opts: &DecideOptions) -> Result<Verdict, EngineError> {
    match classify(p) {
        c @ FragmentClass::FormB { .. } => decide_forall_exists(p, c, opts),
        c => Err(EngineError::NotInFragment(format!("expected form B, got {c}"))),
    }
}

/// Decides any prenex sentence the fragments cover.
///
/// An ∃*∀* sentence is decided through its negation when that is form (A)
/// or (B); otherwise it is evaluated at `max(g_bound, atoms)` atoms.
pub fn decide(p: &PrenexSentence, opts: &DecideOptions) -> Result<Verdict, EngineError> {
    let fragment = classify(p);
    match fragment {
        FragmentClass::FormA { .. } | FragmentClass::FormB { .. } => decide_forall_exists(p, fragment, opts),
        FragmentClass::Outside { ref reason } => {
            let reason = reason.clone();
            Ok(Verdict::undecided(Outcome::OutsideFragment, fragment, opts.backend, reason))
        }
        FragmentClass::ExistsForallShape { .. } => {
            let neg = p.negate();
            let neg_fragment = classify(&neg);
            if is_forall_exists(&neg_fragment) {
                let mut v = decide_forall_exists(&neg, neg_fragment, opts)?;
                v.outcome = v.outcome.flip();
                v.fragment = fragment;
                v.via_negation = true;
                std::mem::swap(&mut v.witnesses, &mut v.counterexample);
                // A failing leaf of the negation is a witness here; keep only
                // the side that supports the flipped outcome.
                match v.outcome {
                    Outcome::ProvableInTSTI => v.counterexample.clear(),
                    Outcome::RefutableInTSTI => v.witnesses.clear(),
                    _ => {}
                }
                return Ok(v);
            }
            let bounds = match compute_bounds(&fragment) {
                Ok(b) => b,
                Err(e) => return Ok(Verdict::undecided(Outcome::Infeasible, fragment, opts.backend, e.to_string())),
            };
            let mut v = base_verdict(Outcome::Infeasible, fragment, bounds.clone(), Backend::Concrete, p);
            let Some(g) = u64::try_from(&bounds.g_bound).ok() else {
                return Ok(infeasible(v, "g bound does not fit a machine word".into()));
            };
            let m = g.max(opts.atoms.unwrap_or(0)).max(1);
            v.model_size = Some(m);
            if below_certified(m, &bounds) {
                v.flags.push(FLAG_HEURISTIC.into());
            }
            Ok(match concrete_truth(p, m, opts.concrete_work)? {
                Some(t) => {
                    v.outcome = Outcome::from_truth(t);
                    v
                }
                None => infeasible(v, format!("full expansion at m={m} is over budget")),
            })
        }
    }
}
