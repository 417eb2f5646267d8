use std::ops::ControlFlow;

use super::EngineError;
use crate::colouring::{lift_profile, CappedCount, Colour, ColourError, MultiplicityProfile};

/// Universal variables of one type, refined together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub level: u32,
    /// Prefix positions, in prefix order.
    pub vars: Vec<usize>,
}

/// A fixed universal parameter: its colour at its own level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamTrace {
    pub var: usize,
    pub level: u32,
    pub colour: Colour,
}

/// Capped profiles of every materialized level after some refinement stages.
///
/// Levels `0..levels.len()` are materialized. Parameters one level higher
/// carry lifted colours over the top materialized class, but that level's
/// profile is never built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractState {
    pub stage: usize,
    pub threshold: u64,
    pub levels: Vec<MultiplicityProfile>,
    pub params: Vec<ParamTrace>,
    /// Per level, the parameters whose bits prefix each colour, newest first.
    pub refine_order: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Colours allowed in one lifted profile.
    pub max_colours: usize,
    /// Cell patterns allowed for one colour.
    pub max_patterns: usize,
    /// Enumerate interchangeable colours of the last stage only once.
    pub symmetry: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_colours: 1 << 15, max_patterns: 1 << 12, symmetry: true }
    }
}

fn lift(p: &MultiplicityProfile, limits: &Limits) -> Result<MultiplicityProfile, EngineError> {
    lift_profile(p, limits.max_colours).map_err(|e| match e {
        ColourError::TooManyColours(n) => {
            EngineError::Infeasible(format!("level {} would have more than {n} colours", p.level + 1))
        }
        e => e.into(),
    })
}

/// Stage-0 profiles for levels `0..=top`, lifted from `{0: m}`.
pub fn abstract_init(m: CappedCount, top: u32, threshold: u64, limits: &Limits) -> Result<AbstractState, EngineError> {
    if threshold < 2 {
        return Err(ColourError::ThresholdTooSmall(threshold).into());
    }
    let m = m
        .recap(threshold)
        .ok_or_else(|| EngineError::Infeasible(format!("atom count {m} is not known up to {threshold}")))?;
    let (class, counts) = if m.is_zero() { (vec![], vec![]) } else { (vec![Colour::base()], vec![m]) };
    let mut levels = vec![MultiplicityProfile { level: 0, threshold, basis: vec![], class, counts }];
    for _ in 0..top {
        let next = lift(levels.last().unwrap(), limits)?;
        levels.push(next);
    }
    let n = levels.len();
    Ok(AbstractState { stage: 0, threshold, levels, params: vec![], refine_order: vec![vec![]; n] })
}

fn bits(sigma: usize, k: usize) -> Vec<bool> {
    (0..k).map(|p| (sigma >> p) & 1 == 1).collect()
}

/// Every capped split of `c` over `cells` cells at the threshold `t_new`.
///
/// A pattern gives each cell an exact count below `t_new` or `≥t_new`; it
/// is kept when some true count consistent with `c` splits that way.
pub(crate) fn cell_patterns(
    c: CappedCount,
    cells: usize,
    t_new: u64,
    limit: usize,
) -> Result<Vec<Vec<CappedCount>>, EngineError> {
    let too_many = || EngineError::Infeasible(format!("count {c} has more than {limit} splits into {cells} cells"));
    let top_exact = match c {
        CappedCount::Exact(n) => n.min(t_new - 1),
        CappedCount::AtLeast(_) => t_new - 1,
    };
    let values: Vec<CappedCount> =
        (0..=top_exact).map(CappedCount::Exact).chain([CappedCount::AtLeast(t_new)]).collect();
    let total = (values.len() as u128).checked_pow(cells as u32);
    if total.is_none_or(|n| n > (limit as u128) * 16) {
        return Err(too_many());
    }
    let valid = |pattern: &[CappedCount]| {
        let big = pattern.iter().filter(|x| x.exact().is_none()).count() as u64;
        let sum: u64 = pattern.iter().map(|x| x.floor()).sum();
        match c {
            CappedCount::Exact(n) if big == 0 => sum == n,
            CappedCount::Exact(n) => sum <= n,
            CappedCount::AtLeast(t) => big > 0 || sum >= t,
        }
    };
    let mut out = Vec::new();
    let mut idx = vec![0usize; cells];
    loop {
        let pattern: Vec<CappedCount> = idx.iter().map(|&i| values[i]).collect();
        if valid(&pattern) {
            out.push(pattern);
            if out.len() > limit {
                return Err(too_many());
            }
        }
        let mut i = 0;
        while i < cells {
            idx[i] += 1;
            if idx[i] < values.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == cells {
            return Ok(out);
        }
    }
}

fn recap_profile(p: &MultiplicityProfile, t: u64) -> Result<MultiplicityProfile, EngineError> {
    let counts = p
        .counts
        .iter()
        .map(|c| c.recap(t).ok_or_else(|| EngineError::Infeasible(format!("cannot raise {c} to threshold {t}"))))
        .collect::<Result<_, _>>()?;
    Ok(MultiplicityProfile { threshold: t, counts, ..p.clone() })
}

/// Every set partition of `0..n`, as a block index per element.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, blocks: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(acc.clone());
            return;
        }
        for b in 0..=blocks {
            acc.push(b);
            rec(i + 1, n, blocks.max(b + 1), acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, 0, &mut Vec::new(), &mut out);
    out
}

type Emit<'a> = dyn FnMut(&[usize]) -> Result<ControlFlow<()>, EngineError> + 'a;

// Odometer over one choice per colour.
fn all_choices(sizes: &[usize], emit: &mut Emit<'_>) -> Result<ControlFlow<()>, EngineError> {
    let mut choice = vec![0usize; sizes.len()];
    loop {
        if emit(&choice)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < sizes[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            return Ok(ControlFlow::Continue(()));
        }
    }
}

// Choices that never decrease within a class, one per multiset.
fn canonical_choices(sizes: &[usize], classes: &[usize], emit: &mut Emit<'_>) -> Result<ControlFlow<()>, EngineError> {
    fn rec(
        i: usize,
        sizes: &[usize],
        classes: &[usize],
        choice: &mut Vec<usize>,
        emit: &mut Emit<'_>,
    ) -> Result<ControlFlow<()>, EngineError> {
        if i == sizes.len() {
            return emit(choice);
        }
        let from = (0..i).rev().find(|&j| classes[j] == classes[i]).map_or(0, |j| choice[j]);
        for c in from..sizes[i] {
            choice.push(c);
            let flow = rec(i + 1, sizes, classes, choice, emit)?;
            choice.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
    rec(0, sizes, classes, &mut Vec::with_capacity(sizes.len()), emit)
}

impl AbstractState {
    /// The level whose profile is never built (one above the top materialized level).
    pub fn lazy_level(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn param_of_var(&self, var: usize) -> Option<&ParamTrace> {
        self.params.iter().find(|p| p.var == var)
    }

    /// Position of parameter `param`'s bit in the refinement prefix of `level`.
    pub fn refine_position(&self, level: u32, param: usize) -> Option<usize> {
        self.refine_order.get(level as usize)?.iter().position(|&q| q == param)
    }

    // Finishes a stage from a refined level `below`, updating traces and lifts.
    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        below: usize,
        refined: MultiplicityProfile,
        moved: Vec<(usize, Colour)>,
        block: &Block,
        new_colours: Vec<Colour>,
        t_new: u64,
        limits: &Limits,
    ) -> Result<AbstractState, EngineError> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for p in &self.levels[..below] {
            levels.push(recap_profile(p, t_new)?);
        }
        levels.push(refined);
        for _ in below + 1..self.levels.len() {
            let next = lift(levels.last().unwrap(), limits)?;
            levels.push(next);
        }
        let mut params = self.params.clone();
        for (i, colour) in moved {
            params[i].colour = colour;
        }
        let first_new = params.len();
        for (&var, colour) in block.vars.iter().zip(new_colours) {
            params.push(ParamTrace { var, level: block.level, colour });
        }
        let mut refine_order = self.refine_order.clone();
        let order = &mut refine_order[below];
        let fresh: Vec<usize> = (first_new..params.len()).collect();
        order.splice(0..0, fresh);
        Ok(AbstractState { stage: self.stage + 1, threshold: t_new, levels, params, refine_order })
    }

    /// Calls `f` on every abstractly distinct way of fixing `block`'s
    /// parameters, with profiles recapped at `t_new`.
    ///
    /// With `classes`, colours of the refined level sharing a class id are
    /// taken to be interchangeable, and only one ordering of their cell
    /// patterns is produced.
    pub fn for_each_refinement(
        &self,
        block: &Block,
        t_new: u64,
        limits: &Limits,
        classes: Option<&[usize]>,
        f: &mut dyn FnMut(AbstractState) -> Result<ControlFlow<()>, EngineError>,
    ) -> Result<ControlFlow<()>, EngineError> {
        if block.level == 0 {
            return self.for_each_atom_refinement(block, t_new, limits, f);
        }
        let below = block.level as usize - 1;
        if below >= self.levels.len() {
            return Err(EngineError::Infeasible(format!("level {below} is not materialized")));
        }
        let k = block.vars.len();
        if k > 12 {
            return Err(EngineError::Infeasible(format!("{k} parameters of one type")));
        }
        let cells = 1usize << k;
        let prev = &self.levels[below];
        let patterns: Vec<Vec<Vec<CappedCount>>> = prev
            .counts
            .iter()
            .map(|&c| cell_patterns(c, cells, t_new, limits.max_patterns))
            .collect::<Result<_, _>>()?;
        let cell_bits: Vec<Vec<bool>> = (0..cells).map(|s| bits(s, k)).collect();
        let mut emit = |choice: &[usize]| -> Result<ControlFlow<()>, EngineError> {
            let mut entries: Vec<(Colour, CappedCount)> = Vec::new();
            for (i, alpha) in prev.class.iter().enumerate() {
                for (sigma, &n) in patterns[i][choice[i]].iter().enumerate() {
                    if !n.is_zero() {
                        entries.push((alpha.refined(&cell_bits[sigma]), n));
                    }
                }
            }
            entries.sort();
            let (class, counts): (Vec<Colour>, Vec<CappedCount>) = entries.into_iter().unzip();
            let moved: Vec<(usize, Colour)> = self
                .params
                .iter()
                .enumerate()
                .filter(|(_, p)| p.level as usize == below)
                .map(|(i, p)| {
                    let a = prev.class.binary_search(&p.colour).expect("parameter colour is realized");
                    let sigma = patterns[a][choice[a]].iter().position(|n| !n.is_zero()).unwrap();
                    (i, p.colour.refined(&cell_bits[sigma]))
                })
                .collect();
            let new_colours: Vec<Colour> = (0..k)
                .map(|p| {
                    let f: Vec<bool> = class.iter().map(|c| c.refine[p]).collect();
                    let g: Vec<bool> = f.iter().map(|b| !b).collect();
                    Colour::lift(&f, &g)
                })
                .collect();
            let refined =
                MultiplicityProfile { level: prev.level, threshold: t_new, basis: prev.basis.clone(), class, counts };
            let child = self.finish(below, refined, moved, block, new_colours, t_new, limits)?;
            f(child)
        };
        let sizes: Vec<usize> = patterns.iter().map(Vec::len).collect();
        match classes {
            Some(classes) => canonical_choices(&sizes, classes, &mut emit),
            None => all_choices(&sizes, &mut emit),
        }
    }

    // Atom parameters split level 0 by equality: a set partition of the
    // block, each part placed on one atom of some colour.
    fn for_each_atom_refinement(
        &self,
        block: &Block,
        t_new: u64,
        limits: &Limits,
        f: &mut dyn FnMut(AbstractState) -> Result<ControlFlow<()>, EngineError>,
    ) -> Result<ControlFlow<()>, EngineError> {
        let k = block.vars.len();
        let prev = &self.levels[0];
        if prev.class.is_empty() && k > 0 {
            return Ok(ControlFlow::Continue(()));
        }
        for partition in set_partitions(k) {
            let parts = partition.iter().max().map_or(0, |&b| b + 1);
            let mut place = vec![0usize; parts];
            'placements: loop {
                let mut taken = vec![0u64; prev.class.len()];
                for &a in &place {
                    taken[a] += 1;
                }
                let feasible = taken.iter().zip(&prev.counts).all(|(&t, &c)| match c {
                    CappedCount::Exact(n) => t <= n,
                    CappedCount::AtLeast(_) => true,
                });
                if feasible {
                    let part_bits: Vec<Vec<bool>> =
                        (0..parts).map(|b| partition.iter().map(|&x| x == b).collect()).collect();
                    let zero = vec![false; k];
                    let mut entries: Vec<(Colour, CappedCount)> = Vec::new();
                    for (a, alpha) in prev.class.iter().enumerate() {
                        let rest = match prev.counts[a] {
                            CappedCount::Exact(n) => CappedCount::cap(n - taken[a], t_new),
                            CappedCount::AtLeast(t) if t >= t_new + taken[a] => CappedCount::AtLeast(t_new),
                            CappedCount::AtLeast(t) => {
                                return Err(EngineError::Infeasible(format!(
                                    "threshold {t} leaves too few atoms for threshold {t_new}"
                                )))
                            }
                        };
                        if !rest.is_zero() {
                            entries.push((alpha.refined(&zero), rest));
                        }
                    }
                    for (b, &a) in place.iter().enumerate() {
                        entries.push((prev.class[a].refined(&part_bits[b]), CappedCount::cap(1, t_new)));
                    }
                    entries.sort();
                    let (class, counts): (Vec<Colour>, Vec<CappedCount>) = entries.into_iter().unzip();
                    let new_colours: Vec<Colour> =
                        partition.iter().map(|&b| prev.class[place[b]].refined(&part_bits[b])).collect();
                    let moved = self
                        .params
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| p.level == 0)
                        .map(|(i, p)| (i, p.colour.refined(&zero)))
                        .collect();
                    let refined = MultiplicityProfile { level: 0, threshold: t_new, basis: vec![], class, counts };
                    let child = self.finish(0, refined, moved, block, new_colours, t_new, limits)?;
                    if f(child)?.is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
                let mut i = 0;
                while i < parts {
                    place[i] += 1;
                    if place[i] < prev.class.len() {
                        break;
                    }
                    place[i] = 0;
                    i += 1;
                }
                if i == parts {
                    break 'placements;
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// All refinements of `block`, collected.
    pub fn refine_enumerate(
        &self,
        block: &Block,
        t_new: u64,
        limits: &Limits,
    ) -> Result<Vec<AbstractState>, EngineError> {
        let mut out = Vec::new();
        let _ = self.for_each_refinement(block, t_new, limits, None, &mut |s| {
            out.push(s);
            Ok(ControlFlow::Continue(()))
        })?;
        Ok(out)
    }
}
