//! Deciding the existential block in one leaf of the refinement tree.
//!
//! A witness only interacts with the parameters one level below, one level
//! above and at its own level, and (under form A) with the witness one
//! level below. Colours at a witness level are therefore grouped by those
//! facts alone, and the search runs over groups.

use std::collections::{BTreeMap, HashMap};

use super::matrix::{AtomKind, Matrix};
use super::state::AbstractState;
use super::EngineError;
use crate::colouring::CappedCount;

const SATURATE: u64 = 1 << 40;

/// A lower bound on a count, exact or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Count {
    lb: u64,
    exact: bool,
}

impl Count {
    const ZERO: Count = Count { lb: 0, exact: true };

    fn from_capped(c: CappedCount) -> Count {
        match c {
            CappedCount::Exact(n) => Count { lb: n, exact: true },
            CappedCount::AtLeast(t) => Count { lb: t, exact: false },
        }
    }

    fn add(self, o: Count) -> Count {
        let lb = self.lb.saturating_add(o.lb).min(SATURATE);
        Count { lb, exact: self.exact && o.exact && lb < SATURATE }
    }

    fn mul(self, o: Count) -> Count {
        if (self.exact && self.lb == 0) || (o.exact && o.lb == 0) {
            return Count::ZERO;
        }
        let lb = self.lb.saturating_mul(o.lb).min(SATURATE);
        Count { lb, exact: self.exact && o.exact && lb < SATURATE }
    }

    /// Subsets of a set of this size that are neither empty nor everything.
    fn proper_nonempty(self) -> Count {
        if self.lb >= 40 {
            return Count { lb: SATURATE, exact: false };
        }
        Count { lb: (1u64 << self.lb).saturating_sub(2), exact: self.exact }
    }

    fn minus(self, k: u64) -> Count {
        Count { lb: self.lb.saturating_sub(k), exact: self.exact }
    }

    fn at_least(self, need: u64) -> Result<bool, EngineError> {
        if self.lb >= need {
            Ok(true)
        } else if self.exact {
            Ok(false)
        } else {
            Err(EngineError::Ambiguous(format!("a count known only to be at least {} was asked for {need}", self.lb)))
        }
    }
}

/// Facts about one witness candidate that the matrix can observe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Sig {
    up: Vec<bool>,
    down: Vec<bool>,
    eq: Vec<bool>,
    /// `(some member, some non-member)` per group one level down.
    chain: Vec<(bool, bool)>,
}

#[derive(Clone, Debug)]
struct Group {
    sig: Sig,
    count: Count,
}

#[derive(Clone, Debug, Default)]
struct LevelGroups {
    groups: Vec<Group>,
    /// Group index of each colour (materialized levels only).
    of_colour: Vec<usize>,
}

/// Sentence-dependent data shared by all leaves.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    witnesses: Vec<usize>,
    /// Witness levels, ascending and distinct.
    levels: Vec<u32>,
    rel_up: BTreeMap<u32, Vec<usize>>,
    rel_down: BTreeMap<u32, Vec<usize>>,
    rel_eq: BTreeMap<u32, Vec<usize>>,
    /// Levels `n` with a membership atom from a witness at `n - 1` into one at `n`.
    chained: Vec<u32>,
}

fn push_unique(map: &mut BTreeMap<u32, Vec<usize>>, level: u32, var: usize) {
    let v = map.entry(level).or_default();
    if !v.contains(&var) {
        v.push(var);
    }
}

impl Plan {
    pub fn new(m: &Matrix) -> Plan {
        let witnesses = m.witnesses();
        let mut levels: Vec<u32> = witnesses.iter().map(|&w| m.level(w)).collect();
        levels.sort_unstable();
        levels.dedup();
        let (mut rel_up, mut rel_down, mut rel_eq) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        let mut chained = Vec::new();
        for a in &m.atoms {
            let (l, r) = (a.left, a.right);
            match (a.kind, m.universal[l], m.universal[r]) {
                (AtomKind::Mem, false, true) => push_unique(&mut rel_up, m.level(l), r),
                (AtomKind::Mem, true, false) => push_unique(&mut rel_down, m.level(r), l),
                (AtomKind::Eq, false, true) => push_unique(&mut rel_eq, m.level(l), r),
                (AtomKind::Eq, true, false) => push_unique(&mut rel_eq, m.level(r), l),
                (AtomKind::Mem, false, false) if !chained.contains(&m.level(r)) => {
                    chained.push(m.level(r));
                }
                _ => {}
            }
        }
        Plan { witnesses, levels, rel_up, rel_down, rel_eq, chained }
    }

    fn rel(map: &BTreeMap<u32, Vec<usize>>, n: u32) -> &[usize] {
        map.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn param_index(s: &AbstractState, var: usize) -> usize {
    s.params.iter().position(|p| p.var == var).expect("universal variable has a trace")
}

// Groups of a materialized level `n`.
//
// Without `with_up`, membership in parameters one level up is ignored
// (those parameters need not be fixed yet).
fn materialized_groups(
    plan: &Plan,
    s: &AbstractState,
    n: u32,
    below: Option<&LevelGroups>,
    with_up: bool,
) -> LevelGroups {
    let p = &s.levels[n as usize];
    let up_vars = if with_up { Plan::rel(&plan.rel_up, n) } else { &[] };
    let up: Vec<usize> = up_vars
        .iter()
        .map(|&v| s.refine_position(n, param_index(s, v)).expect("parameter refines the level below it"))
        .collect();
    let basis_index = |v: usize| {
        let colour = &s.params[param_index(s, v)].colour;
        p.basis.binary_search(colour).expect("parameter colour is in the basis")
    };
    let down: Vec<usize> = Plan::rel(&plan.rel_down, n).iter().map(|&v| basis_index(v)).collect();
    let eq: Vec<&crate::colouring::Colour> =
        Plan::rel(&plan.rel_eq, n).iter().map(|&v| &s.params[param_index(s, v)].colour).collect();
    let mut index: BTreeMap<Sig, usize> = BTreeMap::new();
    let mut out = LevelGroups::default();
    for (gamma, &c) in p.class.iter().zip(&p.counts) {
        let chain = match below {
            Some(lower) => {
                let mut bits = vec![(false, false); lower.groups.len()];
                for (a, &g) in lower.of_colour.iter().enumerate() {
                    let (f, gg) = gamma.fg(a).expect("lifted colour");
                    bits[g].0 |= f;
                    bits[g].1 |= gg;
                }
                bits
            }
            None => vec![],
        };
        let sig = Sig {
            up: up.iter().map(|&i| gamma.refine[i]).collect(),
            down: down.iter().map(|&i| gamma.fg(i).expect("lifted colour").0).collect(),
            eq: eq.iter().map(|&e| e == gamma).collect(),
            chain,
        };
        let g = *index.entry(sig.clone()).or_insert_with(|| {
            out.groups.push(Group { sig, count: Count::ZERO });
            out.groups.len() - 1
        });
        out.groups[g].count = out.groups[g].count.add(Count::from_capped(c));
        out.of_colour.push(g);
    }
    out
}

/// Class ids for the colours of `level` such that colours sharing an id
/// play the same part in every leaf below the last stage: same count, not
/// a parameter colour, and the same observable bits when `level` holds
/// witnesses.
pub(crate) fn colour_classes(plan: &Plan, s: &AbstractState, level: u32) -> Vec<usize> {
    let p = &s.levels[level as usize];
    let observed = plan.levels.contains(&level).then(|| {
        let mut by_level: BTreeMap<u32, LevelGroups> = BTreeMap::new();
        for &n in plan.levels.iter().filter(|&&n| n <= level) {
            let below = if plan.chained.contains(&n) { by_level.get(&(n - 1)) } else { None };
            let groups = materialized_groups(plan, s, n, below, n < level);
            by_level.insert(n, groups);
        }
        let groups = &by_level[&level];
        groups
            .of_colour
            .iter()
            .map(|&g| {
                let sig = &groups.groups[g].sig;
                (sig.down.clone(), sig.chain.clone())
            })
            .collect::<Vec<_>>()
    });
    let mut ids: BTreeMap<(CappedCount, Option<Observed>), usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(p.class.len());
    let mut next_special = p.class.len();
    for (a, colour) in p.class.iter().enumerate() {
        if s.params.iter().any(|q| q.level == level && q.colour == *colour) {
            out.push(next_special);
            next_special += 1;
            continue;
        }
        let key = (p.counts[a], observed.as_ref().map(|o| o[a].clone()));
        let n = ids.len();
        out.push(*ids.entry(key).or_insert(n));
    }
    out
}

/// Down bits and chain bits a witness signature can observe.
type Observed = (Vec<bool>, Vec<(bool, bool)>);
/// An equality parameter's `(f, g)` per block, and its eq bits.
type EqParam = (Vec<(bool, bool)>, Vec<bool>);
/// A membership parameter's colour, and a chain group.
type BlockKey = (Option<usize>, Option<usize>);

/// What the groups of the unbuilt level depend on: blocks of the level
/// below that the matrix can tell apart, and the patterns of parameters
/// named by equality atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct LazyInput {
    /// `(chain group, count)` per block.
    blocks: Vec<(Option<usize>, Count)>,
    /// Block holding each membership parameter one level down.
    down_block: Vec<usize>,
    n_groups: usize,
    /// Per distinct equality parameter: its `(f, g)` per block and its eq bits.
    eq_params: Vec<EqParam>,
}

fn lazy_input(plan: &Plan, s: &AbstractState, n: u32, below: Option<&LevelGroups>) -> LazyInput {
    let p = &s.levels[n as usize - 1];
    let down_colours: Vec<usize> = Plan::rel(&plan.rel_down, n)
        .iter()
        .map(|&v| p.class.binary_search(&s.params[param_index(s, v)].colour).expect("parameter colour is realized"))
        .collect();
    // Block key: (colour of a membership parameter, chain group).
    let mut keyed: BTreeMap<BlockKey, (Count, Vec<usize>)> = BTreeMap::new();
    for (a, &c) in p.counts.iter().enumerate() {
        let own = down_colours.contains(&a).then_some(a);
        let group = below.map(|b| b.of_colour[a]);
        let e = keyed.entry((own, group)).or_insert((Count::ZERO, vec![]));
        e.0 = e.0.add(Count::from_capped(c));
        e.1.push(a);
    }
    let keys: Vec<(Option<usize>, Option<usize>)> = keyed.keys().copied().collect();
    let down_block =
        down_colours.iter().map(|&d| keys.iter().position(|k| k.0 == Some(d)).expect("parameter block")).collect();
    let eq_vars = Plan::rel(&plan.rel_eq, n);
    let mut eq_params = Vec::new();
    let mut seen = Vec::new();
    for &v in eq_vars {
        let colour = &s.params[param_index(s, v)].colour;
        if seen.contains(&colour) {
            continue;
        }
        seen.push(colour);
        let fg = keyed
            .values()
            .map(|(_, members)| {
                members.iter().fold((false, false), |(f, g), &a| {
                    let (af, ag) = colour.fg(a).expect("lifted parameter colour");
                    (f | af, g | ag)
                })
            })
            .collect();
        let eq = eq_vars.iter().map(|&w| s.params[param_index(s, w)].colour == *colour).collect();
        eq_params.push((fg, eq));
    }
    LazyInput {
        blocks: keyed.into_iter().map(|((_, g), (c, _))| (g, c)).collect(),
        down_block,
        n_groups: below.map_or(0, |b| b.groups.len()),
        eq_params,
    }
}

// Groups of the level above the top materialized one, counted by the
// product formula over blocks of the level below.
fn lazy_groups(input: &LazyInput, eq_len: usize) -> LevelGroups {
    let sig_of = |fg: &[(bool, bool)]| {
        let mut chain = vec![(false, false); input.n_groups];
        for ((group, _), &(f, g)) in input.blocks.iter().zip(fg) {
            if let Some(group) = group {
                chain[*group].0 |= f;
                chain[*group].1 |= g;
            }
        }
        let down = input.down_block.iter().map(|&b| fg[b].0).collect();
        Sig { up: vec![], down, eq: vec![false; eq_len], chain }
    };

    // Blocks are independent, so fold them in one at a time keeping only
    // what the signature can see: bits of membership blocks and chain ORs.
    let one = Count { lb: 1, exact: true };
    let mut states: BTreeMap<Observed, Count> = BTreeMap::new();
    states.insert((vec![false; input.blocks.len()], vec![(false, false); input.n_groups]), one);
    for (b, &(group, c)) in input.blocks.iter().enumerate() {
        let visible = input.down_block.contains(&b);
        let both = c.proper_nonempty();
        let mut options = vec![((true, false), one), ((false, true), one)];
        if !(both.exact && both.lb == 0) {
            options.push(((true, true), both));
        }
        let mut next: BTreeMap<Observed, Count> = BTreeMap::new();
        for ((down, chain), count) in &states {
            for &((f, g), n) in &options {
                let (mut down, mut chain) = (down.clone(), chain.clone());
                if visible {
                    down[b] = f;
                }
                if let Some(group) = group {
                    chain[group].0 |= f;
                    chain[group].1 |= g;
                }
                let e = next.entry((down, chain)).or_insert(Count::ZERO);
                *e = e.add(count.mul(n));
            }
        }
        states = next;
    }
    let mut counts: BTreeMap<Sig, Count> = BTreeMap::new();
    for ((down, chain), count) in states {
        let sig = Sig {
            up: vec![],
            down: input.down_block.iter().map(|&b| down[b]).collect(),
            eq: vec![false; eq_len],
            chain,
        };
        let e = counts.entry(sig).or_insert(Count::ZERO);
        *e = e.add(count);
    }

    // Parameters named by equality atoms become their own singleton groups.
    for (fg, eq) in &input.eq_params {
        let base = sig_of(fg);
        let fresh = counts.get_mut(&base).expect("parameter pattern is counted");
        *fresh = fresh.minus(1);
        counts.insert(Sig { eq: eq.clone(), ..base }, one);
    }
    LevelGroups {
        groups: counts
            .into_iter()
            .filter(|(_, c)| !(c.exact && c.lb == 0))
            .map(|(sig, count)| Group { sig, count })
            .collect(),
        of_colour: vec![],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum LevelKey {
    Materialized(Vec<(Sig, Count)>),
    Lazy(LazyInput),
}

/// Everything the witness search in one leaf depends on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct LeafKey {
    truth: Vec<bool>,
    levels: Vec<LevelKey>,
}

/// Results of earlier leaves, by what they depended on.
pub(crate) type LeafCache = HashMap<LeafKey, Option<Vec<String>>>;

/// Satisfying literals for the witnesses in this leaf, if any.
pub(crate) fn find_witnesses(
    m: &Matrix,
    plan: &Plan,
    s: &AbstractState,
    cache: &mut LeafCache,
) -> Result<Option<Vec<String>>, EngineError> {
    // Atoms between parameters are fixed by their traces.
    let mut truth = vec![false; m.atoms.len()];
    for (i, a) in m.atoms.iter().enumerate() {
        if m.universal[a.left] && m.universal[a.right] {
            let (x, y) = (&s.params[param_index(s, a.left)], &s.params[param_index(s, a.right)]);
            truth[i] = match a.kind {
                AtomKind::Eq => x.colour == y.colour,
                AtomKind::Mem => {
                    let pos = s.refine_position(x.level, param_index(s, a.right)).expect("parameter refines below");
                    x.colour.refine[pos]
                }
            };
        }
    }

    let mut by_level: BTreeMap<u32, LevelGroups> = BTreeMap::new();
    let mut key = LeafKey { truth: truth.clone(), levels: vec![] };
    let mut lazy = None;
    for &n in &plan.levels {
        let below = if plan.chained.contains(&n) { by_level.get(&(n - 1)) } else { None };
        if (n as usize) < s.levels.len() {
            let groups = materialized_groups(plan, s, n, below, true);
            key.levels.push(LevelKey::Materialized(groups.groups.iter().map(|g| (g.sig.clone(), g.count)).collect()));
            by_level.insert(n, groups);
        } else {
            let input = lazy_input(plan, s, n, below);
            key.levels.push(LevelKey::Lazy(input.clone()));
            lazy = Some((n, input));
        }
    }
    if let Some(found) = cache.get(&key) {
        return Ok(found.clone());
    }
    if let Some((n, input)) = lazy {
        by_level.insert(n, lazy_groups(&input, Plan::rel(&plan.rel_eq, n).len()));
    }

    let mut search = Search { m, plan, by_level: &by_level, truth, choice: vec![], used: BTreeMap::new() };
    let found = if search.run(0)? { Some(search.describe()) } else { None };
    cache.insert(key, found.clone());
    Ok(found)
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    /// A fresh element of a group.
    Group(usize),
    /// The same element as an earlier witness.
    Same(usize),
}

struct Search<'a> {
    m: &'a Matrix,
    plan: &'a Plan,
    by_level: &'a BTreeMap<u32, LevelGroups>,
    truth: Vec<bool>,
    choice: Vec<Choice>,
    /// Elements taken per (level, group).
    used: BTreeMap<(u32, usize), u64>,
}

impl Search<'_> {
    fn group_of(&self, i: usize) -> usize {
        match self.choice[i] {
            Choice::Group(g) => g,
            Choice::Same(j) => self.group_of(j),
        }
    }

    // The element behind witness `i`, as the index of its first occurrence.
    fn root(&self, i: usize) -> usize {
        match self.choice[i] {
            Choice::Group(_) => i,
            Choice::Same(j) => self.root(j),
        }
    }

    fn run(&mut self, i: usize) -> Result<bool, EngineError> {
        if i == self.plan.witnesses.len() {
            return self.check_chains(0);
        }
        let n = self.m.level(self.plan.witnesses[i]);
        for j in 0..i {
            if self.m.level(self.plan.witnesses[j]) == n && matches!(self.choice[j], Choice::Group(_)) {
                self.choice.push(Choice::Same(j));
                let found = self.run(i + 1)?;
                self.choice.pop();
                if found {
                    return Ok(true);
                }
            }
        }
        let groups = &self.by_level[&n].groups;
        for (g, group) in groups.iter().enumerate() {
            let taken = self.used.get(&(n, g)).copied().unwrap_or(0);
            if !group.count.at_least(taken + 1)? {
                continue;
            }
            *self.used.entry((n, g)).or_insert(0) += 1;
            self.choice.push(Choice::Group(g));
            let found = self.run(i + 1)?;
            self.choice.pop();
            *self.used.get_mut(&(n, g)).unwrap() -= 1;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn sig(&self, i: usize) -> &Sig {
        let n = self.m.level(self.plan.witnesses[i]);
        &self.by_level[&n].groups[self.group_of(i)].sig
    }

    fn witness_slot(&self, var: usize) -> usize {
        self.plan.witnesses.iter().position(|&w| w == var).unwrap()
    }

    // Membership atoms between witnesses range over what the groups allow.
    fn check_chains(&mut self, from: usize) -> Result<bool, EngineError> {
        let atoms = &self.m.atoms;
        let Some(a) = (from..atoms.len()).find(|&i| {
            let a = atoms[i];
            a.kind == AtomKind::Mem && !self.m.universal[a.left] && !self.m.universal[a.right]
        }) else {
            return Ok(self.evaluate());
        };
        let (lo, hi) = (self.witness_slot(atoms[a].left), self.witness_slot(atoms[a].right));
        let (f, g) = self.sig(hi).chain[self.group_of(lo)];
        for (value, allowed) in [(true, f), (false, g)] {
            if allowed {
                self.truth[a] = value;
                if self.check_chains(a + 1)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn evaluate(&mut self) -> bool {
        for (i, a) in self.m.atoms.iter().enumerate() {
            let (l, r) = (a.left, a.right);
            let value = match (a.kind, self.m.universal[l], self.m.universal[r]) {
                (_, true, true) => continue,
                (AtomKind::Mem, false, false) => continue,
                (AtomKind::Eq, false, false) => self.root(self.witness_slot(l)) == self.root(self.witness_slot(r)),
                (AtomKind::Mem, false, true) => {
                    let n = self.m.level(l);
                    let j = Plan::rel(&self.plan.rel_up, n).iter().position(|&v| v == r).unwrap();
                    self.sig(self.witness_slot(l)).up[j]
                }
                (AtomKind::Mem, true, false) => {
                    let n = self.m.level(r);
                    let j = Plan::rel(&self.plan.rel_down, n).iter().position(|&v| v == l).unwrap();
                    self.sig(self.witness_slot(r)).down[j]
                }
                (AtomKind::Eq, false, true) | (AtomKind::Eq, true, false) => {
                    let (w, x) = if self.m.universal[l] { (r, l) } else { (l, r) };
                    let n = self.m.level(w);
                    let j = Plan::rel(&self.plan.rel_eq, n).iter().position(|&v| v == x).unwrap();
                    self.sig(self.witness_slot(w)).eq[j]
                }
            };
            self.truth[i] = value;
        }
        self.m.eval(&self.truth)
    }

    /// The witness atoms as literals under the satisfying choice.
    fn describe(&self) -> Vec<String> {
        let name = |v: usize| format!("{}", self.m.vars[v]);
        self.m
            .atoms
            .iter()
            .zip(&self.truth)
            .filter(|(a, _)| !(self.m.universal[a.left] && self.m.universal[a.right]))
            .map(|(a, &t)| {
                let op = if a.kind == AtomKind::Mem { "in" } else { "=" };
                let atom = format!("{} {op} {}", name(a.left), name(a.right));
                if t {
                    atom
                } else {
                    format!("~({atom})")
                }
            })
            .collect()
    }
}
