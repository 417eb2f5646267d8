use std::fmt;

use super::{Colour, ColourError, ColouringLevel, Core};

/// A count that is exact below a threshold and saturates at it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum CappedCount {
    Exact(u64),
    AtLeast(u64),
}

impl CappedCount {
    pub fn cap(n: u64, threshold: u64) -> CappedCount {
        if n >= threshold {
            CappedCount::AtLeast(threshold)
        } else {
            CappedCount::Exact(n)
        }
    }

    /// The same count under a threshold; `None` if raising an inexact count.
    pub fn recap(self, threshold: u64) -> Option<CappedCount> {
        match self {
            CappedCount::Exact(n) => Some(CappedCount::cap(n, threshold)),
            CappedCount::AtLeast(t) if threshold <= t => Some(CappedCount::AtLeast(threshold)),
            CappedCount::AtLeast(_) => None,
        }
    }

    /// A lower bound on the true count.
    pub fn floor(self) -> u64 {
        match self {
            CappedCount::Exact(n) | CappedCount::AtLeast(n) => n,
        }
    }

    pub fn is_zero(self) -> bool {
        self == CappedCount::Exact(0)
    }

    pub fn exact(self) -> Option<u64> {
        match self {
            CappedCount::Exact(n) => Some(n),
            CappedCount::AtLeast(_) => None,
        }
    }

    /// Whether this count could be `n` (exact match or above the cap).
    pub fn admits(self, n: u64) -> bool {
        match self {
            CappedCount::Exact(e) => e == n,
            CappedCount::AtLeast(t) => n >= t,
        }
    }
}

impl fmt::Display for CappedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CappedCount::Exact(n) => write!(f, "{n}"),
            CappedCount::AtLeast(t) => write!(f, ">={t}"),
        }
    }
}

/// Capped counts of every realized colour of one level.
///
/// Colours absent from `class` have count 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityProfile {
    pub level: u32,
    pub threshold: u64,
    pub basis: Vec<Colour>,
    pub class: Vec<Colour>,
    pub counts: Vec<CappedCount>,
}

impl MultiplicityProfile {
    pub fn count(&self, colour: &Colour) -> CappedCount {
        match self.class.binary_search(colour) {
            Ok(i) => self.counts[i],
            Err(_) => CappedCount::Exact(0),
        }
    }

    /// `(colour, count)` pairs in class order.
    pub fn entries(&self) -> impl Iterator<Item = (&Colour, CappedCount)> {
        self.class.iter().zip(self.counts.iter().copied())
    }

    /// Census lines `colour<TAB>count`.
    pub fn census_lines(&self) -> Vec<String> {
        self.entries().map(|(c, n)| format!("{c}\t{n}")).collect()
    }
}

pub fn profile(c: &ColouringLevel, threshold: u64) -> MultiplicityProfile {
    MultiplicityProfile {
        level: c.level,
        threshold,
        basis: c.basis.clone(),
        class: c.class.clone(),
        counts: c.counts().into_iter().map(|n| CappedCount::cap(n, threshold)).collect(),
    }
}

/// J-similarity: every colour is m-special in both or neither, for m < J.
pub fn similar(p1: &MultiplicityProfile, p2: &MultiplicityProfile, j: u64) -> Result<bool, ColourError> {
    if p1.basis != p2.basis || p1.level != p2.level {
        return Err(ColourError::ClassMismatch);
    }
    for t in [p1.threshold, p2.threshold] {
        if t < j {
            return Err(ColourError::ThresholdBelowDegree { threshold: t, j });
        }
    }
    let below = |c: CappedCount| match c {
        CappedCount::Exact(n) if n < j => Some(n),
        _ => None,
    };
    let colours = p1.class.iter().chain(&p2.class);
    Ok(colours.into_iter().all(|c| below(p1.count(c)) == below(p2.count(c))))
}

/// How many points of a lifted colour exist, read off the profile below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ColourKind {
    Forbidden,
    OneSpecial,
    Abundant,
    ExactCount(CappedCount),
}

impl ColourKind {
    /// The count this classification implies, capped at `threshold`.
    pub fn capped(self, threshold: u64) -> CappedCount {
        match self {
            ColourKind::Forbidden => CappedCount::Exact(0),
            ColourKind::OneSpecial => CappedCount::cap(1, threshold),
            ColourKind::Abundant => CappedCount::AtLeast(threshold),
            ColourKind::ExactCount(c) => c,
        }
    }
}

/// `2^c − 2`, saturating at `cap`.
fn proper_nonempty_subsets(c: u64, cap: u64) -> u64 {
    if c >= 63 {
        return cap;
    }
    ((1u64 << c) - 2).min(cap)
}

/// Classifies `beta`, a lift over `p`'s class, by the profile `p` below it.
pub fn classify_colour(p: &MultiplicityProfile, beta: &Colour) -> Result<ColourKind, ColourError> {
    if p.threshold < 2 {
        return Err(ColourError::ThresholdTooSmall(p.threshold));
    }
    let q = p.class.len();
    if !beta.refine.is_empty() || beta.width() != Some(q) {
        return Err(ColourError::OrderingMismatch { colour: beta.to_string(), q });
    }
    let fg: Vec<(bool, bool)> = (0..q).map(|i| beta.fg(i).unwrap()).collect();
    let forbidden = fg.iter().zip(&p.counts).any(|(&(f, g), &c)| match c {
        CappedCount::Exact(0) => f || g,
        CappedCount::Exact(1) => f == g,
        _ => !f && !g,
    });
    if forbidden {
        return Ok(ColourKind::Forbidden);
    }
    let both: Vec<CappedCount> = fg.iter().zip(&p.counts).filter(|(&(f, g), _)| f && g).map(|(_, &c)| c).collect();
    if both.is_empty() {
        return Ok(ColourKind::OneSpecial);
    }
    if both.iter().any(|c| c.exact().is_none()) {
        return Ok(ColourKind::Abundant);
    }
    let t = p.threshold;
    let n = both.iter().fold(1u64, |acc, c| acc.saturating_mul(proper_nonempty_subsets(c.floor(), t)).min(t));
    Ok(ColourKind::ExactCount(CappedCount::cap(n, t)))
}

/// The profile one level up, computed from `p` alone.
///
/// Enumerates every non-forbidden lift over `p`'s class; fails if there
/// would be more than `max_colours` of them.
pub fn lift_profile(p: &MultiplicityProfile, max_colours: usize) -> Result<MultiplicityProfile, ColourError> {
    if p.threshold < 2 {
        return Err(ColourError::ThresholdTooSmall(p.threshold));
    }
    let q = p.class.len();
    // Per class colour, the admissible (f, g) pairs.
    let choices: Vec<&[(bool, bool)]> = p
        .counts
        .iter()
        .map(|c| match c {
            CappedCount::Exact(0) => &[(false, false)][..],
            CappedCount::Exact(1) => &[(true, false), (false, true)][..],
            _ => &[(true, false), (false, true), (true, true)][..],
        })
        .collect();
    let total = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()).filter(|&t| t <= max_colours));
    if total.is_none() {
        return Err(ColourError::TooManyColours(max_colours));
    }
    let mut out: Vec<(Colour, CappedCount)> = Vec::with_capacity(total.unwrap());
    let mut idx = vec![0usize; q];
    loop {
        let fg: Vec<(bool, bool)> = (0..q).map(|i| choices[i][idx[i]]).collect();
        let f: Vec<bool> = fg.iter().map(|x| x.0).collect();
        let g: Vec<bool> = fg.iter().map(|x| x.1).collect();
        let beta = Colour::lift(&f, &g);
        let count = classify_colour(p, &beta)?.capped(p.threshold);
        if !count.is_zero() {
            out.push((beta, count));
        }
        // Odometer.
        let mut i = 0;
        while i < q {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == q {
            break;
        }
    }
    out.sort();
    let (class, counts) = out.into_iter().unzip();
    Ok(MultiplicityProfile { level: p.level + 1, threshold: p.threshold, basis: p.class.clone(), class, counts })
}

impl Core {
    pub fn is_base(&self) -> bool {
        matches!(self, Core::Base)
    }
}
