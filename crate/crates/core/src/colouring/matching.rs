use std::collections::BTreeMap;

use super::{Colour, ColourError, ColouringLevel};
use crate::model::{Element, Model};

/// Chooses parameters in `n` that split `cn` the way `params` split `cm`.
///
/// For each colour, the elements of `cm` fall into cells `σ ∈ 2^K` by their
/// membership (or, for atom parameters at level 0, equality) pattern against
/// `params`. When a colour has the same count on both sides, `n` copies the
/// cell sizes exactly. Otherwise cells smaller than `threshold` are copied,
/// each larger cell gets `threshold` elements, and the last larger cell takes
/// what is left. Elements are handed out lowest rank first.
pub fn match_parameters(
    m: &Model,
    cm: &ColouringLevel,
    params: &[Element],
    n: &Model,
    cn: &ColouringLevel,
    threshold: u64,
) -> Result<Vec<Element>, ColourError> {
    if cm.level != cn.level || cm.basis != cn.basis {
        return Err(ColourError::ClassMismatch);
    }
    let k = params.len();
    if k > 16 {
        return Err(ColourError::Matching(format!("{k} parameters is too many cells")));
    }
    let atoms = cm.level == 0 && params.iter().all(|a| a.level() == 0);
    for a in params {
        m.validate(a)?;
        if !atoms && a.level() != cm.level + 1 {
            return Err(ColourError::LevelMismatch { expected: cm.level + 1, found: a.level() });
        }
    }
    let cell = |x: usize| -> u32 {
        (0..k).fold(0u32, |acc, p| {
            let bit = if atoms { params[p].rank() == Some(x as u64) } else { params[p].members().unwrap().get(x) };
            acc | (u32::from(bit) << p)
        })
    };

    // Cell contents in M and the N-side pool, both per colour.
    let mut cells_m: BTreeMap<&Colour, BTreeMap<u32, u64>> = BTreeMap::new();
    for x in 0..cm.assignment.len() {
        *cells_m.entry(cm.colour_of(x)).or_default().entry(cell(x)).or_default() += 1;
    }
    let mut pool_n: BTreeMap<&Colour, Vec<usize>> = BTreeMap::new();
    for y in 0..cn.assignment.len() {
        pool_n.entry(cn.colour_of(y)).or_default().push(y);
    }

    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (colour, cells) in &cells_m {
        let pool = pool_n.get(colour).map(Vec::as_slice).unwrap_or(&[]);
        let total_m: u64 = cells.values().sum();
        let same = total_m == pool.len() as u64;
        // Atoms equal to a parameter sit alone in their cell, on both sides.
        let copied = |sigma: u32, size: u64| same || size < threshold || atoms && sigma != 0;
        let last_big = cells.iter().rev().find(|(&s, &c)| !copied(s, c)).map(|(&s, _)| s);
        let mut next = 0usize;
        for (&sigma, &size) in cells {
            let take = if copied(sigma, size) {
                size as usize
            } else if Some(sigma) == last_big {
                let rest: u64 = cells.range(sigma + 1..).map(|(_, &c)| c).sum();
                pool.len().saturating_sub(next + rest as usize)
            } else {
                threshold as usize
            };
            if next + take > pool.len() || take == 0 && size > 0 {
                return Err(ColourError::Matching(format!(
                    "colour {colour} has {} elements in the target, too few to copy the cells of {total_m}",
                    pool.len()
                )));
            }
            for &y in &pool[next..next + take] {
                for (p, bucket) in chosen.iter_mut().enumerate() {
                    if (sigma >> p) & 1 == 1 {
                        bucket.push(y);
                    }
                }
            }
            next += take;
        }
        if next != pool.len() {
            return Err(ColourError::Matching(format!(
                "colour {colour}: {} target elements left outside every cell",
                pool.len() - next
            )));
        }
    }
    if let Some((colour, _)) = pool_n.iter().find(|(c, _)| !cells_m.contains_key(*c)) {
        return Err(ColourError::Matching(format!("colour {colour} occurs only in the target")));
    }

    chosen
        .into_iter()
        .map(|mut ranks| {
            if atoms {
                match ranks.as_slice() {
                    [r] => Ok(Element::Atom(*r as u32)),
                    _ => Err(ColourError::Matching("atom parameter cell is not a singleton".into())),
                }
            } else {
                ranks.sort_unstable();
                Ok(n.set_of(cn.level + 1, ranks)?)
            }
        })
        .collect()
}
