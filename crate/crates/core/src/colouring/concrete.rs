use std::collections::{BTreeMap, HashMap};

use super::{Colour, ColourError};
use crate::model::{Element, Model};

/// A colouring of one level of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouringLevel {
    pub level: u32,
    /// Number of refinement blocks applied so far.
    pub stage: u32,
    /// Ordered class of the level below that lifted colours index into.
    pub basis: Vec<Colour>,
    /// Realized colours, sorted.
    pub class: Vec<Colour>,
    /// `class` index of each element, by rank.
    pub assignment: Vec<u32>,
}

impl ColouringLevel {
    pub fn colour_of(&self, rank: usize) -> &Colour {
        &self.class[self.assignment[rank] as usize]
    }

    /// Number of elements of each class colour.
    pub fn counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.class.len()];
        for &a in &self.assignment {
            out[a as usize] += 1;
        }
        out
    }

    /// Census lines `colour<TAB>count`, in class order.
    pub fn census(&self) -> Vec<(Colour, u64)> {
        self.class.iter().cloned().zip(self.counts()).collect()
    }

    // Rebuilds a sorted class from per-element colours given as keys.
    fn from_keys<K: std::hash::Hash + Eq + Copy>(
        level: u32,
        stage: u32,
        basis: Vec<Colour>,
        keys: Vec<K>,
        colour: impl Fn(K) -> Colour,
    ) -> ColouringLevel {
        let mut distinct: HashMap<K, Colour> = HashMap::new();
        for &k in &keys {
            distinct.entry(k).or_insert_with(|| colour(k));
        }
        let sorted: BTreeMap<Colour, K> = distinct.into_iter().map(|(k, c)| (c, k)).collect();
        let index: HashMap<K, u32> = sorted.values().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        ColouringLevel {
            level,
            stage,
            basis,
            class: sorted.into_keys().collect(),
            assignment: keys.iter().map(|k| index[k]).collect(),
        }
    }
}

/// Every atom gets colour `0`.
pub fn base_colouring(model: &Model) -> ColouringLevel {
    let m = model.atoms() as usize;
    ColouringLevel {
        level: 0,
        stage: 0,
        basis: Vec::new(),
        class: if m == 0 { Vec::new() } else { vec![Colour::base()] },
        assignment: vec![0; m],
    }
}

/// Lifts `c` one level, indexing bits by `c`'s own class.
pub fn lift_colouring(model: &Model, c: &ColouringLevel) -> Result<ColouringLevel, ColourError> {
    lift_colouring_over(model, c, &c.class)
}

/// Lifts `c` one level, indexing bits by `basis`, which must be sorted and
/// contain every colour `c` realizes. Unrealized basis colours get `f = g = 0`.
pub fn lift_colouring_over(model: &Model, c: &ColouringLevel, basis: &[Colour]) -> Result<ColouringLevel, ColourError> {
    if !basis.windows(2).all(|w| w[0] < w[1]) || !c.class.iter().all(|a| basis.binary_search(a).is_ok()) {
        return Err(ColourError::ClassMismatch);
    }
    let q = basis.len();
    if q > 64 {
        return Err(ColourError::TooManyColours(64));
    }
    let size = model.materializable(c.level + 1)?;
    // Level-i points number at most 24 here, so one word holds any subset.
    let mut masks = vec![0u64; q];
    for (r, &a) in c.assignment.iter().enumerate() {
        let p = basis.binary_search(&c.class[a as usize]).unwrap();
        masks[p] |= 1u64 << r;
    }
    let full: u64 = if c.assignment.len() == 64 { u64::MAX } else { (1u64 << c.assignment.len()) - 1 };
    let keys: Vec<u128> = (0..size)
        .map(|x| {
            let (mut fk, mut gk) = (0u64, 0u64);
            for (p, &mask) in masks.iter().enumerate() {
                fk |= u64::from(x & mask != 0) << p;
                gk |= u64::from(!x & full & mask != 0) << p;
            }
            u128::from(fk) | (u128::from(gk) << 64)
        })
        .collect();
    let decode = |k: u128| {
        let (fk, gk) = (k as u64, (k >> 64) as u64);
        let f: Vec<bool> = (0..q).map(|p| (fk >> p) & 1 == 1).collect();
        let g: Vec<bool> = (0..q).map(|p| (gk >> p) & 1 == 1).collect();
        Colour::lift(&f, &g)
    };
    Ok(ColouringLevel::from_keys(c.level + 1, c.stage, basis.to_vec(), keys, decode))
}

/// Prepends `F_p = [x ∈ a_p]` for parameters `a_p` one level above `c`.
pub fn refine_colouring(model: &Model, c: &ColouringLevel, params: &[Element]) -> Result<ColouringLevel, ColourError> {
    for a in params {
        model.validate(a)?;
        if a.level() != c.level + 1 {
            return Err(ColourError::LevelMismatch { expected: c.level + 1, found: a.level() });
        }
    }
    refine_by(c, params.len(), |x, p| params[p].members().unwrap().get(x))
}

/// Prepends `E_p = [x = a_p]` for atom parameters `a_p`.
///
/// Atom parameters have no level below to refine, so level 0 itself is
/// split by equality with them.
pub fn refine_atoms(model: &Model, c: &ColouringLevel, params: &[Element]) -> Result<ColouringLevel, ColourError> {
    if c.level != 0 {
        return Err(ColourError::LevelMismatch { expected: 0, found: c.level });
    }
    for a in params {
        model.validate(a)?;
        if a.level() != 0 {
            return Err(ColourError::LevelMismatch { expected: 0, found: a.level() });
        }
    }
    refine_by(c, params.len(), |x, p| params[p].rank() == Some(x as u64))
}

fn refine_by(c: &ColouringLevel, k: usize, bit: impl Fn(usize, usize) -> bool) -> Result<ColouringLevel, ColourError> {
    if k > 64 {
        return Err(ColourError::TooManyColours(64));
    }
    let keys: Vec<(u32, u64)> = c
        .assignment
        .iter()
        .enumerate()
        .map(|(x, &a)| (a, (0..k).fold(0u64, |acc, p| acc | (u64::from(bit(x, p)) << p))))
        .collect();
    let colour = |(a, bits): (u32, u64)| {
        let f: Vec<bool> = (0..k).map(|p| (bits >> p) & 1 == 1).collect();
        c.class[a as usize].refined(&f)
    };
    Ok(ColouringLevel::from_keys(c.level, c.stage + 1, c.basis.clone(), keys, colour))
}
