//! Embedding a small finitely generated model into a wider one so that
//! given ambient points land in the range.
//!
//! First a set `C` of ambient points is closed downward under
//! symmetric-difference witnesses, starting from the parameters. Then
//! `f_0` is an injection of atoms covering `C`'s atoms, and `f_{n+1}(x)` is
//! the point of `C` that agrees with `f_n``x` on the range of `f_n`, if
//! there is one, and `f_n``x` itself otherwise.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::{Bits, Element, Model, ModelError};
use crate::stratification::g_sequence;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("small model has {atoms} atoms but the construction needs at least G_{k}({r}) = {required}")]
    BoundViolation { atoms: u32, k: usize, r: u32, required: String },
    #[error("ambient model has {ambient} atoms, fewer than the {needed} needed")]
    InsufficientAmbient { ambient: u32, needed: u32 },
    #[error("the construction is ill-defined at level {level}: {detail}")]
    Construction { level: u32, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug)]
pub struct EmbeddingMaps {
    /// `maps[n][r]` is the image of the level-`n` element of rank `r`.
    pub maps: Vec<Vec<Element>>,
    /// `C ∩ N_n` for `n ≤ r_k`, sorted.
    pub c_sets: Vec<Vec<Element>>,
    /// Each `(y, z, γ)` with `γ ∈ y △ z` chosen during closure.
    pub witnesses: Vec<(Element, Element, Element)>,
}

/// Runs the construction up to level `max(max_level, r_k)`.
///
/// Witnesses and unforced atom images are chosen lowest-rank first.
pub fn embed(small: &Model, ambient: &Model, params: &[Element], max_level: u32) -> Result<EmbeddingMaps, EmbedError> {
    for p in params {
        ambient.validate(p)?;
    }
    let k = params.len();
    let r_k = params.iter().map(Element::level).max().unwrap_or(0);
    let required = g_sequence(k, r_k).map(|s| s.last().unwrap().clone()).map_err(|o| EmbedError::BoundViolation {
        atoms: small.atoms(),
        k,
        r: r_k,
        required: o.expression,
    })?;
    if BigUint::from(small.atoms()) < required {
        return Err(EmbedError::BoundViolation { atoms: small.atoms(), k, r: r_k, required: required.to_string() });
    }
    let top = max_level.max(r_k);

    // Downward closure.
    let mut c: Vec<BTreeSet<Element>> = vec![BTreeSet::new(); r_k as usize + 1];
    for p in params {
        c[p.level() as usize].insert(p.clone());
    }
    let mut witnesses = Vec::new();
    for t in (1..=r_k).rev() {
        let pts: Vec<Element> = c[t as usize].iter().cloned().collect();
        for (i, y) in pts.iter().enumerate() {
            for z in &pts[i + 1..] {
                let diff = y.members().unwrap().xor(z.members().unwrap());
                let lowest = diff.iter_ones().next().expect("distinct sets differ somewhere");
                let gamma = ambient.element(t - 1, lowest as u64)?;
                c[t as usize - 1].insert(gamma.clone());
                witnesses.push((y.clone(), z.clone(), gamma));
            }
        }
    }

    // f_0: C's atoms first, then the lowest unused atoms.
    let m = small.atoms();
    let c_atoms: Vec<u32> = c[0].iter().map(|e| e.rank().unwrap() as u32).collect();
    let needed = m.max(c_atoms.len() as u32);
    if ambient.atoms() < needed {
        return Err(EmbedError::InsufficientAmbient { ambient: ambient.atoms(), needed });
    }
    let taken: BTreeSet<u32> = c_atoms.iter().copied().collect();
    let f0: Vec<Element> = c_atoms
        .iter()
        .copied()
        .chain((0..ambient.atoms()).filter(|a| !taken.contains(a)))
        .take(m as usize)
        .map(Element::Atom)
        .collect();
    let mut maps = vec![f0];

    for n in 0..top {
        let width = ambient.width(n + 1)?;
        let prev = &maps[n as usize];
        let prev_ranks: Vec<usize> = prev
            .iter()
            .map(|e| e.rank().and_then(|r| usize::try_from(r).ok()).expect("image below a representable level"))
            .collect();
        let range_mask = Bits::from_indices(width, prev_ranks.iter().copied());
        let mut by_trace: BTreeMap<Bits, Element> = BTreeMap::new();
        if let Some(cs) = c.get(n as usize + 1) {
            for gamma in cs {
                let trace = gamma.members().unwrap().and(&range_mask);
                if let Some(other) = by_trace.insert(trace, gamma.clone()) {
                    return Err(EmbedError::Construction {
                        level: n + 1,
                        detail: format!("{other} and {gamma} agree on the range of f_{n}"),
                    });
                }
            }
        }
        let next: Vec<Element> = small
            .elements(n + 1)?
            .map(|x| {
                let image = Bits::from_indices(width, x.members().unwrap().iter_ones().map(|i| prev_ranks[i]));
                by_trace.get(&image).cloned().unwrap_or(Element::Set { level: n + 1, members: image })
            })
            .collect();
        maps.push(next);
    }

    Ok(EmbeddingMaps { maps, c_sets: c.into_iter().map(|s| s.into_iter().collect()).collect(), witnesses })
}

impl EmbeddingMaps {
    pub fn top_level(&self) -> u32 {
        self.maps.len() as u32 - 1
    }

    /// Checks injectivity, membership preservation and reflection, and
    /// parameter coverage by enumeration up to `max_check` levels.
    pub fn verify(&self, ambient: &Model, params: &[Element], max_check: u32) -> Result<(), String> {
        let top = self.top_level().min(max_check);
        for n in 0..=top {
            let distinct: BTreeSet<&Element> = self.maps[n as usize].iter().collect();
            if distinct.len() != self.maps[n as usize].len() {
                return Err(format!("f_{n} is not injective"));
            }
        }
        for n in 0..top {
            let (f, g) = (&self.maps[n as usize], &self.maps[n as usize + 1]);
            for (yr, y) in g.iter().enumerate() {
                for (xr, x) in f.iter().enumerate() {
                    let inside_small = (yr >> xr) & 1 == 1;
                    let inside_ambient = ambient.member(x, y).map_err(|e| e.to_string())?;
                    if inside_small != inside_ambient {
                        return Err(format!("membership of rank {xr} in rank {yr} at level {n} not preserved"));
                    }
                }
            }
        }
        for p in params {
            let covered = self.maps.get(p.level() as usize).is_some_and(|f| f.contains(p));
            if !covered {
                return Err(format!("parameter {p} is not in the range of f_{}", p.level()));
            }
        }
        Ok(())
    }
}
