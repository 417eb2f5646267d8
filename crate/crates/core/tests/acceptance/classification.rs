use std::collections::HashMap;

use tst_decide::colouring::{
    base_colouring, classify_colour, lift_colouring, profile, CappedCount, Colour, ColourKind, ColouringLevel,
};
use tst_decide::model::{build_model, Model};

/// Counts every lift over `below.class` by reading each set's members.
fn brute_census(model: &Model, below: &ColouringLevel) -> HashMap<Colour, u64> {
    let q = below.class.len();
    let n = below.assignment.len();
    let mut out = HashMap::new();
    for x in model.elements(below.level + 1).unwrap() {
        let members = x.members().unwrap();
        let (mut f, mut g) = (vec![false; q], vec![false; q]);
        for y in 0..n {
            let a = below.assignment[y] as usize;
            if members.get(y) {
                f[a] = true;
            } else {
                g[a] = true;
            }
        }
        *out.entry(Colour::lift(&f, &g)).or_insert(0) += 1;
    }
    out
}

/// Every f/g pattern over `q` colours.
fn all_lifts(q: usize) -> impl Iterator<Item = Colour> {
    (0..1u64 << (2 * q)).map(move |bits| {
        let f: Vec<bool> = (0..q).map(|i| bits >> i & 1 == 1).collect();
        let g: Vec<bool> = (0..q).map(|i| bits >> (q + i) & 1 == 1).collect();
        Colour::lift(&f, &g)
    })
}

pub fn run() -> Result<String, String> {
    let mut checked = 0;
    for m in 2..=4u32 {
        let model = build_model(m, 2);
        let mut below = base_colouring(&model);
        for level in 0..2 {
            let census = brute_census(&model, &below);
            for t in [2u64, 4, 8] {
                let p = profile(&below, t);
                for beta in all_lifts(below.class.len()) {
                    let kind = classify_colour(&p, &beta).map_err(|e| e.to_string())?;
                    let actual = census.get(&beta).copied().unwrap_or(0);
                    if kind.capped(t) != CappedCount::cap(actual, t) {
                        return Err(format!("m={m} level {} T={t} {beta}: {kind:?} but {actual} sets", level + 1));
                    }
                    // Exact counts must be the full product, not just its cap.
                    if let ColourKind::ExactCount(CappedCount::Exact(n)) = kind {
                        if n != actual {
                            return Err(format!("m={m} {beta}: exact count {n} vs {actual}"));
                        }
                    }
                    checked += 1;
                }
            }
            below = lift_colouring(&model, &below).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("{checked} (model, colour, threshold) cases"))
}
