use std::fmt::Write as _;

use super::CliError;
use crate::colouring::{base_colouring, lift_colouring, lift_colouring_over, profile, similar, Colour, ColouringLevel};
use crate::model::{build_model, embed, Element, Model};

/// Concrete colouring of every level up to `level`, lifting each over `basis`
/// when one is given for that step.
fn colourings(model: &Model, level: u32, bases: &[Vec<Colour>]) -> Result<Vec<ColouringLevel>, CliError> {
    let mut out = vec![base_colouring(model)];
    for i in 0..level as usize {
        let next = match bases.get(i) {
            Some(b) => lift_colouring_over(model, &out[i], b)?,
            None => lift_colouring(model, &out[i])?,
        };
        out.push(next);
    }
    Ok(out)
}

/// Colour census of level `level` over `m` atoms.
pub fn cmd_census(m: u32, level: u32) -> Result<String, CliError> {
    let model = build_model(m, level);
    model.materializable(level)?;
    let levels = colourings(&model, level, &[])?;
    let top = levels.last().expect("level 0 exists");
    let mut s = String::new();
    let _ = writeln!(s, "# m={m} level={level} size={}", model.level_size_expr(level));
    for (c, n) in top.census() {
        let _ = writeln!(s, "{c}\t{n}");
    }
    Ok(s)
}

/// J-similarity of the level-`level` colourings of two models.
///
/// Lifts go over the union of both classes, so the two colourings share
/// their bit positions. Censuses are capped at `j`.
pub fn cmd_similar(m1: u32, m2: u32, level: u32, j: u64) -> Result<(bool, String), CliError> {
    let (a, b) = (build_model(m1, level), build_model(m2, level));
    a.materializable(level)?;
    b.materializable(level)?;
    let mut bases = Vec::new();
    let (mut ca, mut cb) = (vec![base_colouring(&a)], vec![base_colouring(&b)]);
    for i in 0..level as usize {
        let mut basis: Vec<Colour> = ca[i].class.iter().chain(&cb[i].class).cloned().collect();
        basis.sort();
        basis.dedup();
        bases.push(basis);
        ca = colourings(&a, i as u32 + 1, &bases)?;
        cb = colourings(&b, i as u32 + 1, &bases)?;
    }
    let threshold = j.max(1);
    let (pa, pb) = (profile(&ca[level as usize], threshold), profile(&cb[level as usize], threshold));
    let verdict = similar(&pa, &pb, j)?;
    let mut s = String::new();
    let _ = writeln!(s, "# level={level} J={j}");
    let mut colours: Vec<&Colour> = pa.class.iter().chain(&pb.class).collect();
    colours.sort();
    colours.dedup();
    let _ = writeln!(s, "colour\tm={m1}\tm={m2}");
    for c in colours {
        let _ = writeln!(s, "{c}\t{}\t{}", pa.count(c), pb.count(c));
    }
    let _ = writeln!(s, "{}", if verdict { "similar" } else { "not similar" });
    Ok((verdict, s))
}

/// Parses a parameter of the ambient model.
///
/// `empty:N` and `full:N` are the empty and full level-N sets, `atom:I` is
/// atom I, `rank:N:R` the level-N element of rank R and `set:N:i,j,..` the
/// level-N set with members of those ranks.
pub fn parse_param(model: &Model, spec: &str) -> Result<Element, CliError> {
    let bad = || CliError::Usage(format!("bad parameter spec {spec:?}"));
    let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let e = match parts.as_slice() {
        ["empty", n] => model.empty_set(num(n)? as u32)?,
        ["full", n] => model.full_set(num(n)? as u32)?,
        ["atom", i] => Element::Atom(num(i)? as u32),
        ["rank", n, r] => model.element(num(n)? as u32, num(r)?)?,
        ["set", n, members] => {
            let ranks = members
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| num(t).map(|r| r as usize))
                .collect::<Result<Vec<_>, _>>()?;
            model.set_of(num(n)? as u32, ranks)?
        }
        _ => return Err(bad()),
    };
    model.validate(&e)?;
    Ok(e)
}

/// Embeds the `small`-atom model into the `big`-atom one through `level`,
/// fixing the parameters, and checks the result by enumeration.
pub fn cmd_embed(small: u32, big: u32, params: &[String], level: u32) -> Result<String, CliError> {
    let ambient = build_model(big, level);
    let mut elems = params.iter().map(|p| parse_param(&ambient, p)).collect::<Result<Vec<_>, _>>()?;
    elems.sort_by_key(Element::level);
    let level = elems.iter().map(Element::level).max().unwrap_or(0).max(level);
    let ambient = build_model(big, level);
    let small_model = build_model(small, level);
    let maps = embed(&small_model, &ambient, &elems, level)?;
    let check = maps.verify(&ambient, &elems, level.min(3));
    let mut s = String::new();
    let _ = writeln!(s, "# embed m={small} into m={big} through level {}", maps.top_level());
    for (n, c) in maps.c_sets.iter().enumerate() {
        let items: Vec<String> = c.iter().map(Element::to_string).collect();
        let _ = writeln!(s, "C level {n}: {{{}}}", items.join(", "));
    }
    for (n, images) in maps.maps.iter().enumerate() {
        for (r, e) in images.iter().enumerate() {
            let _ = writeln!(s, "f{n}({r}) = {e}");
        }
    }
    match check {
        Ok(()) => {
            let _ = writeln!(s, "invariants: ok");
            Ok(s)
        }
        Err(e) => Err(CliError::Mismatch(format!("embedding check failed: {e}"))),
    }
}
