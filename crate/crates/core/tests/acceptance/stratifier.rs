use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tst_decide::formula::Formula;
use tst_decide::stratification::stratify;

fn random_formula(rng: &mut ChaCha8Rng, pool: &[String], depth: u32) -> Formula {
    let var = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    let choice = if depth <= 1 { rng.gen_range(0..2) } else { rng.gen_range(0..9) };
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, pool, depth - 1);
    match choice {
        0 => Formula::mem(var(rng), var(rng)),
        1 => Formula::eq(var(rng), var(rng)),
        2 => Formula::not(sub(rng)),
        3 => Formula::and(sub(rng), sub(rng)),
        4 => Formula::or(sub(rng), sub(rng)),
        5 => Formula::implies(sub(rng), sub(rng)),
        6 => Formula::iff(sub(rng), sub(rng)),
        7 => Formula::forall(var(rng), sub(rng)),
        _ => Formula::exists(var(rng), sub(rng)),
    }
}

/// Names and `(lower, upper, offset)` constraints, collected independently.
fn constraints(f: &Formula, names: &mut Vec<String>, out: &mut Vec<(usize, usize, u32)>) {
    let id = |n: &String, names: &mut Vec<String>| match names.iter().position(|m| m == n) {
        Some(i) => i,
        None => {
            names.push(n.clone());
            names.len() - 1
        }
    };
    match f {
        Formula::Mem(x, y) | Formula::Eq(x, y) => {
            let (a, b) = (id(x, names), id(y, names));
            out.push((a, b, u32::from(matches!(f, Formula::Mem(..)))));
        }
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            id(x, names);
            constraints(g, names, out);
        }
        Formula::Not(g) => constraints(g, names, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            constraints(a, names, out);
            constraints(b, names, out);
        }
    }
}

/// The pointwise least type assignment over `0..n`, if any satisfies all
/// constraints. Shifting a component down keeps it a solution, so the least
/// one is the normalized one.
fn exhaustive(n: usize, cs: &[(usize, usize, u32)]) -> Option<Vec<u32>> {
    let mut best: Option<Vec<u32>> = None;
    let mut sigma = vec![0u32; n];
    let total = (n as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for s in sigma.iter_mut() {
            *s = (c % n as u64) as u32;
            c /= n as u64;
        }
        if cs.iter().all(|&(a, b, d)| sigma[b] == sigma[a] + d) {
            best = Some(match best {
                None => sigma.clone(),
                Some(b) => b.iter().zip(&sigma).map(|(x, y)| *x.min(y)).collect(),
            });
        }
    }
    best
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut stratifiable = 0;
    for _ in 0..1000 {
        let pool: Vec<String> = (0..rng.gen_range(1..=6)).map(|i| format!("v{i}")).collect();
        let depth = rng.gen_range(1..=5);
        let f = random_formula(&mut rng, &pool, depth);
        let (mut names, mut cs) = (Vec::new(), Vec::new());
        constraints(&f, &mut names, &mut cs);
        let want = exhaustive(names.len(), &cs);
        let got = stratify(&f);
        match (&want, &got) {
            (None, Err(_)) => {}
            (Some(w), Ok(sigma)) => {
                let w: BTreeMap<String, u32> = names.iter().cloned().zip(w.iter().copied()).collect();
                if sigma.0 != w {
                    return Err(format!("{f}: stratifier {sigma}, exhaustive {w:?}"));
                }
                stratifiable += 1;
            }
            _ => return Err(format!("{f}: stratifier {got:?}, exhaustive {want:?}")),
        }
    }
    Ok(format!("1000 formulas agree ({stratifiable} stratifiable)"))
}
