use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tst_decide::model::{build_model, embed, Element, Model};
use tst_decide::stratification::g_sequence;

/// Sample of parameters at one level: all of them when there are few.
fn candidates(ambient: &Model, level: u32, rng: &mut ChaCha8Rng) -> Vec<Element> {
    let m = ambient.atoms();
    match level {
        0 => (0..m).map(Element::Atom).collect(),
        1 if m <= 6 => ambient.elements(1).unwrap().collect(),
        1 => (0..24).map(|_| ambient.element(1, rng.gen_range(0..1u64 << m)).unwrap()).collect(),
        _ => {
            let width = 1usize << m;
            let mut out = vec![ambient.empty_set(2).unwrap(), ambient.full_set(2).unwrap()];
            for _ in 0..10 {
                let k = rng.gen_range(1..6);
                out.push(ambient.set_of(2, (0..k).map(|_| rng.gen_range(0..width))).unwrap());
            }
            out
        }
    }
}

fn g_bound(k: usize, r: u32) -> u64 {
    if k == 0 {
        return 0;
    }
    let g = g_sequence(k, r).unwrap();
    u64::try_from(g.last().unwrap()).unwrap()
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut runs = 0;
    for (small, big) in [(1u32, 6u32), (2, 6), (3, 8)] {
        let ambient = build_model(big, 2);
        let small_model = build_model(small, 2);
        let pool: Vec<Element> = (0..=2).flat_map(|l| candidates(&ambient, l, &mut rng)).collect();
        let mut param_sets: Vec<Vec<Element>> = vec![vec![]];
        param_sets.extend(pool.iter().map(|a| vec![a.clone()]));
        for (i, a) in pool.iter().enumerate() {
            for b in &pool[i..] {
                param_sets.push(vec![a.clone(), b.clone()]);
            }
        }
        for mut params in param_sets {
            params.sort_by_key(Element::level);
            let r = params.last().map_or(0, Element::level);
            if g_bound(params.len(), r) > u64::from(small) {
                continue;
            }
            let maps =
                embed(&small_model, &ambient, &params, 2).map_err(|e| format!("{small}->{big} {params:?}: {e}"))?;
            maps.verify(&ambient, &params, 2).map_err(|e| format!("{small}->{big} {params:?}: {e}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} embeddings verified through level 2"))
}
