use super::*;
use crate::model::{build_model, Element, Model};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(text: &str) -> Colour {
    Colour::parse(text).unwrap()
}

fn lifted(m: u32) -> (Model, ColouringLevel) {
    let model = build_model(m, 2);
    let base = base_colouring(&model);
    let c1 = lift_colouring(&model, &base).unwrap();
    (model, c1)
}

fn census(cl: &ColouringLevel) -> Vec<(String, u64)> {
    cl.census().into_iter().map(|(c, n)| (c.to_string(), n)).collect()
}

#[test]
fn base_colouring_is_constant() {
    let m = build_model(3, 1);
    let base = base_colouring(&m);
    assert_eq!(base.level, 0);
    assert_eq!(base.stage, 0);
    assert_eq!(census(&base), vec![("0".to_string(), 3)]);
    assert_eq!(census(&base_colouring(&build_model(1, 1))), vec![("0".to_string(), 1)]);
}

#[test]
fn lift_of_two_atoms() {
    let (_, c1) = lifted(2);
    // Ranks: ∅, {a0}, {a1}, V.
    let colours: Vec<String> = (0..4).map(|r| c1.colour_of(r).to_string()).collect();
    assert_eq!(colours, vec!["<01>", "<11>", "<11>", "<10>"]);
    assert!(!c1.class.contains(&c("<00>")));
}

#[test]
fn lift_of_one_atom() {
    let (_, c1) = lifted(1);
    assert_eq!(census(&c1), vec![("<01>".to_string(), 1), ("<10>".to_string(), 1)]);
}

#[test]
fn profiles_of_three_atoms() {
    let (_, c1) = lifted(3);
    let p = profile(&c1, 8);
    let entries: Vec<(String, String)> = p.entries().map(|(c, n)| (c.to_string(), n.to_string())).collect();
    assert_eq!(entries, vec![("<01>".into(), "1".into()), ("<10>".into(), "1".into()), ("<11>".into(), "6".into())]);
    let p = profile(&c1, 4);
    assert_eq!(p.count(&c("<11>")), CappedCount::AtLeast(4));
    assert_eq!(p.count(&c("<00>")), CappedCount::Exact(0));
    assert_eq!(p.census_lines(), vec!["<01>\t1", "<10>\t1", "<11>\t>=4"]);
}

#[test]
fn refine_by_singleton() {
    let m = build_model(2, 1);
    let base = base_colouring(&m);
    let r = refine_colouring(&m, &base, &[m.set_of(1, [0]).unwrap()]).unwrap();
    assert_eq!(r.stage, 1);
    assert_eq!(r.colour_of(0).to_string(), "1;0");
    assert_eq!(r.colour_of(1).to_string(), "0;0");
    assert!(matches!(
        refine_colouring(&m, &base, &[Element::Atom(0)]),
        Err(ColourError::LevelMismatch { expected: 1, found: 0 })
    ));
}

#[test]
fn refine_atoms_by_equality() {
    let m = build_model(3, 1);
    let r = refine_atoms(&m, &base_colouring(&m), &[Element::Atom(2), Element::Atom(2)]).unwrap();
    assert_eq!(census(&r), vec![("00;0".to_string(), 2), ("11;0".to_string(), 1)]);
}

#[test]
fn refinement_bits_stack() {
    let m = build_model(2, 1);
    let e = refine_atoms(&m, &base_colouring(&m), &[Element::Atom(1)]).unwrap();
    let f = refine_colouring(&m, &e, &[m.full_set(1).unwrap()]).unwrap();
    assert_eq!(f.colour_of(1).to_string(), "11;0");
    assert_eq!(f.colour_of(0).to_string(), "10;0");
}

#[test]
fn similarity_examples() {
    let (_, c3) = lifted(3);
    let (_, c4) = lifted(4);
    let (_, c1) = lifted(1);
    assert!(similar(&profile(&c3, 8), &profile(&c4, 8), 2).unwrap());
    assert!(!similar(&profile(&c1, 8), &profile(&c3, 8), 3).unwrap());
    for j in 1..=8 {
        assert!(similar(&profile(&c3, 8), &profile(&c3, 8), j).unwrap());
    }
    let (_, c2) = lifted(2);
    let m2 = build_model(2, 2);
    let c2_level2 = lift_colouring(&m2, &c2).unwrap();
    assert_eq!(similar(&profile(&c2, 4), &profile(&c2_level2, 4), 2), Err(ColourError::ClassMismatch));
    assert!(matches!(similar(&profile(&c3, 2), &profile(&c4, 8), 3), Err(ColourError::ThresholdBelowDegree { .. })));
}

#[test]
fn classify_examples() {
    let big = MultiplicityProfile {
        level: 0,
        threshold: 4,
        basis: vec![],
        class: vec![Colour::base()],
        counts: vec![CappedCount::AtLeast(4)],
    };
    assert_eq!(classify_colour(&big, &c("<00>")), Ok(ColourKind::Forbidden));
    assert_eq!(classify_colour(&big, &c("<10>")), Ok(ColourKind::OneSpecial));
    assert_eq!(classify_colour(&big, &c("<11>")), Ok(ColourKind::Abundant));
    let two = MultiplicityProfile { counts: vec![CappedCount::Exact(2)], ..big.clone() };
    assert_eq!(classify_colour(&two, &c("<11>")), Ok(ColourKind::ExactCount(CappedCount::Exact(2))));
    assert!(matches!(classify_colour(&two, &c("<1100>")), Err(ColourError::OrderingMismatch { q: 1, .. })));
    let tiny = MultiplicityProfile { threshold: 1, ..big };
    assert_eq!(classify_colour(&tiny, &c("<10>")), Err(ColourError::ThresholdTooSmall(1)));
}

#[test]
fn colour_text_round_trips() {
    for text in ["0", "<10>", "1;0", "01;<1101>", "<>"] {
        assert_eq!(c(text).to_string(), text);
    }
    assert_eq!(Colour::parse("<101>"), None);
    assert!(c("<01>") < c("<10>"));
}

// A random subset of level `level`, reproducible from `seed`.
fn random_set(model: &Model, level: u32, seed: u64) -> Element {
    let size = model.level_size(level - 1).unwrap() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density: f64 = rng.gen_range(0.0..1.0);
    model.set_of(level, (0..size).filter(|_| rng.gen_bool(density))).unwrap()
}

fn random_params(model: &Model, level: u32, seeds: &[u64]) -> Vec<Element> {
    if level == 0 {
        seeds.iter().map(|&s| Element::Atom((s % u64::from(model.atoms())) as u32)).collect()
    } else {
        seeds.iter().map(|&s| random_set(model, level, s)).collect()
    }
}

// Refines level `r - 1` (or level 0 by atoms when `r == 0`) and returns it.
fn refined_level(model: &Model, r: u32, params: &[Element]) -> ColouringLevel {
    let mut cl = base_colouring(model);
    if r == 0 {
        return refine_atoms(model, &cl, params).unwrap();
    }
    for _ in 1..r {
        cl = lift_colouring(model, &cl).unwrap();
    }
    refine_colouring(model, &cl, params).unwrap()
}

// Lifting the capped profile agrees with capping the concrete lift.
fn check_lift_oracle(model: &Model, cl: &ColouringLevel, t: u64) -> Result<(), TestCaseError> {
    let up = lift_colouring(model, cl).unwrap();
    let p = profile(cl, t);
    for (beta, n) in up.census() {
        let kind = classify_colour(&p, &beta).unwrap();
        prop_assert_eq!(kind.capped(t), CappedCount::cap(n, t), "colour {} with count {}", beta, n);
    }
    match lift_profile(&p, 1 << 14) {
        Ok(abstract_up) => prop_assert_eq!(abstract_up, profile(&up, t)),
        Err(ColourError::TooManyColours(_)) => {}
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn classification_matches_concrete_counts(
        m in 1u32..=4,
        r in 0u32..=2,
        seeds in prop::collection::vec(any::<u64>(), 0..=2),
        t in prop::sample::select(vec![2u64, 4, 8]),
    ) {
        let model = build_model(m, 2);
        let params = random_params(&model, r, &seeds);
        let cl = refined_level(&model, r, &params);
        check_lift_oracle(&model, &cl, t)?;
        if cl.level == 0 {
            let up = lift_colouring(&model, &cl).unwrap();
            check_lift_oracle(&model, &up, t)?;
        }
    }
}

#[test]
fn exact_counts_reproduce_census() {
    // With a threshold above every count the classification is exact.
    for m in 1..=4 {
        let model = build_model(m, 2);
        let c1 = lift_colouring(&model, &base_colouring(&model)).unwrap();
        let c2 = lift_colouring(&model, &c1).unwrap();
        let t = 1 << 20;
        for (beta, n) in c2.census() {
            assert_eq!(classify_colour(&profile(&c1, t), &beta).unwrap().capped(t), CappedCount::Exact(n));
        }
    }
}

#[test]
fn similarity_survives_lifting() {
    for m1 in 2..=4u32 {
        for m2 in 2..=4u32 {
            let (a, b) = (build_model(m1, 2), build_model(m2, 2));
            let mut ca = base_colouring(&a);
            let mut cb = base_colouring(&b);
            for _ in 0..2 {
                let mut basis: Vec<Colour> = ca.class.iter().chain(&cb.class).cloned().collect();
                basis.sort();
                basis.dedup();
                let next_a = lift_colouring_over(&a, &ca, &basis).unwrap();
                let next_b = lift_colouring_over(&b, &cb, &basis).unwrap();
                for j in 2..=6 {
                    let t = 8;
                    if similar(&profile(&ca, t), &profile(&cb, t), j).unwrap() {
                        assert!(
                            similar(&profile(&next_a, t), &profile(&next_b, t), j).unwrap(),
                            "m={m1},{m2} level {} J={j}",
                            ca.level
                        );
                    }
                }
                ca = next_a;
                cb = next_b;
            }
        }
    }
}

// Every choice of `k` parameters at `level` in `model`, as rank tuples.
fn all_params(model: &Model, level: u32, k: usize) -> Vec<Vec<Element>> {
    let size = model.level_size(level).unwrap();
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Element>| {
                (0..size).map(move |rank| {
                    let mut next = prefix.clone();
                    next.push(model.element(level, rank).unwrap());
                    next
                })
            })
            .collect();
    }
    out
}

#[test]
fn matched_parameters_keep_similarity() {
    let mut checked = 0;
    for m1 in 1..=3u32 {
        for m2 in 1..=4u32 {
            let (a, b) = (build_model(m1, 2), build_model(m2, 2));
            for (r, k) in [(0u32, 1usize), (0, 2), (1, 1), (1, 2), (2, 1)] {
                let below = r.saturating_sub(1);
                let (mut ca, mut cb) = (base_colouring(&a), base_colouring(&b));
                for _ in 0..below {
                    ca = lift_colouring(&a, &ca).unwrap();
                    cb = lift_colouring(&b, &cb).unwrap();
                }
                // Largest T' with the unrefined levels 2^k T'-similar.
                let cells = 1u64 << k;
                let Some(t_new) = (1..=4u64).rev().find(|&t| {
                    let big = cells * t;
                    similar(&profile(&ca, big), &profile(&cb, big), big).unwrap()
                }) else {
                    continue;
                };
                for params in all_params(&a, r, k) {
                    let bs = match_parameters(&a, &ca, &params, &b, &cb, t_new).unwrap();
                    let (ra, rb) = if r == 0 {
                        (refine_atoms(&a, &ca, &params).unwrap(), refine_atoms(&b, &cb, &bs).unwrap())
                    } else {
                        (refine_colouring(&a, &ca, &params).unwrap(), refine_colouring(&b, &cb, &bs).unwrap())
                    };
                    assert!(
                        similar(&profile(&ra, t_new), &profile(&rb, t_new), t_new).unwrap(),
                        "m={m1},{m2} r={r} k={k} T'={t_new} params={params:?}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 900, "only {checked} parameter choices checked");
}
