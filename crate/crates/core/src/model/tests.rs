use super::*;
use crate::formula::{parse_typed, parse_typed_sentence, to_prenex, PrenexSentence, QuantKind, Quantifier};
use proptest::prelude::*;

fn sentence(text: &str) -> PrenexSentence {
    to_prenex(&parse_typed_sentence(text).unwrap())
}

#[test]
fn level_sizes() {
    let m = build_model(3, 2);
    assert_eq!((0..=2).map(|n| m.level_size(n).unwrap()).collect::<Vec<_>>(), vec![3, 8, 256]);
    let m = build_model(2, 1);
    let level1: Vec<Vec<usize>> = m.elements(1).unwrap().map(|e| e.members().unwrap().iter_ones().collect()).collect();
    assert_eq!(level1, vec![vec![], vec![0], vec![1], vec![0, 1]]);
    let m = build_model(5, 3);
    assert!(matches!(m.elements(3), Err(ModelError::InfeasibleLevel { level: 3, .. })));
    assert_eq!(m.level_size_expr(3), "2^(4294967296)");
}

#[test]
fn eval_qf_examples() {
    let m = build_model(2, 2);
    let x0 = TypedVar::new("x", 0);
    let y1 = TypedVar::new("y", 1);
    let env = BTreeMap::from([(x0.clone(), Element::Atom(0)), (y1.clone(), m.set_of(1, [0]).unwrap())]);
    assert!(eval_qf(&m, &parse_typed("x:0 in y:1").unwrap(), &env).unwrap());

    let (a, b) = (TypedVar::new("x", 1), TypedVar::new("y", 1));
    let env = BTreeMap::from([(a, m.empty_set(1).unwrap()), (b, m.full_set(1).unwrap())]);
    assert!(eval_qf(&m, &parse_typed("~(x:1 = y:1)").unwrap(), &env).unwrap());

    // ∅^1 ∈ {∅^1, {a0}}: level-1 ranks 0 and 1.
    let (a, b) = (TypedVar::new("x", 1), TypedVar::new("y", 2));
    let env = BTreeMap::from([(a, m.empty_set(1).unwrap()), (b, m.set_of(2, [0, 1]).unwrap())]);
    assert!(eval_qf(&m, &parse_typed("x:1 in y:2").unwrap(), &env).unwrap());

    let env = BTreeMap::from([(x0, m.empty_set(1).unwrap())]);
    assert!(matches!(eval_qf(&m, &parse_typed("x:0 = x:0").unwrap(), &env), Err(ModelError::LevelMismatch { .. })));
}

#[test]
fn eval_sentence_examples() {
    let m = build_model(2, 1);
    assert!(eval_sentence(&m, &sentence("forall x:0 . exists y:1 . x in y")).unwrap());
    assert!(!eval_sentence(&m, &sentence("forall x:1 . exists y:0 . y in x")).unwrap());
    let m3 = build_model(3, 1);
    let p = sentence("forall x:0 . forall y:0 . exists z:1 . (~(x = y) -> (x in z & ~(y in z)))");
    assert!(eval_sentence(&m3, &p).unwrap());
    // Oracle: brute force over the 9 pairs and 8 candidates with plain integers.
    let oracle = (0..3).all(|x| (0..3).all(|y| (0..8u32).any(|z| x == y || ((z >> x) & 1 == 1 && (z >> y) & 1 == 0))));
    assert!(oracle);
}

#[test]
fn dump_lists_level() {
    let m = build_model(2, 1);
    assert_eq!(m.dump(1).unwrap(), "1 0 0\n1 1 1\n1 2 2\n1 3 3\n");
}

// Random prenex sentences over levels ≤ 2 with consecutive-type atoms.
fn arb_sentence(max_vars: usize) -> impl Strategy<Value = PrenexSentence> {
    prop::collection::vec((any::<bool>(), 0u32..=2), 1..=max_vars).prop_flat_map(|prefix| {
        let vars: Vec<TypedVar> =
            prefix.iter().enumerate().map(|(i, &(_, t))| TypedVar::new(format!("v{i}"), t)).collect();
        let mut atoms: Vec<TypedFormula> = Vec::new();
        for a in &vars {
            for b in &vars {
                if b.ty == a.ty + 1 {
                    atoms.push(Formula::mem(a.clone(), b.clone()));
                }
                if a.ty == b.ty && a < b {
                    atoms.push(Formula::eq(a.clone(), b.clone()));
                }
            }
        }
        if atoms.is_empty() {
            atoms.push(Formula::eq(vars[0].clone(), vars[0].clone()));
        }
        let leaf = prop::sample::select(atoms);
        let matrix = leaf.prop_recursive(3, 10, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
            ]
        });
        let prefix: Vec<Quantifier> = prefix
            .iter()
            .zip(&vars)
            .map(|(&(e, _), v)| Quantifier {
                kind: if e { QuantKind::Exists } else { QuantKind::Forall },
                var: v.clone(),
            })
            .collect();
        matrix.prop_map(move |matrix| PrenexSentence { prefix: prefix.clone(), matrix })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetry_reduction_matches_full_expansion(p in arb_sentence(4), m in 1u32..=3) {
        let model = build_model(m, 2);
        let work = full_expansion_work(&model, &p);
        prop_assume!(matches!(work, Some(w) if w <= 1 << 20));
        let full = eval_sentence_with(&model, &p, EvalOptions { symmetry: false, parallel: false }).unwrap();
        let reduced = eval_sentence_with(&model, &p, EvalOptions { symmetry: true, parallel: false }).unwrap();
        let par = eval_sentence_with(&model, &p, EvalOptions { symmetry: true, parallel: true }).unwrap();
        prop_assert_eq!(full, reduced);
        prop_assert_eq!(full, par);
    }
}

#[test]
fn embed_empty_set_parameter() {
    let small = build_model(1, 2);
    let ambient = build_model(8, 2);
    let params = vec![ambient.empty_set(1).unwrap()];
    let maps = embed(&small, &ambient, &params, 2).unwrap();
    maps.verify(&ambient, &params, 3).unwrap();
    assert!(maps.maps[1].contains(&params[0]));
}

#[test]
fn embed_without_parameters_is_direct_image() {
    let small = build_model(3, 2);
    let ambient = build_model(8, 2);
    let maps = embed(&small, &ambient, &[], 2).unwrap();
    maps.verify(&ambient, &[], 3).unwrap();
    assert!(maps.c_sets.iter().all(Vec::is_empty));
    // f_{n+1}(x) = f_n``x everywhere.
    for n in 0..2usize {
        for (r, y) in maps.maps[n + 1].iter().enumerate() {
            let image: Vec<usize> = y.members().unwrap().iter_ones().collect();
            let expected: Vec<usize> = {
                let mut v: Vec<usize> = (0..maps.maps[n].len())
                    .filter(|&i| (r >> i) & 1 == 1)
                    .map(|i| maps.maps[n][i].rank().unwrap() as usize)
                    .collect();
                v.sort();
                v
            };
            assert_eq!(image, expected);
        }
    }
}

#[test]
fn embed_level_two_parameter() {
    let small = build_model(1, 2);
    let ambient = build_model(8, 2);
    let a = ambient.set_of(2, [3, 17, 200]).unwrap();
    let maps = embed(&small, &ambient, std::slice::from_ref(&a), 2).unwrap();
    maps.verify(&ambient, std::slice::from_ref(&a), 3).unwrap();
    assert!(maps.maps[2].contains(&a));
}

#[test]
fn embed_rejects_too_few_atoms() {
    let small = build_model(2, 1);
    let ambient = build_model(6, 1);
    let params: Vec<Element> = (0..3).map(|i| ambient.set_of(1, [i]).unwrap()).collect();
    // G_3(1) = C(3,2) + 3 = 6 > 2.
    assert!(matches!(embed(&small, &ambient, &params, 1), Err(EmbedError::BoundViolation { .. })));
    let small = build_model(6, 1);
    let maps = embed(&small, &ambient, &params, 1).unwrap();
    maps.verify(&ambient, &params, 3).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embed_satisfies_invariants(ranks in prop::collection::vec(0u64..64, 0..=2), lvl1 in any::<bool>()) {
        let ambient = build_model(6, 2);
        let params: Vec<Element> = if lvl1 {
            ranks.iter().map(|&r| ambient.element(1, r).unwrap()).collect()
        } else {
            ranks.iter().map(|&r| Element::Atom((r % 6) as u32)).collect()
        };
        let k = params.len();
        let r = params.iter().map(Element::level).max().unwrap_or(0);
        let need = g_sequence_last(k, r).max(1);
        let small = build_model(need as u32, 2);
        let maps = embed(&small, &ambient, &params, 2).unwrap();
        prop_assert_eq!(maps.verify(&ambient, &params, 3), Ok(()));
    }
}

fn g_sequence_last(k: usize, r: u32) -> u64 {
    use num_traits::ToPrimitive;
    crate::stratification::g_sequence(k, r).unwrap().last().unwrap().to_u64().unwrap()
}
