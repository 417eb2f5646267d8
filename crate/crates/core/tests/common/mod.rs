//! Sentence generators shared by the integration tests.
#![allow(dead_code)]

use tst_decide::formula::{Formula, PrenexSentence, QuantKind, Quantifier, TypedFormula, TypedVar};

/// Universal type multisets with at most `k` members, sorted ascending.
fn universal_types(k: usize, max_ty: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for a in 0..=max_ty {
        out.push(vec![a]);
        if k >= 2 {
            for b in a..=max_ty {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Existential type sequences of form (A) or (B) with at most two members.
fn existential_types(max_ty: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for a in 0..=max_ty {
        out.push(vec![a]);
        out.push(vec![a, a]);
        for b in 0..a {
            out.push(vec![a, b]);
        }
    }
    out
}

fn atoms(vars: &[TypedVar]) -> Vec<TypedFormula> {
    let mut out = Vec::new();
    for (i, a) in vars.iter().enumerate() {
        for (j, b) in vars.iter().enumerate() {
            if b.ty == a.ty + 1 {
                out.push(Formula::mem(a.clone(), b.clone()));
            }
            if i < j && a.ty == b.ty {
                out.push(Formula::eq(a.clone(), b.clone()));
            }
        }
    }
    out
}

fn literal(atoms: &[TypedFormula], code: usize) -> TypedFormula {
    let a = atoms[code / 2].clone();
    if code % 2 == 1 {
        Formula::not(a)
    } else {
        a
    }
}

/// Matrices of one to three literals over distinct atoms.
fn matrices(atoms: &[TypedFormula]) -> Vec<TypedFormula> {
    let n = atoms.len() * 2;
    let lit = |c| literal(atoms, c);
    let mut out = Vec::new();
    for a in 0..n {
        out.push(lit(a));
        for b in 0..n {
            if b / 2 <= a / 2 {
                continue;
            }
            out.push(Formula::and(lit(a), lit(b)));
            out.push(Formula::or(lit(a), lit(b)));
            for c in 0..n {
                if c / 2 == a / 2 || c / 2 == b / 2 {
                    continue;
                }
                out.push(Formula::or(Formula::and(lit(a), lit(b)), lit(c)));
                out.push(Formula::and(Formula::or(lit(a), lit(b)), lit(c)));
            }
        }
    }
    out
}

fn mentions_all(f: &TypedFormula, vars: &[TypedVar]) -> bool {
    let used = f.variables();
    vars.iter().all(|v| used.contains(v))
}

// Renamings that swap two variables of equal type within one block.
fn renamings(prefix: &[Quantifier]) -> Vec<Vec<usize>> {
    let n = prefix.len();
    let mut out = vec![(0..n).collect::<Vec<_>>()];
    for i in 0..n {
        for j in i + 1..n {
            if prefix[i].kind == prefix[j].kind && prefix[i].var.ty == prefix[j].var.ty {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(i, j);
                out.push(p);
            }
        }
    }
    out
}

fn rename(f: &TypedFormula, vars: &[TypedVar], perm: &[usize]) -> TypedFormula {
    f.map_vars(&mut |v: &TypedVar| {
        let i = vars.iter().position(|w| w == v).unwrap();
        vars[perm[i]].clone()
    })
}

/// Every ∀*∃* sentence of form (A) or (B) with at most two universals, at
/// most two existentials, types up to `max_ty` and matrices of up to three
/// literals, each prefix variable occurring in the matrix. Matrices equal
/// up to swapping two same-type variables of one block are kept once.
pub fn forall_exists_family(max_ty: u32) -> Vec<PrenexSentence> {
    let mut out = Vec::new();
    for us in universal_types(2, max_ty) {
        for es in existential_types(max_ty) {
            let mut prefix: Vec<Quantifier> = us
                .iter()
                .enumerate()
                .map(|(i, &t)| Quantifier { kind: QuantKind::Forall, var: TypedVar::new(format!("x{i}"), t) })
                .collect();
            prefix.extend(
                es.iter()
                    .enumerate()
                    .map(|(i, &t)| Quantifier { kind: QuantKind::Exists, var: TypedVar::new(format!("y{i}"), t) }),
            );
            if prefix.is_empty() {
                continue;
            }
            let vars: Vec<TypedVar> = prefix.iter().map(|q| q.var.clone()).collect();
            let perms = renamings(&prefix);
            let mut seen = std::collections::HashSet::new();
            for matrix in matrices(&atoms(&vars)) {
                if !mentions_all(&matrix, &vars) {
                    continue;
                }
                let canonical = perms.iter().map(|p| rename(&matrix, &vars, p).to_string()).min().unwrap();
                if seen.insert(canonical) {
                    out.push(PrenexSentence { prefix: prefix.clone(), matrix });
                }
            }
        }
    }
    out
}

/// A random ∃*∀* sentence: one or two existentials with ascending types,
/// then one or two universals, types up to `max_ty`, and a matrix of up to
/// three literals mentioning every variable.
pub fn random_exists_forall<R: rand::Rng>(rng: &mut R, max_ty: u32) -> PrenexSentence {
    loop {
        let mut es: Vec<u32> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..=max_ty)).collect();
        es.sort();
        let us: Vec<u32> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..=max_ty)).collect();
        let mut prefix: Vec<Quantifier> = es
            .iter()
            .enumerate()
            .map(|(i, &t)| Quantifier { kind: QuantKind::Exists, var: TypedVar::new(format!("x{i}"), t) })
            .collect();
        prefix.extend(
            us.iter()
                .enumerate()
                .map(|(i, &t)| Quantifier { kind: QuantKind::Forall, var: TypedVar::new(format!("y{i}"), t) }),
        );
        let vars: Vec<TypedVar> = prefix.iter().map(|q| q.var.clone()).collect();
        let atoms = atoms(&vars);
        if atoms.is_empty() {
            continue;
        }
        let shape = rng.gen_range(0..5);
        let mut lit = || literal(&atoms, rng.gen_range(0..atoms.len() * 2));
        let matrix = match shape {
            0 => lit(),
            1 => Formula::and(lit(), lit()),
            2 => Formula::or(lit(), lit()),
            3 => Formula::or(Formula::and(lit(), lit()), lit()),
            _ => Formula::and(Formula::or(lit(), lit()), lit()),
        };
        if mentions_all(&matrix, &vars) {
            return PrenexSentence { prefix, matrix };
        }
    }
}
