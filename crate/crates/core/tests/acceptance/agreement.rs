use tst_decide::engine::{decide, Backend, DecideOptions, Outcome};
use tst_decide::model::{build_model, eval_sentence_with, full_expansion_work, EvalOptions};

use crate::common::forall_exists_family;

/// Largest full expansion evaluated concretely.
const WORK: u128 = 1 << 24;

pub fn run() -> Result<String, String> {
    let family = forall_exists_family(2);
    let models: Vec<_> = (2..=4).map(|m| build_model(m, 2)).collect();
    let opts = DecideOptions { backend: Backend::Abstract, ..DecideOptions::default() };
    let eval = EvalOptions { symmetry: true, parallel: false };
    let (mut asserted, mut unstable, mut single) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for p in &family {
        let mut values = Vec::new();
        for (i, model) in models.iter().enumerate() {
            if full_expansion_work(model, p).is_some_and(|w| w <= WORK) {
                let v = eval_sentence_with(model, p, eval).map_err(|e| format!("{p}: {e}"))?;
                values.push((i + 2, v));
            }
        }
        if values.windows(2).any(|w| w[0].1 != w[1].1) {
            unstable += 1;
            crate::report(&format!("  not constant on m in 2..4: {p} {values:?}"));
            continue;
        }
        let Some(&(_, truth)) = values.last() else {
            return Err(format!("{p}: no feasible model size"));
        };
        if values.len() == 1 {
            single += 1;
        }
        let v = decide(p, &opts).map_err(|e| format!("{p}: {e}"))?;
        let want = Outcome::from_truth(truth);
        if v.outcome != want {
            disagreements.push(format!("{p}: abstract {:?}, concrete {values:?}", v.outcome));
        }
        asserted += 1;
    }
    if !disagreements.is_empty() {
        return Err(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]));
    }
    Ok(format!(
        "{} sentences: {asserted} agree ({single} with one feasible size), {unstable} not constant and logged",
        family.len()
    ))
}
