use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tst_decide::formula::QuantKind;
use tst_decide::model::{build_model, eval_sentence_with, EvalOptions};
use tst_decide::stratification::g_sequence;

use crate::common::random_exists_forall;

const OPTS: EvalOptions = EvalOptions { symmetry: true, parallel: false };

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let models: Vec<_> = (1..=6).map(|m| build_model(m, 1)).collect();
    let (mut true_at_six, mut drawn, mut evaluations) = (0, 0, 0);
    while true_at_six < 200 {
        let p = random_exists_forall(&mut rng, 1);
        drawn += 1;
        if !eval_sentence_with(&models[5], &p, OPTS).map_err(|e| e.to_string())? {
            continue;
        }
        true_at_six += 1;
        let exist: Vec<u32> = p.prefix.iter().filter(|q| q.kind == QuantKind::Exists).map(|q| q.var.ty).collect();
        let r = exist.iter().copied().max().unwrap_or(0);
        let g = g_sequence(exist.len(), r).map_err(|e| e.to_string())?;
        let from = u32::try_from(g.last().unwrap()).unwrap().max(1);
        for m in from..=6 {
            evaluations += 1;
            if !eval_sentence_with(&models[m as usize - 1], &p, OPTS).map_err(|e| e.to_string())? {
                return Err(format!("{p} holds at m=6 but fails at m={m} (bound {from})"));
            }
        }
    }
    Ok(format!("200 of {drawn} sentences true at m=6; {evaluations} smaller models agree"))
}
