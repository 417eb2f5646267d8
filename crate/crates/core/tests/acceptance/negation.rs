use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tst_decide::cli::{cmd_decide, Syntax};
use tst_decide::engine::{DecideOptions, Outcome};

use crate::common::{forall_exists_family, random_exists_forall};

fn decided(o: Outcome) -> bool {
    matches!(o, Outcome::ProvableInTSTI | Outcome::RefutableInTSTI)
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let family = forall_exists_family(2);
    let opts = DecideOptions::default();
    let (mut pairs, mut skipped) = (0, 0);
    while pairs < 100 {
        // Alternate the two shapes so each side of the negation is exercised.
        let p = if pairs % 2 == 0 {
            family[rng.gen_range(0..family.len())].clone()
        } else {
            random_exists_forall(&mut rng, 1)
        };
        let text = p.to_string();
        let pos = cmd_decide(&text, Syntax::Typed, &opts).map_err(|e| format!("{text}: {e}"))?;
        if !decided(pos.verdict) {
            skipped += 1;
            continue;
        }
        let negated = format!("~({text})");
        let neg = cmd_decide(&negated, Syntax::Typed, &opts).map_err(|e| format!("{negated}: {e}"))?;
        if neg.verdict != pos.verdict.flip() {
            return Err(format!("{text}: {:?}, negation {:?}", pos.verdict, neg.verdict));
        }
        pairs += 1;
    }
    Ok(format!("100 pairs opposite ({skipped} undecided draws skipped)"))
}
