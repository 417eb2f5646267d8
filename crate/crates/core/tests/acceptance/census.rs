use tst_decide::colouring::{base_colouring, lift_colouring, Colour};
use tst_decide::model::build_model;

pub fn run() -> Result<String, String> {
    for m in 1..=12u32 {
        let model = build_model(m, 1);
        let level1 = lift_colouring(&model, &base_colouring(&model)).map_err(|e| e.to_string())?;
        let census = level1.census();
        let count = |c: &str| {
            let c = Colour::parse(c).unwrap();
            census.iter().find(|(d, _)| *d == c).map_or(0, |&(_, n)| n)
        };
        let got = [count("<00>"), count("<10>"), count("<01>"), count("<11>")];
        let want = [0, 1, 1, (1u64 << m) - 2];
        if got != want {
            return Err(format!("m={m}: counts {got:?}, expected {want:?}"));
        }
        // Each set's colour read off its own members.
        let full = (1u64 << m) - 1;
        for rank in 0..=full {
            let want = Colour::lift(&[rank != 0], &[rank != full]);
            if *level1.colour_of(rank as usize) != want {
                return Err(format!("m={m}: set {rank:#x} coloured {}", level1.colour_of(rank as usize)));
            }
        }
        let total: u64 = census.iter().map(|&(_, n)| n).sum();
        if total != 1u64 << m {
            return Err(format!("m={m}: census covers {total} sets"));
        }
    }
    Ok("m = 1..12 exact".into())
}
