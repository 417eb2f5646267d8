use num_bigint::BigUint;
use tst_decide::stratification::g_sequence;

/// `G_k(n)` straight from the recursion, in machine integers.
fn direct(k: u128, n: u32) -> u128 {
    (0..n).fold(k, |g, _| g * g.saturating_sub(1) / 2 + k)
}

pub fn run() -> Result<String, String> {
    let mut checked = 0;
    for k in 1..=4usize {
        let seq = g_sequence(k, 4).map_err(|e| e.to_string())?;
        for n in 0..=4u32 {
            let want = BigUint::from(direct(k as u128, n));
            if seq[n as usize] != want {
                return Err(format!("G_{k}({n}) = {} but the recursion gives {want}", seq[n as usize]));
            }
            checked += 1;
        }
    }
    let g2: Vec<u128> = (0..=4).map(|n| direct(2, n)).collect();
    if g2 != [2, 3, 5, 12, 68] {
        return Err(format!("G_2 prefix {g2:?}"));
    }
    Ok(format!("{checked} values match"))
}
