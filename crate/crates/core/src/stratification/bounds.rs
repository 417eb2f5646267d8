use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::FragmentClass;

/// Largest bound we are willing to hold, in bits.
pub const MAX_BOUND_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bound {expression} exceeds {MAX_BOUND_BITS} bits")]
pub struct BoundOverflow {
    pub expression: String,
}

/// Atom-count thresholds for a classified sentence.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Bounds {
    /// Generating quantifiers: the universals of a ∀*∃* form, the existentials of ∃*∀*.
    pub k: usize,
    /// Largest type among them (0 if there are none).
    pub r_k: u32,
    #[serde(serialize_with = "ser_big")]
    pub g_bound: BigUint,
    #[serde(serialize_with = "ser_big_opt")]
    pub ab_bound: Option<BigUint>,
    pub k_prime: usize,
    pub multiplicities: Vec<usize>,
    pub big_k: usize,
    #[serde(serialize_with = "ser_big")]
    pub certified_m: BigUint,
}

impl Bounds {
    /// `certified_m` when it fits a machine word.
    pub fn certified_m_u64(&self) -> Option<u64> {
        self.certified_m.to_u64()
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_opt<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// `C(n, 2)`, zero for n < 2.
pub fn binom2(n: &BigUint) -> BigUint {
    if *n < BigUint::from(2u32) {
        return BigUint::zero();
    }
    n * (n - BigUint::one()) / BigUint::from(2u32)
}

/// `G_k(0), ..., G_k(n)`.
pub fn g_sequence(k: usize, n: u32) -> Result<Vec<BigUint>, BoundOverflow> {
    let kb = BigUint::from(k);
    let mut out = vec![kb.clone()];
    for i in 0..n {
        let prev = out.last().unwrap();
        if prev.bits() * 2 > MAX_BOUND_BITS {
            return Err(BoundOverflow { expression: format!("G_{k}({})", i + 1) });
        }
        out.push(binom2(prev) + &kb);
    }
    Ok(out)
}

fn g(k: usize, n: u32) -> Result<BigUint, BoundOverflow> {
    Ok(g_sequence(k, n)?.pop().unwrap())
}

/// Run lengths of a sorted slice.
fn multiplicities(sorted: &[u32]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, t) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *t {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// Bounds for a ∀*∃* form or an ∃*∀* sentence.
///
/// Panics on `Outside`, which has no bounds.
pub fn compute_bounds(c: &FragmentClass) -> Result<Bounds, BoundOverflow> {
    let (mut gen_types, l, with_ab) = match c {
        FragmentClass::FormA { universal_types, existential_types } => {
            (universal_types.clone(), existential_types.len(), true)
        }
        FragmentClass::FormB { universal_types, l, .. } => (universal_types.clone(), *l, true),
        FragmentClass::ExistsForallShape { existential_types, .. } => (existential_types.clone(), 0, false),
        FragmentClass::Outside { reason } => panic!("no bounds outside the decidable fragments: {reason}"),
    };
    gen_types.sort_unstable();
    let k = gen_types.len();
    let r_k = gen_types.last().copied().unwrap_or(0);
    let g_bound = g(k, r_k)?;
    let mult = multiplicities(&gen_types);
    let big_k = mult.iter().copied().chain([l]).max().unwrap_or(0);
    let k_prime = mult.len();
    let ab_bound = if with_ab {
        let exp = big_k as u64 * (k_prime as u64 + 2);
        if exp > MAX_BOUND_BITS {
            return Err(BoundOverflow { expression: format!("(2^{big_k})^({k_prime}+2)") });
        }
        Some(BigUint::one() << exp)
    } else {
        None
    };
    let certified_m = ab_bound.clone().map_or(g_bound.clone(), |ab| ab.max(g_bound.clone()));
    Ok(Bounds { k, r_k, g_bound, ab_bound, k_prime, multiplicities: mult, big_k, certified_m })
}
