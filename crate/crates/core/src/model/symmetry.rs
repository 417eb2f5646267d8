//! Atom permutations acting on every level.
//!
//! A permutation of the atoms extends to an automorphism of the whole
//! hierarchy. The action on a level is tabulated when small, and computed
//! from the level below otherwise.

use super::Model;

/// Largest atom count for which we enumerate the symmetric group.
pub const MAX_SYMMETRIC_ATOMS: u32 = 7;
const TABLE_BUDGET: u64 = 1 << 23;

pub struct Tables {
    /// All permutations of the atoms; index 0 is the identity.
    perms: Vec<Vec<u32>>,
    /// `levels[n][π * |level n| + r]` is the image of rank `r` under `π`.
    levels: Vec<Vec<u32>>,
    sizes: Vec<u64>,
}

fn permutations(m: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u32);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m as usize], &mut out);
    out
}

impl Tables {
    pub fn build(model: &Model) -> Option<Tables> {
        let m = model.atoms();
        if !(2..=MAX_SYMMETRIC_ATOMS).contains(&m) {
            return None;
        }
        let perms = permutations(m);
        let g = perms.len() as u64;
        let mut sizes = Vec::new();
        let mut levels: Vec<Vec<u32>> = vec![perms.iter().flatten().copied().collect()];
        sizes.push(u64::from(m));
        for n in 1..=model.max_level() {
            let Ok(size) = model.materializable(n) else { break };
            if size * g > TABLE_BUDGET {
                break;
            }
            let below = &levels[n as usize - 1];
            let bsize = sizes[n as usize - 1] as usize;
            let mut t = Vec::with_capacity((size * g) as usize);
            for p in 0..perms.len() {
                let row = &below[p * bsize..(p + 1) * bsize];
                for r in 0..size {
                    let mut img = 0u32;
                    let mut bits = r;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        img |= 1 << row[b];
                    }
                    t.push(img);
                }
            }
            levels.push(t);
            sizes.push(size);
        }
        Some(Tables { perms, levels, sizes })
    }

    pub fn group_order(&self) -> usize {
        self.perms.len()
    }

    /// Image of the level-`n` element of rank `r` under permutation `p`.
    ///
    /// `r` must be the rank of a materializable element.
    pub fn act(&self, p: usize, n: u32, r: u64) -> u64 {
        if let Some(t) = self.levels.get(n as usize) {
            let size = self.sizes[n as usize];
            return u64::from(t[p * size as usize + r as usize]);
        }
        let mut img = 0u64;
        let mut bits = r;
        while bits != 0 {
            let b = u64::from(bits.trailing_zeros());
            bits &= bits - 1;
            img |= 1 << self.act(p, n - 1, b);
        }
        img
    }
}
