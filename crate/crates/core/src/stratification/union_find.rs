//! Union-find over integer offsets.
//!
//! Each node stores the difference `value(node) - value(parent)`; `find`
//! returns the root and the node's offset from it. Merging two classes with
//! an inconsistent offset is reported instead of applied.

#[derive(Clone, Debug)]
pub struct OffsetUnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    diff: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Merge {
    /// Two classes were joined.
    Joined,
    /// Already in one class with a consistent offset.
    Redundant,
    /// Already in one class; the requested offset contradicts the known one.
    Conflict { known: i64 },
}

impl OffsetUnionFind {
    pub fn new(n: usize) -> Self {
        OffsetUnionFind { parent: (0..n).collect(), rank: vec![0; n], diff: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and `value(x) - value(root)`.
    pub fn find(&mut self, x: usize) -> (usize, i64) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, off) = self.find(p);
        self.parent[x] = root;
        self.diff[x] += off;
        (root, self.diff[x])
    }

    /// Records `value(b) = value(a) + d`.
    pub fn merge(&mut self, a: usize, b: usize, d: i64) -> Merge {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            let known = ob - oa;
            return if known == d { Merge::Redundant } else { Merge::Conflict { known } };
        }
        // value(rb) - value(ra)
        let delta = oa + d - ob;
        if self.rank[ra] >= self.rank[rb] {
            self.parent[rb] = ra;
            self.diff[rb] = delta;
            if self.rank[ra] == self.rank[rb] {
                self.rank[ra] += 1;
            }
        } else {
            self.parent[ra] = rb;
            self.diff[ra] = -delta;
        }
        Merge::Joined
    }
}
