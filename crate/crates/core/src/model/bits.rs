use std::cmp::Ordering;
use std::fmt;

/// Fixed-width bit-vector; bit `i` is the coefficient of `2^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits { words: vec![u64::MAX; len.div_ceil(64)], len };
        b.trim();
        b
    }

    /// The low `len` bits of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut b = Bits::zeros(len);
        if let Some(w) = b.words.first_mut() {
            *w = value;
        }
        b.trim();
        b
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::zeros(len);
        for i in indices {
            b.set(i, true);
        }
        b
    }

    fn trim(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn and(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len);
        Bits { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(), len: self.len }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len);
        Bits { words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(), len: self.len }
    }

    /// Integer value when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.words.iter().skip(1).any(|&w| w != 0) {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    /// Big-endian hex, most significant digit first, `ceil(len/4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let v = (0..4).fold(0u32, |acc, b| acc | (u32::from(self.get(d * 4 + b)) << b));
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Inverse of [`Bits::to_hex`]; bits beyond `len` must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Option<Bits> {
        let mut b = Bits::zeros(len);
        for (d, c) in hex.chars().rev().enumerate() {
            let v = c.to_digit(16)?;
            for bit in 0..4 {
                if (v >> bit) & 1 == 1 {
                    let i = d * 4 + bit;
                    if i >= len {
                        return None;
                    }
                    b.set(i, true);
                }
            }
        }
        Some(b)
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({}:{})", self.len, self.to_hex())
    }
}
