//! Dense linear algebra over GF(2) with packed rows.

/// A row of bits packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64).max(1)], len }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut row = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                row.set(i);
            }
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Outcome of solving `M w = b` over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Solution {
    /// A solution with free variables set to zero.
    Solvable(BitRow),
    /// A set of equations whose left-hand sides sum to zero while the
    /// right-hand sides sum to one.
    Inconsistent(BitRow),
}

/// Gaussian elimination on the augmented system, tracking for each working
/// row which original equations were combined into it.
pub fn solve(rows: &[BitRow], rhs: &[bool], ncols: usize) -> Gf2Solution {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let mut work: Vec<(BitRow, bool, BitRow)> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (r, &b))| {
            let mut origin = BitRow::zeros(m);
            origin.set(i);
            (r.clone(), b, origin)
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m).find(|&i| work[i].0.get(c)) else {
            continue;
        };
        work.swap(r, p);
        let (prow, pb, porigin) = work[r].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i != r && row.0.get(c) {
                row.0.xor_assign(&prow);
                row.1 ^= pb;
                row.2.xor_assign(&porigin);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }

    if let Some((_, _, origin)) = work[r..].iter().find(|(row, b, _)| row.is_zero() && *b) {
        return Gf2Solution::Inconsistent(origin.clone());
    }
    let mut w = BitRow::zeros(ncols);
    for (row, &c) in work.iter().zip(&pivots) {
        if row.1 {
            w.set(c);
        }
    }
    Gf2Solution::Solvable(w)
}
