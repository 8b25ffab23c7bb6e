//! Dense square boolean matrices over `u64` words.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> BitMatrix {
        let words = n.div_ceil(64).max(1);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> BitMatrix {
        let mut m = BitMatrix::new(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn or_row_into(&mut self, dst: usize, src: &[u64]) -> bool {
        let mut changed = false;
        for (d, s) in self.bits[dst * self.words..(dst + 1) * self.words].iter_mut().zip(src) {
            let v = *d | s;
            changed |= v != *d;
            *d = v;
        }
        changed
    }

    pub fn union(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        out
    }

    /// Boolean product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::new(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    let src = other.row(k).to_vec();
                    out.or_row_into(i, &src);
                }
            }
        }
        out
    }

    /// Row vector `v · self`, with `v` given as a bit set.
    pub fn apply(&self, v: &[bool]) -> Vec<bool> {
        let mut acc = vec![0u64; self.words];
        for (k, _) in v.iter().enumerate().filter(|(_, b)| **b) {
            for (a, r) in acc.iter_mut().zip(self.row(k)) {
                *a |= r;
            }
        }
        (0..self.n).map(|j| acc[j / 64] >> (j % 64) & 1 == 1).collect()
    }

    /// Reflexive-transitive closure (Warshall).
    pub fn closure(&self) -> BitMatrix {
        let mut m = self.union(&BitMatrix::identity(self.n));
        for k in 0..self.n {
            let rk = m.row(k).to_vec();
            for i in 0..self.n {
                if m.get(i, k) {
                    m.or_row_into(i, &rk);
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '.' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
