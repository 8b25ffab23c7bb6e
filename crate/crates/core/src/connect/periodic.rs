//! Reachability in a half-infinite stack of identical cells.
//!
//! Lanes `0..n` repeat in cells `0, 1, ...`. Within a cell the relation is
//! `A`, `F` steps one cell up and `K` one cell down (never below cell 0).
//! `H` relates lanes of one cell through excursions that never drop below
//! it; it is the least fixpoint of `H = (A ∪ F·H·K)*`. A walk from
//! `(a, i)` to `(b, j)` whose lowest cell is `m` factors as
//! `(H·K)^(i-m) · H · (F·H)^(j-m)`, and powers of a boolean matrix are
//! eventually periodic, so every query reduces to finitely many products.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use super::bitmatrix::BitMatrix;

/// The powers `M^0, M^1, ...` of a matrix, stored up to the first repeat.
#[derive(Debug)]
pub struct Powers {
    list: Vec<BitMatrix>,
    preperiod: usize,
    period: usize,
}

impl Powers {
    pub fn new(m: &BitMatrix) -> Powers {
        let mut list = vec![BitMatrix::identity(m.size())];
        let mut seen = HashMap::new();
        seen.insert(list[0].clone(), 0usize);
        loop {
            let next = list.last().unwrap().mul(m);
            if let Some(&first) = seen.get(&next) {
                let period = list.len() - first;
                return Powers { list, preperiod: first, period };
            }
            seen.insert(next.clone(), list.len());
            list.push(next);
        }
    }

    /// Exponent with the same power, below `preperiod + period`.
    pub fn reduce(&self, e: u64) -> usize {
        let e = e as usize;
        if e < self.list.len() {
            e
        } else {
            self.preperiod + (e - self.preperiod) % self.period
        }
    }

    pub fn get(&self, e: u64) -> &BitMatrix {
        &self.list[self.reduce(e)]
    }

    pub fn preperiod(&self) -> usize {
        self.preperiod
    }

    pub fn period(&self) -> usize {
        self.period
    }
}

#[derive(Debug)]
pub struct PeriodicSolver {
    lanes: usize,
    h: BitMatrix,
    h_k: Powers,
    f_h: Powers,
    cache: Mutex<HashMap<(usize, usize, usize), Vec<bool>>>,
}

impl PeriodicSolver {
    /// `a[x][y]`: `(x, c) -> (y, c)`; `f`: `(x, c) -> (y, c+1)`;
    /// `k`: `(x, c) -> (y, c-1)`.
    pub fn new(a: &BitMatrix, f: &BitMatrix, k: &BitMatrix) -> PeriodicSolver {
        let lanes = a.size();
        let mut h = a.closure();
        loop {
            let next = a.union(&f.mul(&h).mul(k)).closure();
            if next == h {
                break;
            }
            h = next;
        }
        let h_k = Powers::new(&h.mul(k));
        let f_h = Powers::new(&f.mul(&h));
        PeriodicSolver { lanes, h, h_k, f_h, cache: Mutex::new(HashMap::new()) }
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    /// Lanes reachable in cell `j` from lane `a` in cell `i`.
    pub fn row(&self, a: usize, i: u64, j: u64) -> Vec<bool> {
        let mut out = vec![false; self.lanes];
        let mut seen = HashSet::new();
        for m in 0..=i.min(j) {
            let key = (a, self.h_k.reduce(i - m), self.f_h.reduce(j - m));
            if !seen.insert(key) {
                continue;
            }
            let cached = self.cache.lock().unwrap().get(&key).cloned();
            let row = cached.unwrap_or_else(|| {
                let mut v = vec![false; self.lanes];
                v[a] = true;
                let v = self.h_k.get(i - m).apply(&v);
                let v = self.h.apply(&v);
                let v = self.f_h.get(j - m).apply(&v);
                self.cache.lock().unwrap().insert(key, v.clone());
                v
            });
            for (o, r) in out.iter_mut().zip(row) {
                *o |= r;
            }
            if seen.len() > self.h_k.list.len() * self.f_h.list.len() {
                break;
            }
        }
        out
    }

    pub fn reach(&self, a: usize, i: u64, b: usize, j: u64) -> bool {
        self.row(a, i, j)[b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: bool, f: bool, k: bool) -> PeriodicSolver {
        let m = |b: bool| {
            let mut x = BitMatrix::new(1);
            if b {
                x.set(0, 0);
            }
            x
        };
        PeriodicSolver::new(&m(a), &m(f), &m(k))
    }

    #[test]
    fn monotone_ray() {
        let s = single(false, true, false);
        assert!(s.reach(0, 0, 0, 5));
        assert!(!s.reach(0, 5, 0, 0));
        assert!(s.reach(0, 1_000_000, 0, 1_000_007));
    }

    #[test]
    fn no_cell_crossing() {
        let mut a = BitMatrix::new(2);
        a.set(0, 1);
        a.set(1, 0);
        let z = BitMatrix::new(2);
        let s = PeriodicSolver::new(&a, &z, &z);
        assert!(s.reach(0, 0, 1, 0));
        assert!(!s.reach(0, 0, 0, 1));
    }

    #[test]
    fn powers_cycle() {
        let mut m = BitMatrix::new(3);
        m.set(0, 1);
        m.set(1, 2);
        m.set(2, 0);
        let p = Powers::new(&m);
        assert_eq!((p.preperiod(), p.period()), (0, 3));
        assert_eq!(p.get(301), p.get(1));
    }

    #[test]
    fn down_then_up() {
        // lane 0 descends, lane 1 ascends, 0 switches to 1 in every cell
        let mut a = BitMatrix::new(2);
        a.set(0, 1);
        let mut f = BitMatrix::new(2);
        f.set(1, 1);
        let mut k = BitMatrix::new(2);
        k.set(0, 0);
        let s = PeriodicSolver::new(&a, &f, &k);
        assert!(s.reach(0, 7, 1, 3));
        assert!(s.reach(0, 7, 0, 0));
        assert!(!s.reach(1, 3, 0, 2));
    }
}
