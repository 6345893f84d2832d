//! Dense linear algebra over GF(2) on 64-bit blocks.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    blocks: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, blocks: vec![0; len.div_ceil(64)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.blocks[i / 64] |= 1 << (i % 64);
        } else {
            self.blocks[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.blocks[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a ^= *b;
        }
    }

    pub fn and_parity(&self, other: &BitVec) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn first_one(&self) -> Option<usize> {
        for (k, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some(k * 64 + b.trailing_zeros() as usize);
            }
        }
        None
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Row span of a set of vectors, kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct RowSpan {
    len: usize,
    basis: Vec<(usize, BitVec)>,
}

impl RowSpan {
    pub fn new(len: usize, rows: &[BitVec]) -> Self {
        let mut s = RowSpan { len, basis: Vec::new() };
        for r in rows {
            s.insert(r.clone());
        }
        s
    }

    fn reduce(&self, mut v: BitVec) -> BitVec {
        for (p, b) in &self.basis {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        v
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let v = self.reduce(v);
        match v.first_one() {
            None => false,
            Some(p) => {
                for (_, b) in self.basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&v);
                    }
                }
                self.basis.push((p, v));
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// A matrix over GF(2) stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn new(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        BitVec::from_indices(self.rows.len(), self.rows.iter().enumerate().filter(|(_, r)| r.and_parity(x)).map(|(i, _)| i))
    }

    /// Gaussian elimination on `[A | b]`. Returns pivot columns and the reduced rows with rhs.
    fn eliminate(&self, rhs: &BitVec) -> (Vec<usize>, Vec<(BitVec, bool)>) {
        let mut rows: Vec<(BitVec, bool)> = self.rows.iter().cloned().zip((0..self.rows.len()).map(|i| rhs.get(i))).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0.get(c)) else { continue };
            rows.swap(r, p);
            let (pv, pb) = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0.get(c) {
                    row.0.xor_assign(&pv);
                    row.1 ^= pb;
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        (pivots, rows)
    }

    pub fn rank(&self) -> usize {
        self.eliminate(&BitVec::zeros(self.rows.len())).0.len()
    }

    /// Some solution of `A x = b` (free variables set to 0), or `None` if inconsistent.
    pub fn solve(&self, rhs: &BitVec) -> Option<BitVec> {
        let (pivots, rows) = self.eliminate(rhs);
        if rows[pivots.len()..].iter().any(|(_, b)| *b) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (k, &c) in pivots.iter().enumerate() {
            x.set(c, rows[k].1);
        }
        Some(x)
    }

    /// A basis of `{x : A x = 0}`, one vector per free column in increasing order.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let (pivots, rows) = self.eliminate(&BitVec::zeros(self.rows.len()));
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVec::zeros(self.cols);
            x.set(f, true);
            for (k, &c) in pivots.iter().enumerate() {
                if rows[k].0.get(f) {
                    x.set(c, true);
                }
            }
            out.push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn span_membership() {
        let a = BitVec::from_indices(5, [0, 1]);
        let b = BitVec::from_indices(5, [1, 2]);
        let s = RowSpan::new(5, &[a, b]);
        assert!(s.contains(&BitVec::from_indices(5, [0, 2])));
        assert!(!s.contains(&BitVec::from_indices(5, [0])));
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn wide_vectors() {
        let v = BitVec::from_indices(130, [0, 64, 129]);
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, Vec<Vec<bool>>, Vec<bool>)> {
        (1usize..9, 1usize..7).prop_flat_map(|(n, m)| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(any::<bool>(), n), m),
                prop::collection::vec(any::<bool>(), m),
            )
        })
    }

    fn build(n: usize, rows: &[Vec<bool>]) -> BitMatrix {
        BitMatrix::new(
            n,
            rows.iter().map(|r| BitVec::from_indices(n, r.iter().enumerate().filter(|x| *x.1).map(|x| x.0))).collect(),
        )
    }

    proptest! {
        #[test]
        fn solve_matches_brute_force((n, rows, rhs) in arb_matrix()) {
            let a = build(n, &rows);
            let b = BitVec::from_indices(rows.len(), rhs.iter().enumerate().filter(|x| *x.1).map(|x| x.0));
            let brute = (0u32..(1 << n)).any(|mask| {
                let x = BitVec::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1));
                a.mul_vec(&x) == b
            });
            match a.solve(&b) {
                Some(x) => prop_assert_eq!(a.mul_vec(&x), b),
                None => prop_assert!(!brute),
            }
        }

        #[test]
        fn nullspace_has_full_dimension((n, rows, _rhs) in arb_matrix()) {
            let a = build(n, &rows);
            let ns = a.nullspace();
            prop_assert_eq!(ns.len() + a.rank(), n);
            for v in &ns {
                prop_assert!(a.mul_vec(v).is_zero());
            }
            prop_assert_eq!(RowSpan::new(n, &ns).rank(), ns.len());
        }
    }
}
