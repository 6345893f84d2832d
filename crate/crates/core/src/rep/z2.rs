use serde::Serialize;

use crate::gf2::{BitMatrix, BitVec};
use crate::wagon::LinearSystemZ2;

/// Result of Gaussian elimination on `Mx = c`. Vectors are index lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Z2Solution {
    Consistent { solution: Vec<usize>, nullspace: Vec<Vec<usize>> },
    /// Rows whose sum is the zero row with right-hand side 1.
    Inconsistent { witness: Vec<usize> },
}

impl Z2Solution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Z2Solution::Consistent { .. })
    }

    /// Replay the certificate against the system.
    pub fn verify(&self, sys: &LinearSystemZ2) -> bool {
        let n = sys.n();
        match self {
            Z2Solution::Consistent { solution, nullspace } => {
                let m = sys.matrix();
                sys.satisfied_by(&BitVec::from_indices(n, solution.iter().copied()))
                    && nullspace.iter().all(|v| m.mul_vec(&BitVec::from_indices(n, v.iter().copied())).is_zero())
            }
            Z2Solution::Inconsistent { witness } => {
                let mut acc = BitVec::zeros(n);
                let mut c = false;
                for &i in witness {
                    if i >= sys.m() {
                        return false;
                    }
                    acc.xor_assign(&BitVec::from_indices(n, sys.row(i).iter().copied()));
                    c ^= sys.rhs()[i];
                }
                acc.is_zero() && c
            }
        }
    }
}

pub fn solve_z2(sys: &LinearSystemZ2) -> Z2Solution {
    let m = sys.matrix();
    if let Some(x) = m.solve(&sys.rhs_bits()) {
        return Z2Solution::Consistent {
            solution: x.ones().collect(),
            nullspace: m.nullspace().iter().map(|v| v.ones().collect()).collect(),
        };
    }
    // y with y^T M = 0 and y . c = 1
    let mut cols: Vec<BitVec> = vec![BitVec::zeros(sys.m()); sys.n()];
    for (i, row) in sys.rows().iter().enumerate() {
        for &j in row {
            cols[j].flip(i);
        }
    }
    cols.push(sys.rhs_bits());
    let mut target = BitVec::zeros(sys.n() + 1);
    target.set(sys.n(), true);
    let y = BitMatrix::new(sys.m(), cols).solve(&target).expect("an inconsistent system has a left witness");
    Z2Solution::Inconsistent { witness: y.ones().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wagon::{inconsistent_pair, magic_square};

    #[test]
    fn magic_square_witness_is_every_row() {
        let s = solve_z2(&magic_square());
        assert_eq!(s, Z2Solution::Inconsistent { witness: (0..6).collect() });
        assert!(s.verify(&magic_square()));
        let p = solve_z2(&inconsistent_pair());
        assert_eq!(p, Z2Solution::Inconsistent { witness: vec![0, 1] });
    }

    #[test]
    fn affine_solution_set() {
        let sys = LinearSystemZ2::new(3, vec![vec![0, 1, 2]], vec![true]).unwrap();
        let s = solve_z2(&sys);
        match &s {
            Z2Solution::Consistent { nullspace, .. } => assert_eq!(nullspace.len(), 2),
            _ => panic!("expected a solution"),
        }
        assert!(s.verify(&sys));
    }
}
