use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::wagon::LinearSystemZ2;

pub type Rational = Ratio<i64>;

/// The linear-system game `G_{Mx=c}`.
///
/// Alice gets a row `i` and answers `a` in `Z_2^{V_i}` with parity `c_i`;
/// Bob gets a column `j` and answers a bit. They win iff `j` is not in `V_i`
/// or `a_j = b`. Questions are uniform over pairs `(i, j)` with `j` in `V_i`.
#[derive(Clone, Debug)]
pub struct LinearSystemGame {
    system: LinearSystemZ2,
    outputs_a: Vec<Vec<u32>>,
    pairs: Vec<(usize, usize)>,
    orphans: Vec<usize>,
}

pub const MAX_ROW_WEIGHT: usize = 16;

/// Bit `k` of an Alice answer is the value of the `k`-th column of the row, in ascending order.
pub fn encode_answer(mask: u32, weight: usize) -> String {
    (0..weight).map(|k| if mask >> k & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn build_game(sys: &LinearSystemZ2) -> Result<LinearSystemGame> {
    if sys.row_weight_max() > MAX_ROW_WEIGHT {
        return Err(Error::Resource(format!("row weight above {MAX_ROW_WEIGHT}")));
    }
    let outputs_a = sys
        .rows()
        .iter()
        .zip(sys.rhs())
        .map(|(r, &c)| {
            let w = r.len();
            let mut masks: Vec<u32> = (0..1u32 << w).filter(|m| (m.count_ones() % 2 == 1) == c).collect();
            masks.sort_by_key(|&m| encode_answer(m, w));
            masks
        })
        .collect();
    let pairs = sys.rows().iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&j| (i, j))).collect();
    Ok(LinearSystemGame { system: sys.clone(), outputs_a, pairs, orphans: sys.orphan_columns() })
}

impl LinearSystemGame {
    pub fn system(&self) -> &LinearSystemZ2 {
        &self.system
    }

    pub fn num_inputs_a(&self) -> usize {
        self.system.m()
    }

    pub fn num_inputs_b(&self) -> usize {
        self.system.n()
    }

    pub fn outputs_a(&self, i: usize) -> &[u32] {
        &self.outputs_a[i]
    }

    /// Question pairs `(i, j)` with positive probability, ascending.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Columns in no row: Bob's question is never asked.
    pub fn orphans(&self) -> &[usize] {
        &self.orphans
    }

    pub fn pi(&self, i: usize, j: usize) -> Rational {
        if self.system.row(i).contains(&j) {
            Rational::new(1, self.pairs.len() as i64)
        } else {
            Rational::from_integer(0)
        }
    }

    /// Position of column `j` within row `i`.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.system.row(i).iter().position(|&c| c == j)
    }

    /// Value of Alice's answer `mask` on column `j` of row `i`.
    pub fn answer_bit(&self, i: usize, mask: u32, j: usize) -> Option<bool> {
        self.position(i, j).map(|k| mask >> k & 1 == 1)
    }

    pub fn predicate(&self, i: usize, mask: u32, j: usize, b: bool) -> bool {
        match self.answer_bit(i, mask, j) {
            None => true,
            Some(a) => a == b,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalValue {
    #[serde(serialize_with = "crate::games::ser_ratio")]
    pub value: Rational,
    /// A Bob assignment attaining the value (bit `j` = answer to column `j`).
    pub assignment: Vec<bool>,
    pub violated_rows: usize,
}

pub const DEFAULT_CLASSICAL_CAP: usize = 24;

/// Exact classical value. For a fixed Bob assignment, Alice's best answer on
/// row `i` agrees on every column when `b` satisfies the row and on all but
/// one column otherwise, so the value is `1 - min_b #violated / t_M`.
pub fn classical_value(g: &LinearSystemGame, cap: usize) -> Result<ClassicalValue> {
    let sys = g.system();
    let n = sys.n();
    if n > cap || n > 40 {
        return Err(Error::Resource(format!("classical value needs 2^{n} assignments; cap is {cap}")));
    }
    let masks: Vec<(u64, bool)> =
        sys.rows().iter().zip(sys.rhs()).map(|(r, &c)| (r.iter().map(|&j| 1u64 << j).sum(), c)).collect();
    let violated = |b: u64| masks.iter().filter(|&&(m, c)| ((b & m).count_ones() % 2 == 1) != c).count();
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << n;
    let (best_v, best_b) = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut best = (usize::MAX, 0u64);
            for b in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                let v = violated(b);
                if v < best.0 {
                    best = (v, b);
                    if v == 0 {
                        break;
                    }
                }
            }
            best
        })
        .min()
        .unwrap();
    let tm = sys.nonzero_total() as i64;
    Ok(ClassicalValue {
        value: Rational::new(tm - best_v as i64, tm),
        assignment: (0..n).map(|j| best_b >> j & 1 == 1).collect(),
        violated_rows: best_v,
    })
}
