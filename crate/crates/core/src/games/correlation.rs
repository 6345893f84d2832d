use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::game::{build_game, encode_answer, LinearSystemGame, Rational};
use super::strategy::{OperatorStrategy, CVec, C64};
use crate::error::{Error, Result};
use crate::wagon::LinearSystemZ2;

/// Cap on the number of stored entries of a dense correlation table.
pub const MAX_CORRELATION_ENTRIES: usize = 1 << 24;

const PROB_TOL: f64 = 1e-9;

/// `p(a, b | i, j)` for every Alice input `i`, Bob input `j`, Alice answer
/// index `k` (into `outputs_a(i)`) and Bob bit `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix<T> {
    m: usize,
    n: usize,
    widths: Vec<usize>,
    offsets: Vec<usize>,
    entries: Vec<T>,
}

pub type ExactCorrelation = CorrelationMatrix<Rational>;
pub type NumericCorrelation = CorrelationMatrix<C64>;

impl<T: Clone> CorrelationMatrix<T> {
    /// Fill a table from `f(i, j, k, b)`.
    pub fn from_fn(g: &LinearSystemGame, mut f: impl FnMut(usize, usize, usize, bool) -> T) -> Result<Self> {
        let (m, n) = (g.num_inputs_a(), g.num_inputs_b());
        let widths: Vec<usize> = (0..m).map(|i| g.outputs_a(i).len()).collect();
        let total: usize = widths.iter().map(|w| w * 2 * n).sum();
        if total > MAX_CORRELATION_ENTRIES {
            return Err(Error::Resource(format!("correlation table needs {total} entries; cap is {MAX_CORRELATION_ENTRIES}")));
        }
        let mut offsets = Vec::with_capacity(m);
        let mut entries = Vec::with_capacity(total);
        for (i, &w) in widths.iter().enumerate() {
            offsets.push(entries.len());
            for j in 0..n {
                for k in 0..w {
                    entries.push(f(i, j, k, false));
                    entries.push(f(i, j, k, true));
                }
            }
        }
        Ok(CorrelationMatrix { m, n, widths, offsets, entries })
    }

    pub fn num_inputs_a(&self) -> usize {
        self.m
    }

    pub fn num_inputs_b(&self) -> usize {
        self.n
    }

    /// Entries of block `(i, j)`, laid out as `[p(k=0,b=0), p(0,1), p(1,0), ...]`.
    pub fn block(&self, i: usize, j: usize) -> &[T] {
        let w = 2 * self.widths[i];
        &self.entries[self.offsets[i] + j * w..][..w]
    }

    pub fn get(&self, i: usize, j: usize, k: usize, b: bool) -> &T {
        &self.block(i, j)[2 * k + b as usize]
    }

    fn check_shape(&self, g: &LinearSystemGame) -> Result<()> {
        if self.m != g.num_inputs_a() || self.n != g.num_inputs_b() || (0..self.m).any(|i| self.widths[i] != g.outputs_a(i).len())
        {
            return Err(Error::malformed("correlation shape does not match the game"));
        }
        Ok(())
    }
}

/// Entry types that can be read as probabilities.
pub trait Probability: Clone {
    /// The entry as a probability, or `None` if it is not a real number in `[0, 1]`.
    fn probability(&self) -> Option<f64>;
    fn is_distribution(block: &[Self]) -> bool;
}

impl Probability for Rational {
    fn probability(&self) -> Option<f64> {
        (!self.is_negative() && *self <= Rational::one()).then(|| self.to_f64().unwrap_or(0.0))
    }

    fn is_distribution(block: &[Self]) -> bool {
        block.iter().all(|p| !p.is_negative()) && block.iter().sum::<Rational>() == Rational::one()
    }
}

impl Probability for C64 {
    fn probability(&self) -> Option<f64> {
        (self.im.abs() <= PROB_TOL && self.re >= -PROB_TOL && self.re <= 1.0 + PROB_TOL).then(|| self.re.clamp(0.0, 1.0))
    }

    fn is_distribution(block: &[Self]) -> bool {
        block.iter().all(|p| p.probability().is_some()) && (block.iter().sum::<C64>() - C64::one()).norm() <= PROB_TOL
    }
}

impl ExactCorrelation {
    /// `sum pi(i,j) sum V(a,b|i,j) p(a,b|i,j)` in exact arithmetic.
    pub fn game_value(&self, g: &LinearSystemGame) -> Result<Rational> {
        self.check_shape(g)?;
        let mut total = Rational::zero();
        for &(i, j) in g.pairs() {
            let mut won = Rational::zero();
            for (k, &mask) in g.outputs_a(i).iter().enumerate() {
                for b in [false, true] {
                    if g.predicate(i, mask, j, b) {
                        won += self.get(i, j, k, b);
                    }
                }
            }
            total += won * g.pi(i, j);
        }
        Ok(total)
    }

    pub fn blocks_normalized(&self) -> bool {
        (0..self.m).all(|i| (0..self.n).all(|j| Rational::is_distribution(self.block(i, j))))
    }
}

impl NumericCorrelation {
    /// `|sum pi(i,j) sum V(a,b|i,j) p(a,b|i,j)|`, the winning value of the generating strategy.
    pub fn game_value(&self, g: &LinearSystemGame) -> Result<f64> {
        self.check_shape(g)?;
        let w = 1.0 / g.pairs().len() as f64;
        let mut total = C64::zero();
        for &(i, j) in g.pairs() {
            for (k, &mask) in g.outputs_a(i).iter().enumerate() {
                for b in [false, true] {
                    if g.predicate(i, mask, j, b) {
                        total += self.get(i, j, k, b) * w;
                    }
                }
            }
        }
        Ok(total.norm())
    }
}

/// The correlation of the regular-representation strategy on a wagon-wheel
/// system: `p(a,b|i,j) = (1 + (-1)^{a_j + b}) / 8` when `j` is in row `i`
/// and `1/8` otherwise.
pub fn pzk_correlation(sys: &LinearSystemZ2) -> Result<ExactCorrelation> {
    if let Some(i) = (0..sys.m()).find(|&i| sys.row(i).len() != 3) {
        return Err(Error::Unsupported(format!("row {i} has weight {}; the correlation needs weight 3", sys.row(i).len())));
    }
    let g = build_game(sys)?;
    let (quarter, eighth) = (Rational::new(1, 4), Rational::new(1, 8));
    CorrelationMatrix::from_fn(&g, |i, j, k, b| match g.answer_bit(i, g.outputs_a(i)[k], j) {
        Some(a) if a == b => quarter,
        Some(_) => Rational::zero(),
        None => eighth,
    })
}

/// `p(a,b|i,j) = <psi| P^i_a Q^j_b |psi>`, complex when the strategy does not commute.
pub fn correlation_from_strategy(g: &LinearSystemGame, s: &OperatorStrategy) -> Result<NumericCorrelation> {
    s.validate(g)?;
    let psi = &s.state;
    let pa: Vec<Vec<CVec>> = s.alice.iter().map(|ps| ps.iter().map(|p| p * psi).collect()).collect();
    let qb: Vec<[CVec; 2]> = s.bob.iter().map(|[q0, q1]| [q0 * psi, q1 * psi]).collect();
    CorrelationMatrix::from_fn(g, |i, j, k, b| pa[i][k].dotc(&qb[j][b as usize]))
}

/// One round of the referee's interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub x: usize,
    pub y: usize,
    /// Alice's answer as a mask over the columns of row `x`.
    pub a: u32,
    pub b: bool,
}

impl Transcript {
    /// `x y a b` with `a` in the ascending-column bit encoding.
    pub fn to_line(&self, g: &LinearSystemGame) -> String {
        format!("{} {} {} {}", self.x, self.y, encode_answer(self.a, g.system().row(self.x).len()), self.b as u8)
    }
}

/// Draws `(x, y) ~ pi` and then `(a, b) ~ p(., . | x, y)` from a seeded stream.
pub struct TranscriptSampler<'g, T> {
    game: &'g LinearSystemGame,
    corr: &'g CorrelationMatrix<T>,
    pair_dists: Vec<WeightedIndex<f64>>,
    rng: ChaCha8Rng,
}

pub(crate) fn block_distribution<T: Probability>(block: &[T], i: usize, j: usize) -> Result<WeightedIndex<f64>> {
    let invalid = || Error::Analysis(format!("correlation block ({i}, {j}) is not a probability distribution"));
    if !T::is_distribution(block) {
        return Err(invalid());
    }
    let weights: Vec<f64> = block.iter().map(|p| p.probability().unwrap_or(0.0)).collect();
    WeightedIndex::new(weights).map_err(|_| invalid())
}

impl<'g, T: Probability> TranscriptSampler<'g, T> {
    pub fn new(game: &'g LinearSystemGame, corr: &'g CorrelationMatrix<T>, seed: u64) -> Result<Self> {
        corr.check_shape(game)?;
        if game.pairs().is_empty() {
            return Err(Error::precondition("the game has no questions"));
        }
        let pair_dists =
            game.pairs().iter().map(|&(i, j)| block_distribution(corr.block(i, j), i, j)).collect::<Result<_>>()?;
        Ok(TranscriptSampler { game, corr, pair_dists, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn sample(&mut self) -> Transcript {
        let q = self.rng.gen_range(0..self.game.pairs().len());
        let (x, y) = self.game.pairs()[q];
        let idx = self.pair_dists[q].sample(&mut self.rng);
        Transcript { x, y, a: self.game.outputs_a(x)[idx / 2], b: idx % 2 == 1 }
    }

    /// Answers to a fixed question, including pairs outside the support of `pi`.
    pub fn sample_answers(&mut self, x: usize, y: usize, count: usize) -> Result<Vec<(u32, bool)>> {
        if x >= self.corr.m || y >= self.corr.n {
            return Err(Error::precondition(format!("question ({x}, {y}) is out of range")));
        }
        let dist = block_distribution(self.corr.block(x, y), x, y)?;
        Ok((0..count)
            .map(|_| {
                let idx = dist.sample(&mut self.rng);
                (self.game.outputs_a(x)[idx / 2], idx % 2 == 1)
            })
            .collect())
    }
}

impl<T: Probability> Iterator for TranscriptSampler<'_, T> {
    type Item = Transcript;

    fn next(&mut self) -> Option<Transcript> {
        Some(self.sample())
    }
}

/// The first transcript of the stream seeded with `seed`.
pub fn sample_transcript<T: Probability>(
    g: &LinearSystemGame,
    corr: &CorrelationMatrix<T>,
    seed: u64,
) -> Result<Transcript> {
    Ok(TranscriptSampler::new(g, corr, seed)?.sample())
}
