use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::correlation::{block_distribution, correlation_from_strategy, CorrelationMatrix, Probability, Transcript};
use super::game::{LinearSystemGame, Rational};
use super::strategy::{evaluate_strategy, OperatorStrategy};
use crate::error::{Error, Result};

/// Expected acceptance probability of a prover, exact when possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExpectedValue {
    Exact(Rational),
    Numeric(f64),
}

impl ExpectedValue {
    pub fn to_f64(self) -> f64 {
        match self {
            ExpectedValue::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            ExpectedValue::Numeric(v) => v,
        }
    }
}

impl std::fmt::Display for ExpectedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpectedValue::Exact(r) => f.write_str(&super::format_ratio(r)),
            ExpectedValue::Numeric(v) => write!(f, "{v}"),
        }
    }
}

/// Two non-communicating provers answering the referee's questions.
pub trait Prover {
    /// Answers `(a, b)` to the question pair `(x, y)`, drawing randomness from `rng`.
    fn respond(&self, x: usize, y: usize, rng: &mut ChaCha8Rng) -> (u32, bool);
    fn expected_value(&self, g: &LinearSystemGame) -> Result<ExpectedValue>;
}

/// Provers sampling from a correlation table.
pub struct CorrelationProver<'g, T> {
    game: &'g LinearSystemGame,
    corr: CorrelationMatrix<T>,
    dists: Vec<WeightedIndex<f64>>,
}

impl<'g, T: Probability> CorrelationProver<'g, T> {
    pub fn new(game: &'g LinearSystemGame, corr: CorrelationMatrix<T>) -> Result<Self> {
        let dists = game
            .pairs()
            .iter()
            .map(|&(i, j)| {
                if i >= corr.num_inputs_a() || j >= corr.num_inputs_b() {
                    return Err(Error::malformed("correlation shape does not match the game"));
                }
                block_distribution(corr.block(i, j), i, j)
            })
            .collect::<Result<_>>()?;
        Ok(CorrelationProver { game, corr, dists })
    }

    pub fn correlation(&self) -> &CorrelationMatrix<T> {
        &self.corr
    }

    fn pair_index(&self, x: usize, y: usize) -> usize {
        self.game.pairs().binary_search(&(x, y)).expect("question outside the support of pi")
    }
}

impl Prover for CorrelationProver<'_, Rational> {
    fn respond(&self, x: usize, y: usize, rng: &mut ChaCha8Rng) -> (u32, bool) {
        let idx = self.dists[self.pair_index(x, y)].sample(rng);
        (self.game.outputs_a(x)[idx / 2], idx % 2 == 1)
    }

    fn expected_value(&self, g: &LinearSystemGame) -> Result<ExpectedValue> {
        self.corr.game_value(g).map(ExpectedValue::Exact)
    }
}

/// Provers playing a commuting operator strategy, sampled through its correlation.
pub struct StrategyProver<'g> {
    inner: CorrelationProver<'g, super::strategy::C64>,
    value: f64,
}

impl<'g> StrategyProver<'g> {
    pub fn new(game: &'g LinearSystemGame, s: &OperatorStrategy) -> Result<Self> {
        let value = evaluate_strategy(game, s)?;
        let inner = CorrelationProver::new(game, correlation_from_strategy(game, s)?)?;
        Ok(StrategyProver { inner, value })
    }
}

impl Prover for StrategyProver<'_> {
    fn respond(&self, x: usize, y: usize, rng: &mut ChaCha8Rng) -> (u32, bool) {
        let idx = self.inner.dists[self.inner.pair_index(x, y)].sample(rng);
        (self.inner.game.outputs_a(x)[idx / 2], idx % 2 == 1)
    }

    fn expected_value(&self, _g: &LinearSystemGame) -> Result<ExpectedValue> {
        Ok(ExpectedValue::Numeric(self.value))
    }
}

/// Deterministic provers: Bob answers from a fixed assignment, Alice answers
/// with the parity-consistent vector closest to it on her row.
pub struct ClassicalProver {
    assignment: Vec<bool>,
    alice: Vec<u32>,
}

impl ClassicalProver {
    pub fn new(g: &LinearSystemGame, assignment: Vec<bool>) -> Result<Self> {
        if assignment.len() != g.num_inputs_b() {
            return Err(Error::malformed("assignment length does not match the number of columns"));
        }
        let alice = (0..g.num_inputs_a())
            .map(|i| {
                let row = g.system().row(i);
                let target: u32 = row.iter().enumerate().filter(|&(_, &j)| assignment[j]).map(|(k, _)| 1 << k).sum();
                *g.outputs_a(i).iter().min_by_key(|&&m| (m ^ target).count_ones()).unwrap()
            })
            .collect();
        Ok(ClassicalProver { assignment, alice })
    }
}

impl Prover for ClassicalProver {
    fn respond(&self, x: usize, y: usize, _rng: &mut ChaCha8Rng) -> (u32, bool) {
        (self.alice[x], self.assignment[y])
    }

    fn expected_value(&self, g: &LinearSystemGame) -> Result<ExpectedValue> {
        let won = g.pairs().iter().filter(|&&(i, j)| g.predicate(i, self.alice[i], j, self.assignment[j])).count();
        Ok(ExpectedValue::Exact(Rational::new(won as i64, g.pairs().len() as i64)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub rounds: u64,
    pub seed: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    /// Exact fraction or decimal.
    pub expected_value: String,
    /// SHA-256 of the transcript lines `x y a b`.
    pub digest: String,
}

/// Monte-Carlo referee: draw `(x, y) ~ pi`, collect answers and check the predicate.
pub fn run_protocol(g: &LinearSystemGame, prover: &dyn Prover, rounds: u64, seed: u64) -> Result<ProtocolReport> {
    if rounds == 0 {
        return Err(Error::precondition("rounds must be at least 1"));
    }
    if g.pairs().is_empty() {
        return Err(Error::precondition("the game has no questions"));
    }
    let expected = prover.expected_value(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hasher = Sha256::new();
    let mut accepted = 0u64;
    for _ in 0..rounds {
        let (x, y) = g.pairs()[rng.gen_range(0..g.pairs().len())];
        let (a, b) = prover.respond(x, y, &mut rng);
        let t = Transcript { x, y, a, b };
        hasher.update(t.to_line(g).as_bytes());
        hasher.update(b"\n");
        accepted += g.predicate(x, a, y, b) as u64;
    }
    Ok(ProtocolReport {
        rounds,
        seed,
        accepted,
        acceptance_rate: accepted as f64 / rounds as f64,
        expected_value: expected.to_string(),
        digest: hex::encode(hasher.finalize()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{build_game, classical_value, pzk_correlation, DEFAULT_CLASSICAL_CAP};
    use crate::wagon::magic_square;

    #[test]
    fn pzk_prover_is_perfect() {
        let sys = magic_square();
        let g = build_game(&sys).unwrap();
        let p = CorrelationProver::new(&g, pzk_correlation(&sys).unwrap()).unwrap();
        let r = run_protocol(&g, &p, 2000, 1).unwrap();
        assert_eq!(r.expected_value, "1");
        assert_eq!(r.accepted, 2000);
        assert_eq!(run_protocol(&g, &p, 2000, 1).unwrap().digest, r.digest);
        assert_ne!(run_protocol(&g, &p, 2000, 2).unwrap().digest, r.digest);
    }

    #[test]
    fn classical_prover_value() {
        let g = build_game(&magic_square()).unwrap();
        let cv = classical_value(&g, DEFAULT_CLASSICAL_CAP).unwrap();
        let p = ClassicalProver::new(&g, cv.assignment.clone()).unwrap();
        assert_eq!(p.expected_value(&g).unwrap(), ExpectedValue::Exact(Rational::new(17, 18)));
        let r = run_protocol(&g, &p, 18_000, 5).unwrap();
        assert!((r.acceptance_rate - 17.0 / 18.0).abs() < 0.01);
    }

    #[test]
    fn zero_rounds_rejected() {
        let g = build_game(&magic_square()).unwrap();
        let p = ClassicalProver::new(&g, vec![false; 9]).unwrap();
        assert!(matches!(run_protocol(&g, &p, 0, 0), Err(Error::Precondition(_))));
    }
}
