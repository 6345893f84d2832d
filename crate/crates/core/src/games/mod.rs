//! Linear-system games and strategies: classical value, operator strategies,
//! observables, the perfect zero-knowledge correlation and a referee.

pub mod bipartite;
pub mod correlation;
pub mod game;
pub mod protocol;
pub mod strategy;

pub use bipartite::{
    approx_params, area_bound, bipartite_from_strategy, certificate_bound, check_approx_strategy, ApproxParams,
    ApproxStrategyReport, BipartiteMeasure, BipartiteRep, InequalityCheck,
};
pub use correlation::{
    correlation_from_strategy, pzk_correlation, sample_transcript, CorrelationMatrix, ExactCorrelation, NumericCorrelation,
    Probability, Transcript, TranscriptSampler,
};
pub use protocol::{run_protocol, ClassicalProver, CorrelationProver, ExpectedValue, ProtocolReport, Prover, StrategyProver};
pub use game::{build_game, classical_value, encode_answer, ClassicalValue, LinearSystemGame, Rational, DEFAULT_CLASSICAL_CAP};
pub use strategy::{
    bias, evaluate_strategy, measurements_from_observables, observables_from_measurements, strategy_delta,
    DeltaReport, ObservableStrategy, OperatorStrategy,
};

/// Serialize an exact fraction as `"p/q"`.
pub fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

pub fn format_ratio(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
