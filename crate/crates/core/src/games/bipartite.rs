//! Near-perfect strategies as approximate representations of the solution group.

use serde::Serialize;

use super::game::LinearSystemGame;
use super::strategy::{evaluate_strategy, observables_from_measurements, strategy_delta, CMat, CVec, OperatorStrategy};
use crate::error::{Error, Result};
use crate::group::{AreaCertificate, Presentation, Word};

/// Parameters of a strategy as they enter the approximation bounds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ApproxParams {
    /// `1 - omega`, clamped at 0.
    pub eps: f64,
    /// Measured commutation defect.
    pub delta: f64,
    /// Largest row weight.
    pub r_max: usize,
    /// Number of non-zero entries of `M`.
    pub t_m: usize,
}

impl ApproxParams {
    /// `2 sqrt(t_M (eps + 2^{R-1} delta))`, the bound of part (a).
    pub fn tau_a(&self) -> f64 {
        2.0 * (self.t_m as f64 * (self.eps + pow2(self.r_max as i32 - 1) * self.delta)).sqrt()
    }

    pub fn bound_b(&self) -> f64 {
        let r = self.r_max as f64;
        r * self.tau_a() + binom2(self.r_max) * pow2(self.r_max as i32 + 1) * self.delta
    }

    pub fn bound_c(&self) -> f64 {
        4.0 * self.tau_a() + 6.0 * pow2(self.r_max as i32 + 1) * self.delta
    }

    /// Relation and agreement error of the induced bipartite representation.
    pub fn tau(&self) -> f64 {
        let r = self.r_max.max(4);
        r as f64 * self.tau_a() + binom2(r) * pow2(self.r_max as i32 + 1) * self.delta
    }

    /// Commutator error of the induced bipartite representation.
    pub fn kappa(&self) -> f64 {
        pow2(self.r_max as i32 + 1) * self.delta
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn binom2(k: usize) -> f64 {
    (k * k.saturating_sub(1) / 2) as f64
}

/// Largest observed left-hand side against its bound.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct InequalityCheck {
    pub checked: usize,
    pub max_lhs: f64,
    pub bound: f64,
    pub violations: usize,
}

impl InequalityCheck {
    fn new(bound: f64) -> Self {
        InequalityCheck { bound, ..Default::default() }
    }

    fn record(&mut self, lhs: f64) {
        self.checked += 1;
        self.max_lhs = self.max_lhs.max(lhs);
        if lhs > self.bound + 1e-9 {
            self.violations += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxStrategyReport {
    pub params: ApproxParams,
    /// `||A_{ij} psi - B_j psi||`.
    pub part_a: InequalityCheck,
    /// `||B_{j_1} ... B_{j_k} psi - (-1)^{c_i} psi||`.
    pub part_b: InequalityCheck,
    /// `||[B_j, B_k] psi - psi||` for columns sharing a row.
    pub part_c: InequalityCheck,
}

impl ApproxStrategyReport {
    pub fn violations(&self) -> usize {
        self.part_a.violations + self.part_b.violations + self.part_c.violations
    }
}

pub fn approx_params(g: &LinearSystemGame, s: &OperatorStrategy) -> Result<ApproxParams> {
    let omega = evaluate_strategy(g, s)?;
    Ok(ApproxParams {
        eps: (1.0 - omega).max(0.0),
        delta: strategy_delta(g, s).delta,
        r_max: g.system().row_weight_max(),
        t_m: g.pairs().len(),
    })
}

fn dist(u: &CVec, v: &CVec) -> f64 {
    (u - v).norm()
}

/// Check the three approximation inequalities on a strategy.
pub fn check_approx_strategy(g: &LinearSystemGame, s: &OperatorStrategy) -> Result<ApproxStrategyReport> {
    let params = approx_params(g, s)?;
    let o = observables_from_measurements(g, s);
    let psi = &o.state;
    let bpsi: Vec<CVec> = o.bob.iter().map(|b| b * psi).collect();
    let sys = g.system();

    let mut part_a = InequalityCheck::new(params.tau_a());
    for &(i, j) in g.pairs() {
        let k = g.position(i, j).unwrap();
        part_a.record(dist(&(&o.alice[i][k] * psi), &bpsi[j]));
    }

    let mut part_b = InequalityCheck::new(params.bound_b());
    let mut part_c = InequalityCheck::new(params.bound_c());
    for (row, &c) in sys.rows().iter().zip(sys.rhs()) {
        let mut v = psi.clone();
        for &j in row.iter().rev() {
            v = &o.bob[j] * v;
        }
        let target = if c { -psi } else { psi.clone() };
        part_b.record(dist(&v, &target));
        for (a, &j) in row.iter().enumerate() {
            for &k in &row[a + 1..] {
                let (bj, bk) = (&o.bob[j], &o.bob[k]);
                part_c.record(dist(&(bj * bk * bj * bk * psi), psi));
            }
        }
    }
    Ok(ApproxStrategyReport { params, part_a, part_b, part_c })
}

/// A pair of maps from generators to unitaries with a state.
#[derive(Clone, Debug)]
pub struct BipartiteRep {
    pub phi: Vec<CMat>,
    pub phi_prime: Vec<CMat>,
    pub state: CVec,
}

/// `Phi(x_j) = B_j`, `Phi'(x_j) = A_{ij}` for the first row containing `j`
/// (identity for orphan columns), and `Phi(J) = Phi'(J) = -I`, indexed like
/// the generators of the solution group.
pub fn bipartite_from_strategy(g: &LinearSystemGame, s: &OperatorStrategy) -> BipartiteRep {
    let o = observables_from_measurements(g, s);
    let d = o.dim;
    let minus = -CMat::identity(d, d);
    let mut phi = o.bob.clone();
    let mut phi_prime: Vec<CMat> = (0..g.num_inputs_b())
        .map(|j| {
            (0..g.num_inputs_a())
                .find_map(|i| g.position(i, j).map(|k| o.alice[i][k].clone()))
                .unwrap_or_else(|| CMat::identity(d, d))
        })
        .collect();
    phi.push(minus.clone());
    phi_prime.push(minus);
    BipartiteRep { phi, phi_prime, state: o.state }
}

fn apply(images: &[CMat], w: &Word, v: &CVec) -> CVec {
    // Phi(s_1 ... s_k) v = Phi(s_1) (... (Phi(s_k) v))
    let mut v = v.clone();
    for l in w.letters().iter().rev() {
        let m = &images[l.gen];
        v = if l.inv { m.adjoint() * v } else { m * v };
    }
    v
}

impl BipartiteRep {
    /// `||Phi(w) psi - psi||`.
    pub fn deviation(&self, w: &Word) -> f64 {
        dist(&apply(&self.phi, w, &self.state), &self.state)
    }

    /// Measured parameters: the worst relation error `(i)`, agreement error
    /// `(ii)` and commutator error `(iii)`.
    pub fn measure(&self, p: &Presentation) -> Result<BipartiteMeasure> {
        if self.phi.len() != p.num_generators() || self.phi_prime.len() != p.num_generators() {
            return Err(Error::malformed("representation does not cover the generators"));
        }
        let relation = p.relations().iter().map(|r| self.deviation(r)).fold(0.0, f64::max);
        let psi = &self.state;
        let agreement = self
            .phi
            .iter()
            .zip(&self.phi_prime)
            .map(|(a, b)| dist(&(a.adjoint() * psi), &(b * psi)))
            .fold(0.0, f64::max);
        let d = psi.len();
        let mut commutator: f64 = 0.0;
        for a in &self.phi {
            for b in &self.phi_prime {
                let c = a * b * a.adjoint() * b.adjoint() - CMat::identity(d, d);
                commutator = commutator.max(super::strategy::spectral_norm(&c));
            }
        }
        Ok(BipartiteMeasure { relation, agreement, commutator })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BipartiteMeasure {
    pub relation: f64,
    pub agreement: f64,
    pub commutator: f64,
}

impl BipartiteMeasure {
    /// Whether the representation is an `(eps, delta)` one, with `eps`
    /// bounding parts (i) and (ii) and `delta` bounding part (iii).
    pub fn within(&self, eps: f64, delta: f64) -> bool {
        self.relation <= eps + 1e-9 && self.agreement <= eps + 1e-9 && self.commutator <= delta + 1e-9
    }
}

/// `(5 l^2 Ar^2 + 2 l |w| Ar)(eps + delta)`.
pub fn area_bound(ell: usize, area: usize, word_len: usize, eps: f64, delta: f64) -> f64 {
    let (l, a, w) = (ell as f64, area as f64, word_len as f64);
    (5.0 * l * l * a * a + 2.0 * l * w * a) * (eps + delta)
}

/// The per-factor estimate `sum (2|z|+1) eps + l |z| delta` for an explicit
/// factorization.
pub fn certificate_bound(cert: &AreaCertificate, ell: usize, eps: f64, delta: f64) -> f64 {
    cert.steps
        .iter()
        .map(|s| {
            let z = s.conjugator.len() as f64;
            (2.0 * z + 1.0) * eps + ell as f64 * z * delta
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::games::build_game;
    use crate::games::strategy::{conjugate_bob, random_hermitian, random_tensor_strategy, unitary_exp};
    use crate::wagon::{magic_square, solution_group};

    #[test]
    fn bounds_hold_for_perturbed_strategies() {
        let g = build_game(&magic_square()).unwrap();
        let gamma = solution_group(g.system());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in [0.0, 0.01, 0.05] {
            let s = random_tensor_strategy(&g, 2, 2, &mut rng);
            let h = random_hermitian(4, &mut rng);
            let s = conjugate_bob(&s, &unitary_exp(&h, t));
            let r = check_approx_strategy(&g, &s).unwrap();
            assert_eq!(r.violations(), 0, "{r:?}");
            let rep = bipartite_from_strategy(&g, &s);
            let m = rep.measure(&gamma).unwrap();
            assert!(m.within(r.params.tau(), r.params.kappa()), "{m:?} {:?}", r.params);
        }
    }

    #[test]
    fn relation_deviation_and_bounds() {
        assert_eq!(area_bound(4, 1, 4, 0.5, 0.5), 80.0 + 32.0);
        let w = Word::from_letters(vec![crate::group::Letter::pos(0)]);
        let rep = BipartiteRep {
            phi: vec![-CMat::identity(2, 2)],
            phi_prime: vec![CMat::identity(2, 2)],
            state: CVec::from_vec(vec![1.0.into(), 0.0.into()]),
        };
        assert!((rep.deviation(&w) - 2.0).abs() < 1e-12);
        assert!(rep.deviation(&w.pow(2)) < 1e-12);
    }
}
