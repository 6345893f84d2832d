use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::game::LinearSystemGame;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const PROJECTION_TOL: f64 = 1e-9;

/// Projective measurements for both players on a shared space, with a state.
/// `alice[i][k]` is the projection for the `k`-th answer of `outputs_a(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorStrategy {
    pub dim: usize,
    pub alice: Vec<Vec<CMat>>,
    pub bob: Vec<[CMat; 2]>,
    pub state: CVec,
}

/// `alice[i][k]` is `A_{i j}` for the `k`-th column `j` of row `i`; `bob[j]` is `B_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableStrategy {
    pub dim: usize,
    pub alice: Vec<Vec<CMat>>,
    pub bob: Vec<CMat>,
    pub state: CVec,
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_projection(p: &CMat, what: &str) -> Result<()> {
    if max_abs(&(p * p - p)) > PROJECTION_TOL || max_abs(&(p.adjoint() - p)) > PROJECTION_TOL {
        return Err(Error::precondition(format!("{what} is not an orthogonal projection")));
    }
    Ok(())
}

fn check_measurement(ps: &[CMat], dim: usize, what: &str) -> Result<()> {
    let mut sum = CMat::zeros(dim, dim);
    for (k, p) in ps.iter().enumerate() {
        if p.shape() != (dim, dim) {
            return Err(Error::malformed(format!("{what}: operator has wrong shape")));
        }
        check_projection(p, what)?;
        for q in &ps[k + 1..] {
            if max_abs(&(p * q)) > PROJECTION_TOL {
                return Err(Error::precondition(format!("{what}: projections are not orthogonal")));
            }
        }
        sum += p;
    }
    if max_abs(&(sum - CMat::identity(dim, dim))) > PROJECTION_TOL {
        return Err(Error::precondition(format!("{what}: projections do not sum to the identity")));
    }
    Ok(())
}

impl OperatorStrategy {
    pub fn validate(&self, g: &LinearSystemGame) -> Result<()> {
        if self.alice.len() != g.num_inputs_a() || self.bob.len() != g.num_inputs_b() {
            return Err(Error::malformed("strategy input counts do not match the game"));
        }
        if self.state.len() != self.dim || (self.state.norm() - 1.0).abs() > PROJECTION_TOL {
            return Err(Error::precondition("state is not a unit vector of the strategy dimension"));
        }
        for (i, ps) in self.alice.iter().enumerate() {
            if ps.len() != g.outputs_a(i).len() {
                return Err(Error::malformed(format!("Alice input {i}: wrong number of answers")));
            }
            check_measurement(ps, self.dim, &format!("Alice input {i}"))?;
        }
        for (j, qs) in self.bob.iter().enumerate() {
            check_measurement(qs, self.dim, &format!("Bob input {j}"))?;
        }
        Ok(())
    }
}

/// `omega = | sum_{(i,j)} pi(i,j) sum_{a,b} V(a,b|i,j) <psi| P^i_a Q^j_b |psi> |`.
pub fn evaluate_strategy(g: &LinearSystemGame, s: &OperatorStrategy) -> Result<f64> {
    s.validate(g)?;
    Ok(evaluate_unchecked(g, s))
}

fn evaluate_unchecked(g: &LinearSystemGame, s: &OperatorStrategy) -> f64 {
    let psi = &s.state;
    let pa: Vec<Vec<CVec>> = s.alice.iter().map(|ps| ps.iter().map(|p| p * psi).collect()).collect();
    let qb: Vec<[CVec; 2]> = s.bob.iter().map(|[q0, q1]| [q0 * psi, q1 * psi]).collect();
    let w = 1.0 / g.pairs().len() as f64;
    let mut total = C64::new(0.0, 0.0);
    for &(i, j) in g.pairs() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &mask) in g.outputs_a(i).iter().enumerate() {
            let b = g.answer_bit(i, mask, j).unwrap() as usize;
            // <psi|P Q|psi> = (P psi)^* (Q psi) for self-adjoint P
            acc += pa[i][k].dotc(&qb[j][b]);
        }
        total += acc * w;
    }
    total.norm()
}

/// `A_{ij} = sum_a (-1)^{a_j} P^i_a`, `B_j = Q^j_0 - Q^j_1`.
pub fn observables_from_measurements(g: &LinearSystemGame, s: &OperatorStrategy) -> ObservableStrategy {
    let d = s.dim;
    let alice = (0..g.num_inputs_a())
        .map(|i| {
            (0..g.system().row(i).len())
                .map(|k| {
                    let mut a = CMat::zeros(d, d);
                    for (idx, &mask) in g.outputs_a(i).iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            a -= &s.alice[i][idx];
                        } else {
                            a += &s.alice[i][idx];
                        }
                    }
                    a
                })
                .collect()
        })
        .collect();
    let bob = s.bob.iter().map(|[q0, q1]| q0 - q1).collect();
    ObservableStrategy { dim: d, alice, bob, state: s.state.clone() }
}

/// `P^i_a = prod_k (I + (-1)^{a_k} A_{ik}) / 2`, `Q^j_b = (I + (-1)^b B_j) / 2`.
pub fn measurements_from_observables(g: &LinearSystemGame, o: &ObservableStrategy) -> Result<OperatorStrategy> {
    let d = o.dim;
    let id = CMat::identity(d, d);
    let half = C64::new(0.5, 0.0);
    for (i, row) in o.alice.iter().enumerate() {
        for (k, a) in row.iter().enumerate() {
            for b in &row[k + 1..] {
                if max_abs(&(a * b - b * a)) > PROJECTION_TOL {
                    return Err(Error::precondition(format!("observables of row {i} do not commute")));
                }
            }
        }
    }
    let alice = (0..g.num_inputs_a())
        .map(|i| {
            g.outputs_a(i)
                .iter()
                .map(|&mask| {
                    let mut p = id.clone();
                    for (k, a) in o.alice[i].iter().enumerate() {
                        let f = if mask >> k & 1 == 1 { &id - a } else { &id + a };
                        p = p * f * half;
                    }
                    p
                })
                .collect()
        })
        .collect();
    let bob = o.bob.iter().map(|b| [(&id + b) * half, (&id - b) * half]).collect();
    Ok(OperatorStrategy { dim: d, alice, bob, state: o.state.clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    /// `max ||P^x_a Q^y_b - Q^y_b P^x_a||` over all inputs and answers.
    pub delta: f64,
    /// `max ||A_{ij} B_k - B_k A_{ij}||` over all rows, positions and columns.
    pub observable_commutator: f64,
    /// Largest ratio `||[A_{ij}, B_k]|| / 2^{|V_i|+1}`; at most `delta` when the bound holds.
    pub observable_bound_slack: f64,
    pub bound_holds: bool,
}

/// Measured commutation defect of a strategy.
pub fn strategy_delta(g: &LinearSystemGame, s: &OperatorStrategy) -> DeltaReport {
    let mut delta: f64 = 0.0;
    for ps in &s.alice {
        for p in ps {
            for qs in &s.bob {
                for q in qs {
                    delta = delta.max(spectral_norm(&(p * q - q * p)));
                }
            }
        }
    }
    let o = observables_from_measurements(g, s);
    let mut obs: f64 = 0.0;
    let mut holds = true;
    let mut slack: f64 = 0.0;
    for (i, row) in o.alice.iter().enumerate() {
        let scale = (1u64 << (g.system().row(i).len() + 1)) as f64;
        for a in row {
            for b in &o.bob {
                let c = spectral_norm(&(a * b - b * a));
                obs = obs.max(c);
                slack = slack.max(c / scale);
                if c > scale * delta + 1e-10 {
                    holds = false;
                }
            }
        }
    }
    DeltaReport { delta, observable_commutator: obs, observable_bound_slack: slack, bound_holds: holds }
}

/// `beta = sum pi(i,j) <psi| A_{ij} B_j |psi>` (complex when the strategy does not commute).
pub fn bias(g: &LinearSystemGame, o: &ObservableStrategy) -> C64 {
    let w = 1.0 / g.pairs().len() as f64;
    let bpsi: Vec<CVec> = o.bob.iter().map(|b| b * &o.state).collect();
    let mut beta = C64::new(0.0, 0.0);
    for &(i, j) in g.pairs() {
        let k = g.position(i, j).unwrap();
        let apsi = o.alice[i][k].adjoint() * &o.state;
        beta += apsi.dotc(&bpsi[j]) * w;
    }
    beta
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// A unitary from the QR decomposition of a matrix with uniform entries.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let m = CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// A random Hermitian matrix with entries of modulus at most 1.
pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let m = CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `exp(i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMat::from_diagonal(&DVector::from_iterator(
        h.nrows(),
        eig.eigenvalues.iter().map(|&l| Complex::from_polar(1.0, t * l)),
    ));
    v * phases * v.adjoint()
}

/// Split the columns of a unitary into `k` groups and return the projections
/// onto their spans. When `d >= k` every group is non-empty.
pub fn random_pvm<R: Rng>(d: usize, k: usize, rng: &mut R) -> Vec<CMat> {
    let u = random_unitary(d, rng);
    let mut ps = vec![CMat::zeros(d, d); k];
    let offset = rng.gen_range(0..k);
    for c in 0..d {
        let which = if c < k { (c + offset) % k } else { rng.gen_range(0..k) };
        let col = u.column(c);
        ps[which] += &col * col.adjoint();
    }
    ps
}

/// A random unit vector.
pub fn random_state<R: Rng>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// A random strategy with both players on one `dim`-dimensional space (generally not commuting).
pub fn random_strategy<R: Rng>(g: &LinearSystemGame, dim: usize, rng: &mut R) -> OperatorStrategy {
    let alice = (0..g.num_inputs_a()).map(|i| random_pvm(dim, g.outputs_a(i).len(), rng)).collect();
    let bob = (0..g.num_inputs_b())
        .map(|_| {
            let ps = random_pvm(dim, 2, rng);
            [ps[0].clone(), ps[1].clone()]
        })
        .collect();
    OperatorStrategy { dim, alice, bob, state: random_state(dim, rng) }
}

/// A random tensor-product strategy on `C^da (x) C^db`: commuting by construction.
pub fn random_tensor_strategy<R: Rng>(g: &LinearSystemGame, da: usize, db: usize, rng: &mut R) -> OperatorStrategy {
    let (ia, ib) = (identity(da), identity(db));
    let alice = (0..g.num_inputs_a())
        .map(|i| random_pvm(da, g.outputs_a(i).len(), rng).iter().map(|p| kron(p, &ib)).collect())
        .collect();
    let bob = (0..g.num_inputs_b())
        .map(|_| {
            let ps = random_pvm(db, 2, rng);
            [kron(&ia, &ps[0]), kron(&ia, &ps[1])]
        })
        .collect();
    OperatorStrategy { dim: da * db, alice, bob, state: random_state(da * db, rng) }
}

/// Conjugate every Bob projection by `u`: measurements stay projective but
/// generally stop commuting with Alice's.
pub fn conjugate_bob(s: &OperatorStrategy, u: &CMat) -> OperatorStrategy {
    let ud = u.adjoint();
    OperatorStrategy {
        dim: s.dim,
        alice: s.alice.clone(),
        bob: s.bob.iter().map(|[q0, q1]| [u * q0 * &ud, u * q1 * &ud]).collect(),
        state: s.state.clone(),
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    schema: u32,
    dim: usize,
    alice: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    bob: Vec<[Vec<Vec<[f64; 2]>>; 2]>,
    state: Vec<[f64; 2]>,
}

pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>], dim: usize) -> Result<CMat> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::malformed(format!("matrix is not {dim}x{dim}")));
    }
    Ok(CMat::from_fn(dim, dim, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
}

impl OperatorStrategy {
    /// JSON with dense row-major matrices whose entries are `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let f = StrategyFile {
            schema: 1,
            dim: self.dim,
            alice: self.alice.iter().map(|ps| ps.iter().map(matrix_to_rows).collect()).collect(),
            bob: self.bob.iter().map(|[a, b]| [matrix_to_rows(a), matrix_to_rows(b)]).collect(),
            state: self.state.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string(&f).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: StrategyFile = serde_json::from_str(text)?;
        let d = f.dim;
        let alice = f
            .alice
            .iter()
            .map(|ps| ps.iter().map(|m| matrix_from_rows(m, d)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let bob = f
            .bob
            .iter()
            .map(|[a, b]| Ok([matrix_from_rows(a, d)?, matrix_from_rows(b, d)?]))
            .collect::<Result<Vec<_>>>()?;
        if f.state.len() != d {
            return Err(Error::malformed("state length differs from dim"));
        }
        let state = CVec::from_iterator(d, f.state.iter().map(|p| C64::new(p[0], p[1])));
        Ok(OperatorStrategy { dim: d, alice, bob, state })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::game::{build_game, classical_value};
    use crate::wagon::{magic_square, LinearSystemZ2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diff(a: &CMat, b: &CMat) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn trivial_game_any_state() {
        let sys = LinearSystemZ2::new(1, vec![vec![0]], vec![false]).unwrap();
        let g = build_game(&sys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = 3;
        let s = OperatorStrategy {
            dim: d,
            alice: vec![vec![identity(d)]],
            bob: vec![[identity(d), CMat::zeros(d, d)]],
            state: random_state(d, &mut rng),
        };
        assert!((evaluate_strategy(&g, &s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_strategy_matches_classical() {
        let g = build_game(&magic_square()).unwrap();
        let cv = classical_value(&g, 24).unwrap();
        let one = identity(1);
        let zero = CMat::zeros(1, 1);
        let b = &cv.assignment;
        let alice = (0..6)
            .map(|i| {
                let row = g.system().row(i);
                let target: u32 = row.iter().enumerate().map(|(k, &j)| (b[j] as u32) << k).sum();
                // best response: the parity-consistent answer closest to b
                let best = *g.outputs_a(i).iter().min_by_key(|&&m| (m ^ target).count_ones()).unwrap();
                g.outputs_a(i).iter().map(|&m| if m == best { one.clone() } else { zero.clone() }).collect()
            })
            .collect();
        let bob = b.iter().map(|&v| if v { [zero.clone(), one.clone()] } else { [one.clone(), zero.clone()] }).collect();
        let s = OperatorStrategy { dim: 1, alice, bob, state: CVec::from_element(1, C64::new(1.0, 0.0)) };
        assert!((evaluate_strategy(&g, &s).unwrap() - 17.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_bias_identity() {
        let g = build_game(&magic_square()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let s = random_strategy(&g, 4, &mut rng);
            let o = observables_from_measurements(&g, &s);
            let back = measurements_from_observables(&g, &o).unwrap();
            for i in 0..6 {
                for k in 0..4 {
                    assert!(diff(&s.alice[i][k], &back.alice[i][k]) < 1e-10);
                }
            }
            let omega = evaluate_strategy(&g, &s).unwrap();
            let beta = bias(&g, &o);
            assert!((omega - (beta + 1.0).norm() / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn row_products_of_observables() {
        let g = build_game(&magic_square()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_strategy(&g, 3, &mut rng);
        let o = observables_from_measurements(&g, &s);
        for i in 0..6 {
            let prod = o.alice[i].iter().fold(identity(3), |acc, a| acc * a);
            let sign = if g.system().rhs()[i] { -1.0 } else { 1.0 };
            assert!(diff(&prod, &(identity(3) * C64::new(sign, 0.0))) < 1e-12);
        }
    }

    #[test]
    fn tensor_strategy_commutes() {
        let g = build_game(&magic_square()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_tensor_strategy(&g, 2, 3, &mut rng);
        let r = strategy_delta(&g, &s);
        assert!(r.delta < 1e-12);
        assert!(r.bound_holds);
    }

    #[test]
    fn shared_register_delta_matches_eigensolve() {
        // both players measure the same 4-dimensional register
        let sys = LinearSystemZ2::new(2, vec![vec![0, 1]], vec![false]).unwrap();
        let g = build_game(&sys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_strategy(&g, 4, &mut rng);
        let r = strategy_delta(&g, &s);
        assert!(r.delta > 1e-3);
        assert!(r.bound_holds);
        // [P, Q] is anti-Hermitian, so its norm is the largest |eigenvalue| of i[P, Q]
        let mut oracle: f64 = 0.0;
        for p in &s.alice[0] {
            for qs in &s.bob {
                for q in qs {
                    let k = (p * q - q * p) * C64::new(0.0, 1.0);
                    let e = k.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
                    oracle = oracle.max(e);
                }
            }
        }
        assert!((r.delta - oracle).abs() < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let g = build_game(&magic_square()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_strategy(&g, 2, &mut rng);
        let back = OperatorStrategy::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_measurement_rejected() {
        let sys = LinearSystemZ2::new(1, vec![vec![0]], vec![false]).unwrap();
        let g = build_game(&sys).unwrap();
        let s = OperatorStrategy {
            dim: 2,
            alice: vec![vec![identity(2) * C64::new(0.5, 0.0)]],
            bob: vec![[identity(2), CMat::zeros(2, 2)]],
            state: CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        };
        assert!(evaluate_strategy(&g, &s).is_err());
    }
}
