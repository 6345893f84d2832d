use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::solver::{Sdp, SdpSolution, SdpStatus, SolverOptions, SparseSym};
use crate::error::{Error, Result};
use crate::games::LinearSystemGame;

/// A product of observables in normal form: Alice's part is a sequence of
/// row blocks `(row, mask over the row's columns)` with no two adjacent
/// blocks from the same row, Bob's part a sequence of columns with no two
/// adjacent repeats. Alice's and Bob's operators commute, so they are kept apart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub alice: Vec<(u32, u32)>,
    pub bob: Vec<u32>,
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial { alice: Vec::new(), bob: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.alice.iter().map(|&(_, m)| m.count_ones() as usize).sum::<usize>() + self.bob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty() && self.bob.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Monomial { alice: self.alice.iter().rev().copied().collect(), bob: self.bob.iter().rev().copied().collect() }
    }
}

/// Reduction rules: `A^2 = B^2 = I`, commutation within a row, and
/// `prod_{j in V_i} A_{ij} = (-1)^{c_i} I`, under which a row block and its
/// complement agree up to `(-1)^{c_i}`; the block with fewer columns is kept.
struct Rules {
    full: Vec<u32>,
    parity: Vec<bool>,
}

impl Rules {
    fn new(g: &LinearSystemGame) -> Self {
        let sys = g.system();
        Rules {
            full: sys.rows().iter().map(|r| ((1u64 << r.len()) - 1) as u32).collect(),
            parity: sys.rhs().to_vec(),
        }
    }

    /// Canonical block for `mask` on `row`, and whether the sign flips.
    fn block(&self, row: u32, mask: u32) -> (u32, bool) {
        let comp = self.full[row as usize] ^ mask;
        if (comp.count_ones(), comp) < (mask.count_ones(), mask) {
            (comp, self.parity[row as usize])
        } else {
            (mask, false)
        }
    }

    /// Normal form of `sign * product`, with `sign` as a flip flag.
    fn reduce(&self, alice: impl IntoIterator<Item = (u32, u32)>, bob: impl IntoIterator<Item = u32>) -> (bool, Monomial) {
        let mut flip = false;
        let mut a: Vec<(u32, u32)> = Vec::new();
        for (row, mask) in alice {
            let merged = match a.last() {
                Some(&(r, m)) if r == row => {
                    a.pop();
                    m ^ mask
                }
                _ => mask,
            };
            let (m, f) = self.block(row, merged);
            flip ^= f;
            if m != 0 {
                a.push((row, m));
            }
        }
        let mut b: Vec<u32> = Vec::new();
        for col in bob {
            if b.last() == Some(&col) {
                b.pop();
            } else {
                b.push(col);
            }
        }
        (flip, Monomial { alice: a, bob: b })
    }

    fn product(&self, u: &Monomial, v: &Monomial) -> (bool, Monomial) {
        self.reduce(u.alice.iter().chain(&v.alice).copied(), u.bob.iter().chain(&v.bob).copied())
    }
}

/// Where a moment-matrix entry gets its value.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Entry {
    Constant(f64),
    Variable(usize, f64),
}

/// The level-`N` moment relaxation of a linear-system game at `delta = 0`,
/// over real symmetric moment matrices.
#[derive(Clone, Debug)]
pub struct MomentProgram {
    pub level: usize,
    pub basis: Vec<Monomial>,
    /// One representative per moment variable.
    pub variables: Vec<Monomial>,
    entries: Vec<Entry>,
    /// Objective `offset + sum objective_k y_k`, the linearization of `(beta + 1)/2`.
    pub objective: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgramSize {
    pub level: usize,
    pub basis: usize,
    pub variables: usize,
}

pub fn build_moment_program(g: &LinearSystemGame, level: usize) -> Result<MomentProgram> {
    if !(1..=2).contains(&level) {
        return Err(Error::Unsupported(format!("level {level}; supported levels are 1 and 2")));
    }
    let sys = g.system();
    let rules = Rules::new(g);
    let mut letters: Vec<Monomial> = Vec::new();
    for (i, row) in sys.rows().iter().enumerate() {
        for k in 0..row.len() {
            letters.push(Monomial { alice: vec![(i as u32, 1 << k)], bob: vec![] });
        }
    }
    for j in 0..sys.n() {
        letters.push(Monomial { alice: vec![], bob: vec![j as u32] });
    }

    let mut basis = vec![Monomial::identity()];
    let mut seen: HashMap<Monomial, ()> = HashMap::from([(Monomial::identity(), ())]);
    let mut push = |m: Monomial, basis: &mut Vec<Monomial>| {
        if seen.insert(m.clone(), ()).is_none() {
            basis.push(m);
        }
    };
    for l in &letters {
        push(rules.product(&Monomial::identity(), l).1, &mut basis);
    }
    if level == 2 {
        for u in &letters {
            for v in &letters {
                push(rules.product(u, v).1, &mut basis);
            }
        }
    }

    // y_m = y_{m^*} for real moment matrices: a class is {m, m^*}, keyed by the smaller.
    let mut vars: HashMap<Monomial, usize> = HashMap::new();
    let mut variables = Vec::new();
    let mut value_of = |flip: bool, m: Monomial| -> Entry {
        let s = if flip { -1.0 } else { 1.0 };
        if m.is_empty() {
            return Entry::Constant(s);
        }
        let (aflip, adj) = rules.reduce(m.alice.iter().rev().copied(), m.bob.iter().rev().copied());
        let (key, s) = if adj < m { (adj, if aflip { -s } else { s }) } else { (m, s) };
        if key.is_empty() {
            return Entry::Constant(s);
        }
        if adj_is_negated(&rules, &key) {
            return Entry::Constant(0.0);
        }
        let k = *vars.entry(key.clone()).or_insert_with(|| {
            variables.push(key);
            variables.len() - 1
        });
        Entry::Variable(k, s)
    };

    let d = basis.len();
    let mut entries = Vec::with_capacity(d * d);
    for u in &basis {
        let ua = u.adjoint();
        for v in &basis {
            let (flip, m) = rules.product(&ua, v);
            entries.push(value_of(flip, m));
        }
    }

    let w = 0.5 / g.pairs().len() as f64;
    let terms: Vec<Entry> = g
        .pairs()
        .iter()
        .map(|&(i, j)| {
            let k = g.position(i, j).unwrap();
            let a = Monomial { alice: vec![(i as u32, 1 << k)], bob: vec![] };
            let b = Monomial { alice: vec![], bob: vec![j as u32] };
            let (flip, m) = rules.product(&a, &b);
            value_of(flip, m)
        })
        .collect();
    let mut objective = vec![0.0; variables.len()];
    let mut offset = 0.5;
    for t in terms {
        match t {
            Entry::Constant(c) => offset += w * c,
            Entry::Variable(k, s) => objective[k] += w * s,
        }
    }
    Ok(MomentProgram { level, basis, variables, entries, objective, offset })
}

/// Whether `m^* = -m` in normal form, forcing the real moment to 0.
fn adj_is_negated(rules: &Rules, m: &Monomial) -> bool {
    let (flip, adj) = rules.reduce(m.alice.iter().rev().copied(), m.bob.iter().rev().copied());
    flip && adj == *m
}

impl MomentProgram {
    pub fn size(&self) -> ProgramSize {
        ProgramSize { level: self.level, basis: self.basis.len(), variables: self.variables.len() }
    }

    fn entry(&self, u: usize, v: usize) -> Entry {
        self.entries[u * self.basis.len() + v]
    }

    /// The program as `max b^T y` subject to `Gamma(y) = C - sum y_k A_k >= 0`.
    pub fn to_sdp(&self) -> Sdp {
        let d = self.basis.len();
        let mut c = DMatrix::zeros(d, d);
        let mut a = vec![SparseSym::default(); self.variables.len()];
        for u in 0..d {
            for v in u..d {
                match self.entry(u, v) {
                    Entry::Constant(x) => {
                        c[(u, v)] = x;
                        c[(v, u)] = x;
                    }
                    Entry::Variable(k, s) => a[k].add(u, v, -s),
                }
            }
        }
        Sdp { dim: d, c, a, b: DVector::from_vec(self.objective.clone()) }
    }

    /// Moment matrix for the variable values `y`.
    pub fn moment_matrix(&self, y: &[f64]) -> DMatrix<f64> {
        let d = self.basis.len();
        DMatrix::from_fn(d, d, |u, v| match self.entry(u, v) {
            Entry::Constant(x) => x,
            Entry::Variable(k, s) => s * y[k],
        })
    }

    /// SDPA sparse format (`minimize c^T x` subject to `sum x_k F_k - F_0 >= 0`),
    /// entries 1-based, upper triangle.
    pub fn to_sdpa(&self) -> String {
        let sdp = self.to_sdp();
        let d = self.basis.len();
        let mut out = String::new();
        let _ = writeln!(out, "{}\n1\n{}", self.variables.len(), d);
        let obj: Vec<String> = self.objective.iter().map(|c| format!("{}", -c)).collect();
        let _ = writeln!(out, "{}", obj.join(" "));
        for u in 0..d {
            for v in u..d {
                if sdp.c[(u, v)] != 0.0 {
                    let _ = writeln!(out, "0 1 {} {} {}", u + 1, v + 1, -sdp.c[(u, v)]);
                }
            }
        }
        for (k, a) in sdp.a.iter().enumerate() {
            for &(u, v, x) in &a.entries {
                if u <= v {
                    let _ = writeln!(out, "{} 1 {} {} {}", k + 1, u + 1, v + 1, -x);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpResult {
    /// Upper bound on the commuting-operator value.
    pub value: f64,
    /// Value of the best moment matrix found (a feasible point of the relaxation).
    pub lower_value: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    pub size: ProgramSize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

pub fn solve_sdp(mp: &MomentProgram) -> SdpResult {
    solve_sdp_with(mp, &SolverOptions::default()).0
}

pub fn solve_sdp_with(mp: &MomentProgram, opts: &SolverOptions) -> (SdpResult, SdpSolution) {
    let sol = if mp.variables.is_empty() {
        // every entry is fixed; the relaxation is a single point
        let d = mp.basis.len();
        let z = mp.moment_matrix(&[]);
        SdpSolution {
            status: SdpStatus::Converged,
            iterations: 0,
            primal_objective: 0.0,
            dual_objective: 0.0,
            gap: 0.0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
            y: DVector::zeros(0),
            z: if d > 0 { z } else { DMatrix::zeros(0, 0) },
        }
    } else {
        mp.to_sdp().solve(opts)
    };
    let result = SdpResult {
        value: sol.primal_objective + mp.offset,
        lower_value: sol.dual_objective + mp.offset,
        duality_gap: sol.gap,
        iterations: sol.iterations,
        status: sol.status,
        size: mp.size(),
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
    };
    (result, sol)
}

#[derive(Clone, Debug, Serialize)]
pub struct NpaBound {
    pub level: usize,
    pub value: f64,
    pub result: SdpResult,
    /// Level-1 value, computed alongside level 2 for the monotonicity check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level1_value: Option<f64>,
}

/// Upper bound on the commuting-operator value. At level 2 the level-1
/// bound is computed as well and must not be smaller (to 1e-6).
pub fn npa_upper_bound(g: &LinearSystemGame, level: usize) -> Result<NpaBound> {
    let result = solve_sdp(&build_moment_program(g, level)?);
    if result.status != SdpStatus::Converged {
        return Err(Error::Analysis(format!(
            "solver stopped with status {:?} after {} iterations",
            result.status, result.iterations
        )));
    }
    let mut level1_value = None;
    if level == 2 {
        let one = solve_sdp(&build_moment_program(g, 1)?);
        if result.value > one.value + 1e-6 {
            return Err(Error::Analysis(format!("level 2 bound {} exceeds level 1 bound {}", result.value, one.value)));
        }
        level1_value = Some(one.value);
    }
    Ok(NpaBound { level, value: result.value, result, level1_value })
}
