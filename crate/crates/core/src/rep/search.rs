use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::strategy::{kron, matrix_from_rows, matrix_to_rows, measurements_from_observables, CMat, CVec, C64};
use crate::games::{LinearSystemGame, ObservableStrategy, OperatorStrategy};
use crate::group::{Presentation, Word};

pub const REP_TOL: f64 = 1e-10;
const SEARCH_TOL: f64 = 1e-9;
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Images of the generators of a presentation as `dim x dim` unitaries.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedRep {
    pub dim: usize,
    pub images: Vec<CMat>,
    /// Sign `e` with the designated involution sent to `e I`, if there is one.
    pub involution_sign: Option<i8>,
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn image_of(images: &[CMat], w: &Word, dim: usize) -> CMat {
    let mut acc = CMat::identity(dim, dim);
    for l in w.letters() {
        let m = &images[l.gen];
        acc = if l.inv { acc * m.adjoint() } else { acc * m };
    }
    acc
}

fn scalar_sign(m: &CMat) -> Option<i8> {
    let d = m.nrows();
    [1i8, -1].into_iter().find(|&e| max_abs(&(m - CMat::identity(d, d) * C64::from(e as f64))) <= REP_TOL)
}

impl SignedRep {
    pub fn image(&self, w: &Word) -> CMat {
        image_of(&self.images, w, self.dim)
    }

    /// Largest entry of `rho(r) - I` over the relations.
    pub fn relation_error(&self, p: &Presentation) -> f64 {
        let id = CMat::identity(self.dim, self.dim);
        p.relations().iter().map(|r| max_abs(&(self.image(r) - &id))).fold(0.0, f64::max)
    }

    /// Check shapes, unitarity, every relation and the recorded involution sign.
    pub fn verify(&self, p: &Presentation) -> Result<()> {
        if self.images.len() != p.num_generators() {
            return Err(Error::malformed("representation does not cover the generators"));
        }
        let id = CMat::identity(self.dim, self.dim);
        for (g, m) in self.images.iter().enumerate() {
            if m.shape() != (self.dim, self.dim) || max_abs(&(m * m.adjoint() - &id)) > REP_TOL {
                return Err(Error::precondition(format!("image of {} is not a unitary of dimension {}", p.generators()[g], self.dim)));
            }
        }
        let err = self.relation_error(p);
        if err > REP_TOL {
            return Err(Error::Analysis(format!("relations hold only to {err:e}")));
        }
        let sign = p.involution().and_then(|j| scalar_sign(&self.images[j]));
        if self.involution_sign.is_some() && sign != self.involution_sign {
            return Err(Error::Analysis("the involution does not map to the recorded sign".into()));
        }
        Ok(())
    }

    pub fn to_json(&self, p: &Presentation) -> String {
        let file = RepFile {
            schema: 1,
            dim: self.dim,
            involution_sign: self.involution_sign,
            images: p
                .generators()
                .iter()
                .zip(&self.images)
                .map(|(g, m)| RepImage { generator: g.clone(), matrix: matrix_to_rows(m) })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("representation serializes")
    }

    pub fn from_json(p: &Presentation, text: &str) -> Result<Self> {
        let file: RepFile = serde_json::from_str(text)?;
        if file.images.len() != p.num_generators() {
            return Err(Error::malformed("representation does not cover the generators"));
        }
        let mut images = vec![CMat::zeros(file.dim, file.dim); p.num_generators()];
        for im in &file.images {
            let g = p
                .generator_index(&im.generator)
                .ok_or_else(|| Error::malformed(format!("unknown generator {}", im.generator)))?;
            images[g] = matrix_from_rows(&im.matrix, file.dim)?;
        }
        Ok(SignedRep { dim: file.dim, images, involution_sign: file.involution_sign })
    }
}

#[derive(Serialize, Deserialize)]
struct RepImage {
    generator: String,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct RepFile {
    schema: u32,
    dim: usize,
    involution_sign: Option<i8>,
    images: Vec<RepImage>,
}

#[derive(Clone, Debug)]
pub enum RepOutcome {
    Found(SignedRep),
    /// No representation in the searched candidates; `exhausted` is false
    /// when the node budget ran out first.
    Unknown { nodes: usize, exhausted: bool },
}

fn real(rows: &[&[f64]]) -> CMat {
    let d = rows.len();
    CMat::from_fn(d, d, |i, j| C64::from(rows[i][j]))
}

/// `I, X, Z, XZ, H`.
pub fn standard_involutions() -> Vec<CMat> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        real(&[&[1.0, 0.0], &[0.0, 1.0]]),
        real(&[&[0.0, 1.0], &[1.0, 0.0]]),
        real(&[&[1.0, 0.0], &[0.0, -1.0]]),
        real(&[&[0.0, -1.0], &[1.0, 0.0]]),
        real(&[&[h, h], &[h, -h]]),
    ]
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..d {
        for rest in permutations(d - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// Candidate images in dimension `d`: signed permutation matrices (for
/// `d <= 4`) in lexicographic order, then `+-` tensor products of
/// [`standard_involutions`], without repeats.
pub fn candidates(d: usize) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::new();
    let push = |m: CMat, out: &mut Vec<CMat>| {
        if !out.iter().any(|c| max_abs(&(c - &m)) < 1e-12) {
            out.push(m);
        }
    };
    if d <= 4 {
        for m in signed_permutations(d) {
            push(m, &mut out);
        }
    }
    if d >= 2 && d.is_power_of_two() {
        let base = standard_involutions();
        let mut prods = vec![CMat::identity(1, 1)];
        for _ in 0..d.trailing_zeros() {
            prods = prods.iter().flat_map(|p| base.iter().map(move |b| kron(p, b))).collect();
        }
        for m in prods {
            push(m.clone(), &mut out);
            push(-m, &mut out);
        }
    }
    out
}

fn signed_permutations(d: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for p in permutations(d) {
        for signs in 0..1u32 << d {
            out.push(CMat::from_fn(d, d, |i, j| {
                if p[i] == j {
                    C64::from(if signs >> i & 1 == 1 { -1.0 } else { 1.0 })
                } else {
                    C64::from(0.0)
                }
            }));
        }
    }
    out
}

fn matrix_key(m: &CMat) -> Vec<i64> {
    m.iter().flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64]).collect()
}

/// Indices of candidates that are first in their orbit under conjugation by
/// signed permutations (all candidates when `d > 4`).
fn orbit_representatives(cands: &[CMat], d: usize) -> Vec<usize> {
    if d > 4 {
        return (0..cands.len()).collect();
    }
    let index: std::collections::HashMap<Vec<i64>, usize> =
        cands.iter().enumerate().map(|(k, c)| (matrix_key(c), k)).collect();
    let group = signed_permutations(d);
    (0..cands.len())
        .filter(|&k| {
            group.iter().all(|w| index.get(&matrix_key(&(w * &cands[k] * w.transpose()))).is_none_or(|&k2| k2 >= k))
        })
        .collect()
}

struct Search<'a> {
    dim: usize,
    relations: &'a [Word],
    rels_of: Vec<Vec<usize>>,
    cands: Vec<CMat>,
    /// Used while every assigned image is scalar, when conjugating a
    /// solution by a signed permutation gives another solution.
    first_choices: Vec<usize>,
    images: Vec<Option<CMat>>,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    /// Assign `g`, then propagate relations with a single free occurrence.
    /// Returns false on a violated relation; assignments are pushed to `trail`.
    fn assign(&mut self, g: usize, m: CMat, trail: &mut Vec<usize>) -> bool {
        self.images[g] = Some(m);
        trail.push(g);
        let mut queue = vec![g];
        let id = CMat::identity(self.dim, self.dim);
        while let Some(h) = queue.pop() {
            for k in 0..self.rels_of[h].len() {
                let r = &self.relations[self.rels_of[h][k]];
                let free: Vec<usize> = r.letters().iter().filter(|l| self.images[l.gen].is_none()).map(|l| l.gen).collect();
                match free.as_slice() {
                    [] => {
                        let prod = self.product(r.letters());
                        if max_abs(&(prod - &id)) > SEARCH_TOL {
                            return false;
                        }
                    }
                    [u] => {
                        let pos = r.letters().iter().position(|l| l.gen == *u).unwrap();
                        let (before, after) = (self.product(&r.letters()[..pos]), self.product(&r.letters()[pos + 1..]));
                        // before * x * after = I
                        let x = before.adjoint() * after.adjoint();
                        let x = if r.letters()[pos].inv { x.adjoint() } else { x };
                        let u = *u;
                        self.images[u] = Some(x);
                        trail.push(u);
                        queue.push(u);
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn product(&self, letters: &[crate::group::Letter]) -> CMat {
        let mut acc = CMat::identity(self.dim, self.dim);
        for l in letters {
            let m = self.images[l.gen].as_ref().unwrap();
            acc = if l.inv { acc * m.adjoint() } else { acc * m };
        }
        acc
    }

    fn undo(&mut self, trail: &mut Vec<usize>, mark: usize) {
        for g in trail.drain(mark..) {
            self.images[g] = None;
        }
    }

    fn dfs(&mut self, trail: &mut Vec<usize>) -> Option<bool> {
        let Some(g) = self.images.iter().position(Option::is_none) else {
            return Some(true);
        };
        let symmetric = self.images.iter().flatten().all(|m| scalar_sign(m).is_some());
        let choices: Vec<usize> = if symmetric { self.first_choices.clone() } else { (0..self.cands.len()).collect() };
        for c in choices {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let mark = trail.len();
            if self.assign(g, self.cands[c].clone(), trail) && self.dfs(trail)? {
                return Some(true);
            }
            self.undo(trail, mark);
        }
        Some(false)
    }
}

/// Backtracking search for a representation in dimension `1, 2, 4, ...` up to
/// `dim_cap`. Generators are assigned in presentation order; a relation with
/// one unassigned occurrence determines that generator. The first branching
/// generator only takes one candidate per signed-permutation conjugacy
/// orbit. Only verified
/// representations are returned.
pub fn find_signed_rep(p: &Presentation, dim_cap: usize, require_j_negative: bool, budget: usize) -> Result<RepOutcome> {
    if ![1, 2, 4, 8].contains(&dim_cap) {
        return Err(Error::precondition("dimension cap must be 1, 2, 4 or 8"));
    }
    let j = p.involution();
    if require_j_negative && j.is_none() {
        return Err(Error::precondition("presentation has no designated involution"));
    }
    let mut rels_of = vec![Vec::new(); p.num_generators()];
    for (k, r) in p.relations().iter().enumerate() {
        for l in r.letters() {
            if rels_of[l.gen].last() != Some(&k) {
                rels_of[l.gen].push(k);
            }
        }
    }
    let mut nodes = 0;
    let mut dim = 1;
    while dim <= dim_cap {
        let cands = candidates(dim);
        let mut s = Search {
            dim,
            relations: p.relations(),
            rels_of: rels_of.clone(),
            first_choices: orbit_representatives(&cands, dim),
            cands,
            images: vec![None; p.num_generators()],
            nodes: 0,
            budget: budget.saturating_sub(nodes),
        };
        let mut trail = Vec::new();
        let ok = match j {
            Some(j) if require_j_negative => s.assign(j, -CMat::identity(dim, dim), &mut trail),
            _ => true,
        };
        let found = if ok { s.dfs(&mut trail) } else { Some(false) };
        nodes += s.nodes;
        match found {
            None => return Ok(RepOutcome::Unknown { nodes, exhausted: false }),
            Some(true) => {
                let images: Vec<CMat> = s.images.into_iter().map(Option::unwrap).collect();
                let sign = j.and_then(|j| scalar_sign(&images[j]));
                let rep = SignedRep { dim, images, involution_sign: sign };
                if rep.verify(p).is_ok() && (!require_j_negative || sign == Some(-1)) {
                    return Ok(RepOutcome::Found(rep));
                }
            }
            Some(false) => {}
        }
        dim *= 2;
    }
    Ok(RepOutcome::Unknown { nodes, exhausted: true })
}

/// The Mermin-Peres operators for [`crate::wagon::magic_square`] as a
/// representation of its solution group (`x_{3r+c+1}` is the square's entry
/// `(r, c)`).
pub fn mermin_peres_rep() -> SignedRep {
    let b = standard_involutions();
    let (i, x, z) = (&b[0], &b[1], &b[2]);
    let y = CMat::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::from(0.0),
    });
    let images = vec![
        kron(x, i),
        kron(i, x),
        kron(x, x),
        kron(i, z),
        kron(z, i),
        kron(z, z),
        kron(x, z),
        kron(z, x),
        kron(&y, &y),
        -CMat::identity(4, 4),
    ];
    SignedRep { dim: 4, images, involution_sign: Some(-1) }
}

/// Perfect commuting strategy on `C^d (x) C^d` with the maximally entangled
/// state: `A_{ij} = rho(x_j) (x) I`, `B_j = I (x) conj(rho(x_j))`. The
/// representation is indexed like the solution group (`x_1..x_n`, then `J`).
pub fn strategy_from_rep(rep: &SignedRep, g: &LinearSystemGame) -> Result<OperatorStrategy> {
    let n = g.num_inputs_b();
    if rep.images.len() < n + 1 {
        return Err(Error::precondition("representation lacks an image for some column"));
    }
    if scalar_sign(&rep.images[n]) != Some(-1) {
        return Err(Error::precondition("the representation must send J to -I"));
    }
    let d = rep.dim;
    let id = CMat::identity(d, d);
    let alice = (0..g.num_inputs_a()).map(|i| g.system().row(i).iter().map(|&j| kron(&rep.images[j], &id)).collect()).collect();
    let bob = (0..n).map(|j| kron(&id, &rep.images[j].conjugate())).collect();
    let mut state = CVec::zeros(d * d);
    for k in 0..d {
        state[k * d + k] = C64::from(1.0 / (d as f64).sqrt());
    }
    measurements_from_observables(g, &ObservableStrategy { dim: d * d, alice, bob, state })
}
