use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

/// A symmetric matrix as its full list of non-zero entries (both triangles).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// Add `v` at `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i, j, v));
        if i != j {
            self.entries.push((j, i, v));
        }
    }

    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * x[(i, j)]).sum()
    }

    pub fn add_to(&self, acc: &mut DMatrix<f64>, scale: f64) {
        for &(i, j, v) in &self.entries {
            acc[(i, j)] += scale * v;
        }
    }
}

/// `max b^T y` subject to `C - sum y_k A_k >= 0`, with the paired problem
/// `min <C, X>` subject to `<A_k, X> = b_k`, `X >= 0`.
#[derive(Clone, Debug)]
pub struct Sdp {
    pub dim: usize,
    pub c: DMatrix<f64>,
    pub a: Vec<SparseSym>,
    pub b: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Converged,
    MaxIter,
    /// The Newton system became singular.
    NumericalFailure,
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual|`.
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    #[serde(skip)]
    pub y: DVector<f64>,
    #[serde(skip)]
    pub z: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 200, gap_tol: 1e-8, feas_tol: 1e-9, step: 0.95 }
    }
}

enum NewtonSolver {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl NewtonSolver {
    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            NewtonSolver::Cholesky(c) => Some(c.solve(rhs)),
            NewtonSolver::Lu(lu) => lu.solve(rhs),
        }
    }
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// Largest `alpha <= 1` (scaled by `step`) with `x + alpha dx` positive definite.
fn step_length(x: &DMatrix<f64>, dx: &DMatrix<f64>, step: f64) -> Option<f64> {
    let l = x.clone().cholesky()?.l();
    let li = l.try_inverse()?;
    let s = sym(&li * dx * li.transpose());
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    Some(if lmin >= 0.0 { 1.0 } else { (step * -1.0 / lmin).min(1.0) })
}

impl Sdp {
    fn op(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.dot(x)))
    }

    fn adj(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (a, &v) in self.a.iter().zip(y.iter()) {
            a.add_to(&mut acc, v);
        }
        acc
    }

    /// `M_kl = tr(A_k X A_l Z^{-1})`, row by row in parallel.
    fn schur(&self, x: &DMatrix<f64>, zi: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.a.len();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|k| {
                let ak = &self.a[k].entries;
                (0..m)
                    .map(|l| {
                        let mut s = 0.0;
                        for &(i, j, u) in ak {
                            for &(p, q, v) in &self.a[l].entries {
                                s += u * v * x[(j, p)] * zi[(q, i)];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        DMatrix::from_fn(m, m, |k, l| 0.5 * (rows[k][l] + rows[l][k]))
    }

    /// Infeasible primal-dual interior-point method with the HKM direction
    /// and a Mehrotra predictor-corrector step.
    pub fn solve(&self, opts: &SolverOptions) -> SdpSolution {
        let n = self.dim;
        let id = DMatrix::<f64>::identity(n, n);
        let mut x = id.clone();
        let mut z = id.clone();
        let mut y = DVector::zeros(self.a.len());
        let bnorm = 1.0 + self.b.norm();
        let cnorm = 1.0 + self.c.norm();
        let mut status = SdpStatus::MaxIter;
        let mut it = 0;
        loop {
            let rp = &self.b - self.op(&x);
            let rd = &self.c - &z - self.adj(&y);
            let (pobj, dobj) = (inner(&self.c, &x), self.b.dot(&y));
            let pinf = rp.norm() / bnorm;
            let dinf = rd.norm() / cnorm;
            let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            if relgap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
                status = SdpStatus::Converged;
            }
            if status == SdpStatus::Converged || it >= opts.max_iter {
                return self.finish(status, it, x, y, z);
            }
            it += 1;
            let mu = inner(&x, &z) / n as f64;
            let Some(zi) = z.clone().cholesky().map(|c| sym(c.inverse())) else {
                return self.finish(SdpStatus::NumericalFailure, it, x, y, z);
            };
            let schur = self.schur(&x, &zi);
            // near the optimum the Schur complement may lose definiteness to rounding
            let solver = match schur.clone().cholesky() {
                Some(c) => NewtonSolver::Cholesky(c),
                None => NewtonSolver::Lu(schur.lu()),
            };
            let xrdzi = &x * &rd * &zi;
            let direction = |t: &DMatrix<f64>| {
                let rhs = &rp - self.op(t) + self.op(&xrdzi);
                let dy = solver.solve(&rhs)?;
                let dz = &rd - self.adj(&dy);
                let dx = sym(t - &x * &dz * &zi);
                Some((dx, dy, dz))
            };
            let Some((dxa, _, dza)) = direction(&(-&x)) else {
                return self.finish(SdpStatus::NumericalFailure, it, x, y, z);
            };
            let (Some(ap), Some(ad)) = (step_length(&x, &dxa, 1.0), step_length(&z, &dza, 1.0)) else {
                return self.finish(SdpStatus::NumericalFailure, it, x, y, z);
            };
            let mu_aff = inner(&(&x + &dxa * ap), &(&z + &dza * ad)) / n as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            let t = &zi * (sigma * mu) - &x - &dxa * &dza * &zi;
            let Some((dx, dy, dz)) = direction(&t) else {
                return self.finish(SdpStatus::NumericalFailure, it, x, y, z);
            };
            let (Some(ap), Some(ad)) = (step_length(&x, &dx, opts.step), step_length(&z, &dz, opts.step)) else {
                return self.finish(SdpStatus::NumericalFailure, it, x, y, z);
            };
            x = sym(&x + &dx * ap);
            y += &dy * ad;
            z = sym(&z + &dz * ad);
        }
    }

    fn finish(&self, status: SdpStatus, iterations: usize, x: DMatrix<f64>, y: DVector<f64>, z: DMatrix<f64>) -> SdpSolution {
        let primal_objective = inner(&self.c, &x);
        let dual_objective = self.b.dot(&y);
        SdpSolution {
            status,
            iterations,
            primal_objective,
            dual_objective,
            gap: (primal_objective - dual_objective).abs(),
            primal_infeasibility: (&self.b - self.op(&x)).norm() / (1.0 + self.b.norm()),
            dual_infeasibility: (&self.c - &z - self.adj(&y)).norm() / (1.0 + self.c.norm()),
            y,
            z,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_correlation() {
        // max y subject to [[1, y], [y, 1]] >= 0 has optimum 1
        let mut a = SparseSym::default();
        a.add(0, 1, -1.0);
        let sdp = Sdp { dim: 2, c: DMatrix::identity(2, 2), a: vec![a], b: DVector::from_element(1, 1.0) };
        let s = sdp.solve(&SolverOptions::default());
        assert_eq!(s.status, SdpStatus::Converged);
        assert!((s.dual_objective - 1.0).abs() < 1e-7);
        assert!((s.primal_objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn three_by_three_elliptope() {
        // max -(y01 + y02 + y12) over 3x3 correlation matrices: optimum 3/2
        let mut a = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut m = SparseSym::default();
            m.add(i, j, -1.0);
            a.push(m);
        }
        let sdp = Sdp { dim: 3, c: DMatrix::identity(3, 3), a, b: DVector::from_element(3, -1.0) };
        let s = sdp.solve(&SolverOptions::default());
        assert_eq!(s.status, SdpStatus::Converged);
        assert!((s.primal_objective - 1.5).abs() < 1e-7, "{s:?}");
    }
}
