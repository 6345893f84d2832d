use rayon::prelude::*;
use serde::Serialize;

use super::system::LinearSystemZ2;
use crate::error::{Error, Result};
use crate::reductions::DoubledPresentation;

/// Column and row placement of one compiled relation `J^p s_1 ... s_n`.
///
/// Row `f_i` is `a_i + b_i + s_i = [i=1] p`, row `g_i` is
/// `b_i + a_{i+1} + c_i = 0` and row `h_i` is `c_i + d_i + d_{i+1} = 0`,
/// with indices taken cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WagonWheelLayout {
    pub relation: usize,
    pub parity: bool,
    pub shared: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    pub first_row: usize,
}

impl WagonWheelLayout {
    pub fn len(&self) -> usize {
        self.shared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shared.is_empty()
    }

    pub fn f_row(&self, i: usize) -> usize {
        self.first_row + i
    }

    pub fn g_row(&self, i: usize) -> usize {
        self.first_row + self.len() + i
    }

    pub fn h_row(&self, i: usize) -> usize {
        self.first_row + 2 * self.len() + i
    }

    pub fn ancillas(&self) -> impl Iterator<Item = usize> + '_ {
        self.a.iter().chain(&self.b).chain(&self.c).chain(&self.d).copied()
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        self.first_row..self.first_row + 3 * self.len()
    }
}

/// How a relation of the doubled presentation was compiled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gadget {
    Wheel(WagonWheelLayout),
    /// The bare relation `J`: three fresh columns `y` with rows
    /// `y_1 + y_2 + y_3 = 1` and `y_1 + y_2 + y_3 = 0`.
    Involution { relation: usize, y: [usize; 3], first_row: usize },
}

impl Gadget {
    pub fn relation(&self) -> usize {
        match self {
            Gadget::Wheel(l) => l.relation,
            Gadget::Involution { relation, .. } => *relation,
        }
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        match self {
            Gadget::Wheel(l) => l.rows(),
            Gadget::Involution { first_row, .. } => *first_row..*first_row + 2,
        }
    }
}

/// Rows, right-hand sides and layout for one relation.
#[derive(Clone, Debug)]
pub struct Subsystem {
    pub rows: Vec<Vec<usize>>,
    pub rhs: Vec<bool>,
    pub layout: WagonWheelLayout,
}

/// Compile `J^parity s_1 ... s_n` where `shared[i]` is the column of `s_i`.
/// Ancillas are allocated from `first_column` in the order `a, b, c, d`.
pub fn compile_relation(
    relation: usize,
    parity: bool,
    shared: &[usize],
    first_column: usize,
    first_row: usize,
) -> Result<Subsystem> {
    let n = shared.len();
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "relation {relation} has length {n}; the wagon wheel needs at least 3 letters"
        )));
    }
    let block = |k: usize| (0..n).map(|i| first_column + k * n + i).collect::<Vec<_>>();
    let (a, b, c, d) = (block(0), block(1), block(2), block(3));
    let mut rows = Vec::with_capacity(3 * n);
    let mut rhs = Vec::with_capacity(3 * n);
    for i in 0..n {
        rows.push(sorted(vec![a[i], b[i], shared[i]]));
        rhs.push(i == 0 && parity);
    }
    for i in 0..n {
        rows.push(sorted(vec![b[i], a[(i + 1) % n], c[i]]));
        rhs.push(false);
    }
    for i in 0..n {
        rows.push(sorted(vec![c[i], d[i], d[(i + 1) % n]]));
        rhs.push(false);
    }
    let layout = WagonWheelLayout { relation, parity, shared: shared.to_vec(), a, b, c, d, first_row };
    Ok(Subsystem { rows, rhs, layout })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// The compiled system together with the gadget of every compiled relation.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub system: LinearSystemZ2,
    pub gadgets: Vec<Gadget>,
    /// Columns `0..num_shared` are the doubled generators, in generator order.
    pub num_shared: usize,
}

/// Compile the image relations of a doubled presentation. The trailing
/// involution relations `u_s^2, v_s^2, J^2` are imposed by the solution group
/// itself and are not compiled.
pub fn assemble_system(dp: &DoubledPresentation) -> Result<CompiledSystem> {
    let num_shared = dp.num_shared();
    let q = &dp.presentation;
    let mut names: Vec<String> = q.generators()[..num_shared].to_vec();

    enum Plan {
        Wheel { parity: bool, shared: Vec<usize> },
        Bare,
    }
    let mut plans = Vec::with_capacity(dp.num_images);
    let mut offsets = Vec::with_capacity(dp.num_images);
    let (mut col, mut row) = (num_shared, 0usize);
    for k in 0..dp.num_images {
        let (parity, letters) = dp.image_relation(k);
        if letters.iter().any(|l| l.inv || l.gen >= num_shared) {
            return Err(Error::precondition(format!("relation {k} is not of the form J^p s_1 ... s_n")));
        }
        offsets.push((col, row));
        if letters.is_empty() {
            if !parity {
                return Err(Error::Unsupported(format!("relation {k} is empty")));
            }
            plans.push(Plan::Bare);
            col += 3;
            row += 2;
        } else {
            let n = letters.len();
            plans.push(Plan::Wheel { parity, shared: letters.iter().map(|l| l.gen).collect() });
            col += 4 * n;
            row += 3 * n;
        }
    }

    let parts: Vec<Result<(Vec<Vec<usize>>, Vec<bool>, Gadget)>> = plans
        .par_iter()
        .enumerate()
        .map(|(k, plan)| {
            let (c0, r0) = offsets[k];
            match plan {
                Plan::Bare => {
                    let y = [c0, c0 + 1, c0 + 2];
                    Ok((vec![y.to_vec(), y.to_vec()], vec![true, false], Gadget::Involution { relation: k, y, first_row: r0 }))
                }
                Plan::Wheel { parity, shared } => {
                    let sub = compile_relation(k, *parity, shared, c0, r0)?;
                    Ok((sub.rows, sub.rhs, Gadget::Wheel(sub.layout)))
                }
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(row);
    let mut rhs = Vec::with_capacity(row);
    let mut gadgets = Vec::with_capacity(parts.len());
    for part in parts {
        let (r, c, g) = part?;
        match &g {
            Gadget::Wheel(l) => {
                for (tag, block) in [("a", &l.a), ("b", &l.b), ("c", &l.c), ("d", &l.d)] {
                    names.extend((0..block.len()).map(|i| format!("r{}_{}{}", l.relation, tag, i + 1)));
                }
            }
            Gadget::Involution { relation, .. } => {
                names.extend((1..=3).map(|i| format!("r{relation}_y{i}")));
            }
        }
        rows.extend(r);
        rhs.extend(c);
        gadgets.push(g);
    }
    let system = LinearSystemZ2::with_names(col, rows, rhs, names)?;
    Ok(CompiledSystem { system, gadgets, num_shared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVec;
    use crate::group::Presentation;
    use crate::reductions::double_generators;

    #[test]
    fn length_four_counts() {
        let sub = compile_relation(0, true, &[0, 1, 0, 1], 2, 0).unwrap();
        assert_eq!(sub.rows.len(), 12);
        assert_eq!(sub.layout.ancillas().count(), 16);
        assert!(sub.rows.iter().all(|r| r.len() == 3));
        assert_eq!(sub.rhs.iter().filter(|&&c| c).count(), 1);
        assert!(sub.rhs[0]);
    }

    #[test]
    fn row_sum_is_abelianization() {
        let shared = [0, 1, 2, 0, 3];
        let sub = compile_relation(0, true, &shared, 4, 0).unwrap();
        let n = 4 + 20;
        let mut acc = BitVec::zeros(n);
        let mut c = false;
        for (r, &b) in sub.rows.iter().zip(&sub.rhs) {
            acc.xor_assign(&BitVec::from_indices(n, r.iter().copied()));
            c ^= b;
        }
        assert_eq!(acc, BitVec::from_indices(n, shared));
        assert!(c);
    }

    #[test]
    fn short_relation_is_unsupported() {
        assert!(matches!(compile_relation(0, false, &[0, 1], 2, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn assembly_shares_columns() {
        let p = Presentation::parse("gens a J\ninv J\nrel a\nrel J a a\n").unwrap();
        let dp = double_generators(&p).unwrap();
        let cs = assemble_system(&dp).unwrap();
        assert_eq!(cs.num_shared, 2);
        assert_eq!(cs.system.n(), 2 + 16 + 32);
        assert_eq!(cs.system.m(), 12 + 24);
        assert!(cs.system.rows().iter().all(|r| r.len() == 3));
        // u_a appears in flap rows of both relations
        let uses: Vec<usize> = (0..cs.system.m()).filter(|&i| cs.system.row(i).contains(&0)).collect();
        assert_eq!(uses.len(), 2 + 4);
        assert_eq!(cs.system.names()[2], "r0_a1");
    }

    #[test]
    fn bare_involution_gadget() {
        let p = Presentation::parse("gens a J\ninv J\nrel J\n").unwrap();
        let dp = double_generators(&p).unwrap();
        let cs = assemble_system(&dp).unwrap();
        assert_eq!(cs.system.m(), 2);
        assert_eq!(cs.system.rhs(), &[true, false]);
        assert!(matches!(cs.gadgets[0], Gadget::Involution { .. }));
    }
}
