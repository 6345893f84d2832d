use std::collections::BTreeMap;

use serde::Serialize;

use crate::gf2::BitVec;
use crate::wagon::{CompiledSystem, Gadget, LinearSystemZ2, WagonWheelLayout};

/// A solution of `Mx = 0`, read as the 1-dimensional representation
/// `x_i -> (-1)^{y_i}`, `J -> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub label: String,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub cycles: Vec<Cycle>,
    /// Columns sent to 1 by every cycle (`x_i = 1` or `J` not excluded).
    pub unresolved_generators: Vec<usize>,
    /// Pairs of columns that no cycle tells apart.
    pub unresolved_pairs: Vec<(usize, usize)>,
    /// Cycles that failed to replay as solutions of `Mx = 0`.
    pub invalid_cycles: Vec<String>,
    #[serde(skip)]
    signatures: Vec<BitVec>,
}

impl SeparationReport {
    pub fn resolved(&self) -> bool {
        self.unresolved_generators.is_empty() && self.unresolved_pairs.is_empty() && self.invalid_cycles.is_empty()
    }

    /// A cycle containing exactly one of `i`, `j` (or containing `i` when `i == j`).
    pub fn certificate(&self, i: usize, j: usize) -> Option<&Cycle> {
        let (si, sj) = (&self.signatures[i], &self.signatures[j]);
        (0..self.cycles.len()).find(|&k| if i == j { si.get(k) } else { si.get(k) != sj.get(k) }).map(|k| &self.cycles[k])
    }
}

pub fn is_cycle(sys: &LinearSystemZ2, edges: &[usize]) -> bool {
    sys.matrix().mul_vec(&BitVec::from_indices(sys.n(), edges.iter().copied())).is_zero()
}

/// The inner cycle `{d_1, ..., d_n}` of a wheel.
pub fn inner_cycle(l: &WagonWheelLayout) -> Vec<usize> {
    l.d.clone()
}

/// For a shared column `s`, the edge `s` together with the outer-cycle paths
/// `s_{i_1}, b_{i_1}, a_{i_1+1}, ..., a_{i_2}, s_{i_2}` joining consecutive
/// pairs of occurrences of `s` in every wheel. `None` if some wheel has an odd
/// number of occurrences. `n` is the number of columns.
pub fn shared_cycle(n: usize, layouts: &[&WagonWheelLayout], s: usize) -> Option<Vec<usize>> {
    let mut edges = BitVec::zeros(n);
    edges.set(s, true);
    for l in layouts {
        let occ: Vec<usize> = (0..l.len()).filter(|&i| l.shared[i] == s).collect();
        if occ.len() % 2 == 1 {
            return None;
        }
        for pair in occ.chunks(2) {
            for i in pair[0]..pair[1] {
                edges.flip(l.b[i]);
                edges.flip(l.a[i + 1]);
            }
        }
    }
    Some(edges.ones().collect())
}

/// Separate every generator of the solution group of the compiled system
/// (with `J -> 1`) using the inner cycles, the shared-generator cycles and a
/// nullspace basis of `Mx = 0` for the remaining ancillas.
pub fn cycle_separation(cs: &CompiledSystem) -> SeparationReport {
    let sys = &cs.system;
    let wheels: Vec<&WagonWheelLayout> = cs
        .gadgets
        .iter()
        .filter_map(|g| match g {
            Gadget::Wheel(l) => Some(l),
            Gadget::Involution { .. } => None,
        })
        .collect();
    let mut cycles = Vec::new();
    for l in &wheels {
        cycles.push(Cycle { label: format!("inner r{}", l.relation), edges: inner_cycle(l) });
    }
    let mut uncovered = Vec::new();
    for s in 0..cs.num_shared {
        match shared_cycle(sys.n(), &wheels, s) {
            Some(edges) => cycles.push(Cycle { label: format!("shared {}", sys.names()[s]), edges }),
            None => uncovered.push(s),
        }
    }
    for (k, v) in sys.matrix().nullspace().iter().enumerate() {
        cycles.push(Cycle { label: format!("basis {k}"), edges: v.ones().collect() });
    }
    separate(sys, cycles)
}

/// Separation report for an arbitrary family of candidate cycles.
pub fn separate(sys: &LinearSystemZ2, cycles: Vec<Cycle>) -> SeparationReport {
    let n = sys.n();
    let invalid_cycles = cycles.iter().filter(|c| !is_cycle(sys, &c.edges)).map(|c| c.label.clone()).collect();
    let mut signatures = vec![BitVec::zeros(cycles.len()); n];
    for (k, c) in cycles.iter().enumerate() {
        for &e in &c.edges {
            signatures[e].set(k, true);
        }
    }
    let unresolved_generators = (0..n).filter(|&i| signatures[i].is_zero()).collect();
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, s) in signatures.iter().enumerate() {
        classes.entry(s.ones().collect()).or_default().push(i);
    }
    let mut unresolved_pairs = Vec::new();
    for cols in classes.values() {
        for (a, &i) in cols.iter().enumerate() {
            for &j in &cols[a + 1..] {
                unresolved_pairs.push((i, j));
            }
        }
    }
    unresolved_pairs.sort_unstable();
    SeparationReport { cycles, unresolved_generators, unresolved_pairs, invalid_cycles, signatures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Presentation;
    use crate::wagon::compile_presentation;

    fn compiled(text: &str) -> CompiledSystem {
        compile_presentation(&Presentation::parse(text).unwrap()).unwrap().compiled
    }

    #[test]
    fn wheel_generators_are_separated() {
        let cs = compiled("gens a b J\ninv J\nrel a a\nrel a b a' b' J\n");
        let r = cycle_separation(&cs);
        assert!(r.invalid_cycles.is_empty());
        assert!(r.resolved(), "{:?} {:?}", r.unresolved_generators, &r.unresolved_pairs[..r.unresolved_pairs.len().min(5)]);
        for l in cs.gadgets.iter().filter_map(|g| if let Gadget::Wheel(l) = g { Some(l) } else { None }) {
            assert!(is_cycle(&cs.system, &inner_cycle(l)));
            for i in 0..l.len() {
                assert!(r.certificate(l.a[i], l.b[i]).is_some());
            }
        }
        for s in 0..cs.num_shared {
            let c = r.cycles.iter().find(|c| c.label == format!("shared {}", cs.system.names()[s])).unwrap();
            assert!(c.edges.iter().filter(|&&e| e < cs.num_shared).eq([s].iter()));
        }
    }

    #[test]
    fn repeated_column_is_unresolved() {
        let sys = LinearSystemZ2::new(3, vec![vec![0, 1], vec![1, 2]], vec![false, false]).unwrap();
        let basis = sys.matrix().nullspace().iter().map(|v| Cycle { label: "b".into(), edges: v.ones().collect() }).collect();
        let r = separate(&sys, basis);
        assert_eq!(r.unresolved_pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert!(r.unresolved_generators.is_empty());
    }
}
