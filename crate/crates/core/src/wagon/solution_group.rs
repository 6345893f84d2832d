use std::collections::BTreeSet;

use super::system::LinearSystemZ2;
use crate::group::{commutator, Letter, Presentation, Word};

/// The solution group of `Mx = c`: generators `x1..xn, J` (column `j` is
/// generator `j`, `J` is generator `n`), with relations in the order
/// `x_j^2`, `J^2`, `[x_j, J]`, one row product `x_{j1} ... x_{jk} J^{c_i}` per
/// row (ascending columns), and `[x_j, x_k]` for each pair `j < k` that shares a row.
pub fn solution_group(sys: &LinearSystemZ2) -> Presentation {
    let n = sys.n();
    let j = Word::single(Letter::pos(n));
    let x = |k: usize| Word::single(Letter::pos(k));
    let mut gens: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    gens.push("J".to_owned());
    let mut rels = Vec::new();
    for k in 0..n {
        rels.push(x(k).pow(2));
    }
    rels.push(j.pow(2));
    for k in 0..n {
        rels.push(commutator(&x(k), &j));
    }
    let mut pairs = BTreeSet::new();
    for (row, &c) in sys.rows().iter().zip(sys.rhs()) {
        let mut r = Word::from_letters(row.iter().map(|&k| Letter::pos(k)).collect());
        if c {
            r.push(Letter::pos(n));
        }
        rels.push(r);
        for (a, &p) in row.iter().enumerate() {
            for &q in &row[a + 1..] {
                pairs.insert((p, q));
            }
        }
    }
    for (p, q) in pairs {
        rels.push(commutator(&x(p), &x(q)));
    }
    Presentation::new(gens, rels, Some(n)).expect("solution group generators are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wagon::system::magic_square;

    #[test]
    fn single_row() {
        let sys = LinearSystemZ2::new(1, vec![vec![0]], vec![false]).unwrap();
        let g = solution_group(&sys);
        let rels: Vec<String> = g.relations().iter().map(|r| g.format_word(r)).collect();
        assert_eq!(rels, vec!["x1 x1", "J J", "x1 J x1' J'", "x1"]);
    }

    #[test]
    fn magic_square_counts() {
        let g = solution_group(&magic_square());
        assert_eq!(g.num_generators(), 10);
        assert_eq!(g.relations().len(), 9 + 1 + 9 + 6 + 18);
        assert_eq!(g.format_word(&g.relations()[19 + 5]), "x3 x6 x9 J");
    }
}
