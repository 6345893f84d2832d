use std::fmt;

/// A generator index raised to the power +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub const fn pos(gen: usize) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn neg(gen: usize) -> Self {
        Letter { gen, inv: true }
    }

    pub const fn new(gen: usize, exponent: i8) -> Self {
        Letter { gen, inv: exponent < 0 }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn exponent(self) -> i8 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// A word in the free group, stored letter by letter and not necessarily reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `self^k` for `k >= 0`, `self^-1` repeated for `k < 0`.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out.extend_from(&base);
        }
        out
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// The unique freely reduced representative.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    /// `z self z^-1`, unreduced.
    pub fn conjugated_by(&self, z: &Word) -> Word {
        z.concat(self).concat(&z.inverse())
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotated(&self, k: usize) -> Word {
        let k = if self.0.is_empty() { 0 } else { k % self.0.len() };
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Apply a letter-wise substitution (a free-group homomorphism).
    pub fn substitute(&self, image: impl Fn(usize) -> Word) -> Word {
        let mut out = Word::empty();
        for &l in &self.0 {
            let w = image(l.gen);
            if l.inv {
                out.extend_from(&w.inverse());
            } else {
                out.extend_from(&w);
            }
        }
        out
    }

    /// Sum of exponents of `gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.exponent() as i64)
            .sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex: shorter words first, then lexicographic by (generator, sign).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| format!("g{}{}", l.gen, if l.inv { "'" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Free reduction of `w`.
pub fn reduce_word(w: &Word) -> Word {
    w.reduced()
}

/// Group commutator `[a, b] = a b a^-1 b^-1`, unreduced.
pub fn commutator(a: &Word, b: &Word) -> Word {
    a.concat(b).concat(&a.inverse()).concat(&b.inverse())
}

/// All reduced words over `num_gens` generators of length exactly `len`,
/// in shortlex order.
pub fn reduced_words_of_length(num_gens: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::<Letter>::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2 * num_gens.max(1));
        for w in &out {
            for gen in 0..num_gens {
                for inv in [false, true] {
                    let l = Letter { gen, inv };
                    if let Some(&last) = w.last() {
                        if last.cancels(l) {
                            continue;
                        }
                    }
                    let mut nw = w.clone();
                    nw.push(l);
                    next.push(nw);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(Word).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> Letter {
        Letter::pos(0)
    }
    fn b() -> Letter {
        Letter::pos(1)
    }

    #[test]
    fn cancels_adjacent_pair() {
        let w = Word::from_letters(vec![a(), a().inverse(), b()]);
        assert_eq!(w.reduced(), Word::single(b()));
    }

    #[test]
    fn inner_cancellation() {
        let w = Word::from_letters(vec![a(), b(), b().inverse(), a()]);
        assert_eq!(w.reduced(), Word::from_letters(vec![a(), a()]));
    }

    #[test]
    fn empty_stays_empty() {
        assert!(Word::empty().reduced().is_empty());
    }

    #[test]
    fn enumerates_reduced_words() {
        // 1 generator: a^k and a^-k
        assert_eq!(reduced_words_of_length(1, 3).len(), 2);
        // 2 generators: 4 * 3^(n-1)
        assert_eq!(reduced_words_of_length(2, 3).len(), 36);
        assert!(reduced_words_of_length(2, 3).iter().all(|w| w.is_reduced()));
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..24)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|(gen, inv)| Letter { gen, inv }).collect()))
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent_and_shrinks(w in arb_word()) {
            let r = w.reduced();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.reduced(), r.clone());
            prop_assert!(r.len() <= w.len());
        }

        #[test]
        fn inverse_cancels(w in arb_word()) {
            prop_assert!(w.concat(&w.inverse()).reduced().is_empty());
        }
    }
}
