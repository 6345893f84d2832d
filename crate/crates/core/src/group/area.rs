use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::presentation::Presentation;
use super::word::{reduced_words_of_length, Letter, Word};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// One factor `z r^a z^-1` of an area certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: i8,
}

/// An explicit factorisation of `target` as a product of conjugated relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AreaCertificate {
    pub target: Word,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub area: usize,
    pub max_conjugator_length: usize,
}

impl AreaCertificate {
    pub fn empty(target: Word) -> Self {
        AreaCertificate { target, steps: Vec::new() }
    }

    pub fn area(&self) -> usize {
        self.steps.len()
    }

    pub fn max_conjugator_length(&self) -> usize {
        self.steps.iter().map(|s| s.conjugator.reduced().len()).max().unwrap_or(0)
    }

    /// The unreduced product of the factors.
    pub fn product(&self, relations: &[Word]) -> Result<Word> {
        let mut out = Word::empty();
        for (k, s) in self.steps.iter().enumerate() {
            let r = relations.get(s.relator).ok_or_else(|| {
                Error::malformed(format!("step {k}: relator index {} out of range", s.relator))
            })?;
            if s.sign != 1 && s.sign != -1 {
                return Err(Error::malformed(format!("step {k}: sign must be +1 or -1")));
            }
            out.extend_from(&r.pow(s.sign as i64).conjugated_by(&s.conjugator));
        }
        Ok(out)
    }

    /// The inverse certificate: factors reversed with signs flipped.
    pub fn inverted(&self) -> AreaCertificate {
        AreaCertificate {
            target: self.target.inverse(),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step { conjugator: s.conjugator.clone(), relator: s.relator, sign: -s.sign })
                .collect(),
        }
    }

    /// Line format: `target <word>` then one `step z|r_index|sign` per factor.
    /// Relator indices are 0-based positions in the presentation's relation list.
    pub fn to_text(&self, p: &Presentation) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target {}", p.format_word(&self.target));
        for st in &self.steps {
            let _ = writeln!(
                s,
                "step {}|{}|{}",
                p.format_word(&st.conjugator),
                st.relator,
                if st.sign > 0 { "+1" } else { "-1" }
            );
        }
        s
    }

    pub fn parse(p: &Presentation, text: &str) -> Result<Self> {
        let mut target = None;
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::malformed(format!("certificate line {}: {m}", lineno + 1));
            if let Some(rest) = line.strip_prefix("target") {
                target = Some(p.parse_word(rest)?);
            } else if let Some(rest) = line.strip_prefix("step") {
                let parts: Vec<&str> = rest.split('|').collect();
                if parts.len() != 3 {
                    return Err(bad("expected z|r_index|sign"));
                }
                let conjugator = p.parse_word(parts[0])?;
                let relator = parts[1].trim().parse::<usize>().map_err(|_| bad("bad relator index"))?;
                let sign = match parts[2].trim() {
                    "+1" | "1" | "+" => 1,
                    "-1" | "-" => -1,
                    _ => return Err(bad("sign must be +1 or -1")),
                };
                steps.push(Step { conjugator, relator, sign });
            } else {
                return Err(bad("unknown keyword"));
            }
        }
        let target = target.ok_or_else(|| Error::malformed("certificate has no target line"))?;
        Ok(AreaCertificate { target, steps })
    }
}

/// Check that the product of the certificate's factors freely reduces to the target.
pub fn verify_area_certificate(p: &Presentation, cert: &AreaCertificate) -> Result<CertificateCheck> {
    let prod = cert.product(p.relations())?;
    Ok(CertificateCheck {
        valid: prod.reduced() == cert.target.reduced(),
        area: cert.area(),
        max_conjugator_length: cert.max_conjugator_length(),
    })
}

/// Conjugator length cap `k l + l + |w|` for an area-`k` certificate of `w`.
pub fn conjugator_cap(p: &Presentation, w: &Word, max_area: usize) -> usize {
    let l = p.max_relation_len();
    max_area * l + l + w.reduced().len()
}

#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Maximum number of distinct conjugated-relator factors enumerated.
    pub max_factors: usize,
    /// Maximum number of search states visited.
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_factors: 200_000, max_states: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(AreaCertificate),
    /// The search space under the conjugator cap was exhausted.
    NotFound,
    /// A [`SearchLimits`] budget was hit before the space was exhausted.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&AreaCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

pub fn search_area_certificate(p: &Presentation, w: &Word, max_area: usize) -> SearchOutcome {
    search_area_certificate_with(p, w, max_area, SearchLimits::default())
}

struct Factor {
    inverse: Word,
    step: Step,
}

/// Breadth-first search by area over remaining words `f_k^-1 ... f_1^-1 w`.
///
/// A remaining word that is itself a conjugate of a relator closes the branch
/// directly (free-group conjugacy is decided exactly). Intermediate factors are
/// enumerated in shortlex conjugator order, then relator index, then sign, so
/// the first certificate found has minimal area and the result is deterministic.
pub fn search_area_certificate_with(
    p: &Presentation,
    w: &Word,
    max_area: usize,
    limits: SearchLimits,
) -> SearchOutcome {
    let target = w.reduced();
    if target.is_empty() {
        return SearchOutcome::Found(AreaCertificate::empty(w.clone()));
    }
    if max_area == 0 || p.relations().iter().all(Word::is_empty) {
        return SearchOutcome::NotFound;
    }
    let cap = conjugator_cap(p, &target, max_area);
    let mut factors: Option<Vec<Factor>> = None;

    // parent links: state id -> (parent id, factor index)
    let mut states: Vec<(Word, usize, usize)> = vec![(target.clone(), usize::MAX, usize::MAX)];
    let mut seen: HashSet<Word> = HashSet::new();
    seen.insert(target);
    let mut frontier = vec![0usize];
    for level in 1..=max_area {
        for &sid in &frontier {
            if let Some(last) = direct_factor(p, &states[sid].0, cap) {
                let mut steps = vec![last];
                let mut cur = sid;
                while states[cur].1 != usize::MAX {
                    steps.push(factors.as_ref().unwrap()[states[cur].2].step.clone());
                    cur = states[cur].1;
                }
                steps.reverse();
                return SearchOutcome::Found(AreaCertificate { target: w.clone(), steps });
            }
        }
        if level == max_area {
            break;
        }
        if factors.is_none() {
            match enumerate_factors(p, cap, limits.max_factors) {
                Some(f) => factors = Some(f),
                None => return SearchOutcome::BudgetExhausted,
            }
        }
        let fs = factors.as_ref().unwrap();
        let max_factor_len = fs.iter().map(|f| f.inverse.len()).max().unwrap_or(0);
        let length_bound = (max_area - level) * max_factor_len;
        let mut next = Vec::new();
        for &sid in &frontier {
            let u = states[sid].0.clone();
            for (fi, f) in fs.iter().enumerate() {
                let nu = f.inverse.concat(&u).reduced();
                if nu.is_empty() || nu.len() > length_bound || seen.contains(&nu) {
                    continue;
                }
                if states.len() >= limits.max_states {
                    return SearchOutcome::BudgetExhausted;
                }
                seen.insert(nu.clone());
                states.push((nu, sid, fi));
                next.push(states.len() - 1);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    SearchOutcome::NotFound
}

/// Split a reduced word as `c u c^-1` with `u` cyclically reduced.
fn cyclic_core(w: &Word) -> (Word, Word) {
    let l = w.letters();
    let mut k = 0;
    while 2 * k + 1 < l.len() && l[k].inverse() == l[l.len() - 1 - k] {
        k += 1;
    }
    (Word::from_letters(l[..k].to_vec()), Word::from_letters(l[k..l.len() - k].to_vec()))
}

/// If the reduced word `u` equals `z r^a z^-1` for a relator `r` and some `z`
/// with `|z| <= cap`, return the step with the shortlex-least such `z`
/// among those produced by cyclic rotations.
fn direct_factor(p: &Presentation, u: &Word, cap: usize) -> Option<Step> {
    let (c, core) = cyclic_core(u);
    let mut best: Option<Step> = None;
    for (idx, r) in p.relations().iter().enumerate() {
        for sign in [1i8, -1] {
            let rho = r.pow(sign as i64).reduced();
            let (d, rcore) = cyclic_core(&rho);
            if rcore.len() != core.len() || core.is_empty() {
                continue;
            }
            for k in 0..rcore.len() {
                if rcore.rotated(k) != core {
                    continue;
                }
                let y = Word::from_letters(rcore.letters()[..k].to_vec());
                let z = c.concat(&y.inverse()).concat(&d.inverse()).reduced();
                if z.len() > cap {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => z < b.conjugator,
                };
                if better {
                    best = Some(Step { conjugator: z, relator: idx, sign });
                }
            }
        }
    }
    best
}

fn enumerate_factors(p: &Presentation, cap: usize, max_factors: usize) -> Option<Vec<Factor>> {
    let mut out = Vec::new();
    let mut seen: HashSet<Word> = HashSet::new();
    for len in 0..=cap {
        for z in reduced_words_of_length(p.num_generators(), len) {
            for (idx, r) in p.relations().iter().enumerate() {
                if r.is_empty() {
                    continue;
                }
                for sign in [1i8, -1] {
                    let f = r.pow(sign as i64).conjugated_by(&z).reduced();
                    if f.is_empty() || !seen.insert(f.clone()) {
                        continue;
                    }
                    out.push(Factor {
                        inverse: f.inverse(),
                        step: Step { conjugator: z.clone(), relator: idx, sign },
                    });
                    if out.len() > max_factors {
                        return None;
                    }
                }
            }
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DehnEntry {
    /// Minimal area found within the search cap.
    Area { area: usize },
    /// Certified non-trivial by the mod-2 exponent-sum invariant.
    Nontrivial,
    /// Neither a certificate nor a non-triviality witness was found.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct DehnRow {
    pub word: String,
    pub length: usize,
    #[serde(flatten)]
    pub entry: DehnEntry,
}

/// Exhaustive table over all reduced words of length `<= n`.
pub fn dehn_bounded(p: &Presentation, n: usize, max_area: usize) -> Vec<DehnRow> {
    let relator_parities: Vec<BitVec> = p.relations().iter().map(|r| parity_vector(p, r)).collect();
    let span = crate::gf2::RowSpan::new(p.num_generators(), &relator_parities);
    let mut rows = Vec::new();
    for len in 0..=n {
        for w in reduced_words_of_length(p.num_generators(), len) {
            let entry = if w.is_empty() {
                DehnEntry::Area { area: 0 }
            } else if !span.contains(&parity_vector(p, &w)) {
                DehnEntry::Nontrivial
            } else {
                match search_area_certificate(p, &w, max_area) {
                    SearchOutcome::Found(c) => DehnEntry::Area { area: c.area() },
                    _ => DehnEntry::Unknown,
                }
            };
            rows.push(DehnRow { word: p.format_word(&w), length: len, entry });
        }
    }
    rows
}

/// Largest area among rows with a certificate: a lower bound on the Dehn function at `n`.
pub fn dehn_lower_bound(rows: &[DehnRow]) -> usize {
    rows.iter()
        .filter_map(|r| match r.entry {
            DehnEntry::Area { area } => Some(area),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn parity_vector(p: &Presentation, w: &Word) -> BitVec {
    let mut v = BitVec::zeros(p.num_generators());
    for l in w.letters() {
        v.flip(l.gen);
    }
    v
}

/// Lookup from cyclic rotations of `r^{+1}` and `r^{-1}` to `(relator, sign, rotation)`.
#[derive(Clone, Debug)]
pub struct RelatorIndex {
    relations: Vec<Word>,
    map: HashMap<Vec<Letter>, (usize, i8, usize)>,
}

impl RelatorIndex {
    pub fn new(relations: &[Word]) -> Self {
        let mut map = HashMap::new();
        for (idx, r) in relations.iter().enumerate() {
            for sign in [1i8, -1] {
                let ra = r.pow(sign as i64);
                for k in 0..ra.len() {
                    map.entry(ra.rotated(k).into_letters()).or_insert((idx, sign, k));
                }
            }
        }
        RelatorIndex { relations: relations.to_vec(), map }
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    pub fn lookup(&self, rho: &[Letter]) -> Option<(usize, i8, usize)> {
        self.map.get(rho).copied()
    }
}

/// Builds a certificate for a word by a sequence of local rewrites, each
/// justified by one relator, until the word is empty.
///
/// Rewriting a segment `old` at position `k` of `u = p old q` into `new` peels
/// off the factor `(p old) rho (p old)^-1` with `rho = new^-1 old`, leaving
/// `p new q`. The current word is never reduced implicitly.
pub struct Peeler<'a> {
    index: &'a RelatorIndex,
    current: Vec<Letter>,
    outer: Word,
    steps: Vec<Step>,
}

impl<'a> Peeler<'a> {
    pub fn new(index: &'a RelatorIndex, word: &Word) -> Self {
        Peeler { index, current: word.letters().to_vec(), outer: Word::empty(), steps: Vec::new() }
    }

    pub fn current(&self) -> &[Letter] {
        &self.current
    }

    pub fn area(&self) -> usize {
        self.steps.len()
    }

    /// Replace `current[pos..pos + old.len()]` (which must equal `old`) by `new`.
    pub fn rewrite(&mut self, pos: usize, old: &[Letter], new: &[Letter]) -> Result<()> {
        if self.current.get(pos..pos + old.len()) != Some(old) {
            return Err(Error::precondition(format!(
                "segment {} not found at position {pos}",
                Word::from(old.to_vec())
            )));
        }
        // rho = new^-1 old, so the inserted word is rho^-1 = old^-1 new
        let mut rho: Vec<Letter> = new.iter().rev().map(|l| l.inverse()).collect();
        rho.extend_from_slice(old);
        let (idx, sign, k) = self.index.lookup(&rho).ok_or_else(|| {
            Error::precondition(format!(
                "rewrite {} -> {} is not justified by a relator",
                Word::from(old.to_vec()),
                Word::from(new.to_vec())
            ))
        })?;
        // rho = y^-1 r^a y with y the first k letters of r^a
        let ra = self.index.relations[idx].pow(sign as i64);
        let y = Word::from_letters(ra.letters()[..k].to_vec());
        // factor: w rho w^-1 with w = outer p old, i.e. (w y^-1) r^a (w y^-1)^-1
        let w = Word::from_letters(self.current[..pos + old.len()].to_vec());
        let conj = self.outer.concat(&w).concat(&y.inverse()).reduced();
        self.steps.push(Step { conjugator: conj, relator: idx, sign });
        self.current.splice(pos..pos + old.len(), new.iter().copied());
        Ok(())
    }

    /// Rewrite the first occurrence of `old`.
    pub fn rewrite_first(&mut self, old: &[Letter], new: &[Letter]) -> Result<()> {
        let pos = find(&self.current, old)
            .ok_or_else(|| Error::precondition(format!("segment {} not found", Word::from(old.to_vec()))))?;
        self.rewrite(pos, old, new)
    }

    /// Free cancellation of the pair at `pos, pos + 1`.
    pub fn cancel(&mut self, pos: usize) -> Result<()> {
        match (self.current.get(pos), self.current.get(pos + 1)) {
            (Some(&a), Some(&b)) if a.inverse() == b => {
                self.current.drain(pos..pos + 2);
                Ok(())
            }
            _ => Err(Error::precondition(format!("no cancelling pair at position {pos}"))),
        }
    }

    /// Free reduction of the whole current word.
    pub fn reduce(&mut self) {
        self.current = Word::from_letters(std::mem::take(&mut self.current)).reduced().into_letters();
    }

    /// Replace `u = b g` (with `|b| = k`) by its rotation `g b`, recording `b` as an outer conjugator.
    pub fn rotate(&mut self, k: usize) {
        let beta = Word::from_letters(self.current[..k].to_vec());
        self.current.rotate_left(k);
        self.outer = self.outer.concat(&beta).reduced();
    }

    pub fn into_steps(mut self) -> Result<Vec<Step>> {
        self.reduce();
        if !self.current.is_empty() {
            return Err(Error::Analysis(format!(
                "certificate construction left residue {}",
                Word::from(self.current)
            )));
        }
        Ok(self.steps)
    }
}

fn find(hay: &[Letter], needle: &[Letter]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    hay.windows(needle.len()).position(|w| w == needle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pres(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn relator_itself_has_area_one() {
        let p = pres("gens a b\nrel a b a' b'\n");
        let cert = AreaCertificate {
            target: p.relations()[0].clone(),
            steps: vec![Step { conjugator: Word::empty(), relator: 0, sign: 1 }],
        };
        let chk = verify_area_certificate(&p, &cert).unwrap();
        assert!(chk.valid);
        assert_eq!(chk.area, 1);
    }

    #[test]
    fn single_conjugate() {
        let p = pres("gens a b\nrel a a\n");
        let z = p.parse_word("b a'").unwrap();
        let target = p.relations()[0].conjugated_by(&z);
        let cert = AreaCertificate { target, steps: vec![Step { conjugator: z, relator: 0, sign: 1 }] };
        let chk = verify_area_certificate(&p, &cert).unwrap();
        assert!(chk.valid);
        assert_eq!(chk.max_conjugator_length, 2);
    }

    #[test]
    fn wrong_product_is_invalid() {
        let p = pres("gens a b\nrel b b\n");
        let cert = AreaCertificate {
            target: p.parse_word("a").unwrap(),
            steps: vec![Step { conjugator: Word::empty(), relator: 0, sign: 1 }],
        };
        assert!(!verify_area_certificate(&p, &cert).unwrap().valid);
    }

    #[test]
    fn out_of_range_relator_is_malformed() {
        let p = pres("gens a\nrel a a\n");
        let cert = AreaCertificate {
            target: Word::empty(),
            steps: vec![Step { conjugator: Word::empty(), relator: 3, sign: 1 }],
        };
        assert!(matches!(verify_area_certificate(&p, &cert), Err(Error::Malformed(_))));
    }

    #[test]
    fn search_finds_a4_with_area_two() {
        let p = pres("gens a\nrel a a\n");
        let w = p.parse_word("a a a a").unwrap();
        let cert = search_area_certificate(&p, &w, 2).certificate().cloned().unwrap();
        assert_eq!(cert.area(), 2);
        assert!(verify_area_certificate(&p, &cert).unwrap().valid);
    }

    #[test]
    fn search_proves_nothing_for_odd_power() {
        let p = pres("gens a\nrel a a\n");
        let w = p.parse_word("a").unwrap();
        assert_eq!(search_area_certificate(&p, &w, 5), SearchOutcome::NotFound);
    }

    #[test]
    fn empty_word_has_area_zero() {
        let p = pres("gens a b\nrel a b a b\n");
        let cert = search_area_certificate(&p, &Word::empty(), 1).certificate().cloned().unwrap();
        assert_eq!(cert.area(), 0);
    }

    #[test]
    fn search_result_respects_caps() {
        let p = pres("gens a b\nrel a b a' b'\n");
        let w = p.parse_word("b a b' a'").unwrap();
        let cert = search_area_certificate(&p, &w, 1).certificate().cloned().unwrap();
        assert_eq!(cert.area(), 1);
        assert!(cert.max_conjugator_length() <= conjugator_cap(&p, &w, 1));
        assert!(verify_area_certificate(&p, &cert).unwrap().valid);
    }

    #[test]
    fn dehn_table_for_z2() {
        let p = pres("gens a\nrel a a\n");
        let rows = dehn_bounded(&p, 4, 3);
        let get = |s: &str| rows.iter().find(|r| r.word == s).unwrap().entry.clone();
        assert_eq!(get("a a"), DehnEntry::Area { area: 1 });
        assert_eq!(get("a a a a"), DehnEntry::Area { area: 2 });
        assert_eq!(get("a"), DehnEntry::Nontrivial);
        assert_eq!(dehn_lower_bound(&rows), 2);
    }

    #[test]
    fn dehn_table_for_free_group() {
        let p = pres("gens a b\n");
        let rows = dehn_bounded(&p, 2, 2);
        let trivial: Vec<_> = rows.iter().filter(|r| matches!(r.entry, DehnEntry::Area { .. })).collect();
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial[0].word, "");
    }

    #[test]
    fn text_round_trip() {
        let p = pres("gens a b\nrel a a\n");
        let cert = AreaCertificate {
            target: p.parse_word("b a a b'").unwrap(),
            steps: vec![Step { conjugator: p.parse_word("b").unwrap(), relator: 0, sign: -1 }],
        };
        assert_eq!(AreaCertificate::parse(&p, &cert.to_text(&p)).unwrap(), cert);
    }

    #[test]
    fn peeler_rewrites_verify() {
        let p = pres("gens a b\nrel a b a' b'\nrel a a\n");
        let index = RelatorIndex::new(p.relations());
        let l = |s: &str| p.parse_word(s).unwrap().into_letters();
        let check = |w: &Word, steps: Vec<Step>| {
            let cert = AreaCertificate { target: w.clone(), steps };
            assert!(verify_area_certificate(&p, &cert).unwrap().valid);
        };

        let w = p.parse_word("a b a' b' a a").unwrap();
        let mut peel = Peeler::new(&index, &w);
        peel.rewrite(0, &l("a b"), &l("b a")).unwrap();
        assert_eq!(peel.current(), &l("b a a' b' a a")[..]);
        peel.reduce();
        peel.rewrite_first(&l("a a"), &[]).unwrap();
        check(&w, peel.into_steps().unwrap());

        let w = p.parse_word("a a' a a").unwrap();
        let mut peel = Peeler::new(&index, &w);
        peel.cancel(0).unwrap();
        peel.rewrite(0, &l("a"), &l("a'")).unwrap();
        assert_eq!(peel.current(), &l("a' a")[..]);
        check(&w, peel.into_steps().unwrap());

        let w = p.parse_word("b a a b'").unwrap();
        let mut peel = Peeler::new(&index, &w);
        peel.rotate(1);
        assert_eq!(peel.current(), &l("a a b' b")[..]);
        peel.rewrite(0, &l("a a"), &[]).unwrap();
        check(&w, peel.into_steps().unwrap());
    }

    #[test]
    fn peeler_rejects_unjustified_rewrite() {
        let p = pres("gens a b\nrel a a\n");
        let index = RelatorIndex::new(p.relations());
        let w = p.parse_word("a b").unwrap();
        let mut peel = Peeler::new(&index, &w);
        let l = |s: &str| p.parse_word(s).unwrap().into_letters();
        assert!(peel.rewrite(0, &l("a b"), &l("b a")).is_err());
    }

    fn arb_cert() -> impl Strategy<Value = Vec<(Vec<(usize, bool)>, usize, bool)>> {
        prop::collection::vec(
            (prop::collection::vec((0usize..3, any::<bool>()), 0..5), 0usize..2, any::<bool>()),
            0..5,
        )
    }

    proptest! {
        #[test]
        fn random_products_verify(raw in arb_cert()) {
            let p = pres("gens a b c\nrel a b c\nrel a a b'\n");
            let steps: Vec<Step> = raw.into_iter().map(|(z, r, s)| Step {
                conjugator: Word::from_letters(z.into_iter().map(|(gen, inv)| Letter { gen, inv }).collect()),
                relator: r,
                sign: if s { 1 } else { -1 },
            }).collect();
            let mut cert = AreaCertificate { target: Word::empty(), steps };
            cert.target = cert.product(p.relations()).unwrap().reduced();
            let chk = verify_area_certificate(&p, &cert).unwrap();
            prop_assert!(chk.valid);
            prop_assert_eq!(chk.area, cert.steps.len());
        }
    }
}
