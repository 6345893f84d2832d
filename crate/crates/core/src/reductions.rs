//! Group-level reductions: J-normalization, the HNN extension that turns
//! triviality of a word into triviality of a central involution, and
//! generator doubling into plus-form relations.

use crate::error::{Error, Result};
use crate::group::{commutator, verify_area_certificate, AreaCertificate, Letter, Presentation, Step, Word};

/// `G~ = <S, x, J~, t : R, J~^2, [g,J~] (g in S), [x,J~], [t,J~], [t,[x,w]] J~^-1>`.
#[derive(Clone, Debug)]
pub struct HnnOutput {
    pub presentation: Presentation,
    pub embedded_word: Word,
    pub involution: usize,
    pub x: usize,
    pub t: usize,
    /// Index of the relation `[t,[x,w]] J~^-1`.
    pub main_relation: usize,
}

fn fresh_name(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|g| g == base) {
        return base.to_owned();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken.iter().any(|g| g == n))
        .unwrap()
}

pub fn hnn_extend(p: &Presentation, w: &Word) -> Result<HnnOutput> {
    if w.max_generator().is_some_and(|g| g >= p.num_generators()) {
        return Err(Error::malformed("word uses undeclared generators"));
    }
    let mut gens = p.generators().to_vec();
    for base in ["x", "J", "t"] {
        let name = fresh_name(&gens, base);
        gens.push(name);
    }
    let n = p.num_generators();
    let (x, j, t) = (Word::single(Letter::pos(n)), Word::single(Letter::pos(n + 1)), Word::single(Letter::pos(n + 2)));
    let mut rels = p.relations().to_vec();
    rels.push(j.pow(2));
    for g in 0..n {
        rels.push(commutator(&Word::single(Letter::pos(g)), &j));
    }
    rels.push(commutator(&x, &j));
    rels.push(commutator(&t, &j));
    let main = commutator(&t, &commutator(&x, &w.reduced())).reduced().concat(&j.inverse());
    rels.push(main);
    let main_relation = rels.len() - 1;
    let presentation = Presentation::new(gens, rels, Some(n + 1))?;
    Ok(HnnOutput { presentation, embedded_word: w.clone(), involution: n + 1, x: n, t: n + 2, main_relation })
}

/// Steps of a certificate for `[g, w]` from a certificate for `w`, where `g`
/// is a single letter: `g w g^-1` conjugates every factor by `g`, and `w^-1`
/// is the reversed certificate with flipped signs.
fn commutator_steps(g: &Word, steps: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = steps
        .iter()
        .map(|s| Step { conjugator: g.concat(&s.conjugator).reduced(), relator: s.relator, sign: s.sign })
        .collect();
    out.extend(steps.iter().rev().map(|s| Step { conjugator: s.conjugator.clone(), relator: s.relator, sign: -s.sign }));
    out
}

/// Turns an area-`t` certificate for `w` in `G` into an area-`(4t+1)` certificate for `J~` in `G~`.
pub fn transport_certificate_hnn(p: &Presentation, hnn: &HnnOutput, cert: &AreaCertificate) -> Result<AreaCertificate> {
    if cert.target.reduced() != hnn.embedded_word.reduced() {
        return Err(Error::precondition("certificate target differs from the embedded word"));
    }
    if !verify_area_certificate(p, cert)?.valid {
        return Err(Error::precondition("input certificate is not valid"));
    }
    // original relation indices are preserved in G~
    let x = Word::single(Letter::pos(hnn.x));
    let t = Word::single(Letter::pos(hnn.t));
    let xw = commutator_steps(&x, &cert.steps);
    let txw = commutator_steps(&t, &xw);
    let mut steps = vec![Step { conjugator: Word::empty(), relator: hnn.main_relation, sign: -1 }];
    steps.extend(txw);
    Ok(AreaCertificate { target: Word::single(Letter::pos(hnn.involution)), steps })
}

/// A relation split as `J^p * residue` with `J` treated as a central involution.
fn split_involution(r: &Word, j: usize) -> (bool, Word) {
    let mut parity = false;
    let mut rest = Word::empty();
    for &l in r.letters() {
        if l.gen == j {
            parity = !parity;
        } else {
            rest.push(l);
        }
    }
    (parity, rest.reduced())
}

/// Result of [`normalize_involution_traced`].
#[derive(Clone, Debug)]
pub struct Normalized {
    pub presentation: Presentation,
    /// For each relation of the input, its index in the output (None if dropped).
    pub image: Vec<Option<usize>>,
}

pub fn normalize_involution(p: &Presentation) -> Result<Presentation> {
    Ok(normalize_involution_traced(p)?.presentation)
}

/// Rewrites every relation as `J^p * residue` with `p` in {0,1} and a freely
/// reduced, J-free residue. Relations with empty residue and `p = 0` (such as
/// `J^2` and `[g,J]`) are dropped; a relation with empty residue and `p = 1`
/// is kept as the bare letter `J`.
pub fn normalize_involution_traced(p: &Presentation) -> Result<Normalized> {
    let j = p
        .involution()
        .ok_or_else(|| Error::precondition("presentation has no designated involution"))?;
    let mut rels = Vec::new();
    let mut image = Vec::with_capacity(p.relations().len());
    for r in p.relations() {
        let (parity, residue) = split_involution(r, j);
        if residue.is_empty() && !parity {
            image.push(None);
            continue;
        }
        let mut nr = Word::empty();
        if parity {
            nr.push(Letter::pos(j));
        }
        nr.extend_from(&residue);
        image.push(Some(rels.len()));
        rels.push(nr);
    }
    Ok(Normalized { presentation: Presentation::new(p.generators().to_vec(), rels, Some(j))?, image })
}

/// `x^+`: every letter with exponent +1.
pub fn plus_form(w: &Word) -> Word {
    Word::from_letters(w.letters().iter().map(|l| Letter::pos(l.gen)).collect())
}

#[derive(Clone, Debug)]
pub struct DoubledPresentation {
    /// Generators `u_s, v_s` for every non-involution `s` in order, then `J`.
    /// Relations: the images of the source relations (in order), then
    /// `u_s^2, v_s^2` per generator, then `J^2`.
    pub presentation: Presentation,
    /// Source generator index to its image word.
    pub image_map: Vec<Word>,
    /// Number of leading relations that are images of source relations.
    pub num_images: usize,
}

impl DoubledPresentation {
    /// The images are `J^p s_1 ... s_n`; returns `(p, [s_1..s_n])` for image `k`.
    pub fn image_relation(&self, k: usize) -> (bool, &[Letter]) {
        let r = self.presentation.relations()[k].letters();
        let j = self.presentation.involution().unwrap();
        match r.first() {
            Some(l) if l.gen == j => (true, &r[1..]),
            _ => (false, r),
        }
    }

    pub fn involution(&self) -> usize {
        self.presentation.involution().unwrap()
    }

    /// Number of doubled generators `|S'|`, excluding `J`.
    pub fn num_shared(&self) -> usize {
        self.presentation.num_generators() - 1
    }
}

/// `phi_1(s) = u_s v_s u_s v_s`, `phi_1(J) = J`, applied to a normalized presentation in plus-form.
pub fn double_generators(p: &Presentation) -> Result<DoubledPresentation> {
    let j = p
        .involution()
        .ok_or_else(|| Error::precondition("presentation has no designated involution"))?;
    let mut names: Vec<String> = Vec::new();
    let mut image_map = vec![Word::empty(); p.num_generators()];
    let mut prefixed = Vec::new();
    for (s, name) in p.generators().iter().enumerate() {
        if s != j {
            prefixed.push((s, format!("u_{name}"), format!("v_{name}")));
        }
    }
    for (s, u, v) in &prefixed {
        let (ui, vi) = (names.len(), names.len() + 1);
        names.push(u.clone());
        names.push(v.clone());
        image_map[*s] = Word::from_letters(vec![Letter::pos(ui), Letter::pos(vi), Letter::pos(ui), Letter::pos(vi)]);
    }
    let jname = fresh_name(&names, &p.generators()[j]);
    names.push(jname);
    let jn = names.len() - 1;
    image_map[j] = Word::single(Letter::pos(jn));

    let mut rels = Vec::new();
    for r in p.relations() {
        let (parity, residue) = split_involution(r, j);
        let mut nr = Word::empty();
        if parity {
            nr.push(Letter::pos(jn));
        }
        nr.extend_from(&plus_form(&residue.substitute(|g| image_map[g].clone())));
        rels.push(nr);
    }
    let num_images = rels.len();
    for g in 0..jn {
        rels.push(Word::single(Letter::pos(g)).pow(2));
    }
    rels.push(Word::single(Letter::pos(jn)).pow(2));
    Ok(DoubledPresentation { presentation: Presentation::new(names, rels, Some(jn))?, image_map, num_images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::search_area_certificate;

    fn pres(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn hnn_counts() {
        let p = pres("gens a\nrel a a\n");
        let w = p.parse_word("a").unwrap();
        let h = hnn_extend(&p, &w).unwrap();
        assert_eq!(h.presentation.num_generators(), 4);
        assert_eq!(h.presentation.relations().len(), 6);
        assert_eq!(h.presentation.generators()[h.involution], "J");
    }

    #[test]
    fn hnn_renames_collisions() {
        let p = pres("gens x J J_1\n");
        let h = hnn_extend(&p, &Word::empty()).unwrap();
        assert_eq!(&h.presentation.generators()[3..], &["x_1", "J_2", "t"]);
    }

    #[test]
    fn hnn_transport_area() {
        let p = pres("gens a\nrel a a\n");
        let w = p.parse_word("a a a a").unwrap();
        let cert = search_area_certificate(&p, &w, 2).certificate().cloned().unwrap();
        let h = hnn_extend(&p, &w).unwrap();
        let out = transport_certificate_hnn(&p, &h, &cert).unwrap();
        assert_eq!(out.area(), 4 * cert.area() + 1);
        assert!(verify_area_certificate(&h.presentation, &out).unwrap().valid);
    }

    #[test]
    fn hnn_empty_word() {
        let p = pres("gens a\nrel a a\n");
        let h = hnn_extend(&p, &Word::empty()).unwrap();
        let out = transport_certificate_hnn(&p, &h, &AreaCertificate::empty(Word::empty())).unwrap();
        assert_eq!(out.area(), 1);
        assert!(verify_area_certificate(&h.presentation, &out).unwrap().valid);
    }

    #[test]
    fn hnn_rejects_bad_certificate() {
        let p = pres("gens a\nrel a a\n");
        let w = p.parse_word("a a").unwrap();
        let h = hnn_extend(&p, &w).unwrap();
        let bad = AreaCertificate { target: w, steps: vec![] };
        assert!(matches!(transport_certificate_hnn(&p, &h, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn normalization_examples() {
        let p = pres("gens a b J\ninv J\nrel J a J a\nrel a J a' J'\nrel a J b\nrel a J a'\n");
        let n = normalize_involution_traced(&p).unwrap();
        let r = n.presentation.relations();
        assert_eq!(n.image, vec![Some(0), None, Some(1), Some(2)]);
        assert_eq!(n.presentation.format_word(&r[0]), "a a");
        assert_eq!(n.presentation.format_word(&r[1]), "J a b");
        assert_eq!(n.presentation.format_word(&r[2]), "J");
    }

    #[test]
    fn normalization_needs_involution() {
        assert!(matches!(normalize_involution(&pres("gens a\n")), Err(Error::Precondition(_))));
    }

    #[test]
    fn doubling_examples() {
        let p = pres("gens a J\ninv J\nrel a a\nrel a'\nrel J a\n");
        let d = double_generators(&p).unwrap();
        let q = &d.presentation;
        assert_eq!(q.generators(), &["u_a", "v_a", "J"]);
        assert_eq!(q.format_word(&q.relations()[0]), "u_a v_a u_a v_a u_a v_a u_a v_a");
        // (u v u v)^-1 with exponents flipped letter by letter
        assert_eq!(q.format_word(&q.relations()[1]), "v_a u_a v_a u_a");
        assert_eq!(q.format_word(&q.relations()[2]), "J u_a v_a u_a v_a");
        assert_eq!(d.num_images, 3);
        assert_eq!(d.image_relation(2), (true, &q.relations()[0].letters()[..4]));
        assert!(q.relations().iter().all(|r| r.letters().iter().all(|l| !l.inv)));
    }

    #[test]
    fn doubling_size_for_z2() {
        let p = pres("gens a J\ninv J\nrel a a\n");
        let d = double_generators(&p).unwrap();
        assert_eq!(d.presentation.size(), 17);
        assert!(d.presentation.size() <= 6 * p.size());
    }
}
