use serde::Serialize;

use super::solution_group::solution_group;
use super::wheel::{assemble_system, CompiledSystem, Gadget, WagonWheelLayout};
use crate::error::{Error, Result};
use crate::group::{verify_area_certificate, AreaCertificate, Letter, Peeler, Presentation, RelatorIndex, Step, Word};
use crate::reductions::{double_generators, normalize_involution_traced, DoubledPresentation, Normalized};

/// A presentation with a designated involution carried through
/// J-normalization, generator doubling, wagon-wheel compilation and the
/// solution group.
#[derive(Clone, Debug)]
pub struct CompiledPresentation {
    pub source: Presentation,
    pub normalized: Normalized,
    pub doubled: DoubledPresentation,
    pub compiled: CompiledSystem,
    pub gamma: Presentation,
    gamma_index: RelatorIndex,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    #[serde(skip)]
    pub certificate: AreaCertificate,
    pub source_area: usize,
    pub area: usize,
    /// `sum_i 7 |phi_1(r_i)|` over the steps of the source certificate.
    pub bound: usize,
    pub blowup: f64,
    pub valid: bool,
}

pub fn compile_presentation(p: &Presentation) -> Result<CompiledPresentation> {
    let normalized = normalize_involution_traced(p)?;
    let doubled = double_generators(&normalized.presentation)?;
    let compiled = assemble_system(&doubled)?;
    let gamma = solution_group(&compiled.system);
    let gamma_index = RelatorIndex::new(gamma.relations());
    Ok(CompiledPresentation { source: p.clone(), normalized, doubled, compiled, gamma, gamma_index })
}

impl CompiledPresentation {
    fn gamma_j(&self) -> usize {
        self.compiled.system.n()
    }

    /// Image of a source word in the solution group: doubling followed by the column map.
    pub fn phi(&self, w: &Word) -> Word {
        let j = self.doubled.involution();
        let gj = self.gamma_j();
        w.substitute(|g| {
            self.doubled.image_map[g].substitute(|h| Word::single(Letter::pos(if h == j { gj } else { h })))
        })
    }

    /// `|phi_1(r)|` for source relation `r`.
    pub fn image_length(&self, r: usize) -> usize {
        self.phi(&self.source.relations()[r]).len()
    }

    /// A solution-group certificate for `phi(r)` where `r` is source relation `idx`.
    pub fn relation_certificate(&self, idx: usize) -> Result<Vec<Step>> {
        let r = self
            .source
            .relations()
            .get(idx)
            .ok_or_else(|| Error::malformed(format!("relation index {idx} out of range")))?;
        let jg = self.gamma_j();
        let mut peel = Peeler::new(&self.gamma_index, &self.phi(r));
        gather_involutions(&mut peel, jg)?;
        peel.reduce();
        let is_j = |l: &Letter| l.gen == jg;
        let start = peel.current().iter().take_while(|l| is_j(l)).count();
        let inverted: Vec<usize> = (start..peel.current().len()).filter(|&i| peel.current()[i].inv).collect();
        for i in inverted {
            let l = peel.current()[i];
            peel.rewrite(i, &[l], &[l.inverse()])?;
        }
        if let Some(k) = self.normalized.image[idx] {
            let expected = self.doubled.presentation.relations()[k].letters();
            let got: Vec<usize> = peel.current().iter().map(|l| l.gen).collect();
            let want: Vec<usize> =
                expected.iter().map(|l| if l.gen == self.doubled.involution() { jg } else { l.gen }).collect();
            if got != want {
                return Err(Error::Analysis(format!("relation {idx} did not normalize to its compiled form")));
            }
            match &self.compiled.gadgets[k] {
                Gadget::Wheel(layout) => wheel_derivation(&mut peel, layout, jg)?,
                Gadget::Involution { y, .. } => {
                    let (y0, y1, y2) = (y[0], y[1], y[2]);
                    peel.rewrite(0, &[Letter::pos(jg)], &[Letter::neg(y2), Letter::neg(y1), Letter::neg(y0)])?;
                    peel.rewrite(0, &[Letter::neg(y2), Letter::neg(y1), Letter::neg(y0)], &[])?;
                }
            }
        }
        peel.into_steps()
    }

    /// Transport a certificate over the source presentation to one for `phi(target)` in the solution group.
    pub fn transport(&self, cert: &AreaCertificate) -> Result<TransportReport> {
        if !verify_area_certificate(&self.source, cert)?.valid {
            return Err(Error::precondition("input certificate is not valid"));
        }
        let mut cache: Vec<Option<Vec<Step>>> = vec![None; self.source.relations().len()];
        let mut steps = Vec::new();
        let mut bound = 0;
        for s in &cert.steps {
            if cache[s.relator].is_none() {
                cache[s.relator] = Some(self.relation_certificate(s.relator)?);
            }
            let inner = cache[s.relator].as_ref().unwrap();
            bound += 7 * self.image_length(s.relator);
            let z = self.phi(&s.conjugator);
            let conj = |st: &Step, sign: i8| Step {
                conjugator: z.concat(&st.conjugator).reduced(),
                relator: st.relator,
                sign,
            };
            if s.sign > 0 {
                steps.extend(inner.iter().map(|st| conj(st, st.sign)));
            } else {
                steps.extend(inner.iter().rev().map(|st| conj(st, -st.sign)));
            }
        }
        let certificate = AreaCertificate { target: self.phi(&cert.target), steps };
        let valid = verify_area_certificate(&self.gamma, &certificate)?.valid;
        let area = certificate.area();
        Ok(TransportReport {
            source_area: cert.area(),
            area,
            bound,
            blowup: if cert.area() == 0 { 0.0 } else { area as f64 / cert.area() as f64 },
            valid,
            certificate,
        })
    }
}

/// Move every `J`-letter into one block at the front and collapse it to `J^p`.
/// Each letter goes to whichever end of the word is closer (counting non-`J`
/// letters); the trailing block is then rotated to the front.
fn gather_involutions(peel: &mut Peeler, jg: usize) -> Result<()> {
    let is_j = |l: &Letter| l.gen == jg;
    let total_other = peel.current().iter().filter(|l| !is_j(l)).count();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut before = 0;
    for (i, l) in peel.current().iter().enumerate() {
        if is_j(l) {
            if before <= total_other - before {
                left.push(i);
            } else {
                right.push(i);
            }
        } else {
            before += 1;
        }
    }
    // left movers in order; each stops at the previous one
    for (k, &i) in left.iter().enumerate() {
        let mut pos = i;
        while pos > k {
            let (y, jl) = (peel.current()[pos - 1], peel.current()[pos]);
            peel.rewrite(pos - 1, &[y, jl], &[jl, y])?;
            pos -= 1;
        }
    }
    let len = peel.current().len();
    for (k, &i) in right.iter().rev().enumerate() {
        let mut pos = i;
        while pos + 1 < len - k {
            let (jl, y) = (peel.current()[pos], peel.current()[pos + 1]);
            peel.rewrite(pos, &[jl, y], &[y, jl])?;
            pos += 1;
        }
    }
    if !right.is_empty() {
        peel.rotate(len - right.len());
    }
    loop {
        let cur = peel.current();
        if cur.len() < 2 || !is_j(&cur[0]) || !is_j(&cur[1]) {
            break;
        }
        if cur[0] == cur[1] {
            let l = cur[0];
            peel.rewrite(0, &[l, l], &[])?;
        } else {
            peel.cancel(0)?;
        }
    }
    if peel.current().first().is_some_and(|l| is_j(l) && l.inv) {
        peel.rewrite(0, &[Letter::neg(jg)], &[Letter::pos(jg)])?;
    }
    Ok(())
}

/// Derive `J^p s_1 ... s_n = 1` from the wheel rows in `6n - 1` relation uses.
fn wheel_derivation(peel: &mut Peeler, l: &WagonWheelLayout, jg: usize) -> Result<()> {
    let n = l.len();
    let (p, i) = (Letter::pos, Letter::neg);
    // flaps: s_k -> b_k' a_k' (absorbing J on the coloured flap)
    for k in 0..n {
        let new = [i(l.b[k]), i(l.a[k])];
        if k == 0 && l.parity {
            peel.rewrite(0, &[p(jg), p(l.shared[0])], &new)?;
        } else {
            peel.rewrite(2 * k, &[p(l.shared[k])], &new)?;
        }
    }
    for k in 0..n {
        peel.rewrite(2 * k, &[i(l.b[k]), i(l.a[k])], &[i(l.a[k]), i(l.b[k])])?;
    }
    // spokes: b_k' a_{k+1}' -> c_k
    for k in 0..n - 1 {
        peel.rewrite(1 + k, &[i(l.b[k]), i(l.a[k + 1])], &[p(l.c[k])])?;
    }
    peel.rotate(1);
    peel.rewrite(n - 1, &[i(l.b[n - 1]), i(l.a[0])], &[p(l.c[n - 1])])?;
    // hub: c_k -> (d_lo d_hi)^-1
    for k in 0..n {
        let (lo, hi) = if k + 1 < n { (l.d[k], l.d[k + 1]) } else { (l.d[0], l.d[n - 1]) };
        peel.rewrite(2 * k, &[p(l.c[k])], &[i(hi), i(lo)])?;
    }
    for k in 0..n - 1 {
        peel.rewrite(2 * k, &[i(l.d[k + 1]), i(l.d[k])], &[i(l.d[k]), i(l.d[k + 1])])?;
    }
    for k in 1..n {
        peel.rewrite(1, &[i(l.d[k]), i(l.d[k])], &[])?;
    }
    peel.rewrite(0, &[i(l.d[0]), i(l.d[0])], &[])?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::search_area_certificate;
    use crate::reductions::{hnn_extend, transport_certificate_hnn};

    fn pres(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    #[test]
    fn every_relation_has_a_verified_certificate() {
        let p = pres("gens a b J\ninv J\nrel a a b'\nrel J a b a' b'\nrel a J\nrel J a J' a'\nrel J J\nrel b' b' a'\n");
        let cp = compile_presentation(&p).unwrap();
        for idx in 0..p.relations().len() {
            let steps = cp.relation_certificate(idx).unwrap();
            let cert = AreaCertificate { target: cp.phi(&p.relations()[idx]), steps };
            assert!(verify_area_certificate(&cp.gamma, &cert).unwrap().valid, "relation {idx}");
            assert!(cert.area() <= 7 * cp.image_length(idx), "relation {idx}: {}", cert.area());
        }
    }

    #[test]
    fn single_length_four_relation_costs_at_most_28() {
        let p = pres("gens a J\ninv J\nrel a\n");
        let cp = compile_presentation(&p).unwrap();
        let steps = cp.relation_certificate(0).unwrap();
        assert_eq!(steps.len(), 6 * 4 - 1);
    }

    #[test]
    fn bare_involution_relation() {
        let p = pres("gens a J\ninv J\nrel a J a'\n");
        let cp = compile_presentation(&p).unwrap();
        let steps = cp.relation_certificate(0).unwrap();
        let cert = AreaCertificate { target: cp.phi(&p.relations()[0]), steps };
        assert!(verify_area_certificate(&cp.gamma, &cert).unwrap().valid);
    }

    #[test]
    fn end_to_end_transport() {
        let g = pres("gens a\nrel a a\n");
        let w = g.parse_word("a a a a").unwrap();
        let cert = search_area_certificate(&g, &w, 2).certificate().cloned().unwrap();
        let h = hnn_extend(&g, &w).unwrap();
        let ct = transport_certificate_hnn(&g, &h, &cert).unwrap();
        let cp = compile_presentation(&h.presentation).unwrap();
        let rep = cp.transport(&ct).unwrap();
        assert!(rep.valid);
        assert!(rep.area <= rep.bound);
        assert_eq!(cp.gamma.format_word(&rep.certificate.target), "J");
    }

    #[test]
    fn empty_certificate_transports_to_empty() {
        let p = pres("gens a J\ninv J\nrel a a\n");
        let cp = compile_presentation(&p).unwrap();
        let rep = cp.transport(&AreaCertificate::empty(Word::empty())).unwrap();
        assert_eq!(rep.area, 0);
        assert!(rep.valid);
    }
}
