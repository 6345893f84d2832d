use std::path::Path;

use lsgame::games::{
    bias as strategy_bias, build_game, classical_value, encode_answer, evaluate_strategy, format_ratio,
    observables_from_measurements, pzk_correlation, run_protocol, strategy_delta, ClassicalProver, CorrelationProver,
    LinearSystemGame, OperatorStrategy, Prover, StrategyProver, TranscriptSampler, DEFAULT_CLASSICAL_CAP,
};
use lsgame::group::{verify_area_certificate, Presentation};
use lsgame::reductions::{double_generators, hnn_extend, normalize_involution, transport_certificate_hnn};
use lsgame::rep::{cycle_separation, find_signed_rep, solve_z2, strategy_from_rep, RepOutcome, DEFAULT_NODE_BUDGET};
use lsgame::sdp::npa_upper_bound;
use lsgame::wagon::{compile_presentation, solution_group as gamma_of, LinearSystemZ2};
use lsgame::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{error_json, read_certificate, read_presentation, read_strategy, read_system, Outcome};
use crate::ProverKind;

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

pub fn presentation_json(p: &Presentation) -> Value {
    json!({
        "generators": p.num_generators(),
        "relations": p.relations().len(),
        "size": p.size(),
        "max_relation_len": p.max_relation_len(),
        "involution": p.involution().map(|j| p.generators()[j].clone()),
    })
}

pub fn system_json(sys: &LinearSystemZ2) -> Value {
    json!({
        "m": sys.m(),
        "n": sys.n(),
        "nonzeros": sys.nonzero_total(),
        "max_row_weight": sys.row_weight_max(),
        "all_rows_weight_three": sys.rows().iter().all(|r| r.len() == 3),
        "orphan_columns": sys.orphan_columns().len(),
    })
}

pub fn compile(path: &Path) -> Result<Outcome> {
    let p = read_presentation(path)?;
    let cp = compile_presentation(&p)?;
    let (n, n2) = (cp.normalized.presentation.size(), cp.doubled.presentation.size());
    let report = json!({
        "source": presentation_json(&p),
        "normalized": presentation_json(&cp.normalized.presentation),
        "doubled": presentation_json(&cp.doubled.presentation),
        "size_bound": { "n": n, "n_prime": n2, "holds": n2 <= 6 * n },
        "system": system_json(&cp.compiled.system),
        "gadgets": cp.compiled.gadgets.len(),
        "solution_group": presentation_json(&cp.gamma),
    });
    Ok(Outcome::with_artifact(report, cp.compiled.system.to_text()))
}

pub fn hnn(path: &Path, word: &str, cert: Option<&Path>) -> Result<Outcome> {
    let p = read_presentation(path)?;
    let w = p.parse_word(word)?;
    let h = hnn_extend(&p, &w)?;
    let q = &h.presentation;
    let mut report = json!({
        "source": presentation_json(&p),
        "word": p.format_word(&w),
        "extended": presentation_json(q),
        "main_relation": q.format_word(&q.relations()[h.main_relation]),
    });
    if let Some(cp) = cert {
        let c = read_certificate(&p, cp)?;
        let t = transport_certificate_hnn(&p, &h, &c)?;
        let check = verify_area_certificate(q, &t)?;
        report["transport"] = json!({
            "source_area": c.area(),
            "area": t.area(),
            "bound": 4 * c.area() + 1,
            "valid": check.valid,
        });
    }
    Ok(Outcome::with_artifact(report, q.to_text()))
}

pub fn double(path: &Path) -> Result<Outcome> {
    let p = read_presentation(path)?;
    let n = normalize_involution(&p)?;
    let d = double_generators(&n)?;
    let report = json!({
        "normalized": presentation_json(&n),
        "doubled": presentation_json(&d.presentation),
        "size_bound": { "n": n.size(), "n_prime": d.presentation.size(), "holds": d.presentation.size() <= 6 * n.size() },
    });
    Ok(Outcome::with_artifact(report, d.presentation.to_text()))
}

pub fn solution_group(path: &Path) -> Result<Outcome> {
    let sys = read_system(path)?;
    let gamma = gamma_of(&sys);
    Ok(Outcome::with_artifact(json!({ "solution_group": presentation_json(&gamma) }), gamma.to_text()))
}

pub fn game_json(g: &LinearSystemGame) -> Value {
    let outputs: Vec<usize> = (0..g.num_inputs_a()).map(|i| g.outputs_a(i).len()).collect();
    json!({
        "alice_inputs": g.num_inputs_a(),
        "bob_inputs": g.num_inputs_b(),
        "questions": g.pairs().len(),
        "min_alice_outputs": outputs.iter().copied().min().unwrap_or(0),
        "max_alice_outputs": outputs.iter().copied().max().unwrap_or(0),
        "bob_outputs": 2,
        "orphan_columns": g.orphans(),
    })
}

pub fn game(path: &Path) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    Ok(Outcome::report(json!({ "game": game_json(&g) })))
}

fn classical_json(g: &LinearSystemGame) -> Result<Value> {
    let cv = classical_value(g, DEFAULT_CLASSICAL_CAP)?;
    let mut v = to_value(&cv)?;
    v["value_f64"] = json!(*cv.value.numer() as f64 / *cv.value.denom() as f64);
    Ok(v)
}

pub fn classical(path: &Path) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    Ok(Outcome::report(json!({ "classical": classical_json(&g)? })))
}

/// A strategy from a file, or from a signed representation of the solution group.
fn strategy_for(g: &LinearSystemGame, file: Option<&Path>, dim_cap: usize) -> Result<(OperatorStrategy, Value)> {
    if let Some(f) = file {
        return Ok((read_strategy(f)?, json!({ "file": f.display().to_string() })));
    }
    let gamma = gamma_of(g.system());
    match find_signed_rep(&gamma, dim_cap, true, DEFAULT_NODE_BUDGET)? {
        RepOutcome::Found(rep) => {
            let s = strategy_from_rep(&rep, g)?;
            Ok((s, json!({ "representation_dim": rep.dim })))
        }
        RepOutcome::Unknown { nodes, .. } => Err(Error::Analysis(format!(
            "no representation with J -> -I up to dimension {dim_cap} ({nodes} nodes searched)"
        ))),
    }
}

pub fn eval(path: &Path, strategy: Option<&Path>, dim_cap: usize) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    let (s, source) = strategy_for(&g, strategy, dim_cap)?;
    let omega = evaluate_strategy(&g, &s)?;
    Ok(Outcome::report(json!({ "strategy": source, "dim": s.dim, "omega": omega })))
}

pub fn bias(path: &Path, strategy: Option<&Path>, dim_cap: usize) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    let (s, source) = strategy_for(&g, strategy, dim_cap)?;
    let omega = evaluate_strategy(&g, &s)?;
    let beta = strategy_bias(&g, &observables_from_measurements(&g, &s));
    let identity = (beta + 1.0).norm() / 2.0;
    Ok(Outcome::report(json!({
        "strategy": source,
        "dim": s.dim,
        "beta": [beta.re, beta.im],
        "omega": omega,
        "half_abs_beta_plus_one": identity,
        "identity_error": (omega - identity).abs(),
    })))
}

pub fn delta(path: &Path, strategy: Option<&Path>, dim_cap: usize) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    let (s, source) = strategy_for(&g, strategy, dim_cap)?;
    let d = strategy_delta(&g, &s);
    Ok(Outcome::report(json!({ "strategy": source, "dim": s.dim, "delta": to_value(&d)? })))
}

pub fn pzk_corr(path: &Path) -> Result<Outcome> {
    let sys = read_system(path)?;
    let g = build_game(&sys)?;
    let corr = pzk_correlation(&sys)?;
    let value = corr.game_value(&g)?;
    let normalized = corr.blocks_normalized();
    let blocks: Vec<Value> = g
        .pairs()
        .iter()
        .map(|&(i, j)| {
            let w = sys.row(i).len();
            let entries: Vec<Value> = g
                .outputs_a(i)
                .iter()
                .enumerate()
                .map(|(k, &mask)| {
                    json!([encode_answer(mask, w), format_ratio(&corr.get(i, j, k, false)), format_ratio(&corr.get(i, j, k, true))])
                })
                .collect();
            json!({ "row": i, "column": j, "entries": entries })
        })
        .collect();
    let artifact = serde_json::to_string_pretty(&json!({ "schema": 1, "blocks": blocks }))?;
    let report = json!({ "game_value": format_ratio(&value), "blocks_normalized": normalized, "blocks": blocks.len() });
    Ok(Outcome::with_artifact(report, artifact))
}

/// Transcript lines and their SHA-256 digest.
pub fn pzk_transcripts(sys: &LinearSystemZ2, rounds: u64, seed: u64) -> Result<(String, Value)> {
    if rounds == 0 {
        return Err(Error::precondition("rounds must be at least 1"));
    }
    let g = build_game(sys)?;
    let corr = pzk_correlation(sys)?;
    let mut sampler = TranscriptSampler::new(&g, &corr, seed)?;
    let mut text = String::new();
    let mut accepted = 0u64;
    for _ in 0..rounds {
        let t = sampler.sample();
        accepted += g.predicate(t.x, t.a, t.y, t.b) as u64;
        text.push_str(&t.to_line(&g));
        text.push('\n');
    }
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let report = json!({ "rounds": rounds, "seed": seed, "accepted": accepted, "digest": digest });
    Ok((text, report))
}

pub fn pzk_sample(path: &Path, rounds: u64, seed: u64) -> Result<Outcome> {
    let (text, report) = pzk_transcripts(&read_system(path)?, rounds, seed)?;
    Ok(Outcome::with_artifact(report, text))
}

pub fn protocol(
    path: &Path,
    kind: ProverKind,
    strategy: Option<&Path>,
    rounds: u64,
    dim_cap: usize,
    seed: u64,
) -> Result<Outcome> {
    let sys = read_system(path)?;
    let g = build_game(&sys)?;
    let report = match kind {
        ProverKind::Pzk => {
            let p = CorrelationProver::new(&g, pzk_correlation(&sys)?)?;
            run_protocol(&g, &p, rounds, seed)?
        }
        ProverKind::Strategy => {
            let (s, _) = strategy_for(&g, strategy, dim_cap)?;
            let p = StrategyProver::new(&g, &s)?;
            run_protocol(&g, &p as &dyn Prover, rounds, seed)?
        }
        ProverKind::Classical => {
            let cv = classical_value(&g, DEFAULT_CLASSICAL_CAP)?;
            run_protocol(&g, &ClassicalProver::new(&g, cv.assignment)?, rounds, seed)?
        }
    };
    let prover = format!("{kind:?}").to_lowercase();
    Ok(Outcome::report(json!({ "prover": prover, "protocol": to_value(&report)? })))
}

pub fn zsolve(path: &Path) -> Result<Outcome> {
    let sol = solve_z2(&read_system(path)?);
    Ok(Outcome::report(json!({ "solution": to_value(&sol)? })))
}

pub fn cycles(path: &Path) -> Result<Outcome> {
    let p = read_presentation(path)?;
    let cp = compile_presentation(&p)?;
    let r = cycle_separation(&cp.compiled);
    let resolved = r.resolved();
    let mut out = Outcome::report(json!({
        "system": system_json(&cp.compiled.system),
        "resolved": resolved,
        "separation": to_value(&r)?,
    }));
    if !resolved {
        out.code = 5;
    }
    Ok(out)
}

pub fn rep_search(path: &Path, dim_cap: usize, require_negative: bool) -> Result<Outcome> {
    let p = read_presentation(path)?;
    match find_signed_rep(&p, dim_cap, require_negative, DEFAULT_NODE_BUDGET)? {
        RepOutcome::Found(rep) => {
            rep.verify(&p)?;
            let report = json!({
                "found": true,
                "dim": rep.dim,
                "involution_sign": rep.involution_sign,
                "relation_error": rep.relation_error(&p),
            });
            Ok(Outcome::with_artifact(report, rep.to_json(&p)))
        }
        RepOutcome::Unknown { nodes, exhausted } => {
            Ok(Outcome::report(json!({ "found": false, "nodes": nodes, "exhausted": exhausted })))
        }
    }
}

pub fn npa(path: &Path, level: usize) -> Result<Outcome> {
    let g = build_game(&read_system(path)?)?;
    Ok(Outcome::report(json!({ "npa": to_value(&npa_upper_bound(&g, level)?)? })))
}

pub fn verify_cert(pres: &Path, cert: &Path) -> Result<Outcome> {
    let p = read_presentation(pres)?;
    let c = read_certificate(&p, cert)?;
    let check = verify_area_certificate(&p, &c)?;
    let mut out = Outcome::report(json!({ "check": to_value(&check)? }));
    if !check.valid {
        out.code = 5;
    }
    Ok(out)
}

pub fn transport_cert(pres: &Path, cert: &Path, word: Option<&str>) -> Result<Outcome> {
    let p = read_presentation(pres)?;
    let c = read_certificate(&p, cert)?;
    let mut report = json!({});
    let (cp, c) = match word {
        Some(w) => {
            let w = p.parse_word(w)?;
            let h = hnn_extend(&p, &w)?;
            let t = transport_certificate_hnn(&p, &h, &c)?;
            let valid = verify_area_certificate(&h.presentation, &t)?.valid;
            report["hnn"] = json!({ "source_area": c.area(), "area": t.area(), "bound": 4 * c.area() + 1, "valid": valid });
            (compile_presentation(&h.presentation)?, t)
        }
        None => (compile_presentation(&p)?, c),
    };
    let tr = cp.transport(&c)?;
    let ok = tr.valid && tr.area <= tr.bound;
    report["solution_group"] = to_value(&tr)?;
    let mut out = Outcome::with_artifact(report, tr.certificate.to_text(&cp.gamma));
    if !ok {
        out.code = 5;
    }
    Ok(out)
}

pub fn analyze(
    path: &Path,
    strategy: Option<&Path>,
    level: Option<usize>,
    rounds: Option<u64>,
    dim_cap: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let sys = read_system(path)?;
    let g = build_game(&sys)?;
    let mut report = json!({ "system": system_json(&sys), "game": game_json(&g) });
    let mut errors = Vec::new();
    let mut code = 0;
    let mut record = |tool: &str, r: Result<Value>, report: &mut Value| match r {
        Ok(v) => report[tool] = v,
        Err(e) => {
            if code == 0 {
                code = e.exit_code();
            }
            let mut v = error_json(&e)["error"].take();
            v["tool"] = json!(tool);
            errors.push(v);
        }
    };
    record("classical", classical_json(&g), &mut report);
    let npa = npa_upper_bound(&g, level.unwrap_or(1)).and_then(|b| to_value(&b));
    record("npa", npa, &mut report);
    if strategy.is_some() || dim_cap.is_some() {
        let r = strategy_for(&g, strategy, dim_cap.unwrap_or(4)).and_then(|(s, source)| {
            let omega = evaluate_strategy(&g, &s)?;
            Ok(json!({ "source": source, "dim": s.dim, "omega": omega, "delta": to_value(&strategy_delta(&g, &s))? }))
        });
        record("strategy", r, &mut report);
    }
    if let Some(rounds) = rounds {
        record("pzk_sample", pzk_transcripts(&sys, rounds, seed).map(|(_, v)| v), &mut report);
    }
    report["errors"] = json!(errors);
    Ok(Outcome { report, artifact: None, code })
}
