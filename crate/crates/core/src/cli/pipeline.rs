use std::path::Path;
use std::time::Instant;

use lsgame::games::build_game;
use lsgame::group::{search_area_certificate, verify_area_certificate, SearchOutcome};
use lsgame::reductions::{hnn_extend, transport_certificate_hnn};
use lsgame::wagon::compile_presentation;
use lsgame::{Error, Result};
use serde_json::{json, Map, Value};

use super::commands::{game_json, presentation_json, system_json};
use super::{read_certificate, read_presentation, tagged, Outcome};

struct Timer {
    start: Instant,
    stages: Map<String, Value>,
}

impl Timer {
    fn lap(&mut self, stage: &str) {
        let ms = self.start.elapsed().as_secs_f64() * 1e3;
        self.stages.insert(stage.to_owned(), json!(ms));
        self.start = Instant::now();
    }
}

/// `hnn_extend(w)`, then J-normalization, doubling and wagon-wheel
/// compilation of the extension, then the game and the solution group.
pub fn pipeline(
    pres: &Path,
    word: &str,
    cert: Option<&Path>,
    max_area: Option<usize>,
    out_dir: Option<&Path>,
) -> Result<Outcome> {
    let mut timer = Timer { start: Instant::now(), stages: Map::new() };
    let p = read_presentation(pres).map_err(|e| tagged("input", e))?;
    let w = p.parse_word(word).map_err(|e| tagged("input", e))?;
    timer.lap("parse");
    let h = hnn_extend(&p, &w).map_err(|e| tagged("hnn", e))?;
    timer.lap("hnn");
    let cp = compile_presentation(&h.presentation).map_err(|e| tagged("compile", e))?;
    timer.lap("compile");
    let g = build_game(&cp.compiled.system).map_err(|e| tagged("game", e))?;
    timer.lap("game");

    let sys = &cp.compiled.system;
    let (n, n2) = (cp.normalized.presentation.size(), cp.doubled.presentation.size());
    let max_outputs = (0..g.num_inputs_a()).map(|i| g.outputs_a(i).len()).max().unwrap_or(0);
    let checks = json!({
        "alice_outputs_at_most_8": max_outputs <= 8,
        "bob_outputs_2": true,
        "rows_weight_three": sys.rows().iter().all(|r| r.len() == 3),
        "size_bound": n2 <= 6 * n,
        "solution_group_relations_at_most_4": cp.gamma.max_relation_len() <= 4,
    });
    let mut ok = checks.as_object().unwrap().values().all(|v| v == &json!(true));

    let mut notes = Vec::new();
    if w.reduced().is_empty() {
        notes.push("w is trivial: the new involution is 1 in the extension, value < 1 expected");
    }

    let certificate = match (cert, max_area) {
        (Some(path), _) => Some(read_certificate(&p, path).map_err(|e| tagged("certificate", e))?),
        (None, Some(a)) => match search_area_certificate(&p, &w, a) {
            SearchOutcome::Found(c) => Some(c),
            _ => {
                notes.push("no certificate for w found within the area limit");
                None
            }
        },
        (None, None) => None,
    };
    let mut transport = Value::Null;
    let mut gamma_cert = None;
    if let Some(c) = &certificate {
        if !verify_area_certificate(&p, c).map_err(|e| tagged("certificate", e))?.valid {
            return Err(Error::precondition("certificate: does not multiply out to w"));
        }
        let t = transport_certificate_hnn(&p, &h, c).map_err(|e| tagged("hnn-transport", e))?;
        let hnn_valid = verify_area_certificate(&h.presentation, &t)?.valid;
        let tr = cp.transport(&t).map_err(|e| tagged("wheel-transport", e))?;
        let longest = (0..h.presentation.relations().len()).map(|r| cp.image_length(r)).max().unwrap_or(0);
        let coarse = 7 * longest * (4 * c.area() + 1);
        let valid = hnn_valid && t.area() <= 4 * c.area() + 1 && tr.valid && tr.area <= tr.bound && tr.area <= coarse;
        ok &= valid;
        transport = json!({
            "source_area": c.area(),
            "hnn_area": t.area(),
            "hnn_bound": 4 * c.area() + 1,
            "hnn_valid": hnn_valid,
            "solution_group_area": tr.area,
            "solution_group_bound": tr.bound,
            "coarse_bound": coarse,
            "solution_group_valid": tr.valid,
            "valid": valid,
        });
        gamma_cert = Some(tr.certificate.to_text(&cp.gamma));
        timer.lap("transport");
    }

    let mut outputs = Map::new();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut files = vec![
            ("extension", "extension.txt", h.presentation.to_text()),
            ("system", "system.txt", sys.to_text()),
            ("names", "system.names", sys.names_to_text()),
            ("solution_group", "solution_group.txt", cp.gamma.to_text()),
        ];
        if let Some(text) = gamma_cert {
            files.push(("certificate", "certificate.txt", text));
        }
        for (key, file, text) in files {
            let path = dir.join(file);
            std::fs::write(&path, text)?;
            outputs.insert(key.to_owned(), json!(path.display().to_string()));
        }
    }

    let report = json!({
        "stages": {
            "source": presentation_json(&p),
            "extension": presentation_json(&h.presentation),
            "normalized": presentation_json(&cp.normalized.presentation),
            "doubled": presentation_json(&cp.doubled.presentation),
            "system": system_json(sys),
            "game": game_json(&g),
            "solution_group": presentation_json(&cp.gamma),
        },
        "size_bound": { "n": n, "n_prime": n2 },
        "checks": checks,
        "transport": transport,
        "notes": notes,
        "outputs": outputs,
        "timing_ms": timer.stages,
    });
    Ok(Outcome { report, artifact: None, code: if ok { 0 } else { 5 } })
}
