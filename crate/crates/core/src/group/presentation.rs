use std::collections::HashMap;
use std::fmt::Write as _;

use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// A finite presentation `<S : R>`, optionally with a designated central involution J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relations: Vec<Word>,
    involution: Option<usize>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.ends_with('\'')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Presentation {
    pub fn new(generators: Vec<String>, relations: Vec<Word>, involution: Option<usize>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if !valid_name(g) {
                return Err(Error::malformed(format!("invalid generator name {g:?}")));
            }
            if seen.insert(g.as_str(), i).is_some() {
                return Err(Error::malformed(format!("duplicate generator {g:?}")));
            }
        }
        for (k, r) in relations.iter().enumerate() {
            if let Some(m) = r.max_generator() {
                if m >= generators.len() {
                    return Err(Error::malformed(format!("relation {k} uses undeclared generator index {m}")));
                }
            }
        }
        if let Some(j) = involution {
            if j >= generators.len() {
                return Err(Error::malformed("involution is not a generator"));
            }
        }
        Ok(Presentation { generators, relations, involution })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    pub fn involution(&self) -> Option<usize> {
        self.involution
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// `N = |S| + sum |r|`.
    pub fn size(&self) -> usize {
        self.generators.len() + self.relations.iter().map(Word::len).sum::<usize>()
    }

    /// Length of the longest relation.
    pub fn max_relation_len(&self) -> usize {
        self.relations.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Parse a whitespace-separated word; `a'` denotes the inverse of `a`.
    /// The token `1` (when no generator has that name) denotes the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" && self.generator_index("1").is_none() {
                continue;
            }
            let (name, inv) = match tok.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let gen = self
                .generator_index(name)
                .ok_or_else(|| Error::malformed(format!("undeclared generator {name:?}")))?;
            letters.push(Letter { gen, inv });
        }
        Ok(Word::from_letters(letters))
    }

    pub fn format_word(&self, w: &Word) -> String {
        let mut s = String::new();
        for (k, l) in w.letters().iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            s.push_str(&self.generators[l.gen]);
            if l.inv {
                s.push('\'');
            }
        }
        s
    }

    /// Parse the line-based presentation format:
    /// `gens <name>...`, optional `inv <name>`, `rel <word>` per relation, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gens: Vec<String> = Vec::new();
        let mut inv_name: Option<String> = None;
        let mut rel_lines: Vec<(usize, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = match line.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (line, ""),
            };
            match kw {
                "gens" => gens.extend(rest.split_whitespace().map(str::to_owned)),
                "inv" => {
                    if inv_name.is_some() {
                        return Err(Error::malformed(format!("line {}: second inv line", lineno + 1)));
                    }
                    inv_name = Some(rest.to_owned());
                }
                "rel" => rel_lines.push((lineno + 1, rest.to_owned())),
                other => {
                    return Err(Error::malformed(format!("line {}: unknown keyword {other:?}", lineno + 1)))
                }
            }
        }
        let skeleton = Presentation::new(gens, Vec::new(), None)?;
        let involution = match inv_name {
            Some(n) => Some(
                skeleton
                    .generator_index(&n)
                    .ok_or_else(|| Error::malformed(format!("involution {n:?} is not a generator")))?,
            ),
            None => None,
        };
        let mut relations = Vec::with_capacity(rel_lines.len());
        for (lineno, body) in rel_lines {
            relations.push(
                skeleton
                    .parse_word(&body)
                    .map_err(|e| Error::malformed(format!("line {lineno}: {e}")))?,
            );
        }
        Presentation::new(skeleton.generators, relations, involution)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "gens {}", self.generators.join(" "));
        if let Some(j) = self.involution {
            let _ = writeln!(s, "inv {}", self.generators[j]);
        }
        for r in &self.relations {
            let body = self.format_word(r);
            if body.is_empty() {
                s.push_str("rel\n");
            } else {
                let _ = writeln!(s, "rel {body}");
            }
        }
        s
    }
}
