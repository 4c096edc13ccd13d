//! The line-oriented model format.
//!
//! ```text
//! mia VendingSpec
//! inputs  1euro 2euro coffee tea cups
//! outputs change cup error
//! states  q0 q1 q2 q3 q4 q5
//! init    q0
//! must q0 2euro q1
//! may  q3 error q5
//! ```
//!
//! `#` starts a comment. `inputs`, `outputs` and `states` may repeat and
//! accumulate. IOLTS files use `iolts` and `trans` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mia_core::{Alphabet, Draft, Iolts, Mia, Model, ModelError, ModelKind, RawTransition, TransitionKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Parses model text into an unvalidated draft. For MIA files every `must`
/// line also declares the `may` transition.
pub fn parse_model(text: &str) -> Result<Draft, ParseError> {
    let mut draft: Option<Draft> = None;
    let mut init_line = None;
    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let args: Vec<&str> = tokens.collect();
        let Some(d) = draft.as_mut() else {
            let kind = match keyword {
                "mia" => ModelKind::Mia,
                "iolts" => ModelKind::Iolts,
                other => {
                    return Err(err(
                        line,
                        format!("expected header `mia <name>` or `iolts <name>`, found `{other}`"),
                    ))
                }
            };
            let name = match args.as_slice() {
                [name] => *name,
                [] => return Err(err(line, "header lacks a model name")),
                _ => return Err(err(line, "model name must be a single token")),
            };
            draft = Some(Draft::new(kind, name));
            continue;
        };
        match keyword {
            "inputs" => d.inputs.extend(args.iter().map(|s| s.to_string())),
            "outputs" => d.outputs.extend(args.iter().map(|s| s.to_string())),
            "states" => d.states.extend(args.iter().map(|s| s.to_string())),
            "init" => {
                if let Some(prev) = init_line {
                    return Err(err(line, format!("initial state already declared on line {prev}")));
                }
                let [state] = args.as_slice() else {
                    return Err(err(line, "`init` takes exactly one state"));
                };
                d.initial = Some(state.to_string());
                init_line = Some(line);
            }
            "must" | "may" | "trans" => {
                let kind = match (keyword, d.kind) {
                    ("must", ModelKind::Mia) => TransitionKind::Must,
                    ("may", ModelKind::Mia) => TransitionKind::May,
                    ("trans", ModelKind::Iolts) => TransitionKind::Plain,
                    (_, ModelKind::Mia) => return Err(err(line, "MIA files use `must` and `may` lines")),
                    (_, ModelKind::Iolts) => return Err(err(line, "IOLTS files use `trans` lines")),
                };
                let [source, action, target] = args.as_slice() else {
                    return Err(err(line, format!("`{keyword}` takes <source> <action> <target>")));
                };
                d.transitions.push(RawTransition {
                    kind,
                    source: source.to_string(),
                    action: action.to_string(),
                    target: target.to_string(),
                    line: Some(line),
                });
            }
            "mia" | "iolts" => return Err(err(line, "a file holds exactly one model")),
            other => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }
    let mut d = draft.ok_or_else(|| err(text.lines().count().max(1), "empty model file"))?;
    if d.kind == ModelKind::Mia {
        d.close_may();
    }
    Ok(d)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{}", .source)]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: ModelError },
    #[error("{path}: {message}")]
    Mismatch { path: PathBuf, message: String },
}

/// A parsed and validated model file.
#[derive(Clone, Debug)]
pub enum Loaded {
    Mia(Mia),
    Iolts(Iolts),
}

impl Loaded {
    pub fn model(&self) -> &dyn Model {
        match self {
            Loaded::Mia(m) => m,
            Loaded::Iolts(p) => p,
        }
    }

    pub fn transition_count(&self) -> usize {
        match self {
            Loaded::Mia(m) => m.may_transitions().count(),
            Loaded::Iolts(p) => p.transition_count(),
        }
    }
}

pub fn read_draft(path: &Path) -> Result<Draft, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text).map_err(|source| LoadError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Reorders the draft's alphabet to `reference` when both name the same
/// input and output sets, so that models from different files can be
/// compared.
pub fn align(draft: &mut Draft, reference: &Alphabet) {
    let same = |a: &[String], b: &[String]| {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort();
        b.sort();
        a == b
    };
    if same(&draft.inputs, reference.inputs()) && same(&draft.outputs, reference.outputs()) {
        draft.inputs = reference.inputs().to_vec();
        draft.outputs = reference.outputs().to_vec();
    }
}

pub fn build(draft: &Draft, path: &Path) -> Result<Loaded, LoadError> {
    let invalid = |source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    };
    match draft.kind {
        ModelKind::Mia => draft.build_mia().map(Loaded::Mia).map_err(invalid),
        ModelKind::Iolts => draft.build_iolts().map(Loaded::Iolts).map_err(invalid),
    }
}

pub fn load(path: &Path, reference: Option<&Alphabet>) -> Result<Loaded, LoadError> {
    let mut draft = read_draft(path)?;
    if let Some(r) = reference {
        align(&mut draft, r);
    }
    build(&draft, path)
}

/// Loads a MIA; IOLTS files are embedded (must = may).
pub fn load_mia(path: &Path, reference: Option<&Alphabet>) -> Result<Mia, LoadError> {
    match load(path, reference)? {
        Loaded::Mia(m) => Ok(m),
        Loaded::Iolts(p) => mia_core::embed_iolts(&p).map_err(|source| LoadError::Invalid {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Loads an IOLTS; MIA files are accepted when must and may coincide.
pub fn load_iolts(path: &Path, reference: Option<&Alphabet>) -> Result<Iolts, LoadError> {
    match load(path, reference)? {
        Loaded::Iolts(p) => Ok(p),
        Loaded::Mia(m) if m.is_degenerate() => Ok(mia_core::famlts(&m)),
        Loaded::Mia(_) => Err(LoadError::Mismatch {
            path: path.to_path_buf(),
            message: "expected an IOLTS, found a MIA with optional transitions".into(),
        }),
    }
}

fn header(out: &mut String, keyword: &str, name: &str, alphabet: &Alphabet, states: &[String], init: &str) {
    let name = if name.is_empty() || name.contains(char::is_whitespace) {
        name.split_whitespace().collect::<Vec<_>>().join("_")
    } else {
        name.to_string()
    };
    let name = if name.is_empty() { "model".to_string() } else { name };
    let _ = writeln!(out, "{keyword} {name}");
    let _ = writeln!(out, "inputs  {}", alphabet.inputs().join(" "));
    let _ = writeln!(out, "outputs {}", alphabet.outputs().join(" "));
    let _ = writeln!(out, "states  {}", states.join(" "));
    let _ = writeln!(out, "init    {init}");
}

fn comment(out: &mut String, provenance: Option<&str>) {
    if let Some(p) = provenance {
        for line in p.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
}

/// Canonical MIA text: must lines, then optional (may-only) lines, each in
/// transition order.
pub fn write_mia(m: &Mia, provenance: Option<&str>) -> String {
    let mut out = String::new();
    comment(&mut out, provenance);
    header(&mut out, "mia", m.name(), m.alphabet(), m.state_names(), m.state_name(m.initial()));
    let a = m.alphabet();
    for t in m.must_transitions() {
        let _ = writeln!(out, "must {} {} {}", m.state_name(t.source), a.name(t.action), m.state_name(t.target));
    }
    for t in m.optional_transitions() {
        let _ = writeln!(out, "may  {} {} {}", m.state_name(t.source), a.name(t.action), m.state_name(t.target));
    }
    out
}

pub fn write_iolts(p: &Iolts, provenance: Option<&str>) -> String {
    let mut out = String::new();
    comment(&mut out, provenance);
    header(&mut out, "iolts", p.name(), p.alphabet(), p.state_names(), p.state_name(p.initial()));
    let a = p.alphabet();
    for t in p.transitions() {
        let _ = writeln!(out, "trans {} {} {}", p.state_name(t.source), a.name(t.action), p.state_name(t.target));
    }
    out
}
