//! The `.mdp` text format.
//!
//! ```text
//! mdp
//! states 3
//! label goal 1
//! transitions
//! 0 a 1:1/2 2:1/2
//! 0 b 1:1/3 2:2/3
//! 1 - 1:1
//! 2 - 2:1
//! ```
//!
//! `#` starts a comment. Probabilities are `p/q` or decimal literals, both
//! read exactly. Several lines with the same source are distinct
//! nondeterministic choices; action names are cosmetic.

use std::fmt::Write as _;

use exactreach_core::mdp::{ModelError, RawModel, RawTransition};
use exactreach_core::rational::{fraction_string, parse_rational};
use exactreach_core::{Mdp, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {error}")]
    Model { line: usize, error: ModelError },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Model { line, .. } => *line,
        }
    }
}

/// A validated MDP together with its named state sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub mdp: Mdp,
    /// In declaration order.
    pub labels: Vec<(String, StateSet)>,
}

impl Model {
    pub fn label(&self, name: &str) -> Option<&StateSet> {
        self.labels.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

/// A whitespace-separated word and its 1-based column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            column: content[..s].chars().count() + 1,
        });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn number(line: usize, tok: &Token<'_>, what: &str) -> Result<usize, ParseError> {
    if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, tok.column, format!("expected {what}, found `{}`", tok.text)));
    }
    tok.text
        .parse()
        .map_err(|_| syntax(line, tok.column, format!("{what} `{}` is too large", tok.text)))
}

#[derive(PartialEq)]
enum Section {
    Header,
    States,
    Labels,
    Transitions,
}

pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut section = Section::Header;
    let mut num_states = 0;
    let mut states_line = 0;
    let mut transitions_line = 0;
    let mut labels: Vec<(String, StateSet)> = Vec::new();
    let mut raw = Vec::new();
    let mut raw_lines = Vec::new();
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let toks = tokens(line);
        let Some(first) = toks.first() else { continue };
        match section {
            Section::Header => {
                if first.text != "mdp" || toks.len() != 1 {
                    return Err(syntax(lineno, first.column, "expected header `mdp`"));
                }
                section = Section::States;
            }
            Section::States => {
                if first.text != "states" {
                    return Err(syntax(lineno, first.column, "expected `states <count>`"));
                }
                let Some(count) = toks.get(1) else {
                    return Err(syntax(lineno, first.column + first.text.len(), "missing state count"));
                };
                if let Some(extra) = toks.get(2) {
                    return Err(syntax(lineno, extra.column, "unexpected token after state count"));
                }
                num_states = number(lineno, count, "a state count")?;
                states_line = lineno;
                section = Section::Labels;
            }
            Section::Labels => match first.text {
                "label" => {
                    let Some(name) = toks.get(1) else {
                        return Err(syntax(lineno, first.column + first.text.len(), "missing label name"));
                    };
                    if labels.iter().any(|(n, _)| n == name.text) {
                        return Err(syntax(lineno, name.column, format!("label `{}` defined twice", name.text)));
                    }
                    if toks.len() < 3 {
                        return Err(syntax(lineno, name.column + name.text.len(), "a label needs at least one state"));
                    }
                    let mut set = StateSet::new();
                    for tok in &toks[2..] {
                        let s = number(lineno, tok, "a state id")?;
                        if s >= num_states {
                            return Err(syntax(lineno, tok.column, format!("state {s} does not exist")));
                        }
                        set.insert(s);
                    }
                    labels.push((name.text.to_string(), set));
                }
                "transitions" => {
                    if let Some(extra) = toks.get(1) {
                        return Err(syntax(lineno, extra.column, "unexpected token after `transitions`"));
                    }
                    transitions_line = lineno;
                    section = Section::Transitions;
                }
                _ => return Err(syntax(lineno, first.column, "expected `label` or `transitions`")),
            },
            Section::Transitions => {
                raw.push(transition(lineno, &toks)?);
                raw_lines.push(lineno);
            }
        }
    }

    if section != Section::Transitions {
        let expected = match section {
            Section::Header => "header `mdp`",
            Section::States => "`states <count>`",
            _ => "`transitions`",
        };
        return Err(syntax(last_line.max(1), 1, format!("unexpected end of input, expected {expected}")));
    }

    let mdp = RawModel {
        num_states,
        transitions: raw,
    }
    .validate()
    .map_err(|error| {
        let line = match &error {
            ModelError::NoStates => states_line,
            ModelError::EmptyEnabledSet { .. } => transitions_line,
            ModelError::UnknownSource { transition, .. }
            | ModelError::DanglingTarget { transition, .. }
            | ModelError::DuplicateTarget { transition, .. }
            | ModelError::NonPositiveProbability { transition, .. }
            | ModelError::DistributionNotStochastic { transition, .. } => raw_lines[*transition],
        };
        ParseError::Model { line, error }
    })?;
    Ok(Model { mdp, labels })
}

fn transition(lineno: usize, toks: &[Token<'_>]) -> Result<RawTransition, ParseError> {
    let source = number(lineno, &toks[0], "a source state")?;
    let Some(action) = toks.get(1) else {
        return Err(syntax(lineno, toks[0].column + toks[0].text.len(), "missing action name"));
    };
    if action.text.contains(':') {
        return Err(syntax(lineno, action.column, "missing action name (use `-` for none)"));
    }
    if toks.len() < 3 {
        return Err(syntax(lineno, action.column + action.text.len(), "a transition needs at least one target"));
    }
    let mut targets = Vec::with_capacity(toks.len() - 2);
    for tok in &toks[2..] {
        let Some((dest, prob)) = tok.text.split_once(':') else {
            return Err(syntax(lineno, tok.column, format!("expected `<state>:<probability>`, found `{}`", tok.text)));
        };
        let dest = number(
            lineno,
            &Token {
                text: dest,
                column: tok.column,
            },
            "a target state",
        )?;
        let column = tok.column + tok.text.find(':').unwrap() + 1;
        let p = parse_rational(prob).map_err(|e| syntax(lineno, column, e.to_string()))?;
        targets.push((dest, p));
    }
    Ok(RawTransition {
        source,
        action: action.text.to_string(),
        targets,
    })
}

/// Writes `model` back in canonical form: transitions grouped by source,
/// probabilities as reduced fractions.
pub fn serialize(model: &Model) -> String {
    let mut out = String::from("mdp\n");
    let _ = writeln!(out, "states {}", model.mdp.num_states());
    for (name, set) in &model.labels {
        let _ = write!(out, "label {name}");
        for s in set {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    out.push_str("transitions\n");
    for t in model.mdp.transitions() {
        let _ = write!(out, "{} {}", t.source(), t.action());
        for (dest, p) in t.distribution() {
            let _ = write!(out, " {dest}:{}", fraction_string(p));
        }
        out.push('\n');
    }
    out
}
