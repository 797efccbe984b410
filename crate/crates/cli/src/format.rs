//! The structure-constant file format: a line-oriented plain-text schema.
//!
//! ```text
//! # comment
//! name omni-lie dim 2
//! convention left
//! component 0 2 x1 x2
//! component -1 2 m1 m2
//! map 1
//! m1 -> 1 x1
//! m2 -> 1 x2
//! endmap
//! map 2
//! x1 x2 -> 1/2 x1 + -1/3 x2
//! endmap
//! alpha
//! 1/2 m1 m2
//! endalpha
//! ```
//!
//! Rationals are exact `p/q` tokens, never decimals; parsing a canonical
//! file and serializing it back is the identity.

use std::fmt;

use linfty_core::graded::{GradedSpace, GradedVector};
use linfty_core::linfty::LInftyStructure;
use linfty_core::scalar::Scalar;
use linfty_core::GradedError;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

/// The optional trailing data of a structure file.
#[derive(Debug, Clone, Default)]
pub struct FileExtras {
    /// The `convention` flag, when present.
    pub convention: Option<String>,
    /// Monomials of the `alpha` block: coefficient and coordinate labels.
    pub alpha: Vec<(Scalar, Vec<String>)>,
}

/// A parsed structure file.
#[derive(Debug)]
pub struct StructureFile {
    pub structure: LInftyStructure,
    pub extras: FileExtras,
}

/// Parses a structure file, validating labels and the degree rule; errors
/// carry the line and column of the offending token.
pub fn parse_structure_file(text: &str) -> Result<StructureFile, ParseError> {
    let mut name: Option<String> = None;
    let mut extras = FileExtras::default();
    let mut components: Vec<(i64, Vec<String>)> = Vec::new();
    // (arity, inputs, output terms, line)
    struct Entry {
        arity: usize,
        inputs: Vec<String>,
        output: Vec<(Scalar, String)>,
        line: usize,
    }
    let mut entries: Vec<Entry> = Vec::new();

    enum Mode {
        Top,
        Map(usize, usize),
        Alpha,
    }
    let mut mode = Mode::Top;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let col_of = |tok: &str| content.find(tok).map(|i| i + 1).unwrap_or(1);
        match mode {
            Mode::Top => match tokens[0] {
                "name" => {
                    name = Some(tokens[1..].join(" "));
                }
                "convention" => {
                    if tokens.len() != 2 || !matches!(tokens[1], "left" | "right") {
                        return err(line, col_of(tokens[0]), "expected `convention left|right`");
                    }
                    extras.convention = Some(tokens[1].to_string());
                }
                "component" => {
                    if tokens.len() < 3 {
                        return err(
                            line,
                            col_of(tokens[0]),
                            "expected `component <degree> <dim> <labels...>`",
                        );
                    }
                    let degree: i64 = tokens[1].parse().map_err(|_| ParseError {
                        line,
                        col: col_of(tokens[1]),
                        message: format!("bad degree `{}`", tokens[1]),
                    })?;
                    let dim: usize = tokens[2].parse().map_err(|_| ParseError {
                        line,
                        col: col_of(tokens[2]),
                        message: format!("bad dimension `{}`", tokens[2]),
                    })?;
                    let labels: Vec<String> = tokens[3..].iter().map(|s| s.to_string()).collect();
                    if labels.len() != dim {
                        return err(
                            line,
                            col_of(tokens[2]),
                            format!("declared dimension {dim} but {} labels", labels.len()),
                        );
                    }
                    components.push((degree, labels));
                }
                "map" => {
                    if tokens.len() != 2 {
                        return err(line, col_of(tokens[0]), "expected `map <arity>`");
                    }
                    let arity: usize = tokens[1].parse().map_err(|_| ParseError {
                        line,
                        col: col_of(tokens[1]),
                        message: format!("bad arity `{}`", tokens[1]),
                    })?;
                    if arity == 0 {
                        return err(line, col_of(tokens[1]), "arity must be at least 1");
                    }
                    mode = Mode::Map(arity, line);
                }
                "alpha" => {
                    mode = Mode::Alpha;
                }
                other => {
                    return err(
                        line,
                        col_of(other),
                        format!("unknown directive `{other}` (expected name, convention, component, map, alpha)"),
                    )
                }
            },
            Mode::Map(arity, _) => {
                if tokens[0] == "endmap" {
                    mode = Mode::Top;
                    continue;
                }
                let arrow = match tokens.iter().position(|&t| t == "->") {
                    Some(p) => p,
                    None => return err(line, 1, "expected `<inputs> -> <terms>` in map block"),
                };
                if arrow != arity {
                    return err(
                        line,
                        1,
                        format!("map of arity {arity} takes {arity} inputs, found {arrow}"),
                    );
                }
                let inputs: Vec<String> = tokens[..arrow].iter().map(|s| s.to_string()).collect();
                let rest = &tokens[arrow + 1..];
                if rest.is_empty() {
                    return err(line, 1, "missing output terms after `->`");
                }
                let mut output = Vec::new();
                let mut i = 0;
                loop {
                    if i + 1 > rest.len() {
                        return err(line, 1, "dangling coefficient in output");
                    }
                    if rest.len() - i < 2 {
                        return err(line, col_of(rest[i]), "expected `<coef> <label>`");
                    }
                    let c = Scalar::parse(rest[i]).map_err(|e| ParseError {
                        line,
                        col: col_of(rest[i]),
                        message: e.to_string(),
                    })?;
                    output.push((c, rest[i + 1].to_string()));
                    i += 2;
                    if i == rest.len() {
                        break;
                    }
                    if rest[i] != "+" {
                        return err(line, col_of(rest[i]), "expected `+` between output terms");
                    }
                    i += 1;
                }
                entries.push(Entry {
                    arity,
                    inputs,
                    output,
                    line,
                });
            }
            Mode::Alpha => {
                if tokens[0] == "endalpha" {
                    mode = Mode::Top;
                    continue;
                }
                let c = Scalar::parse(tokens[0]).map_err(|e| ParseError {
                    line,
                    col: col_of(tokens[0]),
                    message: e.to_string(),
                })?;
                extras
                    .alpha
                    .push((c, tokens[1..].iter().map(|s| s.to_string()).collect()));
            }
        }
    }
    if let Mode::Map(_, opened) = mode {
        return err(opened, 1, "unterminated map block (missing `endmap`)");
    }

    let space = GradedSpace::new(components).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })?;
    let mut structure = LInftyStructure::new(space);
    structure.name = name;
    for e in entries {
        let inputs: Vec<&str> = e.inputs.iter().map(|s| s.as_str()).collect();
        let output = GradedVector::from_terms(e.output.into_iter().map(|(c, l)| (l, c)));
        structure
            .set_constant(e.arity, &inputs, output)
            .map_err(|ge| match ge {
                GradedError::UnknownLabel(l) => ParseError {
                    line: e.line,
                    col: 1,
                    message: format!("unknown basis label `{l}`"),
                },
                other => ParseError {
                    line: e.line,
                    col: 1,
                    message: other.to_string(),
                },
            })?;
    }
    Ok(StructureFile { structure, extras })
}

/// Serializes to the canonical file form: components by descending degree,
/// maps by arity, entries in canonical tuple order.
pub fn serialize_structure(s: &LInftyStructure, extras: Option<&FileExtras>) -> String {
    let mut out = String::new();
    if let Some(n) = &s.name {
        out.push_str(&format!("name {n}\n"));
    }
    if let Some(e) = extras {
        if let Some(c) = &e.convention {
            out.push_str(&format!("convention {c}\n"));
        }
    }
    let mut degrees = s.space.degrees();
    degrees.reverse();
    for d in degrees {
        let labels = s.space.basis_of_degree(d);
        out.push_str(&format!(
            "component {d} {} {}\n",
            labels.len(),
            labels.join(" ")
        ));
    }
    for (arity, map) in s.maps() {
        if map.is_zero() {
            continue;
        }
        out.push_str(&format!("map {arity}\n"));
        for (tuple, value) in map.constants() {
            let inputs: Vec<&str> = tuple.iter().map(|&i| s.space.label(i)).collect();
            let terms: Vec<String> = value.entries().map(|(l, c)| format!("{c} {l}")).collect();
            out.push_str(&format!("{} -> {}\n", inputs.join(" "), terms.join(" + ")));
        }
        out.push_str("endmap\n");
    }
    if let Some(e) = extras {
        if !e.alpha.is_empty() {
            out.push_str("alpha\n");
            for (c, labels) in &e.alpha {
                out.push_str(&format!("{c} {}\n", labels.join(" ")));
            }
            out.push_str("endalpha\n");
        }
    }
    out
}
