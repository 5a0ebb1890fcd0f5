//! Text formats for contexts and implication bases.
//!
//! Contexts use the Burmeister `.cxt` layout:
//!
//! ```text
//! B
//!
//! <object count>
//! <attribute count>
//!
//! <object names, one per line>
//! <attribute names, one per line>
//! <one row of '.'/'X' per object>
//! ```
//!
//! Bases are written one implication per line as
//! `p1 p2 -> c1 c2 c3 [support=N]`, labels sorted within each side, or as a
//! JSON array of `{premise, conclusion, support}` objects.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::basis::{Implication, ImplicationBasis};
use super::bitset::AttributeSet;
use super::context::FormalContext;
use crate::error::{Error, Result};

fn check_line_label(label: &str, kind: &str) -> Result<()> {
    if label.contains(['\n', '\r']) {
        return Err(Error::invalid(format!("{kind} label {label:?} contains a line break")));
    }
    Ok(())
}

pub fn write_cxt(ctx: &FormalContext) -> Result<String> {
    let mut out = String::new();
    let _ = write!(out, "B\n\n{}\n{}\n\n", ctx.num_objects(), ctx.num_attributes());
    for g in ctx.objects() {
        check_line_label(g, "object")?;
        out.push_str(g);
        out.push('\n');
    }
    for m in ctx.attributes() {
        check_line_label(m, "attribute")?;
        out.push_str(m);
        out.push('\n');
    }
    for g in 0..ctx.num_objects() {
        let row = ctx.row(g);
        out.extend((0..ctx.num_attributes()).map(|j| if row.contains(j) { 'X' } else { '.' }));
        out.push('\n');
    }
    Ok(out)
}

fn cxt_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        what: "cxt",
        line,
        message: message.into(),
    }
}

pub fn read_cxt(text: &str) -> Result<FormalContext> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).enumerate();
    let mut next = |expect: &str| {
        lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| cxt_err(0, format!("unexpected end of input, expected {expect}")))
    };

    let (n, header) = next("header")?;
    if header.trim() != "B" {
        return Err(cxt_err(n, format!("expected \"B\", found {header:?}")));
    }
    next("name line")?;
    let mut count = |what: &str| -> Result<usize> {
        let (n, l) = next(what)?;
        l.trim()
            .parse()
            .map_err(|_| cxt_err(n, format!("expected {what}, found {l:?}")))
    };
    let num_objects = count("object count")?;
    let num_attributes = count("attribute count")?;
    let (n, blank) = next("blank line")?;
    if !blank.trim().is_empty() {
        return Err(cxt_err(n, format!("expected blank line, found {blank:?}")));
    }

    let objects = (0..num_objects)
        .map(|_| next("object name").map(|(_, l)| l.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let attributes = (0..num_attributes)
        .map(|_| next("attribute name").map(|(_, l)| l.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(num_objects);
    for _ in 0..num_objects {
        let (n, l) = next("incidence row")?;
        let l = l.trim_end();
        if l.chars().count() != num_attributes {
            return Err(cxt_err(
                n,
                format!("row has {} cells, expected {num_attributes}", l.chars().count()),
            ));
        }
        let mut row = AttributeSet::empty(num_attributes);
        for (j, c) in l.chars().enumerate() {
            match c {
                'X' | 'x' => {
                    row.insert(j);
                }
                '.' => {}
                other => return Err(cxt_err(n, format!("unexpected cell {other:?}"))),
            }
        }
        rows.push(row);
    }
    FormalContext::from_rows(objects, attributes, rows)
}

/// An implication spelled with attribute labels, each side sorted by byte
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledImplication {
    pub premise: Vec<String>,
    pub conclusion: Vec<String>,
    pub support: usize,
}

/// Which attributes the rendered conclusion lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConclusionStyle {
    /// The full closure, premise included.
    #[default]
    Full,
    /// Only the attributes the implication adds.
    ConsequenceOnly,
}

fn sorted_labels(ctx: &FormalContext, set: &AttributeSet) -> Vec<String> {
    let mut labels: Vec<String> = ctx.attribute_labels(set).map(String::from).collect();
    labels.sort();
    labels
}

impl LabeledImplication {
    pub fn new(ctx: &FormalContext, imp: &Implication, style: ConclusionStyle) -> Self {
        let conclusion = match style {
            ConclusionStyle::Full => sorted_labels(ctx, &imp.conclusion),
            ConclusionStyle::ConsequenceOnly => sorted_labels(ctx, &imp.consequence()),
        };
        LabeledImplication {
            premise: sorted_labels(ctx, &imp.premise),
            conclusion,
            support: imp.support,
        }
    }

    /// Maps the labels back onto `ctx`'s attribute indices.
    pub fn resolve(&self, ctx: &FormalContext) -> Result<Implication> {
        Ok(Implication {
            premise: ctx.attribute_set(self.premise.iter().map(String::as_str))?,
            conclusion: ctx.attribute_set(self.conclusion.iter().map(String::as_str))?,
            support: self.support,
        })
    }
}

pub fn label_basis(
    ctx: &FormalContext,
    basis: &ImplicationBasis,
    style: ConclusionStyle,
) -> Vec<LabeledImplication> {
    basis
        .iter()
        .map(|imp| LabeledImplication::new(ctx, imp, style))
        .collect()
}

fn check_token(label: &str) -> Result<()> {
    if label.is_empty() || label.contains(char::is_whitespace) || label == "->" || label.starts_with('[') {
        return Err(Error::invalid(format!(
            "attribute label {label:?} cannot be written in the basis text format"
        )));
    }
    Ok(())
}

pub fn write_basis_text(implications: &[LabeledImplication]) -> Result<String> {
    let mut out = String::new();
    for imp in implications {
        for (i, p) in imp.premise.iter().enumerate() {
            check_token(p)?;
            if i > 0 {
                out.push(' ');
            }
            out.push_str(p);
        }
        if !imp.premise.is_empty() {
            out.push(' ');
        }
        out.push_str("->");
        for c in &imp.conclusion {
            check_token(c)?;
            out.push(' ');
            out.push_str(c);
        }
        let _ = writeln!(out, " [support={}]", imp.support);
    }
    Ok(out)
}

fn basis_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        what: "basis",
        line,
        message: message.into(),
    }
}

pub fn read_basis_text(text: &str) -> Result<Vec<LabeledImplication>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (body, support) = line
            .strip_suffix(']')
            .and_then(|l| l.rsplit_once("[support="))
            .ok_or_else(|| basis_err(n, "missing [support=N] suffix"))?;
        let support = support
            .parse()
            .map_err(|_| basis_err(n, format!("bad support {support:?}")))?;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let arrow = tokens
            .iter()
            .position(|&t| t == "->")
            .ok_or_else(|| basis_err(n, "missing \"->\""))?;
        out.push(LabeledImplication {
            premise: tokens[..arrow].iter().map(|s| s.to_string()).collect(),
            conclusion: tokens[arrow + 1..].iter().map(|s| s.to_string()).collect(),
            support,
        });
    }
    Ok(out)
}

pub fn write_basis_json(implications: &[LabeledImplication]) -> String {
    let mut s = serde_json::to_string_pretty(implications).expect("labels serialize");
    s.push('\n');
    s
}

pub fn read_basis_json(text: &str) -> Result<Vec<LabeledImplication>> {
    serde_json::from_str(text).map_err(|e| basis_err(e.line(), e.to_string()))
}

/// Dense 0/1 matrix with a header row of attribute labels and object labels
/// in the first column.
pub fn write_context_csv(ctx: &FormalContext) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend(ctx.attributes().iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (g, name) in ctx.objects().iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend((0..ctx.num_attributes()).map(|j| {
            if ctx.incident(g, j) { "1" } else { "0" }.to_string()
        }));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fca::basis::canonical_basis;
    use crate::fca::context::tests::{passing_toy, two_object_toy};

    #[test]
    fn cxt_layout_is_exact() {
        let text = write_cxt(&two_object_toy()).unwrap();
        assert_eq!(text, "B\n\n2\n3\n\ng1\ng2\na\nb\nc\nX..\nXX.\n");
        let empty = FormalContext::new(vec![], vec![], &[]).unwrap();
        assert_eq!(write_cxt(&empty).unwrap(), "B\n\n0\n0\n\n");
    }

    #[test]
    fn cxt_reads_back() {
        for ctx in [passing_toy(), two_object_toy()] {
            let back = read_cxt(&write_cxt(&ctx).unwrap()).unwrap();
            assert_eq!(back, ctx);
        }
        let crlf = "B\r\n\r\n1\r\n1\r\n\r\ng\r\nm\r\nX\r\n";
        assert!(read_cxt(crlf).unwrap().incident(0, 0));
    }

    #[test]
    fn cxt_errors_carry_line_numbers() {
        let err = read_cxt("B\n\n1\n2\n\ng\na\nb\nX\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 9, .. }), "{err}");
        assert!(read_cxt("Q\n").is_err());
        assert!(read_cxt("B\n\n1\n1\n\ng\na\nY\n").is_err());
        assert!(read_cxt("B\n\n2\n1\n\ng\n").is_err());
    }

    #[test]
    fn basis_text_for_two_object_toy() {
        let ctx = two_object_toy();
        let labeled = label_basis(&ctx, &canonical_basis(&ctx), ConclusionStyle::Full);
        let text = write_basis_text(&labeled).unwrap();
        assert_eq!(text, "-> a [support=2]\na c -> a b c [support=0]\n");
        assert_eq!(read_basis_text(&text).unwrap(), labeled);
        assert_eq!(read_basis_json(&write_basis_json(&labeled)).unwrap(), labeled);
        for (l, imp) in labeled.iter().zip(canonical_basis(&ctx).iter()) {
            assert_eq!(&l.resolve(&ctx).unwrap(), imp);
        }

        let short = label_basis(&ctx, &canonical_basis(&ctx), ConclusionStyle::ConsequenceOnly);
        assert_eq!(write_basis_text(&short).unwrap(), "-> a [support=2]\na c -> b [support=0]\n");
    }

    #[test]
    fn basis_text_rejects_unwritable_labels() {
        let bad = LabeledImplication {
            premise: vec!["two words".into()],
            conclusion: vec![],
            support: 0,
        };
        assert!(write_basis_text(&[bad]).is_err());
        assert!(read_basis_text("a b [support=1]").is_err());
        assert!(read_basis_text("a -> b").is_err());
    }

    #[test]
    fn csv_matrix() {
        let csv = write_context_csv(&two_object_toy()).unwrap();
        assert_eq!(csv, ",a,b,c\ng1,1,0,0\ng2,1,1,0\n");
    }
}
