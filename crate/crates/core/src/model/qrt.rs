//! `.qrt` quartet files.
//!
//! ```text
//! taxa: a b c d e
//! # comment lines are ignored
//! a b | c d
//! ```
//!
//! Emission lists topologies in canonical order.

use std::fmt::Write as _;

use thiserror::Error;

use super::{canonical_topology, ModelError, QuartetSet, TaxonSet};

#[derive(Debug, Error)]
pub enum QrtError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
    #[error("missing `taxa:` header")]
    MissingHeader,
}

/// Parsed file: the quartet set plus its `#` comment lines (without `#`).
#[derive(Clone, Debug)]
pub struct QrtFile {
    pub quartets: QuartetSet,
    pub comments: Vec<String>,
}

pub fn parse_qrt(text: &str) -> Result<QrtFile, QrtError> {
    let mut taxa: Option<TaxonSet> = None;
    let mut comments = Vec::new();
    let mut tops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let Some(ts) = &taxa else {
            let rest = line.strip_prefix("taxa:").ok_or(QrtError::MissingHeader)?;
            let set = TaxonSet::new(rest.split_whitespace()).map_err(|source| QrtError::Model {
                line: line_no,
                source,
            })?;
            taxa = Some(set);
            continue;
        };
        let (l, r) = line.split_once('|').ok_or_else(|| QrtError::Syntax {
            line: line_no,
            message: "expected `a b | c d`".into(),
        })?;
        let mut names = l.split_whitespace().chain(r.split_whitespace());
        let mut ids = [0usize; 4];
        let counts = (l.split_whitespace().count(), r.split_whitespace().count());
        if counts != (2, 2) {
            return Err(QrtError::Syntax {
                line: line_no,
                message: "each side needs exactly two taxa".into(),
            });
        }
        for slot in &mut ids {
            let name = names.next().unwrap();
            *slot = ts.index_of(name).ok_or_else(|| QrtError::Syntax {
                line: line_no,
                message: format!("unknown taxon {name:?}"),
            })?;
        }
        let t = canonical_topology(ids[0], ids[1], ids[2], ids[3]).map_err(|source| {
            QrtError::Model {
                line: line_no,
                source,
            }
        })?;
        tops.push((line_no, t));
    }
    let taxa = taxa.ok_or(QrtError::MissingHeader)?;
    // report the line of the second occurrence on duplicates
    let mut seen = std::collections::HashSet::new();
    for (line, t) in &tops {
        if !seen.insert(t.taxa()) {
            return Err(QrtError::Model {
                line: *line,
                source: ModelError::DuplicateQuartet(t.taxa()),
            });
        }
    }
    let quartets = QuartetSet::new(taxa, tops.into_iter().map(|(_, t)| t))
        .map_err(|source| QrtError::Model { line: 0, source })?;
    Ok(QrtFile { quartets, comments })
}

/// Writes the `taxa:` line, then `comments` as `# ...` lines, then one
/// topology per line.
pub fn write_qrt(q: &QuartetSet, comments: &[String]) -> String {
    let taxa = q.taxa();
    let mut out = String::from("taxa:");
    for name in taxa.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for t in q.iter() {
        let [a, b, c, d] = t.indices();
        let _ = writeln!(
            out,
            "{} {} | {} {}",
            taxa.name(a),
            taxa.name(b),
            taxa.name(c),
            taxa.name(d)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_write() {
        let text = "taxa: a b c d e\n# hello\nb a | d c\n\na c | b e\n";
        let f = parse_qrt(text).unwrap();
        assert_eq!(f.quartets.len(), 2);
        assert_eq!(f.comments, vec!["hello".to_string()]);
        let out = write_qrt(&f.quartets, &f.comments);
        assert_eq!(out, "taxa: a b c d e\n# hello\na b | c d\na c | b e\n");
        let again = parse_qrt(&out).unwrap();
        assert_eq!(again.quartets, f.quartets);
    }

    #[test]
    fn duplicate_subset_is_an_error() {
        let text = "taxa: a b c d\na b | c d\na c | b d\n";
        match parse_qrt(text) {
            Err(QrtError::Model {
                line: 3,
                source: ModelError::DuplicateQuartet(_),
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_qrt("a b | c d\n"),
            Err(QrtError::MissingHeader)
        ));
        assert!(matches!(
            parse_qrt("taxa: a b c d\na b c d\n"),
            Err(QrtError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_qrt("taxa: a b c d\na b | c x\n"),
            Err(QrtError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_qrt("taxa: a b c d\na a | c d\n"),
            Err(QrtError::Model { line: 2, .. })
        ));
    }
}
