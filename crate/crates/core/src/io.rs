//! Text formats: hypergraphs (`.hg`), NAE instances as DIMACS CNF with
//! not-all-equal semantics (`.cnf`), and JSON certificates.
//!
//! Hypergraph format: a header line `h <vertex_count> <edge_count>`
//! followed by one line per edge listing vertex indices; `#` starts a
//! comment line. DIMACS: `p cnf <vars> <clauses>` with clause lines of
//! signed 1-based integers terminated by 0 and `c` comment lines;
//! exactly three literals per clause are enforced. Certificates:
//! `{"kind": "nae"|"coloring", "values": [...], "free": index|null}`
//! with values `"T"/"F"/"-"` or `"1"/"2"/"-"`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::hypergraph::{Color, ColoringCertificate, Hypergraph, PartialColoring};
use crate::nae::{Clause, Literal, NaeCertificate, NaeInstance, PartialAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid object: {0}")]
    Model(#[from] ModelError),
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("json: {0}")]
    Json(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if header.is_none() {
            let mut parts = content.split_whitespace();
            if parts.next() != Some("h") {
                return Err(syntax(line, "expected header `h <vertices> <edges>`"));
            }
            let n = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line, "bad vertex count"))?;
            let m = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line, "bad edge count"))?;
            if parts.next().is_some() {
                return Err(syntax(line, "trailing tokens after header"));
            }
            header = Some((n, m));
            continue;
        }
        let mut edge = Vec::new();
        for token in content.split_whitespace() {
            let v: usize = token
                .parse()
                .map_err(|_| syntax(line, format!("bad vertex index {token:?}")))?;
            edge.push(v);
        }
        edges.push(edge);
    }
    let Some((n, m)) = header else {
        return Err(syntax(0, "missing header"));
    };
    if edges.len() != m {
        return Err(syntax(
            0,
            format!("header promises {m} edges, found {}", edges.len()),
        ));
    }
    Ok(Hypergraph::new(n, edges)?)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "h {} {}", h.vertex_count(), h.edge_count());
    for edge in h.edges() {
        let line: Vec<String> = edge.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_nae_instance(text: &str) -> Result<NaeInstance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut literals: Vec<i64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') || content.starts_with('#') {
            continue;
        }
        if content.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate problem line"));
            }
            let mut parts = content.split_whitespace();
            parts.next();
            if parts.next() != Some("cnf") {
                return Err(syntax(line, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line, "bad variable count"))?;
            let m = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(syntax(line, "clause data before problem line"));
        }
        for token in content.split_whitespace() {
            let v: i64 = token
                .parse()
                .map_err(|_| syntax(line, format!("bad literal {token:?}")))?;
            literals.push(v);
        }
    }
    let Some((n, m)) = header else {
        return Err(syntax(0, "missing problem line"));
    };
    let mut clauses = Vec::with_capacity(m);
    let mut current: Vec<Literal> = Vec::new();
    for token in literals {
        if token == 0 {
            if current.len() != 3 {
                return Err(ParseError::Certificate(format!(
                    "clause {} has {} literals, expected exactly 3",
                    clauses.len(),
                    current.len()
                )));
            }
            clauses.push(Clause::new([current[0], current[1], current[2]])?);
            current.clear();
            continue;
        }
        let var = token.unsigned_abs() as usize;
        if var == 0 || var > n {
            return Err(ParseError::Certificate(format!(
                "literal {token} out of range"
            )));
        }
        current.push(Literal {
            var: var - 1,
            negated: token < 0,
        });
    }
    if !current.is_empty() {
        return Err(ParseError::Certificate("unterminated clause".into()));
    }
    if clauses.len() != m {
        return Err(ParseError::Certificate(format!(
            "problem line promises {m} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(NaeInstance::new(n, clauses)?)
}

pub fn write_nae_instance(i: &NaeInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", i.var_count(), i.clause_count());
    for clause in i.clauses() {
        let _ = writeln!(out, "{} 0", clause);
    }
    out
}

/// On-disk certificate form shared by both kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: String,
    pub values: Vec<String>,
    pub free: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

impl CertificateFile {
    pub fn from_nae(cert: &NaeCertificate) -> Self {
        CertificateFile {
            kind: "nae".into(),
            values: cert
                .assignment
                .values()
                .iter()
                .map(|v| match v {
                    Some(true) => "T".into(),
                    Some(false) => "F".into(),
                    None => "-".into(),
                })
                .collect(),
            free: cert.free_var,
            fallback: false,
        }
    }

    pub fn from_coloring(cert: &ColoringCertificate) -> Self {
        CertificateFile {
            kind: "coloring".into(),
            values: cert
                .coloring
                .colors()
                .iter()
                .map(|c| match c {
                    Some(Color::One) => "1".into(),
                    Some(Color::Two) => "2".into(),
                    None => "-".into(),
                })
                .collect(),
            free: cert.free_vertex,
            fallback: false,
        }
    }

    pub fn to_nae(&self) -> Result<NaeCertificate, ParseError> {
        if self.kind != "nae" {
            return Err(ParseError::Certificate(format!(
                "expected kind \"nae\", got {:?}",
                self.kind
            )));
        }
        let values = self
            .values
            .iter()
            .map(|s| match s.as_str() {
                "T" => Ok(Some(true)),
                "F" => Ok(Some(false)),
                "-" => Ok(None),
                other => Err(ParseError::Certificate(format!("bad value {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NaeCertificate {
            assignment: PartialAssignment::from_values(values),
            free_var: self.free,
        })
    }

    pub fn to_coloring(&self) -> Result<ColoringCertificate, ParseError> {
        if self.kind != "coloring" {
            return Err(ParseError::Certificate(format!(
                "expected kind \"coloring\", got {:?}",
                self.kind
            )));
        }
        let colors = self
            .values
            .iter()
            .map(|s| match s.as_str() {
                "1" => Ok(Some(Color::One)),
                "2" => Ok(Some(Color::Two)),
                "-" => Ok(None),
                other => Err(ParseError::Certificate(format!("bad value {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ColoringCertificate {
            coloring: PartialColoring::from_colors(colors),
            free_vertex: self.free,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn hypergraph_round_trip() {
        let h = gen::fano();
        let text = write_hypergraph(&h);
        assert!(text.starts_with("h 7 7\n"));
        assert_eq!(parse_hypergraph(&text).unwrap(), h);
        let commented = format!("# a comment\n\n{text}");
        assert_eq!(parse_hypergraph(&commented).unwrap(), h);
    }

    #[test]
    fn hypergraph_rejects_bad_edge_count() {
        assert!(parse_hypergraph("h 3 2\n0 1 2\n").is_err());
        assert!(parse_hypergraph("0 1 2\n").is_err());
    }

    #[test]
    fn nae_round_trip() {
        let i = gen::proposition_family(2).unwrap();
        let text = write_nae_instance(&i);
        assert!(text.starts_with("p cnf 6 5\n"));
        assert_eq!(parse_nae_instance(&text).unwrap(), i);
    }

    #[test]
    fn nae_rejects_wrong_arity() {
        assert!(parse_nae_instance("p cnf 3 1\n1 2 0\n").is_err());
        assert!(parse_nae_instance("p cnf 4 1\n1 2 3 4 0\n").is_err());
    }

    #[test]
    fn certificate_round_trips() {
        let cert = NaeCertificate {
            assignment: PartialAssignment::from_values(vec![Some(true), None, Some(false)]),
            free_var: Some(1),
        };
        let file = CertificateFile::from_nae(&cert);
        assert_eq!(file.values, vec!["T", "-", "F"]);
        let parsed = CertificateFile::parse(&file.to_json()).unwrap();
        assert_eq!(parsed.to_nae().unwrap(), cert);

        let col = ColoringCertificate {
            coloring: PartialColoring::from_colors(vec![Some(Color::One), Some(Color::Two), None]),
            free_vertex: Some(2),
        };
        let file = CertificateFile::from_coloring(&col);
        assert_eq!(file.values, vec!["1", "2", "-"]);
        assert_eq!(
            CertificateFile::parse(&file.to_json())
                .unwrap()
                .to_coloring()
                .unwrap(),
            col
        );
        assert!(file.to_nae().is_err());
    }
}
