//! Line-oriented text format for partitioned surfaces and named selections.
//!
//! A file holds one record per line: an optional `surface <name>` header,
//! `piece <id> genus=<int> boundary=<int> punctures=<int>` declarations,
//! `glue <id>.<slot> <id>.<slot> [flip] [label=<text>]` edges, and
//! `select <name> <id> [<id> ...]` named piece sets. Lines starting with
//! `#` and blank lines are skipped. [`serialize`] emits a canonical order,
//! and [`parse`] inverts it up to that order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::partition::{EndPoint, PartitionedSurface, Selection};
use crate::surface::SurfaceType;
use crate::Error;

/// A parsed surface file: the partition, its optional name, and the named
/// selections in declaration-independent (sorted) order.
#[derive(Debug, Clone)]
pub struct SurfaceDocument {
    pub name: Option<String>,
    pub partition: PartitionedSurface,
    pub selections: BTreeMap<String, Selection>,
}

impl SurfaceDocument {
    /// The named selection, or a dangling-reference error naming it.
    pub fn selection(&self, name: &str) -> Result<&Selection, ParseError> {
        self.selections.get(name).ok_or_else(|| ParseError {
            line: 0,
            kind: ParseErrorKind::DanglingReference(format!("selection {name}")),
        })
    }
}

/// What went wrong on a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed record or a record violating a model constraint.
    Syntax(String),
    /// A piece id or selection name declared twice.
    DuplicateId(String),
    /// A reference to a piece, slot, or selection that does not exist.
    DanglingReference(String),
    /// A slot glued more than once.
    DoubleGlue(String),
}

/// A parse failure with its 1-based line number; line 0 marks whole-file
/// problems such as empty input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::DuplicateId(m) => write!(f, "duplicate id: {m}"),
            ParseErrorKind::DanglingReference(m) => write!(f, "dangling reference: {m}"),
            ParseErrorKind::DoubleGlue(m) => write!(f, "slot glued twice: {m}"),
        }
    }
}

impl std::error::Error for ParseError {}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn parse_attr(line: usize, token: &str, key: &str) -> Result<i64, ParseError> {
    let value = token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected {key}=<int>, got {token}")))?;
    value.parse().map_err(|_| syntax(line, format!("{key} is not an integer: {value}")))
}

fn parse_endpoint(line: usize, token: &str, p: &PartitionedSurface) -> Result<EndPoint, ParseError> {
    let (id, slot) = token
        .rsplit_once('.')
        .ok_or_else(|| syntax(line, format!("expected <id>.<slot>, got {token}")))?;
    let slot: u32 = slot
        .parse()
        .map_err(|_| syntax(line, format!("slot is not an integer: {token}")))?;
    let dangling = || ParseError {
        line,
        kind: ParseErrorKind::DanglingReference(token.to_string()),
    };
    let t = p.piece_type(&id.into()).ok_or_else(dangling)?;
    if slot == 0 || slot > t.boundary {
        return Err(dangling());
    }
    Ok(EndPoint::new(id, slot))
}

/// Parses a surface file. Errors carry the offending 1-based line number.
pub fn parse(text: &str) -> Result<SurfaceDocument, ParseError> {
    let mut doc = SurfaceDocument {
        name: None,
        partition: PartitionedSurface::new(),
        selections: BTreeMap::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "surface" => {
                if tokens.len() != 2 {
                    return Err(syntax(line, "expected: surface <name>"));
                }
                if doc.name.is_some() {
                    return Err(syntax(line, "surface name declared twice"));
                }
                doc.name = Some(tokens[1].to_string());
            }
            "piece" => {
                if tokens.len() != 5 {
                    return Err(syntax(
                        line,
                        "expected: piece <id> genus=<int> boundary=<int> punctures=<int>",
                    ));
                }
                if tokens[1].contains('.') {
                    return Err(syntax(line, "piece ids must not contain dots"));
                }
                let genus = parse_attr(line, tokens[2], "genus")?;
                let boundary = parse_attr(line, tokens[3], "boundary")?;
                let punctures = parse_attr(line, tokens[4], "punctures")?;
                let (genus, boundary, punctures) = (
                    i32::try_from(genus).map_err(|_| syntax(line, "genus out of range"))?,
                    u32::try_from(boundary).map_err(|_| syntax(line, "boundary must be >= 0"))?,
                    u32::try_from(punctures).map_err(|_| syntax(line, "punctures must be >= 0"))?,
                );
                let t = SurfaceType::new(genus, boundary, punctures);
                doc.partition.add_piece(tokens[1], t).map_err(|_| ParseError {
                    line,
                    kind: ParseErrorKind::DuplicateId(tokens[1].to_string()),
                })?;
            }
            "glue" => {
                if tokens.len() < 3 || tokens.len() > 5 {
                    return Err(syntax(
                        line,
                        "expected: glue <id>.<slot> <id>.<slot> [flip] [label=<text>]",
                    ));
                }
                let a = parse_endpoint(line, tokens[1], &doc.partition)?;
                let b = parse_endpoint(line, tokens[2], &doc.partition)?;
                let mut rest = &tokens[3..];
                let flip = rest.first() == Some(&"flip");
                if flip {
                    rest = &rest[1..];
                }
                let label = match rest {
                    [] => None,
                    [l] => Some(
                        l.strip_prefix("label=")
                            .ok_or_else(|| syntax(line, format!("unexpected token {l}")))?
                            .to_string(),
                    ),
                    _ => return Err(syntax(line, "too many tokens after the endpoints")),
                };
                doc.partition.glue(a, b, flip, label).map_err(|e| match e {
                    Error::SlotOccupied(end) => ParseError {
                        line,
                        kind: ParseErrorKind::DoubleGlue(end.to_string()),
                    },
                    other => syntax(line, other.to_string()),
                })?;
            }
            "select" => {
                if tokens.len() < 3 {
                    return Err(syntax(line, "expected: select <name> <id> [<id> ...]"));
                }
                let name = tokens[1].to_string();
                if doc.selections.contains_key(&name) {
                    return Err(ParseError { line, kind: ParseErrorKind::DuplicateId(name) });
                }
                let mut sel = Selection::new();
                for id in &tokens[2..] {
                    if doc.partition.piece_type(&(*id).into()).is_none() {
                        return Err(ParseError {
                            line,
                            kind: ParseErrorKind::DanglingReference((*id).to_string()),
                        });
                    }
                    sel.insert((*id).into());
                }
                doc.selections.insert(name, sel);
            }
            other => return Err(syntax(line, format!("unknown record {other}"))),
        }
    }
    if doc.partition.pieces().next().is_none() {
        return Err(syntax(0, "no piece records"));
    }
    Ok(doc)
}

/// Serializes a document in canonical order: the name header, pieces sorted
/// by id, edges sorted by endpoints, selections sorted by name.
pub fn serialize(doc: &SurfaceDocument) -> String {
    let mut out = String::new();
    if let Some(name) = &doc.name {
        writeln!(out, "surface {name}").expect("writing to a string");
    }
    for (id, t) in doc.partition.pieces() {
        writeln!(
            out,
            "piece {id} genus={} boundary={} punctures={}",
            t.genus, t.boundary, t.punctures
        )
        .expect("writing to a string");
    }
    for (a, b, flip, label) in doc.partition.canonical_edges() {
        write!(out, "glue {a} {b}").expect("writing to a string");
        if flip {
            out.push_str(" flip");
        }
        if let Some(l) = label {
            write!(out, " label={l}").expect("writing to a string");
        }
        out.push('\n');
    }
    for (name, sel) in &doc.selections {
        write!(out, "select {name}").expect("writing to a string");
        for id in sel {
            write!(out, " {id}").expect("writing to a string");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PANTS: &str = "\
# a closed genus-2 surface
surface demo
piece P1 genus=0 boundary=3 punctures=0
piece P2 genus=0 boundary=3 punctures=0
glue P1.1 P2.1
glue P1.2 P2.2
glue P1.3 P2.3
select left P1
";

    #[test]
    fn two_pants_file_round_trips() {
        let doc = parse(TWO_PANTS).expect("file is well formed");
        assert_eq!(doc.partition.pieces().count(), 2);
        assert_eq!(doc.partition.edges().count(), 3);
        assert_eq!(
            doc.partition.assemble_type().expect("connected"),
            SurfaceType::new(2, 0, 0)
        );
        let text = serialize(&doc);
        let again = parse(&text).expect("canonical output reparses");
        assert!(doc.partition.same_model(&again.partition));
        assert_eq!(doc.selections, again.selections);
        assert_eq!(doc.name, again.name);
        assert_eq!(text, serialize(&again));
    }

    #[test]
    fn flip_and_label_survive_the_round_trip() {
        let text = "\
piece A genus=0 boundary=2 punctures=0
piece B genus=0 boundary=3 punctures=0
glue A.1 B.1 flip label=core
glue A.2 B.2 label=core
";
        let doc = parse(text).expect("file is well formed");
        let again = parse(&serialize(&doc)).expect("canonical output reparses");
        assert!(doc.partition.same_model(&again.partition));
    }

    #[test]
    fn double_glue_is_reported_with_its_line() {
        let text = "\
piece A genus=0 boundary=2 punctures=0
piece B genus=0 boundary=3 punctures=0
glue A.1 B.1
glue A.1 B.2
";
        let err = parse(text).expect_err("slot A.1 is glued twice");
        assert_eq!(err.line, 4);
        assert!(matches!(err.kind, ParseErrorKind::DoubleGlue(_)));
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        let err = parse("").expect_err("no pieces");
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        let err = parse("# only a comment\n").expect_err("no pieces");
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn references_to_missing_pieces_dangle() {
        let text = "\
piece A genus=0 boundary=2 punctures=0
glue A.1 B.1
";
        let err = parse(text).expect_err("B is not declared");
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::DanglingReference(_)));

        let text = "\
piece A genus=0 boundary=2 punctures=0
glue A.1 A.3
";
        let err = parse(text).expect_err("A has no slot 3");
        assert!(matches!(err.kind, ParseErrorKind::DanglingReference(_)));

        let text = "\
piece A genus=0 boundary=2 punctures=0
select N A B
";
        let err = parse(text).expect_err("B is not declared");
        assert!(matches!(err.kind, ParseErrorKind::DanglingReference(_)));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = "\
piece A genus=0 boundary=2 punctures=0
piece A genus=0 boundary=3 punctures=0
";
        let err = parse(text).expect_err("A declared twice");
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::DuplicateId(_)));

        let text = "\
piece A genus=0 boundary=2 punctures=0
select N A
select N A
";
        let err = parse(text).expect_err("N declared twice");
        assert!(matches!(err.kind, ParseErrorKind::DuplicateId(_)));
    }

    #[test]
    fn self_gluing_is_a_syntax_error() {
        let text = "\
piece A genus=0 boundary=2 punctures=0
glue A.1 A.2
";
        let err = parse(text).expect_err("both ends on one piece");
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn shipped_fixture_files_parse() {
        for name in [
            "genus2_twopants",
            "rn02_klein_hole",
            "rn05_two_klein",
            "rn06_common",
            "bounded_pants_pair",
        ] {
            let path = format!("{}/../../surfaces/{name}.surf", env!("CARGO_MANIFEST_DIR"));
            let text = std::fs::read_to_string(&path).expect("fixture file exists");
            let doc = parse(&text).expect("fixture file parses");
            assert!(doc.partition.assemble_type().is_ok(), "{name} is connected");
        }
    }
}
