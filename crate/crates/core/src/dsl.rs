//! Line-oriented scenario format (`.fis`).
//!
//! ```text
//! # comment
//! scenario "BBC Breakfast"
//! model merged
//! as_of 2022-03-01                       # optional
//! entity P "Sarah Turnidge" { is_journalist = true, fact_checking = true }
//! rel "Sarah Turnidge" fact_checked "BBC clip" at 2022-02-25
//! rel "PCC" regulates "Telegraph" tense past
//! ```
//!
//! One statement per line. A relation without `tense` is `ongoing`, or
//! `past` when it carries an `at` date. Statements are replayed through the
//! graph mutators, so the first semantic failure aborts with the line it
//! occurred on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

use crate::builtin::model_schema;
use crate::graph::{GraphError, ScenarioGraph, Tense};
use crate::schema::{is_identifier, is_type_code, AttrValue, SchemaId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub message: String,
    pub snippet: String,
    /// Graph error code when the statement was well-formed but rejected by
    /// the schema (`guard-violation`, `unknown-type`, ...); `None` for
    /// syntax errors.
    pub code: Option<&'static str>,
}

impl ParseError {
    pub fn is_semantic(&self) -> bool {
        self.code.is_some()
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}\n  | {}\n  | {}^",
            self.line,
            self.column,
            self.message,
            self.snippet,
            " ".repeat(self.column.saturating_sub(1))
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    Comma,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    end_col: usize,
}

impl Line<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column: column.max(1),
            message: message.into(),
            snippet: self.text.to_owned(),
            code: None,
        }
    }
}

fn lex_line(number: usize, text: &str) -> Result<Line<'_>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let fail = |col: usize, msg: &str| ParseError {
        line: number,
        column: col,
        message: msg.to_owned(),
        snippet: text.to_owned(),
        code: None,
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '{' => {
                toks.push((col, Tok::LBrace));
                i += 1;
            }
            '}' => {
                toks.push((col, Tok::RBrace));
                i += 1;
            }
            ',' => {
                toks.push((col, Tok::Comma));
                i += 1;
            }
            '=' => {
                toks.push((col, Tok::Eq));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(fail(col, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                i += 2;
                            }
                            _ => return Err(fail(i + 1, "invalid escape (only \\\" and \\\\ are allowed)")),
                        },
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push((col, Tok::Str(s)));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '-' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                    i += 1;
                }
                toks.push((col, Tok::Word(chars[start..i].iter().collect())));
            }
            other => return Err(fail(col, &format!("unexpected character {other:?}"))),
        }
    }
    Ok(Line {
        number,
        text,
        toks,
        end_col: chars.len() + 1,
    })
}

struct Cursor<'l, 'a> {
    line: &'l Line<'a>,
    pos: usize,
}

impl<'l, 'a> Cursor<'l, 'a> {
    fn new(line: &'l Line<'a>) -> Self {
        Self { line, pos: 0 }
    }

    fn peek(&self) -> Option<&'l (usize, Tok)> {
        self.line.toks.get(self.pos)
    }

    fn col(&self) -> usize {
        self.peek().map_or(self.line.end_col, |(c, _)| *c)
    }

    fn next(&mut self, what: &str) -> Result<&'l (usize, Tok), ParseError> {
        match self.line.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.line.err(self.line.end_col, format!("expected {what}, found end of line"))),
        }
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'l str), ParseError> {
        match self.next(what)? {
            (c, Tok::Word(w)) => Ok((*c, w.as_str())),
            (c, t) => Err(self.line.err(*c, format!("expected {what}, found {t}"))),
        }
    }

    fn string(&mut self, what: &str) -> Result<(usize, &'l str), ParseError> {
        match self.next(what)? {
            (c, Tok::Str(s)) => Ok((*c, s.as_str())),
            (c, t) => Err(self.line.err(*c, format!("expected {what}, found {t}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<usize, ParseError> {
        let (c, w) = self.word(&format!("`{kw}`"))?;
        if w == kw {
            Ok(c)
        } else {
            Err(self.line.err(c, format!("expected `{kw}`, found `{w}`")))
        }
    }

    fn punct(&mut self, want: Tok) -> Result<usize, ParseError> {
        let what = want.to_string();
        match self.next(&what)? {
            (c, t) if *t == want => Ok(*c),
            (c, t) => Err(self.line.err(*c, format!("expected {what}, found {t}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some((c, t)) => Err(self.line.err(*c, format!("unexpected {t} after statement"))),
        }
    }
}

fn parse_date(line: &Line<'_>, col: usize, text: &str) -> Result<NaiveDate, ParseError> {
    let b = text.as_bytes();
    let shaped = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    let bad = || line.err(col, format!("invalid date `{text}` (expected YYYY-MM-DD)"));
    if !shaped {
        return Err(bad());
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| bad())
}

fn semantic(line: &Line<'_>, col: usize, err: GraphError) -> ParseError {
    ParseError {
        code: Some(err.code()),
        ..line.err(col, format!("{}: {err}", err.code()))
    }
}

/// Parses a scenario file into a graph checked against the builtin schema
/// named on its `model` line.
pub fn parse(text: &str) -> Result<ScenarioGraph, ParseError> {
    let mut lines = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let line = lex_line(idx + 1, raw)?;
        if !line.toks.is_empty() {
            lines.push(line);
        }
    }
    let mut iter = lines.iter().peekable();

    let eof = |what: &str| {
        let last = text.split('\n').count().max(1);
        ParseError {
            line: last,
            column: 1,
            message: format!("expected {what}, found end of input"),
            snippet: text.split('\n').next_back().unwrap_or("").trim_end_matches('\r').to_owned(),
            code: None,
        }
    };

    let head = iter.next().ok_or_else(|| eof("`scenario` header"))?;
    let mut cur = Cursor::new(head);
    cur.keyword("scenario")?;
    let (_, name) = cur.string("scenario name")?;
    cur.finish()?;

    let model_line = iter.next().ok_or_else(|| eof("`model` line"))?;
    let mut cur = Cursor::new(model_line);
    cur.keyword("model")?;
    let (col, model) = cur.word("model id")?;
    let schema_id = match model {
        "A" => SchemaId::A,
        "B" => SchemaId::B,
        "merged" => SchemaId::Merged,
        other => {
            return Err(model_line.err(col, format!("unknown model `{other}` (expected A, B or merged)")))
        }
    };
    cur.finish()?;
    let schema = model_schema(schema_id).expect("A, B and merged are builtin");
    let mut graph = ScenarioGraph::new(name, schema).expect("builtin schemas validate");

    if let Some(line) = iter.peek() {
        if matches!(line.toks.first(), Some((_, Tok::Word(w))) if w == "as_of") {
            let mut cur = Cursor::new(line);
            let start = cur.keyword("as_of")?;
            let (col, d) = cur.word("date")?;
            let date = parse_date(line, col, d)?;
            cur.finish()?;
            graph.set_as_of(Some(date)).map_err(|e| semantic(line, start, e))?;
            iter.next();
        }
    }

    for line in iter {
        let mut cur = Cursor::new(line);
        let (start, kw) = cur.word("`entity` or `rel`")?;
        match kw {
            "entity" => parse_entity(line, &mut cur, start, &mut graph)?,
            "rel" => parse_rel(line, &mut cur, start, &mut graph)?,
            "scenario" | "model" | "as_of" => {
                return Err(line.err(start, format!("`{kw}` may only appear in the header")))
            }
            other => return Err(line.err(start, format!("unknown statement `{other}`"))),
        }
    }
    Ok(graph)
}

fn parse_entity(
    line: &Line<'_>,
    cur: &mut Cursor<'_, '_>,
    start: usize,
    graph: &mut ScenarioGraph,
) -> Result<(), ParseError> {
    let (col, code) = cur.word("type code")?;
    if !is_type_code(code) {
        return Err(line.err(col, format!("type code `{code}` must match [A-Z][A-Z_]*")));
    }
    let (_, id) = cur.string("entity id")?;
    let mut attrs = BTreeMap::new();
    if matches!(cur.peek(), Some((_, Tok::LBrace))) {
        cur.punct(Tok::LBrace)?;
        loop {
            let (acol, name) = cur.word("attribute name")?;
            if !is_identifier(name) {
                return Err(line.err(acol, format!("attribute name `{name}` must match [a-z][a-z_]*")));
            }
            cur.punct(Tok::Eq)?;
            let value = match cur.next("attribute value")? {
                (_, Tok::Word(w)) if w == "true" => AttrValue::Bool(true),
                (_, Tok::Word(w)) if w == "false" => AttrValue::Bool(false),
                (_, Tok::Str(s)) => AttrValue::Str(s.clone()),
                (c, t) => return Err(line.err(*c, format!("expected true, false or a string, found {t}"))),
            };
            if attrs.insert(name.to_owned(), value).is_some() {
                return Err(line.err(acol, format!("attribute `{name}` given twice")));
            }
            match cur.next("`,` or `}`")? {
                (_, Tok::Comma) => continue,
                (_, Tok::RBrace) => break,
                (c, t) => return Err(line.err(*c, format!("expected `,` or `}}`, found {t}"))),
            }
        }
    }
    cur.finish()?;
    graph
        .add_entity(code, id, attrs)
        .map(|_| ())
        .map_err(|e| semantic(line, start, e))
}

fn parse_rel(
    line: &Line<'_>,
    cur: &mut Cursor<'_, '_>,
    start: usize,
    graph: &mut ScenarioGraph,
) -> Result<(), ParseError> {
    let (_, source) = cur.string("source id")?;
    let (vcol, verb) = cur.word("verb")?;
    if !is_identifier(verb) {
        return Err(line.err(vcol, format!("verb `{verb}` must match [a-z][a-z_]*")));
    }
    let (_, target) = cur.string("target id")?;
    let mut tense = None;
    let mut date = None;
    if matches!(cur.peek(), Some((_, Tok::Word(w))) if w == "tense") {
        cur.keyword("tense")?;
        let (tcol, t) = cur.word("`past` or `ongoing`")?;
        tense = Some(Tense::from_str(t).map_err(|m| line.err(tcol, m))?);
    }
    if matches!(cur.peek(), Some((_, Tok::Word(w))) if w == "at") {
        cur.keyword("at")?;
        let (dcol, d) = cur.word("date")?;
        date = Some(parse_date(line, dcol, d)?);
    }
    if cur.peek().is_some() {
        let col = cur.col();
        return Err(line.err(col, "expected `tense`, `at` or end of line"));
    }
    let tense = tense.unwrap_or(if date.is_some() { Tense::Past } else { Tense::Ongoing });
    graph
        .add_relation(source, verb, target, tense, date)
        .map(|_| ())
        .map_err(|e| semantic(line, start, e))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Canonical text: header, entities by `(type, id)`, relations in insertion
/// order. `parse(serialize(g)) == g` for every graph the mutators accept.
pub fn serialize(g: &ScenarioGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario {}\n", quote(g.name())));
    out.push_str(&format!("model {}\n", g.schema().id()));
    if let Some(d) = g.as_of() {
        out.push_str(&format!("as_of {d}\n"));
    }

    let mut entities: Vec<_> = g.entities().collect();
    entities.sort_by(|a, b| (&a.type_code, &a.id).cmp(&(&b.type_code, &b.id)));
    if !entities.is_empty() {
        out.push('\n');
    }
    for e in entities {
        out.push_str(&format!("entity {} {}", e.type_code, quote(&e.id)));
        if !e.attrs.is_empty() {
            let parts: Vec<String> = e
                .attrs
                .iter()
                .map(|(k, v)| match v {
                    AttrValue::Bool(b) => format!("{k} = {b}"),
                    AttrValue::Str(s) => format!("{k} = {}", quote(s)),
                })
                .collect();
            out.push_str(&format!(" {{ {} }}", parts.join(", ")));
        }
        out.push('\n');
    }

    if !g.relations().is_empty() {
        out.push('\n');
    }
    for r in g.relations() {
        out.push_str(&format!("rel {} {} {}", quote(&r.source), r.verb, quote(&r.target)));
        let implied = if r.date.is_some() { Tense::Past } else { Tense::Ongoing };
        if r.tense != implied {
            out.push_str(&format!(" tense {}", r.tense));
        }
        if let Some(d) = r.date {
            out.push_str(&format!(" at {d}"));
        }
        out.push('\n');
    }
    out
}

/// The shipped real-world scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fixture {
    BbcBreakfast,
    ServicesResources,
    UkRegulators,
    JournalistTypes,
    TrumpSuspension,
}

impl Fixture {
    pub const ALL: [Fixture; 5] = [
        Fixture::BbcBreakfast,
        Fixture::ServicesResources,
        Fixture::UkRegulators,
        Fixture::JournalistTypes,
        Fixture::TrumpSuspension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::BbcBreakfast => "bbc_breakfast",
            Fixture::ServicesResources => "services_resources",
            Fixture::UkRegulators => "uk_regulators",
            Fixture::JournalistTypes => "journalist_types",
            Fixture::TrumpSuspension => "trump_suspension",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Fixture::BbcBreakfast => include_str!("../../../scenarios/bbc_breakfast.fis"),
            Fixture::ServicesResources => include_str!("../../../scenarios/services_resources.fis"),
            Fixture::UkRegulators => include_str!("../../../scenarios/uk_regulators.fis"),
            Fixture::JournalistTypes => include_str!("../../../scenarios/journalist_types.fis"),
            Fixture::TrumpSuspension => include_str!("../../../scenarios/trump_suspension.fis"),
        }
    }
}

impl FromStr for Fixture {
    type Err = FixtureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| FixtureError::Unknown(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}` (expected one of bbc_breakfast, services_resources, uk_regulators, journalist_types, trump_suspension)")]
    Unknown(String),
    #[error("fixture {name} failed to parse: {source}")]
    Parse { name: String, source: ParseError },
}

pub fn load_fixture(name: &str) -> Result<ScenarioGraph, FixtureError> {
    let fixture: Fixture = name.parse()?;
    parse(fixture.source()).map_err(|source| FixtureError::Parse {
        name: name.to_owned(),
        source,
    })
}
