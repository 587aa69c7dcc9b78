//! Pattern matching and named ecosystem analyses over a [`ScenarioGraph`].
//!
//! All queries borrow the graph immutably.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{ordered_map, Execution};
use crate::graph::{Entity, Relation, ScenarioGraph, Tense};
use crate::schema::{AttrValue, EdgeClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error("pattern uses unknown entity type {0}")]
    UnknownType(String),
    #[error("pattern uses unknown verb `{0}`")]
    UnknownVerb(String),
    #[error("pattern variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("pattern edge refers to undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("pattern type {type_code} declares no attribute `{attribute}`")]
    UnknownAttribute { type_code: String, attribute: String },
    #[error("invalid pattern at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("max_depth must be at least 1")]
    InvalidDepth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeVar {
    pub name: String,
    pub type_code: Option<String>,
    pub attrs: BTreeMap<String, AttrValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConstraint {
    pub source: String,
    /// `None` matches any verb.
    pub verb: Option<String>,
    pub target: String,
    pub tense: Option<Tense>,
}

/// A small subgraph query: typed node variables plus edge constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub nodes: Vec<NodeVar>,
    pub edges: Vec<EdgeConstraint>,
}

impl Pattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, name: &str, type_code: Option<&str>) -> Self {
        self.nodes.push(NodeVar {
            name: name.to_owned(),
            type_code: type_code.map(str::to_owned),
            attrs: BTreeMap::new(),
        });
        self
    }

    /// Adds an attribute constraint to the most recently declared node.
    pub fn with_attr(mut self, name: &str, value: AttrValue) -> Self {
        if let Some(last) = self.nodes.last_mut() {
            last.attrs.insert(name.to_owned(), value);
        }
        self
    }

    pub fn edge(mut self, source: &str, verb: Option<&str>, target: &str, tense: Option<Tense>) -> Self {
        self.edges.push(EdgeConstraint {
            source: source.to_owned(),
            verb: verb.map(str::to_owned),
            target: target.to_owned(),
            tense,
        });
        self
    }

    /// Parses the inline form used on the command line:
    ///
    /// ```text
    /// x:FO, y:N{is_journalist=true}; x -fact_checked-> y, x -*@past-> y
    /// ```
    ///
    /// Node declarations come before `;`, edges after. A node is `var`,
    /// `var:TYPE` and optionally `{attr=value,...}` with `true`, `false` or
    /// a double-quoted string. An edge is `src -verb-> dst`, where `verb`
    /// may be `*` and may carry `@past` or `@ongoing`.
    pub fn parse(text: &str) -> Result<Self, QueryError> {
        PatternParser { src: text, pos: 0 }.pattern()
    }

    fn var_index(&self) -> Result<HashMap<&str, usize>, QueryError> {
        let mut index = HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.name.as_str(), i).is_some() {
                return Err(QueryError::DuplicateVariable(n.name.clone()));
            }
        }
        for e in &self.edges {
            for v in [&e.source, &e.target] {
                if !index.contains_key(v.as_str()) {
                    return Err(QueryError::UndeclaredVariable(v.clone()));
                }
            }
        }
        Ok(index)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(|n| {
                let mut s = n.name.clone();
                if let Some(t) = &n.type_code {
                    s.push(':');
                    s.push_str(t);
                }
                if !n.attrs.is_empty() {
                    let parts: Vec<String> = n
                        .attrs
                        .iter()
                        .map(|(k, v)| match v {
                            AttrValue::Bool(b) => format!("{k}={b}"),
                            AttrValue::Str(s) => format!("{k}={s:?}"),
                        })
                        .collect();
                    s.push_str(&format!("{{{}}}", parts.join(",")));
                }
                s
            })
            .collect();
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                let mut verb = e.verb.clone().unwrap_or_else(|| "*".to_owned());
                if let Some(t) = e.tense {
                    verb.push('@');
                    verb.push_str(t.as_str());
                }
                format!("{} -{}-> {}", e.source, verb, e.target)
            })
            .collect();
        write!(f, "{}; {}", nodes.join(", "), edges.join(", "))
    }
}

struct PatternParser<'a> {
    src: &'a str,
    pos: usize,
}

impl PatternParser<'_> {
    fn err(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), QueryError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        let word = self.rest()[..len].to_owned();
        self.pos += len;
        Ok(word)
    }

    fn string(&mut self) -> Result<String, QueryError> {
        self.expect("\"")?;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    _ => return Err(self.err("invalid escape")),
                },
                c => out.push(c),
            }
        }
        Err(self.err("unterminated string"))
    }

    fn pattern(&mut self) -> Result<Pattern, QueryError> {
        let mut p = Pattern::new();
        loop {
            let name = self.ident()?;
            let type_code = if self.eat(":") { Some(self.ident()?) } else { None };
            let mut attrs = BTreeMap::new();
            if self.eat("{") {
                loop {
                    let k = self.ident()?;
                    self.expect("=")?;
                    self.skip_ws();
                    let v = if self.rest().starts_with('"') {
                        AttrValue::Str(self.string()?)
                    } else {
                        match self.ident()?.as_str() {
                            "true" => AttrValue::Bool(true),
                            "false" => AttrValue::Bool(false),
                            other => return Err(self.err(format!("expected true, false or a string, found `{other}`"))),
                        }
                    };
                    attrs.insert(k, v);
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            p.nodes.push(NodeVar { name, type_code, attrs });
            if !self.eat(",") {
                break;
            }
        }
        if self.eat(";") {
            self.skip_ws();
            while !self.rest().is_empty() {
                let source = self.ident()?;
                self.expect("-")?;
                let verb = if self.eat("*") { None } else { Some(self.ident()?) };
                let tense = if self.eat("@") {
                    let t = self.ident()?;
                    Some(t.parse::<Tense>().map_err(|m| self.err(m))?)
                } else {
                    None
                };
                self.expect("->")?;
                let target = self.ident()?;
                p.edges.push(EdgeConstraint { source, verb, target, tense });
                if !self.eat(",") {
                    break;
                }
                self.skip_ws();
            }
        }
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }
}

/// Variable → entity id assignment, in the pattern's variable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pairs: Vec<(String, String)>,
}

impl Binding {
    pub fn from_pairs(pairs: Vec<(String, String)>) -> Self {
        Self { pairs }
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.pairs.iter().find(|(v, _)| v == var).map(|(_, id)| id.as_str())
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Bound ids in variable order.
    pub fn ids(&self) -> Vec<&str> {
        self.pairs.iter().map(|(_, id)| id.as_str()).collect()
    }
}

impl Serialize for Binding {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.pairs.len()))?;
        for (k, v) in &self.pairs {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct CompiledEdge<'p> {
    source: usize,
    target: usize,
    verb: Option<&'p str>,
    tense: Option<Tense>,
}

struct Matcher<'g, 'p> {
    pattern: &'p Pattern,
    candidates: Vec<Vec<&'g str>>,
    /// Edge constraints to check once variable `i` is bound; all their
    /// endpoints are `<= i`.
    checks: Vec<Vec<CompiledEdge<'p>>>,
    adjacency: HashMap<(&'g str, &'g str), Vec<&'g Relation>>,
}

impl<'g, 'p> Matcher<'g, 'p> {
    fn new(graph: &'g ScenarioGraph, pattern: &'p Pattern) -> Result<Self, QueryError> {
        let index = pattern.var_index()?;
        let schema = graph.schema();
        for n in &pattern.nodes {
            if let Some(t) = &n.type_code {
                let et = schema
                    .entity_type(t)
                    .ok_or_else(|| QueryError::UnknownType(t.clone()))?;
                for k in n.attrs.keys() {
                    if et.attribute(k).is_none() {
                        return Err(QueryError::UnknownAttribute {
                            type_code: t.clone(),
                            attribute: k.clone(),
                        });
                    }
                }
            }
        }
        for e in &pattern.edges {
            if let Some(v) = &e.verb {
                if !schema.has_verb(v) {
                    return Err(QueryError::UnknownVerb(v.clone()));
                }
            }
        }

        let candidates = pattern
            .nodes
            .iter()
            .map(|n| {
                graph
                    .entities()
                    .filter(|e| node_matches(graph, n, e))
                    .map(|e| e.id.as_str())
                    .collect()
            })
            .collect();

        let mut checks: Vec<Vec<CompiledEdge<'p>>> = pattern.nodes.iter().map(|_| Vec::new()).collect();
        for e in &pattern.edges {
            let (s, t) = (index[e.source.as_str()], index[e.target.as_str()]);
            checks[s.max(t)].push(CompiledEdge {
                source: s,
                target: t,
                verb: e.verb.as_deref(),
                tense: e.tense,
            });
        }

        let mut adjacency: HashMap<(&str, &str), Vec<&Relation>> = HashMap::new();
        for r in graph.relations() {
            adjacency
                .entry((r.source.as_str(), r.target.as_str()))
                .or_default()
                .push(r);
        }
        Ok(Self {
            pattern,
            candidates,
            checks,
            adjacency,
        })
    }

    fn edge_holds(&self, e: &CompiledEdge<'_>, bound: &[&str]) -> bool {
        self.adjacency
            .get(&(bound[e.source], bound[e.target]))
            .is_some_and(|rels| {
                rels.iter().any(|r| {
                    e.verb.is_none_or(|v| r.verb == v) && e.tense.is_none_or(|t| r.tense == t)
                })
            })
    }

    fn extend(&self, bound: &mut Vec<&'g str>, out: &mut Vec<Binding>) {
        let depth = bound.len();
        if depth == self.pattern.nodes.len() {
            out.push(Binding {
                pairs: self
                    .pattern
                    .nodes
                    .iter()
                    .zip(bound.iter())
                    .map(|(n, id)| (n.name.clone(), (*id).to_owned()))
                    .collect(),
            });
            return;
        }
        for &id in &self.candidates[depth] {
            if bound.contains(&id) {
                continue;
            }
            bound.push(id);
            if self.checks[depth].iter().all(|e| self.edge_holds(e, bound)) {
                self.extend(bound, out);
            }
            bound.pop();
        }
    }

    fn run(&self, exec: Execution) -> Vec<Binding> {
        if self.pattern.nodes.is_empty() {
            return Vec::new();
        }
        let roots = &self.candidates[0];
        ordered_map(exec, roots, |&root| {
            let mut out = Vec::new();
            let mut bound = vec![root];
            if self.checks[0].iter().all(|e| self.edge_holds(e, &bound)) {
                self.extend(&mut bound, &mut out);
            }
            out
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

fn node_matches(g: &ScenarioGraph, n: &NodeVar, e: &Entity) -> bool {
    if n.type_code.as_ref().is_some_and(|t| *t != e.type_code) {
        return false;
    }
    n.attrs.iter().all(|(k, v)| g.attr(e, k).as_ref() == Some(v))
}

/// Every injective binding satisfying the pattern, ordered
/// lexicographically by bound ids in variable order. A pattern without
/// variables has no bindings.
pub fn match_pattern(g: &ScenarioGraph, p: &Pattern) -> Result<Vec<Binding>, QueryError> {
    match_pattern_with(g, p, Execution::default())
}

/// [`match_pattern`] with an explicit scheduling choice; the result is the
/// same for both.
pub fn match_pattern_with(
    g: &ScenarioGraph,
    p: &Pattern,
    exec: Execution,
) -> Result<Vec<Binding>, QueryError> {
    Ok(Matcher::new(g, p)?.run(exec))
}

fn require<'g>(g: &'g ScenarioGraph, id: &str) -> Result<&'g Entity, QueryError> {
    g.entity(id).ok_or_else(|| QueryError::UnknownEntity(id.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactCheckEvent {
    pub checker_id: String,
    pub checker_type: String,
    pub tense: Tense,
    pub date: Option<NaiveDate>,
    pub report_id: Option<String>,
}

/// One row per incoming `fact_checked` edge on `target_id`, sorted by date
/// (undated last) then checker id.
///
/// A row is linked to the first FCR (by id) that `reports_on` the target
/// and was published either by the checker itself or by an organisation
/// the checker `belongs_to`.
pub fn fact_check_events(g: &ScenarioGraph, target_id: &str) -> Result<Vec<FactCheckEvent>, QueryError> {
    require(g, target_id)?;
    let reports: BTreeSet<&str> = g
        .incoming(target_id)
        .filter(|r| r.verb == "reports_on")
        .filter(|r| g.entity(&r.source).is_some_and(|e| e.type_code == "FCR"))
        .map(|r| r.source.as_str())
        .collect();

    let mut rows: Vec<FactCheckEvent> = g
        .incoming(target_id)
        .filter(|r| r.verb == EdgeClass::FACT_CHECK_VERB)
        .map(|r| {
            let checker = g.entity(&r.source);
            let affiliations: HashSet<&str> = std::iter::once(r.source.as_str())
                .chain(
                    g.outgoing(&r.source)
                        .filter(|x| x.verb == "belongs_to")
                        .map(|x| x.target.as_str()),
                )
                .collect();
            let report_id = reports
                .iter()
                .find(|fcr| {
                    g.incoming(fcr)
                        .any(|p| p.verb == "published" && affiliations.contains(p.source.as_str()))
                })
                .map(|s| s.to_string());
            FactCheckEvent {
                checker_id: r.source.clone(),
                checker_type: checker.map(|e| e.type_code.clone()).unwrap_or_default(),
                tense: r.tense,
                date: r.date,
                report_id,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |e: &FactCheckEvent| (e.date.is_none(), e.date, e.checker_id.clone());
        key(a).cmp(&key(b))
    });
    Ok(rows)
}

/// Distinct sources of incoming `fact_checked` edges.
pub fn co_fact_checkers(g: &ScenarioGraph, target_id: &str) -> Result<BTreeSet<String>, QueryError> {
    require(g, target_id)?;
    Ok(g.incoming(target_id)
        .filter(|r| r.verb == EdgeClass::FACT_CHECK_VERB)
        .map(|r| r.source.clone())
        .collect())
}

/// N and UGC entities nobody has fact-checked, sorted by id.
pub fn uncovered_items(g: &ScenarioGraph) -> Vec<String> {
    let checked: HashSet<&str> = g
        .relations()
        .iter()
        .filter(|r| r.verb == EdgeClass::FACT_CHECK_VERB)
        .map(|r| r.target.as_str())
        .collect();
    g.entities()
        .filter(|e| matches!(e.type_code.as_str(), "N" | "UGC"))
        .filter(|e| !checked.contains(e.id.as_str()))
        .map(|e| e.id.clone())
        .collect()
}

/// A backer reachable from both actors, with one path from each.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SharedBacker {
    pub backer: String,
    pub path_a: Vec<String>,
    pub path_b: Vec<String>,
}

/// Simple `belongs_to` paths of length 1..=max_depth from `start`, ending at
/// O or RCL entities, grouped by their endpoint.
fn backer_paths(g: &ScenarioGraph, start: &str, max_depth: usize) -> BTreeMap<String, BTreeSet<Vec<String>>> {
    fn walk(
        g: &ScenarioGraph,
        path: &mut Vec<String>,
        max_depth: usize,
        out: &mut BTreeMap<String, BTreeSet<Vec<String>>>,
    ) {
        if path.len() > max_depth {
            return;
        }
        let here = path.last().expect("path starts non-empty").clone();
        let next: BTreeSet<&str> = g
            .outgoing(&here)
            .filter(|r| r.verb == "belongs_to")
            .map(|r| r.target.as_str())
            .collect();
        for n in next {
            if path.iter().any(|p| p == n) {
                continue;
            }
            path.push(n.to_owned());
            if g.entity(n).is_some_and(|e| matches!(e.type_code.as_str(), "O" | "RCL")) {
                out.entry(n.to_owned()).or_default().insert(path.clone());
            }
            if path.len() <= max_depth {
                walk(g, path, max_depth, out);
            }
            path.pop();
        }
    }
    let mut out = BTreeMap::new();
    walk(g, &mut vec![start.to_owned()], max_depth, &mut out);
    out
}

/// Pairs of `belongs_to` paths (each at most `max_depth` edges) from `a_id`
/// and `b_id` that end at the same O or RCL entity.
pub fn shared_backer(
    g: &ScenarioGraph,
    a_id: &str,
    b_id: &str,
    max_depth: usize,
) -> Result<Vec<SharedBacker>, QueryError> {
    require(g, a_id)?;
    require(g, b_id)?;
    if max_depth == 0 {
        return Err(QueryError::InvalidDepth);
    }
    let from_a = backer_paths(g, a_id, max_depth);
    let from_b = backer_paths(g, b_id, max_depth);
    let mut out = Vec::new();
    for (backer, paths_a) in &from_a {
        let Some(paths_b) = from_b.get(backer) else { continue };
        for pa in paths_a {
            for pb in paths_b {
                out.push(SharedBacker {
                    backer: backer.clone(),
                    path_a: pa.clone(),
                    path_b: pb.clone(),
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RegulationLink {
    pub regulator: String,
    pub tense: Tense,
    /// L and RL entities the regulator implements.
    pub instruments: Vec<String>,
}

/// Regulators with a `regulates` edge into `entity_id`, sorted by regulator
/// then tense.
pub fn regulation_chain(g: &ScenarioGraph, entity_id: &str) -> Result<Vec<RegulationLink>, QueryError> {
    require(g, entity_id)?;
    let mut links: Vec<RegulationLink> = g
        .incoming(entity_id)
        .filter(|r| r.verb == EdgeClass::REGULATE_VERB)
        .map(|r| {
            let instruments: BTreeSet<String> = g
                .outgoing(&r.source)
                .filter(|x| x.verb == "implements")
                .filter(|x| g.entity(&x.target).is_some_and(|e| matches!(e.type_code.as_str(), "L" | "RL")))
                .map(|x| x.target.clone())
                .collect();
            RegulationLink {
                regulator: r.source.clone(),
                tense: r.tense,
                instruments: instruments.into_iter().collect(),
            }
        })
        .collect();
    links.sort();
    links.dedup();
    Ok(links)
}
