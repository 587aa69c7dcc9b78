//! Scenario graphs: typed entities and dated relations checked against a
//! [`Schema`].
//!
//! Mutators validate before touching any state, so a failed call leaves the
//! graph exactly as it was. Graphs read from JSON are admitted structurally
//! and may violate instance rules; [`ScenarioGraph::validate`] reports those.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builtin::model_schema;
use crate::report::{Location, ValidationReport};
use crate::schema::{AttrKind, AttrValue, EdgeClass, Schema, SchemaError, SchemaId};

/// Document tag written into every JSON export.
pub const JSON_FORMAT: &str = "fisheco-graph/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Ongoing,
}

impl Tense {
    pub fn as_str(self) -> &'static str {
        match self {
            Tense::Past => "past",
            Tense::Ongoing => "ongoing",
        }
    }
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "past" => Ok(Tense::Past),
            "ongoing" => Ok(Tense::Ongoing),
            other => Err(format!("unknown tense `{other}` (expected past or ongoing)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: String,
    pub type_code: String,
    /// Explicitly set attributes only; see [`ScenarioGraph::bool_attr`].
    pub attrs: BTreeMap<String, AttrValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub source: String,
    pub verb: String,
    pub target: String,
    pub tense: Tense,
    pub date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("schema is not valid:\n{0}")]
    InvalidSchema(ValidationReport),
    #[error("entity id must be non-empty and free of control characters: {0:?}")]
    InvalidId(String),
    #[error("entity {0:?} already exists")]
    DuplicateId(String),
    #[error("unknown entity type {0}")]
    UnknownType(String),
    #[error("entity type {type_code} declares no attribute `{attribute}`")]
    UnknownAttribute { type_code: String, attribute: String },
    #[error("attribute `{attribute}` on {type_code} expects a {expected} value")]
    AttributeKindMismatch {
        type_code: String,
        attribute: String,
        expected: AttrKind,
    },
    #[error("string value for `{0}` must be free of control characters")]
    InvalidValue(String),
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error(transparent)]
    UnknownRelation(SchemaError),
    #[error("{from:?} cannot {verb}: guard attribute `{attribute}` is not true")]
    GuardViolation {
        from: String,
        verb: String,
        attribute: String,
    },
    #[error("relation {from:?} {verb} {target:?} with the same tense and date already exists")]
    DuplicateRelation {
        from: String,
        verb: String,
        target: String,
    },
    #[error("ongoing relation dated {date} lies after the scenario's as-of date {as_of}")]
    DateAfterAsOf { date: NaiveDate, as_of: NaiveDate },
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("document declares schema {found} but {expected} was supplied")]
    SchemaMismatch { expected: String, found: String },
    #[error("unknown verb `{0}`")]
    UnknownVerb(String),
}

impl GraphError {
    /// Stable kebab-case identifier for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::InvalidSchema(_) => "invalid-schema",
            GraphError::InvalidId(_) => "invalid-id",
            GraphError::DuplicateId(_) => "duplicate-id",
            GraphError::UnknownType(_) => "unknown-type",
            GraphError::UnknownAttribute { .. } => "unknown-attribute",
            GraphError::AttributeKindMismatch { .. } => "attribute-kind-mismatch",
            GraphError::InvalidValue(_) => "invalid-value",
            GraphError::UnknownEntity(_) => "unknown-entity",
            GraphError::UnknownRelation(_) => "unknown-relation-triple",
            GraphError::GuardViolation { .. } => "guard-violation",
            GraphError::DuplicateRelation { .. } => "duplicate-relation",
            GraphError::DateAfterAsOf { .. } => "date-after-as-of",
            GraphError::Malformed(_) => "malformed-document",
            GraphError::SchemaMismatch { .. } => "schema-mismatch",
            GraphError::UnknownVerb(_) => "unknown-verb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioGraph {
    name: String,
    schema: Arc<Schema>,
    as_of: Option<NaiveDate>,
    entities: BTreeMap<String, Entity>,
    relations: Vec<Relation>,
}

fn has_control(s: &str) -> bool {
    s.chars().any(char::is_control)
}

impl ScenarioGraph {
    pub fn new(name: impl Into<String>, schema: Arc<Schema>) -> Result<Self, GraphError> {
        let report = schema.validate();
        if report.has_errors() {
            return Err(GraphError::InvalidSchema(report));
        }
        Ok(Self {
            name: name.into(),
            schema,
            as_of: None,
            entities: BTreeMap::new(),
            relations: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn as_of(&self) -> Option<NaiveDate> {
        self.as_of
    }

    /// Sets the reference date that bounds dated ongoing relations.
    /// Fails without change if an existing relation would violate it.
    pub fn set_as_of(&mut self, as_of: Option<NaiveDate>) -> Result<(), GraphError> {
        if let Some(limit) = as_of {
            for r in &self.relations {
                check_as_of(r.tense, r.date, Some(limit))?;
            }
        }
        self.as_of = as_of;
        Ok(())
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    /// Entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    /// Relations in insertion order.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn entities_of_type<'a>(&'a self, code: &'a str) -> impl Iterator<Item = &'a Entity> + 'a {
        self.entities.values().filter(move |e| e.type_code == code)
    }

    pub fn incoming<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.iter().filter(move |r| r.target == id)
    }

    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.iter().filter(move |r| r.source == id)
    }

    /// Effective value of an attribute, falling back to the schema default.
    pub fn attr(&self, entity: &Entity, name: &str) -> Option<AttrValue> {
        if let Some(v) = entity.attrs.get(name) {
            return Some(v.clone());
        }
        self.schema
            .entity_type(&entity.type_code)
            .and_then(|et| et.attribute(name))
            .and_then(|a| a.default.clone())
    }

    /// Effective boolean attribute; undeclared or non-boolean reads as false.
    pub fn bool_attr(&self, entity: &Entity, name: &str) -> bool {
        self.attr(entity, name).and_then(|v| v.as_bool()).unwrap_or(false)
    }

    pub fn add_entity(
        &mut self,
        type_code: &str,
        id: &str,
        attrs: BTreeMap<String, AttrValue>,
    ) -> Result<&Entity, GraphError> {
        if id.is_empty() || has_control(id) {
            return Err(GraphError::InvalidId(id.to_owned()));
        }
        if self.entities.contains_key(id) {
            return Err(GraphError::DuplicateId(id.to_owned()));
        }
        check_attrs(&self.schema, type_code, &attrs)?;
        let entity = Entity {
            id: id.to_owned(),
            type_code: type_code.to_owned(),
            attrs,
        };
        Ok(self.entities.entry(id.to_owned()).or_insert(entity))
    }

    pub fn add_relation(
        &mut self,
        source: &str,
        verb: &str,
        target: &str,
        tense: Tense,
        date: Option<NaiveDate>,
    ) -> Result<&Relation, GraphError> {
        let relation = Relation {
            source: source.to_owned(),
            verb: verb.to_owned(),
            target: target.to_owned(),
            tense,
            date,
        };
        self.check_relation(&relation)?;
        check_as_of(tense, date, self.as_of)?;
        if self.relations.contains(&relation) {
            return Err(GraphError::DuplicateRelation {
                from: relation.source,
                verb: relation.verb,
                target: relation.target,
            });
        }
        self.relations.push(relation);
        Ok(self.relations.last().expect("just pushed"))
    }

    fn check_relation(&self, r: &Relation) -> Result<(), GraphError> {
        let src = self
            .entities
            .get(&r.source)
            .ok_or_else(|| GraphError::UnknownEntity(r.source.clone()))?;
        let dst = self
            .entities
            .get(&r.target)
            .ok_or_else(|| GraphError::UnknownEntity(r.target.clone()))?;
        let def = self
            .schema
            .lookup_relation(&r.verb, &src.type_code, &dst.type_code)
            .map_err(GraphError::UnknownRelation)?;
        if let Some(guard) = &def.guard {
            if !self.bool_attr(src, guard) {
                return Err(GraphError::GuardViolation {
                    from: r.source.clone(),
                    verb: r.verb.clone(),
                    attribute: guard.clone(),
                });
            }
        }
        Ok(())
    }

    /// Edge class of a relation instance according to the schema.
    pub fn edge_class(&self, r: &Relation) -> EdgeClass {
        EdgeClass::for_verb(&r.verb)
    }

    /// Re-checks every instance rule and adds ecosystem warnings
    /// (`uncovered-item`, `fake-account-content`).
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        for e in self.entities.values() {
            let loc = Some(Location::Entity { id: e.id.clone() });
            if e.id.is_empty() || has_control(&e.id) {
                report.error("invalid-id", GraphError::InvalidId(e.id.clone()).to_string(), loc.clone());
            }
            if let Err(err) = check_attrs(&self.schema, &e.type_code, &e.attrs) {
                report.error(err.code(), err.to_string(), loc);
            }
        }

        let mut seen = HashSet::new();
        for (index, r) in self.relations.iter().enumerate() {
            let loc = Some(Location::Relation {
                index,
                source: r.source.clone(),
                verb: r.verb.clone(),
                target: r.target.clone(),
            });
            let mut fault = None;
            for end in [&r.source, &r.target] {
                if fault.is_none() && !self.entities.contains_key(end) {
                    fault = Some((
                        "dangling-endpoint",
                        format!("dangling endpoint: relation refers to missing entity {end:?}"),
                    ));
                }
            }
            if fault.is_none() {
                if let Err(err) = self.check_relation(r) {
                    fault = Some((err.code(), err.to_string()));
                }
            }
            if fault.is_none() {
                if let Err(err) = check_as_of(r.tense, r.date, self.as_of) {
                    fault = Some((err.code(), err.to_string()));
                }
            }
            if let Some((code, message)) = fault {
                report.error(code, message, loc.clone());
            }
            if !seen.insert(r) {
                report.error(
                    "duplicate-relation",
                    format!("relation {:?} {} {:?} appears more than once", r.source, r.verb, r.target),
                    loc,
                );
            }
        }

        for e in self.entities.values() {
            if matches!(e.type_code.as_str(), "N" | "UGC")
                && !self.incoming(&e.id).any(|r| r.verb == EdgeClass::FACT_CHECK_VERB)
            {
                report.warning(
                    "uncovered-item",
                    format!("uncovered item: {} {:?} has no incoming fact_checked edge", e.type_code, e.id),
                    Some(Location::Entity { id: e.id.clone() }),
                );
            }
        }
        for e in self.entities_of_type("AC") {
            if !self.bool_attr(e, "is_false") {
                continue;
            }
            let created_ugc = self.outgoing(&e.id).any(|r| {
                r.verb == "created"
                    && self.entities.get(&r.target).is_some_and(|t| t.type_code == "UGC")
            });
            if created_ugc {
                report.warning(
                    "fake-account-content",
                    format!("fake-account content: account {:?} has is_false=true and created UGC", e.id),
                    Some(Location::Entity { id: e.id.clone() }),
                );
            }
        }
        report
    }

    /// Deterministic JSON document: entities sorted by id, relations in
    /// insertion order, keys in the order `format, name, schema, [as_of],
    /// entities, relations`.
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            format: JSON_FORMAT.to_owned(),
            name: self.name.clone(),
            schema: self.schema.id().to_string(),
            as_of: self.as_of,
            entities: self
                .entities
                .values()
                .map(|e| EntityDoc {
                    id: e.id.clone(),
                    type_code: e.type_code.clone(),
                    attrs: e.attrs.clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationDoc {
                    src: r.source.clone(),
                    verb: r.verb.clone(),
                    dst: r.target.clone(),
                    tense: r.tense,
                    date: r.date,
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("graph documents always serialize");
        text.push('\n');
        text
    }

    /// Reads a document written by [`ScenarioGraph::to_json`] against `schema`.
    ///
    /// Type codes and verbs must exist in the schema; instance rules such as
    /// guards are not enforced here.
    pub fn from_json(text: &str, schema: Arc<Schema>) -> Result<Self, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        if doc.format != JSON_FORMAT {
            return Err(GraphError::Malformed(format!(
                "unsupported format {:?}, expected {JSON_FORMAT:?}",
                doc.format
            )));
        }
        if doc.schema != schema.id().to_string() {
            return Err(GraphError::SchemaMismatch {
                expected: schema.id().to_string(),
                found: doc.schema,
            });
        }
        let mut graph = Self::new(doc.name, schema)?;
        graph.as_of = doc.as_of;
        for e in doc.entities {
            if graph.schema.entity_type(&e.type_code).is_none() {
                return Err(GraphError::UnknownType(e.type_code));
            }
            if graph.entities.contains_key(&e.id) {
                return Err(GraphError::Malformed(format!("entity id {:?} appears twice", e.id)));
            }
            graph.entities.insert(
                e.id.clone(),
                Entity {
                    id: e.id,
                    type_code: e.type_code,
                    attrs: e.attrs,
                },
            );
        }
        for r in doc.relations {
            if !graph.schema.has_verb(&r.verb) {
                return Err(GraphError::UnknownVerb(r.verb));
            }
            graph.relations.push(Relation {
                source: r.src,
                verb: r.verb,
                target: r.dst,
                tense: r.tense,
                date: r.date,
            });
        }
        Ok(graph)
    }

    /// Like [`ScenarioGraph::from_json`], resolving the builtin schema named
    /// in the document.
    pub fn from_json_builtin(text: &str) -> Result<Self, GraphError> {
        #[derive(Deserialize)]
        struct Head {
            schema: String,
        }
        let head: Head =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        let schema = head
            .schema
            .parse::<SchemaId>()
            .and_then(model_schema)
            .map_err(|_| GraphError::Malformed(format!("no builtin schema named {:?}", head.schema)))?;
        Self::from_json(text, schema)
    }
}

fn check_attrs(
    schema: &Schema,
    type_code: &str,
    attrs: &BTreeMap<String, AttrValue>,
) -> Result<(), GraphError> {
    let et = schema
        .entity_type(type_code)
        .ok_or_else(|| GraphError::UnknownType(type_code.to_owned()))?;
    for (name, value) in attrs {
        let def = et.attribute(name).ok_or_else(|| GraphError::UnknownAttribute {
            type_code: type_code.to_owned(),
            attribute: name.clone(),
        })?;
        if def.kind != value.kind() {
            return Err(GraphError::AttributeKindMismatch {
                type_code: type_code.to_owned(),
                attribute: name.clone(),
                expected: def.kind,
            });
        }
        if let AttrValue::Str(s) = value {
            if has_control(s) {
                return Err(GraphError::InvalidValue(name.clone()));
            }
        }
    }
    Ok(())
}

fn check_as_of(tense: Tense, date: Option<NaiveDate>, as_of: Option<NaiveDate>) -> Result<(), GraphError> {
    match (tense, date, as_of) {
        (Tense::Ongoing, Some(date), Some(as_of)) if date > as_of => {
            Err(GraphError::DateAfterAsOf { date, as_of })
        }
        _ => Ok(()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    format: String,
    name: String,
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    as_of: Option<NaiveDate>,
    entities: Vec<EntityDoc>,
    relations: Vec<RelationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityDoc {
    id: String,
    #[serde(rename = "type")]
    type_code: String,
    #[serde(default)]
    attrs: BTreeMap<String, AttrValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    src: String,
    verb: String,
    dst: String,
    tense: Tense,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    date: Option<NaiveDate>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::merged_schema;
    use crate::schema::{ColourClass, EntityTypeDef, RelationTypeDef};

    fn attrs(pairs: &[(&str, AttrValue)]) -> BTreeMap<String, AttrValue> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn bbc_fragment() -> ScenarioGraph {
        let mut g = ScenarioGraph::new("t", merged_schema()).unwrap();
        g.add_entity(
            "P",
            "Sarah Turnidge",
            attrs(&[("is_journalist", true.into()), ("fact_checking", true.into())]),
        )
        .unwrap();
        g.add_entity("N", "BBC clip", BTreeMap::new()).unwrap();
        g
    }

    #[test]
    fn new_graph_is_empty_and_valid() {
        let g = ScenarioGraph::new("t", merged_schema()).unwrap();
        assert_eq!(g.entity_count(), 0);
        assert_eq!(g.relation_count(), 0);
        assert!(g.validate().is_valid());
    }

    #[test]
    fn new_graph_rejects_broken_schema() {
        let broken = Schema::new(
            SchemaId::Custom,
            vec![EntityTypeDef::new("X", "x", ColourClass::Plain)],
            vec![RelationTypeDef::new("to", "X", "Y")],
        );
        assert!(matches!(
            ScenarioGraph::new("t", Arc::new(broken)),
            Err(GraphError::InvalidSchema(_))
        ));
    }

    #[test]
    fn add_entity_errors() {
        let mut g = bbc_fragment();
        let err = g.add_entity("P", "Sarah Turnidge", BTreeMap::new()).unwrap_err();
        assert_eq!(err.code(), "duplicate-id");
        let err = g
            .add_entity("N", "clip", attrs(&[("fact_checking", true.into())]))
            .unwrap_err();
        assert_eq!(err.code(), "unknown-attribute");
        let err = g.add_entity("ZZ", "z", BTreeMap::new()).unwrap_err();
        assert_eq!(err.code(), "unknown-type");
        let err = g
            .add_entity("P", "x", attrs(&[("fact_checking", "yes".into())]))
            .unwrap_err();
        assert_eq!(err.code(), "attribute-kind-mismatch");
        assert_eq!(g.add_entity("P", "", BTreeMap::new()).unwrap_err().code(), "invalid-id");
        assert_eq!(g.entity_count(), 2);
    }

    #[test]
    fn fact_check_by_capable_person_is_accepted() {
        let mut g = bbc_fragment();
        let r = g
            .add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, Some(date("2022-02-25")))
            .unwrap();
        assert_eq!(r.tense, Tense::Past);
        assert!(g.validate().is_valid());
    }

    #[test]
    fn guard_violation_leaves_graph_untouched() {
        let mut g = bbc_fragment();
        g.add_entity("P", "Person B", attrs(&[("fact_checking", false.into())])).unwrap();
        let before = g.to_json();
        let err = g
            .add_relation("Person B", "fact_checked", "BBC clip", Tense::Past, None)
            .unwrap_err();
        assert!(matches!(&err, GraphError::GuardViolation { attribute, .. } if attribute == "fact_checking"));
        assert_eq!(before, g.to_json());
    }

    #[test]
    fn default_false_guard_also_blocks() {
        let mut g = bbc_fragment();
        g.add_entity("P", "Quiet", BTreeMap::new()).unwrap();
        let err = g.add_relation("Quiet", "fact_checked", "BBC clip", Tense::Ongoing, None);
        assert_eq!(err.unwrap_err().code(), "guard-violation");
    }

    #[test]
    fn relation_errors() {
        let mut g = bbc_fragment();
        assert_eq!(
            g.add_relation("nobody", "fact_checked", "BBC clip", Tense::Past, None).unwrap_err().code(),
            "unknown-entity"
        );
        let err = g
            .add_relation("BBC clip", "fact_checked", "Sarah Turnidge", Tense::Past, None)
            .unwrap_err();
        assert_eq!(err.code(), "unknown-relation-triple");
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, None).unwrap();
        assert_eq!(
            g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, None).unwrap_err().code(),
            "duplicate-relation"
        );
        // a distinct date makes it a separate event
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, Some(date("2022-03-01")))
            .unwrap();
    }

    #[test]
    fn as_of_bounds_dated_ongoing_relations() {
        let mut g = bbc_fragment();
        g.set_as_of(Some(date("2022-01-01"))).unwrap();
        let err = g
            .add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Ongoing, Some(date("2022-02-25")))
            .unwrap_err();
        assert_eq!(err.code(), "date-after-as-of");
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, Some(date("2022-02-25")))
            .unwrap();
        g.set_as_of(None).unwrap();
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Ongoing, Some(date("2022-02-25")))
            .unwrap();
        assert!(g.set_as_of(Some(date("2022-01-01"))).is_err());
    }

    #[test]
    fn uncovered_news_is_a_warning() {
        let g = bbc_fragment();
        let report = g.validate();
        assert_eq!(report.error_count(), 0);
        assert_eq!(report.warning_count(), 1);
        assert_eq!(report.violations()[0].code, "uncovered-item");
    }

    #[test]
    fn fake_account_content_is_flagged() {
        let mut g = ScenarioGraph::new("t", merged_schema()).unwrap();
        g.add_entity("AC", "@fake", attrs(&[("is_false", true.into())])).unwrap();
        g.add_entity("UGC", "post", BTreeMap::new()).unwrap();
        g.add_relation("@fake", "created", "post", Tense::Past, None).unwrap();
        let codes: Vec<_> = g.validate().warnings().map(|v| v.code.clone()).collect();
        assert!(codes.contains(&"fake-account-content".to_owned()));
    }

    #[test]
    fn deserialized_guard_violation_is_reported() {
        let text = r#"{
  "format": "fisheco-graph/1",
  "name": "t",
  "schema": "merged",
  "entities": [
    {"id": "B", "type": "P", "attrs": {"fact_checking": false}},
    {"id": "clip", "type": "N", "attrs": {}}
  ],
  "relations": [
    {"src": "B", "verb": "fact_checked", "dst": "clip", "tense": "past"}
  ]
}"#;
        let g = ScenarioGraph::from_json(text, merged_schema()).unwrap();
        let report = g.validate();
        assert_eq!(report.error_count(), 1, "{report}");
        assert_eq!(report.errors().next().unwrap().code, "guard-violation");
    }

    #[test]
    fn json_rejects_unknown_verb_and_schema_mismatch() {
        let mut g = bbc_fragment();
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, None).unwrap();
        let text = g.to_json().replace("\"fact_checked\"", "\"factchecked\"");
        assert_eq!(
            ScenarioGraph::from_json(&text, merged_schema()).unwrap_err().code(),
            "unknown-verb"
        );
        let a = crate::builtin::builtin_schema(SchemaId::A).unwrap();
        assert_eq!(
            ScenarioGraph::from_json(&g.to_json(), a).unwrap_err().code(),
            "schema-mismatch"
        );
        assert_eq!(
            ScenarioGraph::from_json("{", merged_schema()).unwrap_err().code(),
            "malformed-document"
        );
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let mut g = bbc_fragment();
        g.set_as_of(Some(date("2023-01-01"))).unwrap();
        g.add_relation("Sarah Turnidge", "fact_checked", "BBC clip", Tense::Past, Some(date("2022-02-25")))
            .unwrap();
        let text = g.to_json();
        assert_eq!(text, g.to_json());
        let back = ScenarioGraph::from_json_builtin(&text).unwrap();
        assert_eq!(back, g);
        assert!(text.find("\"format\"").unwrap() < text.find("\"entities\"").unwrap());
    }
}
