//! Typed vocabularies: entity types, attributes and relation types.
//!
//! A [`Schema`] is immutable once built. Entity types are kept sorted by
//! code, attributes by name and relation types by `(verb, source, target)`,
//! so two schemas holding the same definitions compare equal regardless of
//! the order they were declared in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{Location, ValidationReport};

/// Display colour family of an entity type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColourClass {
    Information,
    DocumentResource,
    Anchor,
    Plain,
}

impl ColourClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ColourClass::Information => "information",
            ColourClass::DocumentResource => "document_resource",
            ColourClass::Anchor => "anchor",
            ColourClass::Plain => "plain",
        }
    }

    /// Codes permitted to carry this class, or `None` when unrestricted.
    pub fn permitted_codes(self) -> Option<&'static [&'static str]> {
        match self {
            ColourClass::Information => Some(&["N", "ND", "C", "FCR", "UGC"]),
            ColourClass::DocumentResource => Some(&["L", "RL", "STD", "SR"]),
            ColourClass::Anchor => Some(&ANCHOR_CODES),
            ColourClass::Plain => None,
        }
    }
}

/// Entity types shared by both builtin models.
pub const ANCHOR_CODES: [&str; 6] = ["RCL", "R", "O", "P", "FO", "FA"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Boolean,
    String,
}

impl fmt::Display for AttrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrKind::Boolean => f.write_str("boolean"),
            AttrKind::String => f.write_str("string"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Str(String),
}

impl AttrValue {
    pub fn kind(&self) -> AttrKind {
        match self {
            AttrValue::Bool(_) => AttrKind::Boolean,
            AttrValue::Str(_) => AttrKind::String,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            AttrValue::Bool(b) => Some(*b),
            AttrValue::Str(_) => None,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Str(s) => f.write_str(s),
        }
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Str(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub kind: AttrKind,
    pub default: Option<AttrValue>,
}

impl AttributeDef {
    /// Boolean attribute defaulting to `false`.
    pub fn boolean(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind: AttrKind::Boolean,
            default: Some(AttrValue::Bool(false)),
        }
    }

    pub fn string(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind: AttrKind::String,
            default: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityTypeDef {
    pub code: String,
    pub name: String,
    pub colour_class: ColourClass,
    pub attributes: Vec<AttributeDef>,
}

impl EntityTypeDef {
    pub fn new(code: &str, name: &str, colour_class: ColourClass) -> Self {
        Self {
            code: code.to_owned(),
            name: name.to_owned(),
            colour_class,
            attributes: Vec::new(),
        }
    }

    pub fn with_attr(mut self, attr: AttributeDef) -> Self {
        self.attributes.push(attr);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

/// Visual/semantic class of a relation type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    FactCheck,
    Regulate,
    Plain,
}

impl EdgeClass {
    pub const FACT_CHECK_VERB: &'static str = "fact_checked";
    pub const REGULATE_VERB: &'static str = "regulates";

    /// The only class a relation with `verb` may carry.
    pub fn for_verb(verb: &str) -> Self {
        match verb {
            Self::FACT_CHECK_VERB => EdgeClass::FactCheck,
            Self::REGULATE_VERB => EdgeClass::Regulate,
            _ => EdgeClass::Plain,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::FactCheck => "fact_check",
            EdgeClass::Regulate => "regulate",
            EdgeClass::Plain => "plain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTypeDef {
    pub verb: String,
    pub source_type: String,
    pub target_type: String,
    pub edge_class: EdgeClass,
    /// Boolean attribute on the source that must be true.
    pub guard: Option<String>,
}

impl RelationTypeDef {
    pub fn new(verb: &str, source_type: &str, target_type: &str) -> Self {
        Self {
            verb: verb.to_owned(),
            source_type: source_type.to_owned(),
            target_type: target_type.to_owned(),
            edge_class: EdgeClass::for_verb(verb),
            guard: None,
        }
    }

    pub fn guarded(mut self, attribute: &str) -> Self {
        self.guard = Some(attribute.to_owned());
        self
    }

    pub fn key(&self) -> (&str, &str, &str) {
        (&self.verb, &self.source_type, &self.target_type)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchemaId {
    A,
    B,
    #[serde(rename = "merged")]
    Merged,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemaId::A => "A",
            SchemaId::B => "B",
            SchemaId::Merged => "merged",
            SchemaId::Custom => "custom",
        })
    }
}

impl FromStr for SchemaId {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(SchemaId::A),
            "B" => Ok(SchemaId::B),
            "merged" => Ok(SchemaId::Merged),
            "custom" => Ok(SchemaId::Custom),
            other => Err(SchemaError::UnknownModel(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
    #[error("merge conflict on entity type {code}: attribute `{attribute}` is {left} on one side and {right} on the other")]
    MergeConflict {
        code: String,
        attribute: String,
        left: AttrKind,
        right: AttrKind,
    },
    #[error("merge conflict on relation {verb}: {source_type} -> {target_type}: guards differ")]
    RelationConflict {
        verb: String,
        source_type: String,
        target_type: String,
    },
    #[error("no relation `{verb}` from {source_type} to {target_type}{}", near_miss_hint(.near_misses))]
    RelationNotFound {
        verb: String,
        source_type: String,
        target_type: String,
        /// `(source, target)` pairs declared for the same verb.
        near_misses: Vec<(String, String)>,
    },
}

fn near_miss_hint(near: &[(String, String)]) -> String {
    if near.is_empty() {
        return String::new();
    }
    let list: Vec<String> = near.iter().map(|(s, t)| format!("{s} -> {t}")).collect();
    format!("; did you mean one of: {}", list.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    id: SchemaId,
    entity_types: Vec<EntityTypeDef>,
    relation_types: Vec<RelationTypeDef>,
}

impl Schema {
    /// Builds a schema without checking it; use [`Schema::validate`] for that.
    pub fn new(
        id: SchemaId,
        mut entity_types: Vec<EntityTypeDef>,
        mut relation_types: Vec<RelationTypeDef>,
    ) -> Self {
        for et in &mut entity_types {
            et.attributes.sort_by(|a, b| a.name.cmp(&b.name));
        }
        entity_types.sort_by(|a, b| a.code.cmp(&b.code));
        relation_types.sort_by(|a, b| a.key().cmp(&b.key()));
        Self {
            id,
            entity_types,
            relation_types,
        }
    }

    pub fn id(&self) -> SchemaId {
        self.id
    }

    pub fn entity_types(&self) -> &[EntityTypeDef] {
        &self.entity_types
    }

    pub fn relation_types(&self) -> &[RelationTypeDef] {
        &self.relation_types
    }

    pub fn entity_type(&self, code: &str) -> Option<&EntityTypeDef> {
        self.entity_types
            .binary_search_by(|et| et.code.as_str().cmp(code))
            .ok()
            .map(|i| &self.entity_types[i])
    }

    pub fn has_verb(&self, verb: &str) -> bool {
        self.relation_types.iter().any(|r| r.verb == verb)
    }

    pub fn codes(&self) -> BTreeSet<&str> {
        self.entity_types.iter().map(|e| e.code.as_str()).collect()
    }

    /// Finds the relation type for `verb` from `source` to `target`.
    ///
    /// On failure the error lists same-verb triples that share an endpoint
    /// with the request (including the reversed direction), or every
    /// same-verb triple when none do.
    pub fn lookup_relation(
        &self,
        verb: &str,
        source: &str,
        target: &str,
    ) -> Result<&RelationTypeDef, SchemaError> {
        if let Ok(i) = self
            .relation_types
            .binary_search_by(|r| r.key().cmp(&(verb, source, target)))
        {
            return Ok(&self.relation_types[i]);
        }
        let same_verb: Vec<&RelationTypeDef> =
            self.relation_types.iter().filter(|r| r.verb == verb).collect();
        let touching: Vec<&RelationTypeDef> = same_verb
            .iter()
            .copied()
            .filter(|r| {
                [source, target].contains(&r.source_type.as_str())
                    || [source, target].contains(&r.target_type.as_str())
            })
            .collect();
        let chosen = if touching.is_empty() { same_verb } else { touching };
        Err(SchemaError::RelationNotFound {
            verb: verb.to_owned(),
            source_type: source.to_owned(),
            target_type: target.to_owned(),
            near_misses: chosen
                .into_iter()
                .map(|r| (r.source_type.clone(), r.target_type.clone()))
                .collect(),
        })
    }

    /// Reports structural problems. Never fails; an empty report means clean.
    pub fn validate(&self) -> ValidationReport {
        validate_schema(self)
    }

    /// Plain-text catalog: one tab-separated line per entity type, then one
    /// per relation type, both in sorted order.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# schema {}: {} entity types, {} relation types\n",
            self.id,
            self.entity_types.len(),
            self.relation_types.len()
        ));
        for et in &self.entity_types {
            let attrs: Vec<String> = et
                .attributes
                .iter()
                .map(|a| match &a.default {
                    Some(d) => format!("{}:{}={}", a.name, a.kind, d),
                    None => format!("{}:{}", a.name, a.kind),
                })
                .collect();
            out.push_str(&format!(
                "entity\t{}\t{}\t{}\t{}\n",
                et.code,
                et.name,
                et.colour_class.as_str(),
                if attrs.is_empty() { "-".to_owned() } else { attrs.join(",") }
            ));
        }
        for rt in &self.relation_types {
            out.push_str(&format!(
                "relation\t{}\t{}\t{}\t{}\t{}\n",
                rt.verb,
                rt.source_type,
                rt.target_type,
                rt.edge_class.as_str(),
                rt.guard.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

pub(crate) fn is_type_code(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c == '_')
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c == '_')
}

fn validate_schema(s: &Schema) -> ValidationReport {
    let mut report = ValidationReport::new();
    let et_loc = |code: &str| Some(Location::EntityType { code: code.to_owned() });
    let rt_loc = |r: &RelationTypeDef| {
        Some(Location::RelationType {
            verb: r.verb.clone(),
            source: r.source_type.clone(),
            target: r.target_type.clone(),
        })
    };

    let mut by_code: BTreeMap<&str, &EntityTypeDef> = BTreeMap::new();
    for et in &s.entity_types {
        if !is_type_code(&et.code) {
            report.error(
                "invalid-code",
                format!("entity type code {:?} must match [A-Z][A-Z_]*", et.code),
                et_loc(&et.code),
            );
        }
        if by_code.insert(&et.code, et).is_some() {
            report.error(
                "duplicate-code",
                format!("duplicate code: entity type {} declared more than once", et.code),
                et_loc(&et.code),
            );
        }
        if let Some(allowed) = et.colour_class.permitted_codes() {
            if !allowed.contains(&et.code.as_str()) {
                report.error(
                    "colour-class",
                    format!(
                        "colour class {} is not permitted for {}",
                        et.colour_class.as_str(),
                        et.code
                    ),
                    et_loc(&et.code),
                );
            }
        }
        let mut seen = BTreeSet::new();
        for attr in &et.attributes {
            if !is_identifier(&attr.name) {
                report.error(
                    "invalid-attribute-name",
                    format!("attribute name {:?} on {} must match [a-z][a-z_]*", attr.name, et.code),
                    et_loc(&et.code),
                );
            }
            if !seen.insert(attr.name.as_str()) {
                report.error(
                    "duplicate-attribute",
                    format!("attribute {} declared twice on {}", attr.name, et.code),
                    et_loc(&et.code),
                );
            }
            if let Some(d) = &attr.default {
                if d.kind() != attr.kind {
                    report.error(
                        "default-kind-mismatch",
                        format!(
                            "default for {}.{} is {} but the attribute is {}",
                            et.code,
                            attr.name,
                            d.kind(),
                            attr.kind
                        ),
                        et_loc(&et.code),
                    );
                }
            }
        }
    }

    let mut triples = BTreeSet::new();
    for rt in &s.relation_types {
        if !is_identifier(&rt.verb) {
            report.error(
                "invalid-verb",
                format!("verb {:?} must be lower_snake", rt.verb),
                rt_loc(rt),
            );
        }
        if !triples.insert(rt.key()) {
            report.error(
                "duplicate-relation-type",
                format!(
                    "relation {}: {} -> {} declared more than once",
                    rt.verb, rt.source_type, rt.target_type
                ),
                rt_loc(rt),
            );
        }
        if rt.edge_class != EdgeClass::for_verb(&rt.verb) {
            report.error(
                "edge-class-mismatch",
                format!(
                    "verb {} cannot carry edge class {}",
                    rt.verb,
                    rt.edge_class.as_str()
                ),
                rt_loc(rt),
            );
        }
        for endpoint in [&rt.source_type, &rt.target_type] {
            if !by_code.contains_key(endpoint.as_str()) {
                report.error(
                    "dangling-endpoint",
                    format!(
                        "dangling endpoint: {} -> {} via {} names undeclared type {}",
                        rt.source_type, rt.target_type, rt.verb, endpoint
                    ),
                    rt_loc(rt),
                );
            }
        }
        if let Some(guard) = &rt.guard {
            match by_code.get(rt.source_type.as_str()).and_then(|et| et.attribute(guard)) {
                Some(attr) if attr.kind == AttrKind::Boolean => {}
                Some(_) => report.error(
                    "guard-not-boolean",
                    format!("guard must be boolean: {}.{} is a string attribute", rt.source_type, guard),
                    rt_loc(rt),
                ),
                None => report.error(
                    "guard-undeclared",
                    format!("guard {} is not declared on {}", guard, rt.source_type),
                    rt_loc(rt),
                ),
            }
        }
    }
    report
}

/// Union of two schemas, identifying entity types that share a code.
///
/// Attribute sets of shared types are unioned; the name and colour class
/// of the left operand win. Merging a builtin schema with itself returns
/// that schema, and merging `A` with `B` (either order) yields `merged`.
pub fn merge_schemas(a: &Schema, b: &Schema) -> Result<Schema, SchemaError> {
    let mut types: BTreeMap<String, EntityTypeDef> = BTreeMap::new();
    for et in a.entity_types.iter().chain(&b.entity_types) {
        match types.get_mut(&et.code) {
            None => {
                types.insert(et.code.clone(), et.clone());
            }
            Some(existing) => {
                for attr in &et.attributes {
                    match existing.attribute(&attr.name) {
                        None => existing.attributes.push(attr.clone()),
                        Some(prev) if prev.kind != attr.kind => {
                            return Err(SchemaError::MergeConflict {
                                code: et.code.clone(),
                                attribute: attr.name.clone(),
                                left: prev.kind,
                                right: attr.kind,
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }

    let mut relations: BTreeMap<(String, String, String), RelationTypeDef> = BTreeMap::new();
    for rt in a.relation_types.iter().chain(&b.relation_types) {
        let key = (rt.verb.clone(), rt.source_type.clone(), rt.target_type.clone());
        match relations.get(&key) {
            None => {
                relations.insert(key, rt.clone());
            }
            Some(prev) if prev.guard != rt.guard => {
                return Err(SchemaError::RelationConflict {
                    verb: rt.verb.clone(),
                    source_type: rt.source_type.clone(),
                    target_type: rt.target_type.clone(),
                })
            }
            Some(_) => {}
        }
    }

    let id = match (a.id, b.id) {
        (x, y) if x == y => x,
        (SchemaId::A, SchemaId::B) | (SchemaId::B, SchemaId::A) => SchemaId::Merged,
        _ => SchemaId::Custom,
    };
    Ok(Schema::new(
        id,
        types.into_values().collect(),
        relations.into_values().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Schema {
        Schema::new(
            SchemaId::Custom,
            vec![
                EntityTypeDef::new("X", "Ex", ColourClass::Plain)
                    .with_attr(AttributeDef::boolean("flag"))
                    .with_attr(AttributeDef::string("label")),
                EntityTypeDef::new("Y", "Why", ColourClass::Plain),
            ],
            vec![RelationTypeDef::new("links", "X", "Y").guarded("flag")],
        )
    }

    #[test]
    fn tiny_schema_is_clean() {
        assert!(tiny().validate().is_valid());
    }

    #[test]
    fn dangling_endpoint_is_reported_once() {
        let s = Schema::new(
            SchemaId::Custom,
            vec![EntityTypeDef::new("X", "Ex", ColourClass::Plain)],
            vec![RelationTypeDef::new("links", "X", "Y")],
        );
        let report = s.validate();
        assert_eq!(report.error_count(), 1);
        let v = &report.violations()[0];
        assert_eq!(v.code, "dangling-endpoint");
        assert!(v.message.contains("dangling endpoint"));
    }

    #[test]
    fn string_guard_is_rejected() {
        let s = Schema::new(
            SchemaId::Custom,
            tiny().entity_types().to_vec(),
            vec![RelationTypeDef::new("links", "X", "Y").guarded("label")],
        );
        let report = s.validate();
        assert_eq!(report.error_count(), 1);
        assert!(report.violations()[0].message.contains("guard must be boolean"));
    }

    #[test]
    fn undeclared_guard_and_duplicate_code() {
        let s = Schema::new(
            SchemaId::Custom,
            vec![
                EntityTypeDef::new("X", "Ex", ColourClass::Plain),
                EntityTypeDef::new("X", "Again", ColourClass::Plain),
            ],
            vec![RelationTypeDef::new("links", "X", "X").guarded("nope")],
        );
        let codes: Vec<_> = s.validate().violations().iter().map(|v| v.code.clone()).collect();
        assert!(codes.contains(&"duplicate-code".to_owned()));
        assert!(codes.contains(&"guard-undeclared".to_owned()));
    }

    #[test]
    fn edge_class_must_follow_verb() {
        let mut bad = RelationTypeDef::new("links", "X", "Y");
        bad.edge_class = EdgeClass::Regulate;
        let s = Schema::new(SchemaId::Custom, tiny().entity_types().to_vec(), vec![bad]);
        assert_eq!(s.validate().violations()[0].code, "edge-class-mismatch");
    }

    #[test]
    fn malformed_names_are_reported() {
        let s = Schema::new(
            SchemaId::Custom,
            vec![EntityTypeDef::new("x1", "bad", ColourClass::Plain)
                .with_attr(AttributeDef::boolean("Bad"))],
            vec![],
        );
        let codes: Vec<_> = s.validate().violations().iter().map(|v| v.code.clone()).collect();
        assert_eq!(codes, ["invalid-code", "invalid-attribute-name"]);
    }

    #[test]
    fn colour_class_restricted_to_listed_codes() {
        let s = Schema::new(
            SchemaId::Custom,
            vec![EntityTypeDef::new("X", "Ex", ColourClass::Information)],
            vec![],
        );
        assert_eq!(s.validate().violations()[0].code, "colour-class");
    }

    #[test]
    fn merge_conflict_names_the_code() {
        let other = Schema::new(
            SchemaId::Custom,
            vec![EntityTypeDef::new("X", "Ex", ColourClass::Plain)
                .with_attr(AttributeDef::string("flag"))],
            vec![],
        );
        let err = merge_schemas(&tiny(), &other).unwrap_err();
        assert!(matches!(&err, SchemaError::MergeConflict { code, .. } if code == "X"));
        assert!(err.to_string().contains("entity type X"));
    }

    #[test]
    fn lookup_lists_near_misses() {
        let s = tiny();
        assert!(s.lookup_relation("links", "X", "Y").is_ok());
        let err = s.lookup_relation("links", "Y", "X").unwrap_err();
        match err {
            SchemaError::RelationNotFound { near_misses, .. } => {
                assert_eq!(near_misses, vec![("X".to_owned(), "Y".to_owned())])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_id_round_trips_through_text() {
        for id in [SchemaId::A, SchemaId::B, SchemaId::Merged, SchemaId::Custom] {
            assert_eq!(id.to_string().parse::<SchemaId>().unwrap(), id);
        }
        assert!("Z".parse::<SchemaId>().is_err());
    }
}
