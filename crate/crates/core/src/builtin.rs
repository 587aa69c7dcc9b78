//! Embedded catalogs for the traditional-media model (`A`), the
//! user-generated-content model (`B`) and their merge.

use std::sync::{Arc, OnceLock};

use crate::schema::{
    merge_schemas, AttributeDef, ColourClass, EntityTypeDef, RelationTypeDef, Schema,
    SchemaError, SchemaId,
};

use ColourClass::{Anchor, DocumentResource, Information, Plain};

fn et(code: &str, name: &str, class: ColourClass) -> EntityTypeDef {
    EntityTypeDef::new(code, name, class)
}

fn rel(verb: &str, pairs: &[(&str, &str)]) -> Vec<RelationTypeDef> {
    pairs
        .iter()
        .map(|(s, t)| RelationTypeDef::new(verb, s, t))
        .collect()
}

fn schema_a() -> Schema {
    let types = vec![
        et("L", "Law", DocumentResource),
        et("RL", "Regulation", DocumentResource),
        et("C", "Comments", Information),
        et("FCR", "Fact-check report", Information),
        et("P", "Person", Anchor)
            .with_attr(AttributeDef::boolean("is_journalist"))
            .with_attr(AttributeDef::boolean("fact_checking")),
        et("JA", "Journalist association", Plain),
        et("ND", "News draft", Information),
        et("N", "News", Information),
        et("MO", "Media outlet", Plain),
        et("MOA", "Media outlet association", Plain),
        et("FO", "Fact-checking outlet", Anchor),
        et("FA", "Fact-checking association", Anchor),
        et("O", "Organisation", Anchor).with_attr(AttributeDef::boolean("news_reporting")),
        et("RCL", "Region/Country/Local", Anchor),
        et("R", "Regulator", Anchor).with_attr(AttributeDef::boolean("fact_checking")),
        et("STD", "Standards/Guidelines", DocumentResource),
        et("SR", "Services & Resources", DocumentResource),
    ];

    let mut rels = Vec::new();
    rels.extend(rel(
        "belongs_to",
        &[
            ("P", "JA"),
            ("P", "FO"),
            ("P", "FA"),
            ("FO", "FA"),
            ("MO", "MOA"),
            ("JA", "O"),
            ("JA", "RCL"),
            ("FO", "O"),
            ("FO", "RCL"),
            ("MO", "O"),
            ("MO", "RCL"),
            // funding chains and memberships used by the shipped scenarios
            ("R", "O"),
            ("O", "O"),
            ("P", "MO"),
            ("JA", "FA"),
        ],
    ));
    rels.extend(rel(
        "created",
        &[
            ("P", "ND"),
            ("JA", "STD"),
            ("FA", "STD"),
            ("MOA", "STD"),
            ("O", "STD"),
            ("R", "STD"),
            ("FA", "SR"),
            ("FO", "SR"),
            ("R", "SR"),
            ("MO", "STD"),
            ("JA", "SR"),
        ],
    ));
    rels.extend(rel("reviewed", &[("MO", "ND")]));
    rels.extend(rel(
        "published",
        &[
            ("MO", "N"),
            ("P", "N"),
            ("P", "C"),
            ("P", "FCR"),
            ("FO", "FCR"),
        ],
    ));
    rels.push(RelationTypeDef::new("published", "O", "N").guarded("news_reporting"));
    rels.extend(rel("revised", &[("MO", "N"), ("P", "N")]));
    rels.extend(rel(
        "consumed",
        &[
            ("P", "N"),
            ("P", "C"),
            ("P", "SR"),
            ("MO", "SR"),
            ("FO", "SR"),
            ("FA", "SR"),
            ("P", "FCR"),
        ],
    ));
    rels.extend(rel(
        "follows",
        &[
            ("P", "STD"),
            ("JA", "STD"),
            ("MO", "STD"),
            ("FO", "STD"),
            ("FA", "STD"),
            ("MOA", "STD"),
            ("O", "STD"),
        ],
    ));
    rels.push(RelationTypeDef::new("fact_checked", "P", "N").guarded("fact_checking"));
    rels.extend(rel("fact_checked", &[("FO", "N"), ("MO", "N")]));
    rels.push(RelationTypeDef::new("fact_checked", "R", "N").guarded("fact_checking"));
    rels.extend(rel("reports_on", &[("FCR", "N")]));
    rels.extend(rel("about", &[("C", "N")]));
    rels.extend(rel("implements", &[("R", "RL"), ("R", "L"), ("RL", "L")]));
    rels.extend(rel(
        "regulates",
        &[("R", "MOA"), ("R", "MO"), ("R", "O"), ("R", "FO"), ("R", "JA")],
    ));

    Schema::new(SchemaId::A, types, rels)
}

fn schema_b() -> Schema {
    let types = vec![
        et("RCL", "Region/Country/Local", Anchor),
        et("R", "Regulator", Anchor),
        et("O", "Organisation", Anchor),
        et("P", "Person", Anchor).with_attr(AttributeDef::boolean("fact_checking")),
        et("FO", "Fact-checking outlet", Anchor),
        et("FA", "Fact-checking association", Anchor),
        et("UGC", "User generated content", Information),
        et("AC", "Account", Plain)
            .with_attr(AttributeDef::boolean("fact_checking"))
            .with_attr(AttributeDef::boolean("is_false")),
        et("S", "Service", Plain),
        et("SP", "Service provider", Plain),
        et("SOC", "Social group", Plain),
        et("OG", "Online group", Plain),
    ];

    let mut rels = Vec::new();
    rels.extend(rel("owns", &[("P", "AC")]));
    rels.extend(rel("uses", &[("P", "AC")]));
    rels.extend(rel("created", &[("AC", "UGC"), ("AC", "OG")]));
    rels.extend(rel("manages", &[("AC", "OG")]));
    rels.extend(rel(
        "belongs_to",
        &[
            ("AC", "S"),
            ("AC", "OG"),
            ("P", "SOC"),
            ("P", "O"),
            ("FO", "RCL"),
            ("FO", "O"),
        ],
    ));
    rels.extend(rel("consumed", &[("AC", "UGC")]));
    rels.extend(rel("comments", &[("AC", "UGC")]));
    rels.extend(rel("provides", &[("SP", "S")]));
    rels.push(RelationTypeDef::new("fact_checked", "AC", "UGC").guarded("fact_checking"));
    rels.push(RelationTypeDef::new("fact_checked", "P", "UGC").guarded("fact_checking"));
    rels.extend(rel("fact_checked", &[("FO", "UGC")]));
    rels.extend(rel("regulates", &[("R", "SP"), ("R", "O"), ("R", "FO")]));

    Schema::new(SchemaId::B, types, rels)
}

/// Relation types spanning both models, added on top of `merge(A, B)`.
/// FCR belongs to model A, so reports on user content live here too.
fn bridge_relations() -> Vec<RelationTypeDef> {
    vec![
        RelationTypeDef::new("reports_on", "FCR", "UGC"),
        RelationTypeDef::new("created", "SP", "STD"),
        RelationTypeDef::new("suspended", "SP", "AC"),
    ]
}

fn build_merged() -> Schema {
    let merged = merge_schemas(&schema_a(), &schema_b())
        .expect("builtin catalogs merge without conflict");
    let mut relations = merged.relation_types().to_vec();
    relations.extend(bridge_relations());
    Schema::new(SchemaId::Merged, merged.entity_types().to_vec(), relations)
}

fn cached(slot: &'static OnceLock<Arc<Schema>>, build: fn() -> Schema) -> Arc<Schema> {
    Arc::clone(slot.get_or_init(|| Arc::new(build())))
}

static SCHEMA_A: OnceLock<Arc<Schema>> = OnceLock::new();
static SCHEMA_B: OnceLock<Arc<Schema>> = OnceLock::new();
static SCHEMA_MERGED: OnceLock<Arc<Schema>> = OnceLock::new();

/// Canonical catalog for model `A` or `B`.
pub fn builtin_schema(model_id: SchemaId) -> Result<Arc<Schema>, SchemaError> {
    match model_id {
        SchemaId::A => Ok(cached(&SCHEMA_A, schema_a)),
        SchemaId::B => Ok(cached(&SCHEMA_B, schema_b)),
        other => Err(SchemaError::UnknownModel(other.to_string())),
    }
}

/// `merge(A, B)` plus the cross-model relation types used by scenarios
/// that mix platform services with media standards.
pub fn merged_schema() -> Arc<Schema> {
    cached(&SCHEMA_MERGED, build_merged)
}

/// Schema for a scenario `model` line: `A`, `B` or `merged`.
pub fn model_schema(id: SchemaId) -> Result<Arc<Schema>, SchemaError> {
    match id {
        SchemaId::Merged => Ok(merged_schema()),
        other => builtin_schema(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{EdgeClass, ANCHOR_CODES};

    #[test]
    fn model_a_has_seventeen_types() {
        let a = builtin_schema(SchemaId::A).unwrap();
        assert_eq!(a.entity_types().len(), 17);
        assert!(a.validate().is_valid(), "{}", a.validate());
    }

    #[test]
    fn model_b_has_twelve_types_with_six_anchors() {
        let b = builtin_schema(SchemaId::B).unwrap();
        assert_eq!(b.entity_types().len(), 12);
        for code in ANCHOR_CODES {
            assert!(b.entity_type(code).is_some(), "{code}");
        }
        assert!(b.validate().is_valid(), "{}", b.validate());
    }

    #[test]
    fn merged_has_twenty_three_types_and_validates() {
        let m = merged_schema();
        assert_eq!(m.entity_types().len(), 23);
        assert!(m.validate().is_valid(), "{}", m.validate());
    }

    #[test]
    fn merged_person_carries_both_attributes_once() {
        let m = merged_schema();
        let names: Vec<_> = m
            .entity_type("P")
            .unwrap()
            .attributes
            .iter()
            .map(|a| a.name.as_str())
            .collect();
        assert_eq!(names, ["fact_checking", "is_journalist"]);
    }

    #[test]
    fn lookup_examples() {
        let a = builtin_schema(SchemaId::A).unwrap();
        let fc = a.lookup_relation("fact_checked", "P", "N").unwrap();
        assert_eq!(fc.guard.as_deref(), Some("fact_checking"));
        assert_eq!(fc.edge_class, EdgeClass::FactCheck);
        assert!(a.lookup_relation("fact_checked", "MO", "N").is_ok());
        let reg = a.lookup_relation("regulates", "R", "MO").unwrap();
        assert_eq!(reg.edge_class, EdgeClass::Regulate);
        match a.lookup_relation("regulates", "MO", "R").unwrap_err() {
            SchemaError::RelationNotFound { near_misses, .. } => {
                assert!(near_misses.contains(&("R".to_owned(), "MO".to_owned())))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_model_is_rejected() {
        assert!(matches!(
            builtin_schema(SchemaId::Merged),
            Err(SchemaError::UnknownModel(_))
        ));
        assert!(builtin_schema(SchemaId::Custom).is_err());
    }
}
