//! Ontology engine for false-information and fact-checking ecosystems.
//!
//! The crate bundles two typed vocabularies (traditional media outlets and
//! user-generated content) plus their merge, mutable scenario graphs checked
//! against those vocabularies, a line-oriented authoring format, ecosystem
//! queries, DOT/GraphML export and a small seeded cascade simulator.
//!
//! Data-parallel loops (pattern matching fan-out, seed batches) run on rayon
//! when the default `parallel` feature is enabled and fall back to plain
//! iterators otherwise. See [`Execution`].

pub mod builtin;
pub mod dsl;
mod exec;
pub mod export;
pub mod graph;
pub mod query;
pub mod report;
pub mod schema;
pub mod sim;

pub use builtin::{builtin_schema, merged_schema, model_schema};
pub use dsl::{load_fixture, parse, serialize, Fixture, ParseError};
pub use exec::Execution;
pub use export::{to_dot, to_graphml, StyleMap};
pub use graph::{Entity, GraphError, Relation, ScenarioGraph, Tense};
pub use query::{
    co_fact_checkers, fact_check_events, match_pattern, match_pattern_with, regulation_chain,
    shared_backer, uncovered_items, Binding, FactCheckEvent, Pattern, QueryError,
    RegulationLink, SharedBacker,
};
pub use report::{Location, Severity, ValidationReport, Violation};
pub use schema::{
    merge_schemas, AttrKind, AttrValue, AttributeDef, ColourClass, EdgeClass, EntityTypeDef,
    RelationTypeDef, Schema, SchemaError, SchemaId,
};
pub use sim::{
    build_exposure_network, simulate, simulate_batch, ExposureNetwork, SimError, SpreadParams,
    Trajectory, PRNG_NAME,
};
