//! Shared generators and reference implementations for the integration
//! tests and the acceptance runner.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::NaiveDate;
use fisheco_core::query::{EdgeConstraint, NodeVar};
use fisheco_core::{
    merged_schema, model_schema, AttrKind, AttrValue, Entity, Pattern, ScenarioGraph, Schema, SchemaId,
    SpreadParams, Tense,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ids and string values that stress quoting in every output format.
const AWKWARD: &[&str] = &[
    "plain",
    "with space",
    "quote \"inside\"",
    "back\\slash",
    "hash # sign",
    "braces {x}",
    "Ünïcödé",
    "a<b>&c",
    "'single'",
    "semi;colon",
    "comma, here",
    "x = y",
];

fn awkward_id(rng: &mut ChaCha8Rng, i: usize) -> String {
    if rng.random_bool(0.6) {
        format!("e{i}")
    } else {
        format!("{} {i}", AWKWARD.choose(rng).unwrap())
    }
}

fn random_date(rng: &mut ChaCha8Rng) -> NaiveDate {
    NaiveDate::from_ymd_opt(rng.random_range(2000..=2024), rng.random_range(1..=12), rng.random_range(1..=28))
        .unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng) -> SchemaId {
    *[SchemaId::A, SchemaId::B, SchemaId::Merged].choose(rng).unwrap()
}

fn random_attrs(rng: &mut ChaCha8Rng, schema: &Schema, type_code: &str) -> BTreeMap<String, AttrValue> {
    let mut attrs = BTreeMap::new();
    for def in &schema.entity_type(type_code).unwrap().attributes {
        if rng.random_bool(0.5) {
            let v = match def.kind {
                AttrKind::Boolean => AttrValue::Bool(rng.random_bool(0.5)),
                AttrKind::String => AttrValue::Str((*AWKWARD.choose(rng).unwrap()).to_owned()),
            };
            attrs.insert(def.name.clone(), v);
        }
    }
    attrs
}

/// A valid graph with `1..=max_entities` entities over a random builtin
/// model. Relations are drawn from the schema catalog; attempts the graph
/// rejects (guards, duplicates) are simply skipped.
pub fn random_graph(rng: &mut ChaCha8Rng, max_entities: usize) -> ScenarioGraph {
    let model = random_model(rng);
    random_graph_in(rng, model, max_entities)
}

pub fn random_graph_in(rng: &mut ChaCha8Rng, model: SchemaId, max_entities: usize) -> ScenarioGraph {
    let schema = model_schema(model).unwrap();
    let mut g = ScenarioGraph::new(format!("random {}", rng.random::<u16>()), Arc::clone(&schema)).unwrap();
    if rng.random_bool(0.3) {
        g.set_as_of(Some(NaiveDate::from_ymd_opt(2025, 6, 1).unwrap())).unwrap();
    }
    let codes: Vec<String> = schema.entity_types().iter().map(|t| t.code.clone()).collect();
    let n = rng.random_range(1..=max_entities);
    for i in 0..n {
        let code = codes.choose(rng).unwrap().clone();
        let attrs = random_attrs(rng, &schema, &code);
        g.add_entity(&code, &awkward_id(rng, i), attrs).unwrap();
    }
    let mut by_type: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for e in g.entities() {
        by_type.entry(e.type_code.clone()).or_default().push(e.id.clone());
    }
    let usable: Vec<(String, String, String)> = schema
        .relation_types()
        .iter()
        .filter(|r| by_type.contains_key(&r.source_type) && by_type.contains_key(&r.target_type))
        .map(|r| (r.verb.clone(), r.source_type.clone(), r.target_type.clone()))
        .collect();
    if usable.is_empty() {
        return g;
    }
    for _ in 0..rng.random_range(0..=3 * n) {
        let (verb, st, dt) = usable.choose(rng).unwrap();
        let src = by_type[st].choose(rng).unwrap();
        let dst = by_type[dt].choose(rng).unwrap();
        let date = rng.random_bool(0.5).then(|| random_date(rng));
        let tense = if rng.random_bool(0.5) { Tense::Past } else { Tense::Ongoing };
        let _ = g.add_relation(src, verb, dst, tense, date);
    }
    g
}

/// Merged-model graph built for the cascade simulator: people and accounts
/// publishing, creating and consuming items, group memberships and
/// fact-check reports. Returns the graph and an item with a publisher.
pub fn random_social_graph(rng: &mut ChaCha8Rng) -> (ScenarioGraph, String) {
    let mut g = ScenarioGraph::new("social", merged_schema()).unwrap();
    let people: Vec<String> = (0..rng.random_range(1..=8)).map(|i| format!("p{i}")).collect();
    let accounts: Vec<String> = (0..rng.random_range(0..=8)).map(|i| format!("a{i}")).collect();
    for p in &people {
        g.add_entity("P", p, BTreeMap::new()).unwrap();
    }
    for a in &accounts {
        g.add_entity("AC", a, BTreeMap::new()).unwrap();
    }
    let mut items = Vec::new();
    for i in 0..rng.random_range(1..=3) {
        let id = format!("n{i}");
        g.add_entity("N", &id, BTreeMap::new()).unwrap();
        let p = people.choose(rng).unwrap();
        g.add_relation(p, "published", &id, Tense::Past, None).unwrap();
        items.push(id);
    }
    if !accounts.is_empty() {
        for i in 0..rng.random_range(0..=3) {
            let id = format!("u{i}");
            g.add_entity("UGC", &id, BTreeMap::new()).unwrap();
            let a = accounts.choose(rng).unwrap();
            g.add_relation(a, "created", &id, Tense::Past, None).unwrap();
            items.push(id);
        }
    }
    for p in &people {
        for n in items.iter().filter(|i| i.starts_with('n')) {
            if rng.random_bool(0.4) {
                let _ = g.add_relation(p, "consumed", n, Tense::Past, None);
            }
        }
    }
    for a in &accounts {
        for u in items.iter().filter(|i| i.starts_with('u')) {
            if rng.random_bool(0.4) {
                let _ = g.add_relation(a, "consumed", u, Tense::Past, None);
            }
        }
    }
    for k in 0..rng.random_range(0..=2) {
        let soc = format!("soc{k}");
        g.add_entity("SOC", &soc, BTreeMap::new()).unwrap();
        for p in &people {
            if rng.random_bool(0.4) {
                g.add_relation(p, "belongs_to", &soc, Tense::Ongoing, None).unwrap();
            }
        }
    }
    for k in 0..rng.random_range(0..=2) {
        if accounts.is_empty() {
            break;
        }
        let og = format!("og{k}");
        g.add_entity("OG", &og, BTreeMap::new()).unwrap();
        for a in &accounts {
            if rng.random_bool(0.4) {
                g.add_relation(a, "belongs_to", &og, Tense::Ongoing, None).unwrap();
            }
        }
    }
    for (k, item) in items.iter().enumerate() {
        if rng.random_bool(0.5) {
            let fcr = format!("fcr{k}");
            g.add_entity("FCR", &fcr, BTreeMap::new()).unwrap();
            g.add_relation(&fcr, "reports_on", item, Tense::Past, None).unwrap();
            for p in &people {
                if rng.random_bool(0.5) {
                    g.add_relation(p, "consumed", &fcr, Tense::Past, None).unwrap();
                }
            }
        }
    }
    let item = items.choose(rng).unwrap().clone();
    (g, item)
}

pub fn random_params(rng: &mut ChaCha8Rng) -> SpreadParams {
    let p_share = match rng.random_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random(),
    };
    SpreadParams {
        p_share,
        damp: rng.random(),
        steps: rng.random_range(1..=8),
        seed: rng.random(),
    }
}

/// Pattern with up to three variables and three edges. Half of them are
/// lifted from a real subgraph of `g` so that most have matches; the rest
/// are built from types and verbs present in `g` or anywhere in the schema.
pub fn random_pattern(rng: &mut ChaCha8Rng, g: &ScenarioGraph) -> Pattern {
    if !g.relations().is_empty() && rng.random_bool(0.5) {
        return grounded_pattern(rng, g);
    }
    let schema = g.schema();
    let present_types: Vec<String> = g.entities().map(|e| e.type_code.clone()).collect();
    let all_types: Vec<String> = schema.entity_types().iter().map(|t| t.code.clone()).collect();
    let present_verbs: Vec<String> = g.relations().iter().map(|r| r.verb.clone()).collect();
    let all_verbs: Vec<String> = schema.relation_types().iter().map(|r| r.verb.clone()).collect();

    let k = rng.random_range(1..=3);
    let mut nodes = Vec::new();
    for i in 0..k {
        let type_code = match rng.random_range(0..4) {
            0 => None,
            1 => Some(all_types.choose(rng).unwrap().clone()),
            _ => present_types.choose(rng).cloned(),
        };
        let mut attrs = BTreeMap::new();
        if let Some(t) = &type_code {
            let defs = &schema.entity_type(t).unwrap().attributes;
            if let Some(def) = defs.choose(rng) {
                if rng.random_bool(0.4) {
                    let v = match def.kind {
                        AttrKind::Boolean => AttrValue::Bool(rng.random_bool(0.5)),
                        AttrKind::String => AttrValue::Str((*AWKWARD.choose(rng).unwrap()).to_owned()),
                    };
                    attrs.insert(def.name.clone(), v);
                }
            }
        }
        nodes.push(NodeVar {
            name: format!("v{i}"),
            type_code,
            attrs,
        });
    }
    let mut edges = Vec::new();
    for _ in 0..rng.random_range(0..=3) {
        let verb = match rng.random_range(0..4) {
            0 => None,
            1 => Some(all_verbs.choose(rng).unwrap().clone()),
            _ => present_verbs.choose(rng).cloned(),
        };
        let tense = match rng.random_range(0..4) {
            0 => Some(Tense::Past),
            1 => Some(Tense::Ongoing),
            _ => None,
        };
        edges.push(EdgeConstraint {
            source: nodes.choose(rng).unwrap().name.clone(),
            verb,
            target: nodes.choose(rng).unwrap().name.clone(),
            tense,
        });
    }
    Pattern { nodes, edges }
}

fn grounded_pattern(rng: &mut ChaCha8Rng, g: &ScenarioGraph) -> Pattern {
    let rels = g.relations();
    let first = rels.choose(rng).unwrap();
    let mut chosen = vec![first.source.clone()];
    if first.target != first.source {
        chosen.push(first.target.clone());
    }
    if rng.random_bool(0.5) {
        let touching: Vec<_> = rels
            .iter()
            .filter(|r| chosen.contains(&r.source) || chosen.contains(&r.target))
            .collect();
        let r = touching.choose(rng).unwrap();
        for end in [&r.source, &r.target] {
            if !chosen.contains(end) && chosen.len() < 3 {
                chosen.push(end.clone());
            }
        }
    }
    chosen.shuffle(rng);
    let var = |id: &String| format!("v{}", chosen.iter().position(|c| c == id).unwrap());
    let nodes = chosen
        .iter()
        .map(|id| {
            let e = g.entity(id).unwrap();
            let mut attrs = BTreeMap::new();
            if rng.random_bool(0.3) {
                let defs = &g.schema().entity_type(&e.type_code).unwrap().attributes;
                if let Some(def) = defs.choose(rng) {
                    if let Some(v) = effective_attr(g.schema(), e, &def.name) {
                        attrs.insert(def.name.clone(), v);
                    }
                }
            }
            NodeVar {
                name: var(id),
                type_code: rng.random_bool(0.8).then(|| e.type_code.clone()),
                attrs,
            }
        })
        .collect();
    let inside: Vec<_> = rels
        .iter()
        .filter(|r| chosen.contains(&r.source) && chosen.contains(&r.target))
        .collect();
    let edges = inside
        .choose_multiple(rng, 3)
        .map(|r| EdgeConstraint {
            source: var(&r.source),
            verb: rng.random_bool(0.8).then(|| r.verb.clone()),
            target: var(&r.target),
            tense: rng.random_bool(0.5).then_some(r.tense),
        })
        .collect();
    Pattern { nodes, edges }
}

/// Effective attribute read straight from the schema catalog: explicit value,
/// else the declared default, else absent.
fn effective_attr(schema: &Schema, e: &Entity, name: &str) -> Option<AttrValue> {
    if let Some(v) = e.attrs.get(name) {
        return Some(v.clone());
    }
    schema
        .entity_type(&e.type_code)?
        .attributes
        .iter()
        .find(|a| a.name == name)
        .and_then(|a| a.default.clone())
}

/// Reference matcher: tries every injective assignment of variables to
/// entities in id order and keeps those satisfying every constraint.
pub fn brute_force_matches(g: &ScenarioGraph, p: &Pattern) -> Vec<Vec<String>> {
    let entities: Vec<&Entity> = g.entities().collect();
    let k = p.nodes.len();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let n = entities.len();
    let total = n.checked_pow(k as u32).unwrap();
    let pos = |name: &str| p.nodes.iter().position(|v| v.name == name).unwrap();
    'assign: for code in 0..total {
        let mut picks = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            picks.push(c % n);
            c /= n;
        }
        picks.reverse();
        for i in 0..k {
            for j in 0..i {
                if picks[i] == picks[j] {
                    continue 'assign;
                }
            }
        }
        for (var, &pick) in p.nodes.iter().zip(&picks) {
            let e = entities[pick];
            if var.type_code.as_ref().is_some_and(|t| *t != e.type_code) {
                continue 'assign;
            }
            for (k, v) in &var.attrs {
                if effective_attr(g.schema(), e, k).as_ref() != Some(v) {
                    continue 'assign;
                }
            }
        }
        for edge in &p.edges {
            let s = &entities[picks[pos(&edge.source)]].id;
            let t = &entities[picks[pos(&edge.target)]].id;
            let found = g.relations().iter().any(|r| {
                &r.source == s
                    && &r.target == t
                    && edge.verb.as_ref().is_none_or(|v| *v == r.verb)
                    && edge.tense.is_none_or(|x| x == r.tense)
            });
            if !found {
                continue 'assign;
            }
        }
        out.push(picks.iter().map(|&i| entities[i].id.clone()).collect());
    }
    out
}

/// Reference exposure network: agents are P and AC; u→v when v consumed an
/// item u published or created, or when both share an OG/SOC membership.
pub fn brute_force_network(g: &ScenarioGraph) -> BTreeMap<String, Vec<String>> {
    let agent = |id: &str| g.entity(id).is_some_and(|e| e.type_code == "P" || e.type_code == "AC");
    let mut adj: BTreeMap<String, Vec<String>> = g
        .entities()
        .filter(|e| agent(&e.id))
        .map(|e| (e.id.clone(), Vec::new()))
        .collect();
    let rels = g.relations();
    let agents: Vec<String> = adj.keys().cloned().collect();
    for u in &agents {
        for v in &agents {
            if u == v {
                continue;
            }
            let via_item = rels.iter().any(|a| {
                &a.source == u
                    && (a.verb == "published" || a.verb == "created")
                    && rels.iter().any(|b| &b.source == v && b.verb == "consumed" && b.target == a.target)
            });
            let via_group = rels.iter().any(|a| {
                &a.source == u
                    && a.verb == "belongs_to"
                    && g.entity(&a.target).is_some_and(|t| t.type_code == "OG" || t.type_code == "SOC")
                    && rels.iter().any(|b| &b.source == v && b.verb == "belongs_to" && b.target == a.target)
            });
            if via_item || via_group {
                adj.get_mut(u).unwrap().push(v.clone());
            }
        }
    }
    adj
}
