//! Seeded cascade of a false item over the people and accounts of a
//! scenario.
//!
//! Agents are all P and AC entities. `u -> v` is an exposure edge when `v`
//! consumed something `u` published or created, or when both belong to the
//! same online group (OG) or social group (SOC).
//!
//! The run is synchronous: agents exposed at the start of step `t` each try
//! their out-neighbours, and successes join at `t + 1`. An agent that has
//! consumed a fact-check report on the item is *aware* and shares with
//! probability `p_share * (1 - damp)`; others with `p_share`.
//!
//! Randomness comes from ChaCha8 seeded with `seed`. Every step draws one
//! uniform `f64` in `[0, 1)` per exposure edge, walking agents and then
//! their neighbours in id order, whether or not the draw is used. The draw
//! for a given (step, edge) is therefore the same for any `p_share` or
//! `damp`, which makes runs with different parameters directly comparable.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{ordered_map, Execution};
use crate::graph::ScenarioGraph;

/// Generator recorded in simulation metadata.
pub const PRNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadParams {
    pub p_share: f64,
    pub damp: f64,
    pub steps: usize,
    pub seed: u64,
}

impl SpreadParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.p_share) {
            return Err(SimError::InvalidParams(format!("p_share {} is outside [0, 1]", self.p_share)));
        }
        if !(0.0..=1.0).contains(&self.damp) {
            return Err(SimError::InvalidParams(format!("damp {} is outside [0, 1]", self.damp)));
        }
        if self.steps == 0 {
            return Err(SimError::InvalidParams("steps must be positive".to_owned()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("{id:?} is a {type_code}, not an N or UGC item")]
    NotAnItem { id: String, type_code: String },
    #[error("item {0:?} has no publisher or creator among the agents")]
    NoPublisher(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Directed agent-to-agent graph; agents and neighbour lists sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExposureNetwork {
    agents: Vec<String>,
    adjacency: Vec<Vec<usize>>,
}

impl ExposureNetwork {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.agents.binary_search_by(|a| a.as_str().cmp(id)).ok()
    }

    pub fn neighbours(&self, id: &str) -> Vec<&str> {
        self.index_of(id)
            .map(|i| self.adjacency[i].iter().map(|&j| self.agents[j].as_str()).collect())
            .unwrap_or_default()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(u), Some(v)) => self.adjacency[u].binary_search(&v).is_ok(),
            _ => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Agents reachable from any of `seeds` (seeds included).
    pub fn reachable_from<'a>(&'a self, seeds: impl IntoIterator<Item = &'a str>) -> BTreeSet<&'a str> {
        let mut seen = vec![false; self.agents.len()];
        let mut stack: Vec<usize> = seeds.into_iter().filter_map(|s| self.index_of(s)).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(i, _)| self.agents[i].as_str())
            .collect()
    }
}

fn is_agent(type_code: &str) -> bool {
    matches!(type_code, "P" | "AC")
}

pub fn build_exposure_network(g: &ScenarioGraph) -> ExposureNetwork {
    let agents: Vec<String> = g
        .entities()
        .filter(|e| is_agent(&e.type_code))
        .map(|e| e.id.clone())
        .collect();
    let index: BTreeMap<&str, usize> = agents.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let mut edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); agents.len()];

    let mut producers: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    let mut consumers: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    let mut groups: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for r in g.relations() {
        let Some(&u) = index.get(r.source.as_str()) else { continue };
        match r.verb.as_str() {
            "published" | "created" => {
                producers.entry(&r.target).or_default().insert(u);
            }
            "consumed" => {
                consumers.entry(&r.target).or_default().insert(u);
            }
            "belongs_to"
                if g.entity(&r.target).is_some_and(|t| matches!(t.type_code.as_str(), "OG" | "SOC")) =>
            {
                groups.entry(&r.target).or_default().insert(u);
            }
            _ => {}
        }
    }
    for (item, makers) in &producers {
        if let Some(readers) = consumers.get(item) {
            for &u in makers {
                edges[u].extend(readers.iter().copied().filter(|&v| v != u));
            }
        }
    }
    for members in groups.values() {
        for &u in members {
            edges[u].extend(members.iter().copied().filter(|&v| v != u));
        }
    }
    ExposureNetwork {
        agents,
        adjacency: edges.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    /// Exposed count after each step; index 0 is the initial state.
    pub exposed_per_step: Vec<usize>,
    pub final_exposed: BTreeSet<String>,
    /// Step at which each exposed agent was first exposed.
    pub exposure_step: BTreeMap<String, usize>,
}

impl Trajectory {
    /// Agents exposed at or before `step`.
    pub fn exposed_at(&self, step: usize) -> BTreeSet<&str> {
        self.exposure_step
            .iter()
            .filter(|(_, &s)| s <= step)
            .map(|(a, _)| a.as_str())
            .collect()
    }
}

/// Agents that published or created `item_id`; the item must be N or UGC.
pub fn item_publishers(g: &ScenarioGraph, item_id: &str) -> Result<BTreeSet<String>, SimError> {
    let item = g
        .entity(item_id)
        .ok_or_else(|| SimError::UnknownItem(item_id.to_owned()))?;
    if !matches!(item.type_code.as_str(), "N" | "UGC") {
        return Err(SimError::NotAnItem {
            id: item_id.to_owned(),
            type_code: item.type_code.clone(),
        });
    }
    let publishers: BTreeSet<String> = g
        .incoming(item_id)
        .filter(|r| matches!(r.verb.as_str(), "published" | "created"))
        .filter(|r| g.entity(&r.source).is_some_and(|e| is_agent(&e.type_code)))
        .map(|r| r.source.clone())
        .collect();
    if publishers.is_empty() {
        return Err(SimError::NoPublisher(item_id.to_owned()));
    }
    Ok(publishers)
}

/// Agents that consumed a fact-check report about `item_id`.
fn aware_agents(g: &ScenarioGraph, item_id: &str) -> BTreeSet<String> {
    let reports: BTreeSet<&str> = g
        .incoming(item_id)
        .filter(|r| r.verb == "reports_on")
        .filter(|r| g.entity(&r.source).is_some_and(|e| e.type_code == "FCR"))
        .map(|r| r.source.as_str())
        .collect();
    g.relations()
        .iter()
        .filter(|r| r.verb == "consumed" && reports.contains(r.target.as_str()))
        .map(|r| r.source.clone())
        .collect()
}

/// Runs one cascade. Every agent that published or created the item starts
/// exposed (usually exactly one).
pub fn simulate(g: &ScenarioGraph, item_id: &str, params: &SpreadParams) -> Result<Trajectory, SimError> {
    params.validate()?;
    let publishers = item_publishers(g, item_id)?;
    let net = build_exposure_network(g);
    let aware = aware_agents(g, item_id);
    Ok(run(&net, &publishers, &aware, params))
}

fn run(
    net: &ExposureNetwork,
    publishers: &BTreeSet<String>,
    aware: &BTreeSet<String>,
    params: &SpreadParams,
) -> Trajectory {
    let n = net.agents.len();
    let p_eff: Vec<f64> = net
        .agents
        .iter()
        .map(|a| {
            let awareness = if aware.contains(a) { 1.0 } else { 0.0 };
            params.p_share * (1.0 - params.damp * awareness)
        })
        .collect();
    let mut step_of: Vec<Option<usize>> = vec![None; n];
    for p in publishers {
        if let Some(i) = net.index_of(p) {
            step_of[i] = Some(0);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut exposed_per_step = Vec::with_capacity(params.steps + 1);
    exposed_per_step.push(step_of.iter().filter(|s| s.is_some()).count());

    for step in 1..=params.steps {
        let mut next = step_of.clone();
        for u in 0..n {
            let active = step_of[u].is_some();
            for &v in &net.adjacency[u] {
                let draw: f64 = rng.random();
                if active && next[v].is_none() && draw < p_eff[u] {
                    next[v] = Some(step);
                }
            }
        }
        step_of = next;
        exposed_per_step.push(step_of.iter().filter(|s| s.is_some()).count());
    }

    let exposure_step: BTreeMap<String, usize> = step_of
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (net.agents[i].clone(), s)))
        .collect();
    Trajectory {
        exposed_per_step,
        final_exposed: exposure_step.keys().cloned().collect(),
        exposure_step,
    }
}

/// Runs the same cascade once per seed in `seeds` (overriding
/// `params.seed`). Results are returned in seed order for either
/// execution mode.
pub fn simulate_batch(
    g: &ScenarioGraph,
    item_id: &str,
    params: &SpreadParams,
    seeds: Range<u64>,
    exec: Execution,
) -> Result<Vec<(u64, Trajectory)>, SimError> {
    params.validate()?;
    let publishers = item_publishers(g, item_id)?;
    let net = build_exposure_network(g);
    let aware = aware_agents(g, item_id);
    let seeds: Vec<u64> = seeds.collect();
    Ok(ordered_map(exec, &seeds, |&seed| {
        let p = SpreadParams { seed, ..*params };
        (seed, run(&net, &publishers, &aware, &p))
    }))
}
