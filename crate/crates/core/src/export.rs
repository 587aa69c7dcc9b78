//! DOT and GraphML rendering with the ecosystem colour conventions.
//!
//! Output is byte-deterministic: nodes are written in id order and edges in
//! insertion order.

use std::fmt::Write as _;

use crate::graph::{Entity, Relation, ScenarioGraph, Tense};
use crate::schema::{AttrValue, ColourClass, EdgeClass};

/// Colours and attribute layout used by [`to_dot`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StyleMap {
    pub information_fill: String,
    pub document_resource_fill: String,
    pub anchor_fill: String,
    pub plain_fill: String,
    pub attribute_fill: String,
    pub fact_check_edge: String,
    pub regulate_edge: String,
    pub plain_edge: String,
    /// Draw each true boolean attribute as its own ellipse node instead of
    /// listing attributes inside the entity label.
    pub attrs_as_nodes: bool,
}

impl Default for StyleMap {
    fn default() -> Self {
        Self {
            information_fill: "#FFF2CC".to_owned(),
            document_resource_fill: "#D5E8D4".to_owned(),
            anchor_fill: "#E2F0D9".to_owned(),
            plain_fill: "#FFFFFF".to_owned(),
            attribute_fill: "#DAE8FC".to_owned(),
            fact_check_edge: "blue".to_owned(),
            regulate_edge: "red".to_owned(),
            plain_edge: "black".to_owned(),
            attrs_as_nodes: false,
        }
    }
}

impl StyleMap {
    pub fn with_attrs_as_nodes(mut self, on: bool) -> Self {
        self.attrs_as_nodes = on;
        self
    }

    pub fn fill(&self, class: ColourClass) -> &str {
        match class {
            ColourClass::Information => &self.information_fill,
            ColourClass::DocumentResource => &self.document_resource_fill,
            ColourClass::Anchor => &self.anchor_fill,
            ColourClass::Plain => &self.plain_fill,
        }
    }

    pub fn edge_colour(&self, class: EdgeClass) -> &str {
        match class {
            EdgeClass::FactCheck => &self.fact_check_edge,
            EdgeClass::Regulate => &self.regulate_edge,
            EdgeClass::Plain => &self.plain_edge,
        }
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Edge label: verb, `(past)` for past tense, `[YYYY-MM-DD]` when dated.
pub fn edge_label(r: &Relation) -> String {
    let mut label = r.verb.clone();
    if r.tense == Tense::Past {
        label.push_str(" (past)");
    }
    if let Some(d) = r.date {
        let _ = write!(label, " [{d}]");
    }
    label
}

fn colour_class(g: &ScenarioGraph, e: &Entity) -> ColourClass {
    g.schema()
        .entity_type(&e.type_code)
        .map_or(ColourClass::Plain, |et| et.colour_class)
}

fn attr_text(v: &AttrValue) -> String {
    match v {
        AttrValue::Bool(b) => b.to_string(),
        AttrValue::Str(s) => s.clone(),
    }
}

pub fn to_dot(g: &ScenarioGraph, style: &StyleMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_quote(g.name()));
    out.push_str("  node [shape=box, style=\"rounded,filled\"];\n");
    for e in g.entities() {
        let mut label = format!("{}\n{}", e.id, e.type_code);
        if !style.attrs_as_nodes {
            for (k, v) in &e.attrs {
                let _ = write!(label, "\n{k}={}", attr_text(v));
            }
        }
        let _ = writeln!(
            out,
            "  {} [label={}, fillcolor={}];",
            dot_quote(&e.id),
            dot_quote(&label),
            dot_quote(style.fill(colour_class(g, e)))
        );
    }
    if style.attrs_as_nodes {
        for e in g.entities() {
            for (k, v) in &e.attrs {
                if v.as_bool() != Some(true) {
                    continue;
                }
                let attr_node = format!("{}::{k}", e.id);
                let _ = writeln!(
                    out,
                    "  {} [label={}, shape=ellipse, style=filled, fillcolor={}];",
                    dot_quote(&attr_node),
                    dot_quote(k),
                    dot_quote(&style.attribute_fill)
                );
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dashed, arrowhead=none];",
                    dot_quote(&e.id),
                    dot_quote(&attr_node)
                );
            }
        }
    }
    for r in g.relations() {
        let class = g.edge_class(r);
        let line_style = if r.tense == Tense::Past { ", style=dotted" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, color={}{}];",
            dot_quote(&r.source),
            dot_quote(&r.target),
            dot_quote(&edge_label(r)),
            dot_quote(style.edge_colour(class)),
            line_style
        );
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// GraphML document. Node keys `type` and `attrs` (`k=v;` pairs sorted by
/// name); edge keys `verb`, `tense` and `date` (omitted when undated).
pub fn to_graphml(g: &ScenarioGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"type\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"attrs\" for=\"node\" attr.name=\"attrs\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"verb\" for=\"edge\" attr.name=\"verb\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"tense\" for=\"edge\" attr.name=\"tense\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"date\" for=\"edge\" attr.name=\"date\" attr.type=\"string\"/>\n");
    let _ = writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"directed\">",
        xml_escape(g.name())
    );
    for e in g.entities() {
        let attrs: String = e
            .attrs
            .iter()
            .map(|(k, v)| format!("{k}={};", attr_text(v)))
            .collect();
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(&e.id));
        let _ = writeln!(out, "      <data key=\"type\">{}</data>", xml_escape(&e.type_code));
        let _ = writeln!(out, "      <data key=\"attrs\">{}</data>", xml_escape(&attrs));
        out.push_str("    </node>\n");
    }
    for (i, r) in g.relations().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\">",
            xml_escape(&r.source),
            xml_escape(&r.target)
        );
        let _ = writeln!(out, "      <data key=\"verb\">{}</data>", xml_escape(&r.verb));
        let _ = writeln!(out, "      <data key=\"tense\">{}</data>", r.tense);
        if let Some(d) = r.date {
            let _ = writeln!(out, "      <data key=\"date\">{d}</data>");
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
