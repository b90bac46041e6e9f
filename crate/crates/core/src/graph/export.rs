//! GraphML and DOT serialization of interaction graphs.

use std::fmt::Write;

use chrono::SecondsFormat;

use super::InteractionGraph;
use crate::corpus::Orientation;

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// GraphML document with one directed edge per interaction.
pub fn to_graphml(g: &InteractionGraph, orientation: Orientation) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str(
        "  <key id=\"orientation\" for=\"node\" attr.name=\"orientation\" attr.type=\"string\"/>\n",
    );
    out.push_str("  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n");
    out.push_str("  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    out.push_str(
        "  <key id=\"timestamp\" for=\"edge\" attr.name=\"timestamp\" attr.type=\"string\"/>\n",
    );
    let _ = writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"directed\">",
        orientation.name()
    );
    for (i, h) in g.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <node id=\"{}\"><data key=\"orientation\">{}</data><data key=\"degree\">{}</data></node>",
            xml_escape(h),
            orientation.name(),
            g.simple().degree(i)
        );
    }
    for (i, a) in g.arcs().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\"><data key=\"kind\">{}</data><data key=\"timestamp\">{}</data></edge>",
            xml_escape(&g.nodes()[a.source]),
            xml_escape(&g.nodes()[a.target]),
            a.kind.as_str(),
            a.created_at.to_rfc3339_opts(SecondsFormat::Secs, true)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Graphviz digraph with the same annotations as [`to_graphml`].
pub fn to_dot(g: &InteractionGraph, orientation: Orientation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", orientation.name());
    for (i, h) in g.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "  \"{}\" [orientation=\"{}\", degree={}];",
            dot_escape(h),
            orientation.name(),
            g.simple().degree(i)
        );
    }
    for a in g.arcs() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [kind=\"{}\", timestamp=\"{}\"];",
            dot_escape(&g.nodes()[a.source]),
            dot_escape(&g.nodes()[a.target]),
            a.kind.as_str(),
            a.created_at.to_rfc3339_opts(SecondsFormat::Secs, true)
        );
    }
    out.push_str("}\n");
    out
}
