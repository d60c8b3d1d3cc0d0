use std::fmt::Write;

use super::ExplicitNet;

/// Graphviz rendering: places are circles labelled with their initial token
/// count, transitions are boxes, the goal place is doubled.
pub fn to_dot(net: &ExplicitNet, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{name}\" {{");
    out.push_str("  rankdir=LR;\n");
    for p in 0..net.places {
        let shape = if p == net.goal as usize {
            "doublecircle"
        } else {
            "circle"
        };
        let tokens = net.initial[p];
        let label = if tokens > 0 {
            format!("{p}\\n{tokens}")
        } else {
            p.to_string()
        };
        let _ = writeln!(out, "  p{p} [shape={shape}, label=\"{label}\"];");
    }
    for (k, t) in net.transitions.iter().enumerate() {
        let _ = writeln!(out, "  t{k} [shape=box, label=\"t{k}\"];");
        for &(p, w) in &t.pre {
            let _ = write!(out, "  p{p} -> t{k}");
            if w > 1 {
                let _ = write!(out, " [label=\"{w}\"]");
            }
            out.push_str(";\n");
        }
        for &(p, w) in &t.post {
            let _ = write!(out, "  t{k} -> p{p}");
            if w > 1 {
                let _ = write!(out, " [label=\"{w}\"]");
            }
            out.push_str(";\n");
        }
    }
    out.push_str("}\n");
    out
}
