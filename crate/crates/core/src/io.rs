//! JSON, DOT and CSV formats.

use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::analysis::{CactusCertificate, SystemNode};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::graph::{DynamicGraph, PhysicalGraph, Role};
use crate::pipeline::{DesignSolution, EdgeRef, OutputInfo};
use crate::realization::FieldSystem;
use crate::structure::{BoolMatrix, OutputSource, StructuralPair};

fn format_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    sensors: Vec<String>,
    #[serde(default)]
    backbone: Vec<String>,
    fusion: Option<String>,
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    meta: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: String,
    to: String,
    cost: Number,
}

pub fn parse_physical_graph(text: &str) -> Result<PhysicalGraph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(format_err)?;
    let fusion = doc.fusion.ok_or(Error::MissingFusion)?;
    if doc.sensors.is_empty() {
        return Err(Error::NoSensors);
    }
    let edges = doc
        .edges
        .into_iter()
        .map(|e| Ok((e.from, e.to, Cost::parse_decimal(&e.cost.to_string())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhysicalGraph::new(doc.sensors, doc.backbone, fusion, edges)?.with_meta(doc.meta))
}

pub fn graph_to_json(g: &PhysicalGraph) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| json!({"from": g.name(e.tail), "to": g.name(e.head), "cost": e.cost.to_json()}))
        .collect();
    json!({
        "sensors": g.sensor_names(),
        "backbone": g.backbone_names(),
        "fusion": g.fusion_name(),
        "edges": edges,
        "meta": Value::Object(g.meta().clone()),
    })
}

pub fn dynamic_to_json(gd: &DynamicGraph) -> Value {
    let outputs: Vec<Value> = (0..gd.n_outputs())
        .map(|r| {
            let o = &gd.outputs[r];
            json!({
                "name": gd.output_name(r),
                "sensor": gd.sensor_names[o.source_sensor],
                "backbone": gd.backbone_names[o.via_backbone],
            })
        })
        .collect();
    let edges: Vec<Value> = gd
        .edges
        .iter()
        .map(|e| json!({"id": e.id, "from": gd.name(e.tail), "to": gd.name(e.head), "cost": e.cost.to_json()}))
        .collect();
    json!({
        "variant": format!("{:?}", gd.variant).to_lowercase(),
        "sensors": gd.sensor_names,
        "outputs": outputs,
        "fusion": gd.fusion_name,
        "edges": edges,
    })
}

fn pattern_json(m: &BoolMatrix) -> Value {
    json!(m.to_rows())
}

pub fn design_to_json(d: &DesignSolution) -> Value {
    let outputs: Vec<Value> = d
        .outputs
        .iter()
        .map(|o| {
            json!({
                "row": o.row,
                "sensor": o.sensor,
                "backbone": o.backbone,
                "used": o.used,
                "route_cost": d.per_output_route_cost[o.row].map_or(Value::Null, Cost::to_json),
            })
        })
        .collect();
    let used: Vec<Value> = d.used_edges.iter().map(|e| json!({"id": e.id, "from": e.from, "to": e.to})).collect();
    json!({
        "k": d.k,
        "sensors": d.sensors,
        "backbone": d.backbone,
        "a_pattern": pattern_json(d.structure.a()),
        "c_pattern": pattern_json(d.structure.c()),
        "outputs": outputs,
        "cost_per_output_sum": d.cost_per_output_sum.to_json(),
        "cost_deduplicated": d.cost_deduplicated.to_json(),
        "used_edges": used,
    })
}

#[derive(Deserialize)]
struct DesignDoc {
    k: usize,
    sensors: Vec<String>,
    #[serde(default)]
    backbone: Vec<String>,
    a_pattern: Vec<Vec<u8>>,
    c_pattern: Vec<Vec<u8>>,
    outputs: Vec<OutputDoc>,
    cost_per_output_sum: Number,
    cost_deduplicated: Number,
    used_edges: Vec<EdgeRefDoc>,
}

#[derive(Deserialize)]
struct OutputDoc {
    row: usize,
    sensor: String,
    backbone: String,
    used: bool,
    #[serde(default)]
    route_cost: Option<Number>,
}

#[derive(Deserialize)]
struct EdgeRefDoc {
    id: usize,
    from: String,
    to: String,
}

fn cost_of(n: &Number) -> Result<Cost> {
    Cost::parse_decimal(&n.to_string())
}

pub fn parse_design(text: &str) -> Result<DesignSolution> {
    let doc: DesignDoc = serde_json::from_str(text).map_err(format_err)?;
    let n = doc.sensors.len();
    let corrupt = |msg: String| Error::Format(format!("design document: {msg}"));
    if doc.a_pattern.len() != n {
        return Err(corrupt(format!("a_pattern has {} rows for {n} sensors", doc.a_pattern.len())));
    }
    let a = BoolMatrix::from_rows(&doc.a_pattern, n).map_err(|e| corrupt(e.to_string()))?;
    let c = BoolMatrix::from_rows(&doc.c_pattern, n).map_err(|e| corrupt(e.to_string()))?;
    if doc.outputs.len() != c.rows() {
        return Err(corrupt(format!("{} outputs for {} c_pattern rows", doc.outputs.len(), c.rows())));
    }
    let mut backbone: Vec<String> = doc.backbone.clone();
    let mut index = Vec::with_capacity(doc.outputs.len());
    let mut outputs = Vec::with_capacity(doc.outputs.len());
    let mut route_costs = Vec::with_capacity(doc.outputs.len());
    for (r, o) in doc.outputs.iter().enumerate() {
        if o.row != r {
            return Err(corrupt(format!("output rows out of order at {r}")));
        }
        let sensor =
            doc.sensors.iter().position(|s| *s == o.sensor).ok_or_else(|| corrupt(format!("unknown sensor {}", o.sensor)))?;
        let q = match backbone.iter().position(|b| *b == o.backbone) {
            Some(q) => q,
            None => {
                backbone.push(o.backbone.clone());
                backbone.len() - 1
            }
        };
        let used = c.row(r).iter().any(|&b| b);
        if used != o.used {
            return Err(corrupt(format!("output {r} usage disagrees with c_pattern")));
        }
        index.push(Some(OutputSource { sensor, backbone: q }));
        outputs.push(OutputInfo { row: r, sensor: o.sensor.clone(), backbone: o.backbone.clone(), used: o.used });
        route_costs.push(o.route_cost.as_ref().map(cost_of).transpose()?);
    }
    let structure = StructuralPair::new(a, c, index).map_err(|e| corrupt(e.to_string()))?;
    Ok(DesignSolution {
        k: doc.k,
        sensors: doc.sensors,
        backbone,
        structure,
        outputs,
        per_output_route_cost: route_costs,
        cost_per_output_sum: cost_of(&doc.cost_per_output_sum)?,
        cost_deduplicated: cost_of(&doc.cost_deduplicated)?,
        used_edges: doc.used_edges.into_iter().map(|e| EdgeRef { id: e.id, from: e.from, to: e.to }).collect(),
    })
}

pub fn system_to_json(sys: &FieldSystem) -> Value {
    let structure = sys.structure().map_or(Value::Null, |s| {
        json!({"a_pattern": pattern_json(s.a()), "c_pattern": pattern_json(s.c())})
    });
    json!({
        "p": sys.field().p(),
        "a": sys.a().to_rows(),
        "c": sys.c().to_rows(),
        "structure_ref": structure,
    })
}

#[derive(Deserialize)]
struct SystemDoc {
    p: u64,
    a: Vec<Vec<u64>>,
    c: Vec<Vec<u64>>,
    #[serde(default)]
    structure_ref: Option<StructureRefDoc>,
}

#[derive(Deserialize)]
struct StructureRefDoc {
    a_pattern: Vec<Vec<u8>>,
    c_pattern: Vec<Vec<u8>>,
}

pub fn parse_system(text: &str) -> Result<FieldSystem> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(format_err)?;
    let field = PrimeField::new(doc.p)?;
    let n = doc.a.len();
    let a = FieldMatrix::from_rows(&doc.a, n)?;
    let c = FieldMatrix::from_rows(&doc.c, n)?;
    let structure = match doc.structure_ref {
        Some(s) => Some(StructuralPair::from_patterns(
            BoolMatrix::from_rows(&s.a_pattern, n)?,
            BoolMatrix::from_rows(&s.c_pattern, n)?,
        )?),
        None => None,
    };
    FieldSystem::new(field, a, c, structure)
}

/// Trace CSV: header `n,y_1,...,y_M`, one row per step.
pub fn trace_to_csv(trace: &[Vec<u64>], n_outputs: usize) -> String {
    let mut out = String::from("n");
    for i in 1..=n_outputs {
        let _ = write!(out, ",y_{i}");
    }
    out.push('\n');
    for (t, row) in trace.iter().enumerate() {
        let _ = write!(out, "{t}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<Vec<u64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Format("empty trace".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"n") || cols.iter().skip(1).enumerate().any(|(i, c)| *c != format!("y_{}", i + 1)) {
        return Err(Error::Format(format!("bad trace header `{header}`")));
    }
    let m = cols.len() - 1;
    lines
        .enumerate()
        .map(|(t, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != m + 1 || fields[0].parse::<usize>().ok() != Some(t) {
                return Err(Error::Format(format!("bad trace row {t}: `{line}`")));
            }
            fields[1..].iter().map(|f| f.parse::<u64>().map_err(|_| Error::Format(format!("bad trace value `{f}`")))).collect()
        })
        .collect()
}

pub fn certificate_to_json(names: &[String], cert: &CactusCertificate) -> Value {
    let state = |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
    let out = |r: usize| format!("y{}", r + 1);
    let node = |n: SystemNode| match n {
        SystemNode::State(i) => state(i),
        SystemNode::Output(r) => out(r),
    };
    json!({
        "spanning": cert.is_spanning(),
        "stems": cert.stems.iter().map(|st| json!({
            "states": st.states.iter().map(|&i| state(i)).collect::<Vec<_>>(),
            "output_row": st.output,
        })).collect::<Vec<_>>(),
        "cycles": cert.cycles.iter().map(|c| json!({
            "states": c.states.iter().map(|&i| state(i)).collect::<Vec<_>>(),
            "attach_from": state(c.attach_from),
            "attach_to": node(c.attach_to),
        })).collect::<Vec<_>>(),
        "uncovered": cert.uncovered.iter().map(|&i| state(i)).collect::<Vec<_>>(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn role_color(role: Role) -> &'static str {
    match role {
        Role::Sensor => "black",
        Role::Backbone => "green",
        Role::Fusion => "red",
        Role::Output => "blue",
    }
}

fn dot_node(out: &mut String, name: &str, role: Role) {
    let _ = writeln!(out, "  \"{name}\" [role={}, color={}];", role.as_str(), role_color(role));
}

fn dot_edge(out: &mut String, from: &str, to: &str, cost: Cost) {
    let _ = writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{}\"];", cost.to_decimal());
}

fn dot_physical(g: &PhysicalGraph, keep: impl Fn(usize) -> bool, title: &str) -> String {
    let mut out = format!("digraph \"{title}\" {{\n");
    for s in g.sensor_names() {
        dot_node(&mut out, s, Role::Sensor);
    }
    for q in g.backbone_names() {
        dot_node(&mut out, q, Role::Backbone);
    }
    dot_node(&mut out, g.fusion_name(), Role::Fusion);
    for e in g.edges().iter().filter(|e| keep(e.id)) {
        dot_edge(&mut out, g.name(e.tail), g.name(e.head), e.cost);
    }
    out.push_str("}\n");
    out
}

pub fn graph_to_dot(g: &PhysicalGraph) -> String {
    dot_physical(g, |_| true, "physical")
}

/// The used physical subgraph of a design, drawn with solid edges.
pub fn design_to_dot(g: &PhysicalGraph, d: &DesignSolution) -> String {
    let used = d.used_edge_ids();
    dot_physical(g, |id| used.binary_search(&id).is_ok(), "design")
}

pub fn dynamic_to_dot(gd: &DynamicGraph) -> String {
    let mut out = String::from("digraph \"dynamic\" {\n");
    for s in &gd.sensor_names {
        dot_node(&mut out, s, Role::Sensor);
    }
    for r in 0..gd.n_outputs() {
        dot_node(&mut out, &gd.output_name(r), Role::Output);
    }
    dot_node(&mut out, &gd.fusion_name, Role::Fusion);
    for e in &gd.edges {
        dot_edge(&mut out, &gd.name(e.tail), &gd.name(e.head), e.cost);
    }
    out.push_str("}\n");
    out
}
