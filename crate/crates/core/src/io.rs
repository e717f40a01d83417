//! JSON documents for graphs, lattice specs, twisted partition functions,
//! covers and reports, and CSV tables.
//!
//! Serialization is canonical: object keys are sorted, id lists ascending,
//! and exact rationals are written as strings such as `"3/2"`.

use serde_json::{json, Map, Value as Json};

use crate::cover::CoverMap;
use crate::dimer::TwistedZ;
use crate::error::{Error, Result};
use crate::identities::Report;
use crate::kasteleyn::Orientation;
use crate::lattices::{Family, LatticeSpec, Surface, Translation, Weights};
use crate::pfaffian::SkewMatrix;
use crate::quadform::{Enhancement, QuadraticForm};
use crate::scalar::{format_exact, format_rational, parse_rational, Exact, Mode, Value, Weight};
use crate::surface::{
    check_cuts, validate, Class, Edge, EdgeSet, EmbeddedGraph, HalfEdge, HomologyBasis,
};

/// A graph file: the embedded graph and, optionally, a translation symmetry.
#[derive(Clone, Debug)]
pub struct GraphDocument {
    pub graph: EmbeddedGraph,
    pub translation: Option<Translation>,
}

fn parse_json(bytes: &[u8]) -> Result<Json> {
    serde_json::from_slice(bytes).map_err(|e| Error::schema("$", e.to_string()))
}

fn field<'a>(obj: &'a Map<String, Json>, path: &str, key: &str) -> Result<&'a Json> {
    obj.get(key)
        .ok_or_else(|| Error::schema(path, format!("missing field `{key}`")))
}

fn object<'a>(v: &'a Json, path: &str) -> Result<&'a Map<String, Json>> {
    v.as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))
}

fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>> {
    v.as_array()
        .ok_or_else(|| Error::schema(path, "expected an array"))
}

fn index(v: &Json, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::schema(path, "expected a non-negative integer"))
}

fn index_list(v: &Json, path: &str) -> Result<Vec<usize>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| index(x, &format!("{path}[{i}]")))
        .collect()
}

/// A rational given as a decimal or fraction string, a JSON number, or
/// `{"num": .., "den": ..}`.
pub fn parse_weight(v: &Json, path: &str) -> Result<Weight> {
    let bad = || {
        Error::schema(
            path,
            "expected a rational as a string, number or {\"num\", \"den\"}",
        )
    };
    match v {
        Json::String(s) => parse_rational(s).ok_or_else(bad),
        Json::Number(n) => parse_rational(&n.to_string()).ok_or_else(bad),
        Json::Object(obj) => {
            let part = |key: &str| -> Result<String> {
                match field(obj, path, key)? {
                    Json::String(s) => Ok(s.clone()),
                    Json::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
                    _ => Err(Error::schema(
                        format!("{path}.{key}"),
                        "expected an integer",
                    )),
                }
            };
            parse_rational(&format!("{}/{}", part("num")?, part("den")?)).ok_or_else(bad)
        }
        _ => Err(bad()),
    }
}

pub fn read_document(bytes: &[u8]) -> Result<GraphDocument> {
    document_from_json(&parse_json(bytes)?)
}

pub fn read_graph(bytes: &[u8]) -> Result<EmbeddedGraph> {
    Ok(read_document(bytes)?.graph)
}

/// Parses and validates a graph document: the rotation system must describe
/// a connected cellular embedding and every cut must be a cocycle.
pub fn document_from_json(doc: &Json) -> Result<GraphDocument> {
    let root = object(doc, "$")?;
    let n = index(field(root, "$", "vertices")?, "$.vertices")?;
    let raw_edges = array(field(root, "$", "edges")?, "$.edges")?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (i, raw) in raw_edges.iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let obj = object(raw, &path)?;
        if let Some(id) = obj.get("id") {
            if index(id, &format!("{path}.id"))? != i {
                return Err(Error::schema(
                    format!("{path}.id"),
                    format!("edges must be listed in id order; expected {i}"),
                ));
            }
        }
        let u = index(field(obj, &path, "u")?, &format!("{path}.u"))?;
        let v = index(field(obj, &path, "v")?, &format!("{path}.v"))?;
        for (key, x) in [("u", u), ("v", v)] {
            if x >= n {
                return Err(Error::schema(
                    format!("{path}.{key}"),
                    format!("vertex {x} out of range"),
                ));
            }
        }
        let weight = match obj.get("weight") {
            Some(w) => parse_weight(w, &format!("{path}.weight"))?,
            None => Weight::from_integer(1.into()),
        };
        if weight <= Weight::from_integer(0.into()) {
            return Err(Error::schema(
                format!("{path}.weight"),
                "weights must be positive",
            ));
        }
        let sign = match obj.get("sign") {
            Some(s) => match s.as_i64() {
                Some(1) => 1,
                Some(-1) => -1,
                _ => {
                    return Err(Error::schema(
                        format!("{path}.sign"),
                        "sign must be 1 or -1",
                    ))
                }
            },
            None => 1,
        };
        edges.push(Edge { u, v, weight, sign });
    }
    let num_edges = edges.len();
    let raw_rot = array(field(root, "$", "rotations")?, "$.rotations")?;
    if raw_rot.len() != n {
        return Err(Error::schema(
            "$.rotations",
            format!("expected {n} rotations, found {}", raw_rot.len()),
        ));
    }
    let mut rotation = Vec::with_capacity(n);
    for (v, rot) in raw_rot.iter().enumerate() {
        let path = format!("$.rotations[{v}]");
        let ids = index_list(rot, &path)?;
        if let Some((j, _)) = ids.iter().enumerate().find(|(_, &h)| h >= 2 * num_edges) {
            return Err(Error::schema(
                format!("{path}[{j}]"),
                "half-edge out of range",
            ));
        }
        rotation.push(ids.into_iter().map(HalfEdge).collect());
    }
    let mut graph = EmbeddedGraph::new(n, edges, rotation)?;
    if let Some(cuts) = root.get("cuts") {
        for (name, ids) in object(cuts, "$.cuts")? {
            let path = format!("$.cuts.{name}");
            let ids = index_list(ids, &path)?;
            if let Some(&bad) = ids.iter().find(|&&e| e >= num_edges) {
                return Err(Error::schema(path, format!("edge {bad} out of range")));
            }
            graph = graph.with_cut(name.clone(), EdgeSet::from_ids(num_edges, ids));
        }
    }
    let surface = validate(&graph)?;
    check_cuts(&graph, &surface)?;
    let translation = match root.get("translation") {
        Some(t) => Some(translation_from_json(&graph, t)?),
        None => None,
    };
    Ok(GraphDocument { graph, translation })
}

fn permutation(v: &Json, path: &str, len: usize) -> Result<Vec<usize>> {
    let p = index_list(v, path)?;
    let mut seen = vec![false; len];
    if p.len() != len
        || p.iter()
            .any(|&x| x >= len || std::mem::replace(&mut seen[x], true))
    {
        return Err(Error::schema(
            path,
            format!("expected a permutation of 0..{len}"),
        ));
    }
    Ok(p)
}

fn translation_from_json(g: &EmbeddedGraph, v: &Json) -> Result<Translation> {
    let obj = object(v, "$.translation")?;
    let vertices = permutation(
        field(obj, "$.translation", "vertices")?,
        "$.translation.vertices",
        g.num_vertices(),
    )?;
    let edges = permutation(
        field(obj, "$.translation", "edges")?,
        "$.translation.edges",
        g.num_edges(),
    )?;
    let mut order = 1;
    let mut current = vertices.clone();
    while current.iter().enumerate().any(|(i, &x)| i != x) {
        current = current.iter().map(|&x| vertices[x]).collect();
        order += 1;
    }
    let preserves_weights = (0..g.num_edges()).all(|e| g.weight(e) == g.weight(edges[e]));
    Ok(Translation {
        vertices,
        edges,
        order,
        preserves_weights,
    })
}

pub fn weight_json(w: &Weight) -> Json {
    Json::String(format_rational(w))
}

/// Canonical JSON for a graph; edge directions `u → v` encode an orientation.
pub fn graph_json(g: &EmbeddedGraph, translation: Option<&Translation>) -> Json {
    let edges: Vec<Json> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| json!({"id": id, "u": e.u, "v": e.v, "weight": weight_json(&e.weight), "sign": e.sign}))
        .collect();
    let rotations: Vec<Json> = g
        .rotations()
        .iter()
        .map(|r| json!(r.iter().map(|h| h.0).collect::<Vec<_>>()))
        .collect();
    let cuts: Map<String, Json> = g
        .cuts()
        .iter()
        .map(|(name, set)| (name.clone(), json!(set.ids())))
        .collect();
    let mut doc = json!({
        "vertices": g.num_vertices(),
        "edges": edges,
        "rotations": rotations,
        "cuts": cuts,
    });
    if let Some(t) = translation {
        doc["translation"] = json!({"vertices": t.vertices, "edges": t.edges});
    }
    doc
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_bytes(doc: &Json) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

pub fn write_graph(g: &EmbeddedGraph) -> Vec<u8> {
    to_bytes(&graph_json(g, None))
}

pub fn write_document(doc: &GraphDocument) -> Vec<u8> {
    to_bytes(&graph_json(&doc.graph, doc.translation.as_ref()))
}

/// The same embedded graph with every edge pointing along `k`. Half-edge ids
/// of reversed edges swap ends; cuts are unchanged.
pub fn with_orientation(g: &EmbeddedGraph, k: &Orientation) -> Result<EmbeddedGraph> {
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut edge = edge.clone();
            if !k.is_forward(e) {
                std::mem::swap(&mut edge.u, &mut edge.v);
            }
            edge
        })
        .collect();
    let rotation = g
        .rotations()
        .iter()
        .map(|rot| {
            rot.iter()
                .map(|&h| {
                    if k.is_forward(h.edge()) {
                        h
                    } else {
                        h.opposite()
                    }
                })
                .collect()
        })
        .collect();
    let mut out = EmbeddedGraph::new(g.num_vertices(), edges, rotation)?;
    for (name, set) in g.cuts() {
        out = out.with_cut(name.clone(), set.clone());
    }
    Ok(out)
}

pub fn surface_name(s: Surface) -> &'static str {
    match s {
        Surface::Plane => "plane",
        Surface::Cylinder => "cylinder",
        Surface::Torus => "torus",
        Surface::Mobius => "mobius",
        Surface::Klein => "klein",
    }
}

pub fn family_name(f: Family) -> &'static str {
    match f {
        Family::Square => "square",
        Family::Hexagonal => "hexagonal",
        Family::SquareOctagon => "square-octagon",
        Family::Triangular => "triangular",
    }
}

/// `{"family", "surface", "rows", "cols", "weights"}`, where `weights` is
/// `"uniform"`, `{"x", "y"}`, `{"x", "y", "z"}` or a per-edge list.
pub fn spec_from_json(doc: &Json) -> Result<LatticeSpec> {
    let root = object(doc, "$")?;
    let text = |key: &str| -> Result<&str> {
        field(root, "$", key)?
            .as_str()
            .ok_or_else(|| Error::schema(format!("$.{key}"), "expected a string"))
    };
    let family: Family = text("family")?
        .parse()
        .map_err(|e: String| Error::schema("$.family", e))?;
    let surface: Surface = text("surface")?
        .parse()
        .map_err(|e: String| Error::schema("$.surface", e))?;
    let rows = index(field(root, "$", "rows")?, "$.rows")?;
    let cols = index(field(root, "$", "cols")?, "$.cols")?;
    let weights = match root.get("weights") {
        None => Weights::Uniform,
        Some(Json::String(s)) if s == "uniform" => Weights::Uniform,
        Some(Json::Array(list)) => Weights::PerEdge(
            list.iter()
                .enumerate()
                .map(|(i, w)| parse_weight(w, &format!("$.weights[{i}]")))
                .collect::<Result<_>>()?,
        ),
        Some(Json::Object(obj)) => {
            let get = |key: &str| {
                parse_weight(field(obj, "$.weights", key)?, &format!("$.weights.{key}"))
            };
            match obj.get("z") {
                Some(_) => Weights::Xyz(get("x")?, get("y")?, get("z")?),
                None => Weights::Xy(get("x")?, get("y")?),
            }
        }
        Some(_) => {
            return Err(Error::schema(
                "$.weights",
                "expected \"uniform\", an object or a list",
            ))
        }
    };
    Ok(LatticeSpec::new(family, surface, rows, cols).with_weights(weights))
}

pub fn read_spec(bytes: &[u8]) -> Result<LatticeSpec> {
    spec_from_json(&parse_json(bytes)?)
}

pub fn spec_json(spec: &LatticeSpec) -> Json {
    let weights = match &spec.weights {
        Weights::Uniform => json!("uniform"),
        Weights::Xy(x, y) => json!({"x": weight_json(x), "y": weight_json(y)}),
        Weights::Xyz(x, y, z) => {
            json!({"x": weight_json(x), "y": weight_json(y), "z": weight_json(z)})
        }
        Weights::PerEdge(list) => Json::Array(list.iter().map(weight_json).collect()),
    };
    json!({
        "family": family_name(spec.family),
        "surface": surface_name(spec.surface),
        "rows": spec.rows,
        "cols": spec.cols,
        "weights": weights,
    })
}

fn basis_json(g: &EmbeddedGraph, basis: &HomologyBasis) -> Json {
    Json::Array(
        basis
            .cycles
            .iter()
            .enumerate()
            .map(|(i, cycle)| {
                json!({
                    "edges": cycle.edge_set(g.num_edges()).ids(),
                    "w1": basis.w1_of(Class(1 << i)),
                })
            })
            .collect(),
    )
}

/// `{"basis": [...], "classes": {"01": "..."}, "Z": "...", "reference": [...]}`;
/// class labels list basis coefficients, first basis element first.
pub fn twisted_json(g: &EmbeddedGraph, basis: &HomologyBasis, tz: &TwistedZ) -> Json {
    let classes: Map<String, Json> = tz
        .classes
        .iter()
        .enumerate()
        .map(|(a, z)| (Class(a as u64).label(tz.dim), weight_json(z)))
        .collect();
    json!({
        "basis": basis_json(g, basis),
        "classes": classes,
        "Z": weight_json(&tz.total),
        "reference": tz.reference.as_ref().map(|d| d.edges().to_vec()),
    })
}

/// Cover graph document with its projection to the base.
pub fn cover_json(cm: &CoverMap) -> Json {
    let mut doc = graph_json(&cm.cover, None);
    doc["projection"] = json!({
        "vertices": cm.vertex_projection(),
        "edges": cm.edge_projection(),
    });
    doc["base_omega"] = json!(cm.omega.ids());
    doc
}

fn class_table(dim: usize, values: &[u8]) -> Json {
    Json::Object(
        values
            .iter()
            .enumerate()
            .map(|(a, &v)| (Class(a as u64).label(dim), json!(v)))
            .collect(),
    )
}

/// Enhancements with their induced cover forms, as `{"class": value}` tables.
pub fn enhancements_json(
    basis: &HomologyBasis,
    cover_basis: &HomologyBasis,
    qs: &[Enhancement],
    forms: &[QuadraticForm],
) -> Json {
    let list: Vec<Json> = qs
        .iter()
        .zip(forms)
        .map(|(q, f)| {
            json!({
                "on_basis": q.on_basis(basis.dim()),
                "q": class_table(basis.dim(), &q.values),
                "cover_form": class_table(cover_basis.dim(), &f.values),
            })
        })
        .collect();
    let distinct: std::collections::BTreeSet<&Vec<u8>> = forms.iter().map(|f| &f.values).collect();
    json!({
        "w1": basis.w1_vector(),
        "enhancements": list,
        "distinct_cover_forms": distinct.len(),
    })
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Exact(q) => weight_json(q),
        Value::Float(x) => json!(x),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

/// `{identity, instance, preconditions, lhs, rhs, verdict, timings, checks, notes, mode}`.
pub fn report_json(report: &Report, mode: Mode) -> Json {
    let checks: Vec<Json> = report
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "lhs": value_json(&c.lhs), "rhs": value_json(&c.rhs), "holds": c.holds}))
        .collect();
    let headline = report.headline();
    json!({
        "identity": report.identity,
        "instance": report.instance,
        "preconditions": report.preconditions,
        "lhs": headline.map(|c| value_json(&c.lhs)),
        "rhs": headline.map(|c| value_json(&c.rhs)),
        "verdict": report.verdict.as_str(),
        "timings": report.timings,
        "checks": checks,
        "notes": report.notes,
        "mode": mode_name(mode),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

/// One row per matrix row, entries as exact Gaussian rationals.
pub fn matrix_csv(m: &SkewMatrix<Exact>) -> String {
    m.rows()
        .map(|row| csv_line(&row.iter().map(format_exact).collect::<Vec<_>>()))
        .collect()
}

/// One row per check: `identity,instance,check,lhs,rhs,holds,verdict`.
pub fn reports_csv(reports: &[Report]) -> String {
    let mut out = csv_line(
        &[
            "identity", "instance", "check", "lhs", "rhs", "holds", "verdict",
        ]
        .map(String::from),
    );
    for r in reports {
        for c in &r.checks {
            out += &csv_line(&[
                r.identity.clone(),
                r.instance.clone(),
                c.name.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.holds.to_string(),
                r.verdict.to_string(),
            ]);
        }
    }
    out
}

/// Rows of `(header, values)` as CSV.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for row in rows {
        out += &csv_line(row);
    }
    out
}
