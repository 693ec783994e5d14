//! JSON and CSV interchange.
//!
//! Every format is plain data. Complex numbers are `[re, im]` pairs,
//! operators are row-major nested arrays of those pairs, and map-like
//! structures use sorted keys, so serializing the same value twice yields
//! byte-identical output.
//!
//! A state is `{"dim_a", "dim_b", "amplitudes"}` with amplitudes indexed by
//! `a * dim_b + b`. A set wraps `{"family", "params", "states"}`. A protocol
//! file is either `{"type": "tree", "root": …}` with measure nodes
//! `{"party", "kind", "outcomes", "children"}` and leaves `{"decode": i}` or
//! `{"decode": "inconclusive"}`, or `{"type": "flat", "alice", "bob",
//! "decoder"}` with the decoder as a list of outcome-pair entries.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::{Family, NonMaxParams, StateSet};
use crate::measure::{Measurement, MeasurementKind};
use crate::protocol::{
    Branch, Decode, DiscriminationProtocol, DiscriminationReport, FlatLOProtocol, ProtocolNode,
    ProtocolTree,
};
use crate::state::{CMatrix, Party, StateVector};
use crate::LINALG_TOL;

/* Scalar helpers *************************************************************/

fn c64_json(c: C64) -> Value {
    json!([c.re, c.im])
}

fn c64_from(v: &Value, what: &str) -> Result<C64> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
        Error::InvalidParameter(format!("{what} must be a [re, im] pair"))
    })?;
    let part = |i: usize| {
        pair[i]
            .as_f64()
            .ok_or_else(|| Error::InvalidParameter(format!("{what} has a non-numeric part")))
    };
    Ok(C64::new(part(0)?, part(1)?))
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|r| Value::Array((0..m.ncols()).map(|c| c64_json(m[(r, c)])).collect()))
        .collect();
    Value::Array(rows)
}

fn matrix_from(v: &Value, what: &str) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| Error::InvalidParameter(format!("{what} must be a non-empty array of rows")))?;
    let ncols = rows[0].as_array().map(|c| c.len()).unwrap_or(0);
    let mut entries = Vec::with_capacity(rows.len() * ncols);
    for (i, row) in rows.iter().enumerate() {
        let cols = row.as_array().filter(|c| c.len() == ncols).ok_or_else(|| {
            Error::InvalidParameter(format!("{what} row {i} is ragged or not an array"))
        })?;
        for (j, cell) in cols.iter().enumerate() {
            entries.push(c64_from(cell, &format!("{what}[{i}][{j}]"))?);
        }
    }
    Ok(CMatrix::from_row_slice(rows.len(), ncols, &entries))
}

/* States and sets ************************************************************/

/// A state as a JSON value.
pub fn state_to_json(state: &StateVector) -> Value {
    json!({
        "dim_a": state.dim_a(),
        "dim_b": state.dim_b(),
        "amplitudes": state.amplitudes().iter().map(|&c| c64_json(c)).collect::<Vec<_>>(),
    })
}

/// Parses a state, re-running normalization and shape checks.
pub fn state_from_json(v: &Value) -> Result<StateVector> {
    let dim = |key: &str| {
        v.get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidParameter(format!("state needs an integer \"{key}\"")))
    };
    let dim_a = dim("dim_a")? as usize;
    let dim_b = dim("dim_b")? as usize;
    let raw = v
        .get("amplitudes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidParameter("state needs an \"amplitudes\" array".into()))?;
    let amps = raw
        .iter()
        .enumerate()
        .map(|(i, c)| c64_from(c, &format!("amplitude {i}")))
        .collect::<Result<Vec<_>>>()?;
    StateVector::new(dim_a, dim_b, amps)
}

fn family_tag(family: &Family) -> (&'static str, Value) {
    match family {
        Family::Canonical { d: 2 } => ("two-qubit", json!({ "d": 2 })),
        Family::Canonical { d } => ("canonical-d", json!({ "d": d })),
        Family::Hadamard4 => ("hadamard-4", Value::Null),
        Family::NonMax(p) => ("nonmax", json!({ "weights": p.as_array() })),
        Family::Extended { ket } => ("extended", json!({ "ket": [ket.0, ket.1] })),
        Family::Custom => ("custom", Value::Null),
    }
}

fn family_from(tag: &str, params: &Value) -> Result<Family> {
    let d_param = || {
        params
            .get("d")
            .and_then(Value::as_u64)
            .map(|d| d as usize)
            .ok_or_else(|| Error::InvalidParameter("family params need an integer \"d\"".into()))
    };
    match tag {
        "two-qubit" => Ok(Family::Canonical { d: 2 }),
        "canonical-d" => Ok(Family::Canonical { d: d_param()? }),
        "hadamard-4" => Ok(Family::Hadamard4),
        "nonmax" => {
            let w = params
                .get("weights")
                .and_then(Value::as_array)
                .filter(|w| w.len() == 8)
                .ok_or_else(|| {
                    Error::InvalidParameter("nonmax params need 8 \"weights\"".into())
                })?;
            let n = |i: usize| {
                w[i].as_f64().ok_or_else(|| {
                    Error::InvalidParameter(format!("weight {i} is not a number"))
                })
            };
            Ok(Family::NonMax(NonMaxParams::new(
                n(0)?, n(1)?, n(2)?, n(3)?, n(4)?, n(5)?, n(6)?, n(7)?,
            )?))
        }
        "extended" => {
            let ket = params
                .get("ket")
                .and_then(Value::as_array)
                .filter(|k| k.len() == 2)
                .and_then(|k| Some((k[0].as_u64()? as usize, k[1].as_u64()? as usize)))
                .ok_or_else(|| {
                    Error::InvalidParameter("extended params need a two-index \"ket\"".into())
                })?;
            Ok(Family::Extended { ket })
        }
        "custom" => Ok(Family::Custom),
        other => Err(Error::InvalidParameter(format!("unknown family tag \"{other}\""))),
    }
}

/// A set as a JSON value, family tag included.
pub fn set_to_json(set: &StateSet) -> Value {
    let (tag, params) = family_tag(set.family());
    json!({
        "family": tag,
        "params": params,
        "states": set.states().iter().map(state_to_json).collect::<Vec<_>>(),
    })
}

/// Parses a set, re-running dimension and orthogonality validation.
pub fn set_from_json(v: &Value) -> Result<StateSet> {
    let tag = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidParameter("set needs a \"family\" tag".into()))?;
    let family = family_from(tag, v.get("params").unwrap_or(&Value::Null))?;
    let states = v
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidParameter("set needs a \"states\" array".into()))?
        .iter()
        .map(state_from_json)
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(states, family)
}

/* Measurements and protocols *************************************************/

fn party_tag(party: Party) -> &'static str {
    match party {
        Party::Alice => "A",
        Party::Bob => "B",
    }
}

fn party_from(v: &Value) -> Result<Party> {
    match v.as_str() {
        Some("A") => Ok(Party::Alice),
        Some("B") => Ok(Party::Bob),
        _ => Err(Error::MalformedProtocol("party must be \"A\" or \"B\"".into())),
    }
}

fn measurement_json(m: &Measurement) -> Value {
    let kind = match m.kind {
        MeasurementKind::Projective => "projective",
        MeasurementKind::General => "general",
    };
    let outcomes: Vec<Value> = m
        .outcomes
        .iter()
        .map(|(label, op)| json!({ "label": label, "matrix": matrix_json(op) }))
        .collect();
    json!({ "party": party_tag(m.party), "kind": kind, "outcomes": outcomes })
}

fn measurement_from(v: &Value) -> Result<Measurement> {
    let party = party_from(
        v.get("party")
            .ok_or_else(|| Error::MalformedProtocol("measurement needs a \"party\"".into()))?,
    )?;
    let outcomes = v
        .get("outcomes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::MalformedProtocol("measurement needs \"outcomes\"".into()))?
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let label = o
                .get("label")
                .and_then(Value::as_str)
                .ok_or_else(|| {
                    Error::MalformedProtocol(format!("outcome {i} needs a string \"label\""))
                })?
                .to_string();
            let matrix = matrix_from(
                o.get("matrix").ok_or_else(|| {
                    Error::MalformedProtocol(format!("outcome {i} needs a \"matrix\""))
                })?,
                &format!("outcome {i} matrix"),
            )?;
            Ok((label, matrix))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = match v.get("kind").and_then(Value::as_str) {
        Some("projective") => Measurement::projective(party, outcomes),
        Some("general") => Measurement::general(party, outcomes),
        _ => {
            return Err(Error::MalformedProtocol(
                "measurement kind must be \"projective\" or \"general\"".into(),
            ))
        }
    };
    let check = m.validate();
    if !check.ok() {
        return Err(Error::MalformedProtocol(format!(
            "parsed measurement is invalid: {}",
            check.violations().join("; ")
        )));
    }
    Ok(m)
}

fn decode_json(d: Decode) -> Value {
    match d {
        Decode::State(i) => json!(i),
        Decode::Inconclusive => json!("inconclusive"),
    }
}

fn decode_from(v: &Value) -> Result<Decode> {
    match v {
        Value::Number(n) if n.is_u64() => Ok(Decode::State(n.as_u64().unwrap() as usize)),
        Value::String(s) if s == "inconclusive" => Ok(Decode::Inconclusive),
        _ => Err(Error::MalformedProtocol(
            "decode must be a member index or \"inconclusive\"".into(),
        )),
    }
}

fn node_json(node: &ProtocolNode) -> Value {
    match node {
        ProtocolNode::Leaf(d) => json!({ "decode": decode_json(*d) }),
        ProtocolNode::Measure { measurement, children } => {
            let mut v = measurement_json(measurement);
            let kids: Map<String, Value> = children
                .iter()
                .map(|(label, child)| (label.clone(), node_json(child)))
                .collect();
            v.as_object_mut()
                .expect("measurement serializes to an object")
                .insert("children".into(), Value::Object(kids));
            v
        }
    }
}

fn node_from(v: &Value) -> Result<ProtocolNode> {
    if let Some(d) = v.get("decode") {
        return Ok(ProtocolNode::Leaf(decode_from(d)?));
    }
    let measurement = measurement_from(v)?;
    let kids = v
        .get("children")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::MalformedProtocol("measure node needs \"children\"".into()))?;
    let mut children = BTreeMap::new();
    for (label, child) in kids {
        children.insert(label.clone(), node_from(child)?);
    }
    Ok(ProtocolNode::Measure { measurement, children })
}

/// An adaptive protocol as a JSON value.
pub fn tree_to_json(tree: &ProtocolTree) -> Value {
    json!({ "type": "tree", "root": node_json(tree.root()) })
}

/// A one-round protocol as a JSON value.
pub fn flat_to_json(flat: &FlatLOProtocol) -> Value {
    let decoder: Vec<Value> = flat
        .decoder()
        .iter()
        .map(|((la, lb), d)| json!({ "alice": la, "bob": lb, "decode": decode_json(*d) }))
        .collect();
    json!({
        "type": "flat",
        "alice": measurement_json(flat.alice()),
        "bob": measurement_json(flat.bob()),
        "decoder": decoder,
    })
}

/// A protocol read back from JSON, either shape.
#[derive(Clone, Debug)]
pub enum LoadedProtocol {
    Tree(ProtocolTree),
    Flat(FlatLOProtocol),
}

impl DiscriminationProtocol for LoadedProtocol {
    fn branches(&self, input: &StateVector) -> Result<Vec<Branch>> {
        match self {
            Self::Tree(t) => t.run(input),
            Self::Flat(f) => f.run(input),
        }
    }
}

/// Parses either protocol shape, re-running full validation.
pub fn protocol_from_json(v: &Value) -> Result<LoadedProtocol> {
    match v.get("type").and_then(Value::as_str) {
        Some("tree") => {
            let root = v
                .get("root")
                .ok_or_else(|| Error::MalformedProtocol("tree needs a \"root\"".into()))?;
            Ok(LoadedProtocol::Tree(ProtocolTree::new(node_from(root)?)?))
        }
        Some("flat") => {
            let meas = |key: &str| {
                measurement_from(v.get(key).ok_or_else(|| {
                    Error::MalformedProtocol(format!("flat protocol needs \"{key}\""))
                })?)
            };
            let entries = v
                .get("decoder")
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    Error::MalformedProtocol("flat protocol needs a \"decoder\" list".into())
                })?;
            let mut decoder = BTreeMap::new();
            for e in entries {
                let label = |key: &str| {
                    e.get(key).and_then(Value::as_str).map(str::to_string).ok_or_else(|| {
                        Error::MalformedProtocol(format!("decoder entry needs \"{key}\""))
                    })
                };
                let d = decode_from(e.get("decode").ok_or_else(|| {
                    Error::MalformedProtocol("decoder entry needs \"decode\"".into())
                })?)?;
                decoder.insert((label("alice")?, label("bob")?), d);
            }
            Ok(LoadedProtocol::Flat(FlatLOProtocol::new(meas("alice")?, meas("bob")?, decoder)?))
        }
        _ => Err(Error::MalformedProtocol(
            "protocol \"type\" must be \"tree\" or \"flat\"".into(),
        )),
    }
}

/* Reports ********************************************************************/

/// A discrimination report as a JSON value, branch transcripts included.
pub fn report_to_json(report: &DiscriminationReport) -> Value {
    let inputs: Vec<Value> = report
        .inputs
        .iter()
        .map(|inp| {
            let branches: Vec<Value> = inp
                .branches
                .iter()
                .map(|b| {
                    let transcript: Vec<Value> = b
                        .transcript
                        .iter()
                        .map(|(p, l)| json!([party_tag(*p), l]))
                        .collect();
                    json!({
                        "transcript": transcript,
                        "probability": b.probability,
                        "decode": decode_json(b.decode),
                    })
                })
                .collect();
            json!({
                "index": inp.index,
                "success_probability": inp.success_probability,
                "conclusive_probability": inp.conclusive_probability,
                "error_probability": inp.error_probability,
                "branches": branches,
            })
        })
        .collect();
    json!({ "perfect": report.perfect, "any_error": report.any_error, "inputs": inputs })
}

/// One row per input: index, outcome masses, and whether that input alone
/// was identified perfectly.
pub fn write_report_csv<W: Write>(w: W, report: &DiscriminationReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "index",
        "success_probability",
        "conclusive_probability",
        "error_probability",
        "perfect",
    ])?;
    for inp in &report.inputs {
        let perfect = (inp.success_probability - 1.0).abs() <= LINALG_TOL
            && inp.error_probability <= LINALG_TOL;
        out.write_record([
            inp.index.to_string(),
            inp.success_probability.to_string(),
            inp.conclusive_probability.to_string(),
            inp.error_probability.to_string(),
            perfect.to_string(),
        ])?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

/* Readers and writers ********************************************************/

fn write_value<W: Write>(mut w: W, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n").map_err(Error::Io)
}

fn read_value<R: Read>(r: R) -> Result<Value> {
    serde_json::from_reader(r).map_err(Error::Json)
}

/// Writes a state as pretty JSON.
pub fn write_state<W: Write>(w: W, state: &StateVector) -> Result<()> {
    write_value(w, &state_to_json(state))
}

/// Reads a state from JSON.
pub fn read_state<R: Read>(r: R) -> Result<StateVector> {
    state_from_json(&read_value(r)?)
}

/// Writes a set as pretty JSON.
pub fn write_set<W: Write>(w: W, set: &StateSet) -> Result<()> {
    write_value(w, &set_to_json(set))
}

/// Reads a set from JSON.
pub fn read_set<R: Read>(r: R) -> Result<StateSet> {
    set_from_json(&read_value(r)?)
}

/// Writes an adaptive protocol as pretty JSON.
pub fn write_tree<W: Write>(w: W, tree: &ProtocolTree) -> Result<()> {
    write_value(w, &tree_to_json(tree))
}

/// Writes a one-round protocol as pretty JSON.
pub fn write_flat<W: Write>(w: W, flat: &FlatLOProtocol) -> Result<()> {
    write_value(w, &flat_to_json(flat))
}

/// Reads a protocol of either shape from JSON.
pub fn read_protocol<R: Read>(r: R) -> Result<LoadedProtocol> {
    protocol_from_json(&read_value(r)?)
}

/// Writes a discrimination report as pretty JSON.
pub fn write_report<W: Write>(w: W, report: &DiscriminationReport) -> Result<()> {
    write_value(w, &report_to_json(report))
}
