//! File formats for states, rays, sequences and matrices.
//!
//! JSON is the primary format. A state is `{"dim": n, "components":
//! [[re, im], …]}`; a bare `[[re, im], …]` array is accepted on input.
//! Vectors may also be written as CSV with the header `index,re,im`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convergence::StateSequence;
use crate::error::{Error, Result};
use crate::hilbert::{normalize, StateVector, UnitVector};
use crate::projector::PureState;
use crate::ray::Ray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    dim: usize,
    components: StateVector,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    canonical: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateInput {
    Doc(StateDoc),
    Bare(StateVector),
}

impl StateInput {
    fn into_state(self) -> Result<StateVector> {
        match self {
            StateInput::Bare(v) => Ok(v),
            StateInput::Doc(d) if d.dim == d.components.dim() => Ok(d.components),
            StateInput::Doc(d) => Err(Error::Parse(format!(
                "declared dim {} but found {} components",
                d.dim,
                d.components.dim()
            ))),
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    serde_json::from_str::<StateInput>(text)
        .map_err(parse_err)?
        .into_state()
}

pub fn state_to_json(v: &StateVector) -> String {
    let doc = StateDoc {
        dim: v.dim(),
        components: v.clone(),
        canonical: false,
    };
    serde_json::to_string_pretty(&doc).expect("state serializes")
}

pub fn ray_to_json(r: &Ray) -> String {
    let doc = StateDoc {
        dim: r.dim(),
        components: r.representative().as_state().clone(),
        canonical: true,
    };
    serde_json::to_string_pretty(&doc).expect("ray serializes")
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    index: usize,
    re: f64,
    im: f64,
}

pub fn state_from_csv<R: Read>(reader: R) -> Result<StateVector> {
    let mut rows: Vec<CsvRow> = csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(parse_err)?;
    rows.sort_by_key(|r| r.index);
    if let Some((i, r)) = rows.iter().enumerate().find(|(i, r)| r.index != *i) {
        return Err(Error::Parse(format!(
            "expected index {i}, found {}",
            r.index
        )));
    }
    StateVector::new(rows.iter().map(|r| Complex64::new(r.re, r.im)).collect())
}

pub fn state_to_csv<W: Write>(v: &StateVector, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (index, z) in v.components().iter().enumerate() {
        w.serialize(CsvRow {
            index,
            re: z.re,
            im: z.im,
        })
        .map_err(parse_err)?;
    }
    w.flush().map_err(parse_err)
}

/// Parses a state according to `format`.
pub fn read_state(text: &str, format: Format) -> Result<StateVector> {
    match format {
        Format::Json => state_from_json(text),
        Format::Csv => state_from_csv(text.as_bytes()),
    }
}

pub fn write_state(v: &StateVector, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(state_to_json(v)),
        Format::Csv => {
            let mut buf = Vec::new();
            state_to_csv(v, &mut buf)?;
            String::from_utf8(buf).map_err(parse_err)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    dim: usize,
    states: Vec<StateInputOrVec>,
    #[serde(default)]
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateInputOrVec {
    Bare(StateVector),
    Doc { dim: usize, components: StateVector },
}

/// Parses a sequence file. States that are not unit vectors to within the
/// norm tolerance are normalized, so files written with a few digits of
/// precision are accepted.
pub fn sequence_from_json(text: &str) -> Result<StateSequence> {
    let doc: SequenceDoc = serde_json::from_str(text).map_err(parse_err)?;
    let mut states = Vec::with_capacity(doc.states.len());
    for s in doc.states {
        let v = match s {
            StateInputOrVec::Bare(v) => v,
            StateInputOrVec::Doc { components, .. } => components,
        };
        if v.dim() != doc.dim {
            return Err(Error::DimensionMismatch(doc.dim, v.dim()));
        }
        let unit = match UnitVector::new(v.clone()) {
            Ok(u) => u,
            Err(_) => normalize(&v)?,
        };
        states.push(PureState::new(unit));
    }
    StateSequence::new(states, doc.label)
}

pub fn sequence_to_json(seq: &StateSequence) -> String {
    let doc = SequenceDoc {
        dim: seq.dim(),
        states: seq
            .states()
            .iter()
            .map(|p| StateInputOrVec::Bare(p.vector().as_state().clone()))
            .collect(),
        label: seq.label().to_string(),
    };
    serde_json::to_string(&doc).expect("sequence serializes")
}
