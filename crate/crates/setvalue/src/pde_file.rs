//! Solver configuration files and field / nodal-set exports.

use std::io::Write;

use serde::{Deserialize, Serialize};
use setvalue_core::duality::{GridConfig, NodalSet, PdeField, Scheme};

use crate::error::{CliError, CliResult};

/// On-disk solver configuration. Missing fields take the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdeConfigFile {
    pub preset: String,
    pub x_range: [f64; 2],
    pub nx: usize,
    pub y_range: [f64; 2],
    pub ny: usize,
    pub z_max: f64,
    pub nz: usize,
    pub safety: f64,
    pub time_step: Option<f64>,
    /// `"monotone"` or `"central"`.
    pub scheme: String,
    pub stencil: Option<usize>,
    pub saved_layers: usize,
    pub delta_factor: f64,
    /// Absolute nodal threshold; overrides `delta_factor`.
    pub delta: Option<f64>,
    /// Where the nodal set is read off.
    pub t: f64,
    pub x: f64,
}

impl Default for PdeConfigFile {
    fn default() -> Self {
        let g = GridConfig::default();
        Self {
            preset: "single_player".into(),
            x_range: [g.x_range.0, g.x_range.1],
            nx: g.nx,
            y_range: [g.y_range.0, g.y_range.1],
            ny: g.ny,
            z_max: g.z_max,
            nz: g.nz,
            safety: g.safety,
            time_step: g.time_step,
            scheme: "monotone".into(),
            stencil: g.stencil,
            saved_layers: g.saved_layers,
            delta_factor: g.delta_factor,
            delta: None,
            t: 0.0,
            x: 0.0,
        }
    }
}

impl PdeConfigFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("solver config: {e}")))
    }

    pub fn grid(&self) -> CliResult<GridConfig> {
        let scheme = match self.scheme.as_str() {
            "monotone" => Scheme::Monotone,
            "central" => Scheme::Central,
            other => return Err(CliError::Validation(format!("unknown scheme {other:?}"))),
        };
        Ok(GridConfig {
            x_range: (self.x_range[0], self.x_range[1]),
            nx: self.nx,
            y_range: (self.y_range[0], self.y_range[1]),
            ny: self.ny,
            z_max: self.z_max,
            nz: self.nz,
            safety: self.safety,
            time_step: self.time_step,
            scheme,
            stencil: self.stencil,
            saved_layers: self.saved_layers,
            delta_factor: self.delta_factor,
        })
    }
}

/// Header of the binary field format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub players: usize,
    /// Axis lengths of one layer: `[nx, ny, ..., ny]`.
    pub dims: Vec<usize>,
    pub x_bounds: [f64; 2],
    pub y_bounds: [f64; 2],
    pub hx: f64,
    pub hy: f64,
    pub ht: f64,
    pub times: Vec<f64>,
}

pub const FIELD_MAGIC: &[u8; 8] = b"SVFIELD1";

/// Writes `magic, u64 header length, JSON header, f64 values` (little
/// endian), layers in increasing time, each layer x-major.
pub fn write_field(out: &mut impl Write, field: &PdeField) -> std::io::Result<()> {
    let mut dims = vec![field.x.len()];
    dims.extend(std::iter::repeat_n(field.y.len(), field.players));
    let header = FieldHeader {
        players: field.players,
        dims,
        x_bounds: [field.x[0], *field.x.last().expect("grid is nonempty")],
        y_bounds: [field.y[0], *field.y.last().expect("grid is nonempty")],
        hx: field.hx,
        hy: field.hy,
        ht: field.ht,
        times: field.times.clone(),
    };
    let text = serde_json::to_vec(&header).expect("header serializes");
    out.write_all(FIELD_MAGIC)?;
    out.write_all(&(text.len() as u64).to_le_bytes())?;
    out.write_all(&text)?;
    for layer in &field.layers {
        for v in layer {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads back what [`write_field`] wrote.
pub fn read_field(bytes: &[u8]) -> CliResult<(FieldHeader, Vec<Vec<f64>>)> {
    let bad = |m: &str| CliError::Validation(format!("field file: {m}"));
    if bytes.len() < 16 || &bytes[..8] != FIELD_MAGIC {
        return Err(bad("bad magic"));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("eight bytes")) as usize;
    let body = bytes.get(16..16 + len).ok_or_else(|| bad("truncated header"))?;
    let header: FieldHeader = serde_json::from_slice(body).map_err(|e| bad(&e.to_string()))?;
    let per_layer: usize = header.dims.iter().product();
    let data = &bytes[16 + len..];
    if data.len() != per_layer * header.times.len() * 8 {
        return Err(bad("data length does not match the header"));
    }
    let values: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    Ok((header, values.chunks(per_layer).map(<[f64]>::to_vec).collect()))
}

/// One line per nodal point: cluster index, then the coordinates.
pub fn nodal_csv(set: &NodalSet) -> String {
    let players = set.argmin.len();
    let mut out = String::from("cluster");
    for i in 0..players {
        out.push_str(&format!(",y{}", i + 1));
    }
    out.push('\n');
    for (k, c) in set.clusters.iter().enumerate() {
        for p in &c.points {
            out.push_str(&k.to_string());
            for v in p {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    out
}
