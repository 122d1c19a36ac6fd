//! JSON manifests describing a left-invariant Norden manifold.
//!
//! Keys are written in a fixed order (`id`, `dim`, `structure_constants`,
//! `metric`, `J`, `description`) and every number with 17 significant digits,
//! so a manifest reloads bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::manifold::{flat_kahler_4, LieFrameManifold};
use crate::tensor::DenseTensor;

/// The bundled flat example, byte-identical to `examples_manifests/flat_kahler_4.json`.
pub const FLAT_KAHLER_4_JSON: &str = include_str!("../examples_manifests/flat_kahler_4.json");

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldManifest {
    pub id: String,
    pub dim: usize,
    /// `structure_constants[k][i][j]` is the `e_k` component of `[e_i, e_j]`.
    pub structure_constants: DenseTensor,
    pub metric: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub description: Option<String>,
}

impl ManifoldManifest {
    pub fn from_manifold(id: &str, m: &LieFrameManifold, description: Option<String>) -> Self {
        ManifoldManifest {
            id: id.to_string(),
            dim: m.dim(),
            structure_constants: m.structure_constants().clone(),
            metric: m.metric().clone(),
            j: m.complex_structure().clone(),
            description,
        }
    }

    /// Builds the manifold without validating it.
    pub fn to_manifold(&self) -> Result<LieFrameManifold> {
        LieFrameManifold::new(
            self.structure_constants.clone(),
            self.metric.clone(),
            self.j.clone(),
        )
    }

    pub fn flat_kahler_4() -> Self {
        ManifoldManifest::from_manifold(
            "flat_kahler_4",
            &flat_kahler_4(),
            Some("abelian Lie algebra R^4 with the canonical Norden pair".into()),
        )
    }

    pub fn to_json(&self) -> String {
        let d = self.dim;
        let c = &self.structure_constants;
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"id\": {},", json_string(&self.id));
        let _ = writeln!(out, "  \"dim\": {d},");
        out.push_str("  \"structure_constants\": [\n");
        for k in 0..d {
            out.push_str("    [\n");
            for i in 0..d {
                let row: Vec<f64> = (0..d).map(|j| c.get(&[k, i, j])).collect();
                let _ = write!(out, "      {}", number_row(&row));
                out.push_str(if i + 1 < d { ",\n" } else { "\n" });
            }
            out.push_str(if k + 1 < d { "    ],\n" } else { "    ]\n" });
        }
        out.push_str("  ],\n");
        write_matrix(&mut out, "metric", &self.metric);
        out.push_str(",\n");
        write_matrix(&mut out, "J", &self.j);
        match &self.description {
            Some(text) => {
                let _ = write!(out, ",\n  \"description\": {}\n", json_string(text));
            }
            None => out.push('\n'),
        }
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("manifest must be a JSON object".into()))?;
        let field = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::Parse(format!("missing key {key:?}")))
        };
        let id = field("id")?
            .as_str()
            .ok_or_else(|| Error::Parse("id must be a string".into()))?
            .to_string();
        let dim = field("dim")?
            .as_u64()
            .ok_or_else(|| Error::Parse("dim must be a non-negative integer".into()))?
            as usize;
        let description = match obj.get("description") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::Parse("description must be a string".into())),
        };

        let c_rows = nested(field("structure_constants")?, 3, "structure_constants")?;
        let (c_shape, c_data) = c_rows;
        if c_shape != [dim, dim, dim] {
            return Err(Error::Shape(format!(
                "structure_constants has shape {c_shape:?}, expected [{dim}, {dim}, {dim}]"
            )));
        }
        let structure_constants = DenseTensor::from_vec(dim, 3, c_data)?;
        let metric = matrix_field(field("metric")?, dim, "metric")?;
        let j = matrix_field(field("J")?, dim, "J")?;
        Ok(ManifoldManifest {
            id,
            dim,
            structure_constants,
            metric,
            j,
            description,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn load_manifest(path: &Path) -> Result<ManifoldManifest> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ManifoldManifest::from_json(&text)
}

/// 17 significant digits in exponent form; reparses to the same double.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        // keep the sign bit of -0.0 out of manifests
        return "0.0".to_string();
    }
    format!("{x:.16e}")
}

pub(crate) fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn number_row(row: &[f64]) -> String {
    let items: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
    format!("[{}]", items.join(", "))
}

fn write_matrix(out: &mut String, key: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "  \"{key}\": [");
    for i in 0..m.nrows() {
        let row: Vec<f64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
        let _ = write!(out, "    {}", number_row(&row));
        out.push_str(if i + 1 < m.nrows() { ",\n" } else { "\n" });
    }
    out.push_str("  ]");
}

fn matrix_field(v: &Value, dim: usize, name: &str) -> Result<DMatrix<f64>> {
    let (shape, data) = nested(v, 2, name)?;
    if shape != [dim, dim] {
        return Err(Error::Shape(format!(
            "{name} has shape {shape:?}, expected [{dim}, {dim}]"
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, &data))
}

/// Flattens a rectangular nested array of numbers, returning its shape.
fn nested(v: &Value, depth: usize, name: &str) -> Result<(Vec<usize>, Vec<f64>)> {
    fn walk(v: &Value, depth: usize, level: usize, shape: &mut Vec<usize>, out: &mut Vec<f64>, name: &str) -> Result<()> {
        if level == depth {
            let x = v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{name}: expected a number, found {v}")))?;
            out.push(x);
            return Ok(());
        }
        let items = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{name}: expected an array at depth {level}")))?;
        if shape.len() == level {
            shape.push(items.len());
        } else if shape[level] != items.len() {
            return Err(Error::Shape(format!("{name}: ragged array at depth {level}")));
        }
        items
            .iter()
            .try_for_each(|item| walk(item, depth, level + 1, shape, out, name))
    }
    let mut shape = Vec::with_capacity(depth);
    let mut out = Vec::new();
    walk(v, depth, 0, &mut shape, &mut out, name)?;
    // empty arrays never reach the leaves
    shape.resize(depth, 0);
    Ok((shape, out))
}
