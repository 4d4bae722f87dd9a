use std::path::Path;

use super::{io_err, read_text, write_bytes, InterchangeError};

/// Pooled hidden states for several layers: raw little-endian f32 laid out
/// as `[layer][point][dim]`, with no header.
#[derive(Debug, Clone, PartialEq)]
pub struct StateStack {
    pub layers: Vec<usize>,
    pub points: usize,
    pub dim: usize,
    pub data: Vec<f32>,
}

impl StateStack {
    /// Points of the `slot`-th stored layer as f64 vectors.
    pub fn layer_points(&self, slot: usize) -> Vec<Vec<f64>> {
        let per = self.points * self.dim;
        self.data[slot * per..(slot + 1) * per]
            .chunks_exact(self.dim.max(1))
            .map(|p| p.iter().map(|&x| f64::from(x)).collect())
            .collect()
    }
}

pub fn write_states(path: &Path, states: &StateStack) -> Result<(), InterchangeError> {
    let bytes: Vec<u8> = states.data.iter().flat_map(|x| x.to_le_bytes()).collect();
    write_bytes(path, &bytes)
}

/// Reads a stack of `layers.len()` layers of `points` vectors; the dimension
/// is inferred from the file size.
pub fn read_states(path: &Path, layers: &[usize], points: usize) -> Result<StateStack, InterchangeError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let cells = layers.len() * points;
    if cells == 0 || bytes.len() % (cells * 4) != 0 || bytes.is_empty() {
        return Err(InterchangeError::PayloadSizeMismatch { file: path.display().to_string(), expected: cells * 4, actual: bytes.len() });
    }
    let data: Vec<f32> = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    if let Some(index) = data.iter().position(|x| !x.is_finite()) {
        return Err(InterchangeError::NonFiniteValue { file: path.display().to_string(), index });
    }
    Ok(StateStack { layers: layers.to_vec(), points, dim: bytes.len() / (cells * 4), data })
}

pub fn write_labels(path: &Path, labels: &[String]) -> Result<(), InterchangeError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| InterchangeError::Csv { context: String::from("labels"), source: e };
    w.write_record(["label"]).map_err(err)?;
    for l in labels {
        w.write_record([l]).map_err(err)?;
    }
    write_bytes(path, &w.into_inner().map_err(|e| InterchangeError::Format(e.to_string()))?)
}

pub fn read_labels(path: &Path) -> Result<Vec<String>, InterchangeError> {
    let text = read_text(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let err = |e: csv::Error| InterchangeError::Csv { context: String::from("labels"), source: e };
    if r.headers().map_err(err)?.get(0) != Some("label") {
        return Err(InterchangeError::Format(String::from("labels.csv must start with a `label` column")));
    }
    r.records().map(|row| Ok(row.map_err(err)?.get(0).unwrap_or("").to_string())).collect()
}
