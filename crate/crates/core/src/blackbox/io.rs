//! Binary model container.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    8 bytes  "XDAMODEL"
//! version  u32
//! kind     u8       0 = LR, 1 = MLP
//! seed     u64
//! features u32, then per feature: name (u32 length + UTF-8), mean f64, sd f64
//! hidden   u32, then u32 per hidden width
//! layers   u32, then per layer: rows u32, cols u32, rows*cols f64 (row-major), cols f64 bias
//! log      u32, then f64 per epoch
//! ```

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{InputScaler, Layer, ModelKind, ModelSpec, Network, TrainedModel};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"XDAMODEL";
pub const FORMAT_VERSION: u32 = 1;

pub fn save(model: &TrainedModel, path: &Path) -> Result<()> {
    fs::write(path, encode(model))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    decode(&fs::read(path)?)
}

pub(crate) fn encode(model: &TrainedModel) -> Vec<u8> {
    let mut out = Vec::new();
    let spec = model.spec();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(match spec.kind {
        ModelKind::Lr => 0,
        ModelKind::Mlp => 1,
    });
    out.extend_from_slice(&spec.seed.to_le_bytes());
    put_u32(&mut out, spec.feature_names.len());
    for (k, name) in spec.feature_names.iter().enumerate() {
        put_u32(&mut out, name.len());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&model.scaler().mean[k].to_le_bytes());
        out.extend_from_slice(&model.scaler().sd[k].to_le_bytes());
    }
    put_u32(&mut out, spec.hidden_dims.len());
    for &h in &spec.hidden_dims {
        put_u32(&mut out, h);
    }
    put_u32(&mut out, model.network().layers.len());
    for layer in &model.network().layers {
        put_u32(&mut out, layer.weights.nrows());
        put_u32(&mut out, layer.weights.ncols());
        for v in layer.weights.iter().chain(&layer.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    put_u32(&mut out, model.training_log().len());
    for v in model.training_log() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Parse {
                offset: self.pos,
                reason: format!("unexpected end of file reading {what}"),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")) as usize)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        // Check the length up front so a corrupt count cannot trigger a huge allocation.
        if n.saturating_mul(8) > self.bytes.len() - self.pos {
            return Err(Error::Parse {
                offset: self.pos,
                reason: format!("{what}: {n} values exceed remaining bytes"),
            });
        }
        (0..n).map(|_| self.f64(what)).collect()
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            reason: reason.into(),
        }
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<TrainedModel> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(8, "magic")? != MAGIC {
        return Err(Error::Parse {
            offset: 0,
            reason: "not a model file (bad magic)".into(),
        });
    }
    let version = c.u32("version")? as u32;
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = match c.u8("kind")? {
        0 => ModelKind::Lr,
        1 => ModelKind::Mlp,
        k => return Err(c.error(format!("unknown model kind {k}"))),
    };
    let seed = c.u64("seed")?;
    let nf = c.u32("feature count")?;
    let mut feature_names = Vec::new();
    let mut mean = Vec::new();
    let mut sd = Vec::new();
    for _ in 0..nf {
        let len = c.u32("name length")?;
        let raw = c.take(len, "feature name")?;
        let name = std::str::from_utf8(raw).map_err(|_| c.error("feature name is not UTF-8"))?;
        feature_names.push(name.to_string());
        mean.push(c.f64("scaler mean")?);
        sd.push(c.f64("scaler sd")?);
    }
    let nh = c.u32("hidden count")?;
    let hidden_dims = (0..nh)
        .map(|_| c.u32("hidden width"))
        .collect::<Result<Vec<_>>>()?;
    let nl = c.u32("layer count")?;
    let mut layers = Vec::new();
    for _ in 0..nl {
        let rows = c.u32("layer rows")?;
        let cols = c.u32("layer cols")?;
        let w = c.f64s(rows.saturating_mul(cols), "weights")?;
        let b = c.f64s(cols, "bias")?;
        layers.push(Layer {
            weights: Array2::from_shape_vec((rows, cols), w).map_err(|e| c.error(e.to_string()))?,
            bias: Array1::from(b),
        });
    }
    let nlog = c.u32("log length")?;
    let log = c.f64s(nlog, "training log")?;
    if c.pos != bytes.len() {
        return Err(c.error("trailing bytes after model"));
    }
    if layers.is_empty() {
        return Err(c.error("model has no layers"));
    }
    let spec = ModelSpec {
        kind,
        feature_names,
        hidden_dims,
        seed,
    };
    TrainedModel::from_parts_with_log(spec, InputScaler { mean, sd }, Network { layers }, log)
        .map_err(|e| c.error(e.to_string()))
}
