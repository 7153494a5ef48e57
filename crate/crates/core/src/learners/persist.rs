//! Single-file model format.
//!
//! ```text
//! magic      8 bytes  "WCMODEL\0"
//! version    u32 LE
//! algorithm  u8       1 gbrt, 2 random_forest, 3 mlp, 4 svr
//! features   u32 LE   feature count
//! spec       u32 LE length + UTF-8 JSON of the ModelSpec
//! sections   u32 LE count, then per section:
//!              u32 LE name length + UTF-8 name
//!              u64 LE value count + values as f64 LE
//! ```
//!
//! Training duration is a runtime measurement and is not stored.

use std::collections::HashMap;

use super::{
    Algorithm, FittedState, ForestModel, GbrtModel, MlpModel, ModelSpec, SvrModel, TrainedModel,
};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"WCMODEL\0";
pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn write_model(model: &TrainedModel) -> Vec<u8> {
    let sections = match &model.state {
        FittedState::Gbrt(m) => m.sections(),
        FittedState::RandomForest(m) => m.sections(),
        FittedState::Mlp(m) => m.sections(),
        FittedState::Svr(m) => m.sections(),
    };
    let spec = serde_json::to_vec(&model.spec).expect("spec serialises");
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&MODEL_FORMAT_VERSION.to_le_bytes());
    out.push(model.spec.algorithm().tag());
    out.extend_from_slice(&(model.feature_count as u32).to_le_bytes());
    out.extend_from_slice(&(spec.len() as u32).to_le_bytes());
    out.extend_from_slice(&spec);
    out.extend_from_slice(&(sections.len() as u32).to_le_bytes());
    for (name, values) in sections {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(values.len() as u64).to_le_bytes());
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|e| *e <= self.buf.len())
            .ok_or_else(|| Error::MalformedModel(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_model(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::MalformedModel("bad magic".into()));
    }
    let version = r.u32()?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::MalformedModel(format!(
            "unsupported version {version}"
        )));
    }
    let algorithm = Algorithm::from_tag(r.u8()?)
        .ok_or_else(|| Error::MalformedModel("unknown algorithm tag".into()))?;
    let feature_count = r.u32()? as usize;
    let spec_len = r.u32()? as usize;
    let spec: ModelSpec = serde_json::from_slice(r.take(spec_len)?)
        .map_err(|e| Error::MalformedModel(format!("spec: {e}")))?;
    if spec.algorithm() != algorithm {
        return Err(Error::MalformedModel(
            "algorithm tag disagrees with spec".into(),
        ));
    }
    let count = r.u32()? as usize;
    let mut sections = HashMap::with_capacity(count);
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|e| Error::MalformedModel(e.to_string()))?
            .to_string();
        let len = r.u64()? as usize;
        let raw = r.take(len.checked_mul(8).ok_or_else(|| {
            Error::MalformedModel("section length overflows".into())
        })?)?;
        let values = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        sections.insert(name, values);
    }
    if r.pos != bytes.len() {
        return Err(Error::MalformedModel("trailing bytes".into()));
    }
    let state = match algorithm {
        Algorithm::Gbrt => FittedState::Gbrt(GbrtModel::from_sections(&sections)?),
        Algorithm::RandomForest => FittedState::RandomForest(ForestModel::from_sections(&sections)?),
        Algorithm::Mlp => FittedState::Mlp(MlpModel::from_sections(&sections)?),
        Algorithm::Svr => FittedState::Svr(SvrModel::from_sections(&sections)?),
    };
    Ok(TrainedModel {
        spec,
        feature_count,
        train_duration: 0.0,
        state,
    })
}
