//! Reading the JSON file formats. A functor or envelope file names its base
//! category under `"base"`, either inline, as a path relative to the file, or
//! as `corpus:<name>` for a built-in category.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use crate::corpus;
use crate::envelope::{EnvelopeObject, RawEnvelope};
use crate::error::{Error, Result};
use crate::fincat::{FinCat, RawCategory};
use crate::metric::{CostVector, GenMetric, RawCost, RawMetric};
use crate::order::{FinPoset, RawPoset};
use crate::setfun::{RawFunctor, SetFunctor};

/// A parsed and validated input file.
#[derive(Clone, Debug)]
pub enum Document {
    Category(Arc<FinCat>),
    Functor(SetFunctor),
    Envelope(EnvelopeObject),
    Poset(FinPoset),
    Metric(Arc<GenMetric>),
    Cost(CostVector),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Functor(_) => "functor",
            Document::Envelope(_) => "envelope",
            Document::Poset(_) => "poset",
            Document::Metric(_) => "metric",
            Document::Cost(_) => "cost",
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn parse_category(text: &str) -> Result<Arc<FinCat>> {
    let raw: RawCategory = from_value(parse_value(text)?)?;
    Ok(Arc::new(FinCat::new(raw)?))
}

pub fn load_category(path: &Path) -> Result<Arc<FinCat>> {
    parse_category(&read(path)?)
}

fn resolve_base(base: Value, dir: &Path) -> Result<Arc<FinCat>> {
    match base {
        Value::String(s) => match s.strip_prefix("corpus:") {
            Some(name) => corpus::category(name),
            None => load_category(&dir.join(s)),
        },
        Value::Object(_) => Ok(Arc::new(FinCat::new(from_value(base)?)?)),
        _ => Err(Error::Parse(
            "`base` must be a path or an inline category".to_string(),
        )),
    }
}

fn take(value: &mut Value, key: &str) -> Result<Value> {
    value
        .as_object_mut()
        .and_then(|m| m.remove(key))
        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))
}

pub fn parse_functor(text: &str, dir: &Path) -> Result<SetFunctor> {
    let mut value = parse_value(text)?;
    let base = resolve_base(take(&mut value, "base")?, dir)?;
    let raw: RawFunctor = from_value(value)?;
    SetFunctor::from_raw(base, &raw)
}

pub fn load_functor(path: &Path) -> Result<SetFunctor> {
    parse_functor(&read(path)?, &dir_of(path))
}

pub fn parse_envelope(text: &str, dir: &Path) -> Result<EnvelopeObject> {
    let mut value = parse_value(text)?;
    let base = resolve_base(take(&mut value, "base")?, dir)?;
    let raw: RawEnvelope = from_value(value)?;
    EnvelopeObject::from_raw(base, &raw)
}

pub fn parse_poset(text: &str) -> Result<FinPoset> {
    let raw: RawPoset = from_value(parse_value(text)?)?;
    FinPoset::from_raw(&raw)
}

pub fn load_poset(path: &Path) -> Result<FinPoset> {
    parse_poset(&read(path)?)
}

pub fn parse_metric(text: &str) -> Result<Arc<GenMetric>> {
    let raw: RawMetric = from_value(parse_value(text)?)?;
    Ok(Arc::new(GenMetric::new(raw)?))
}

pub fn load_metric(path: &Path) -> Result<Arc<GenMetric>> {
    parse_metric(&read(path)?)
}

pub fn parse_cost(text: &str, space: Arc<GenMetric>) -> Result<CostVector> {
    let raw: RawCost = from_value(parse_value(text)?)?;
    CostVector::from_raw(space, &raw)
}

pub fn load_cost(path: &Path, space: Arc<GenMetric>) -> Result<CostVector> {
    parse_cost(&read(path)?, space)
}

#[derive(Deserialize)]
struct SpaceRef {
    space: Value,
}

/// Parses any supported file, telling the kinds apart by their keys. Cost
/// vectors are recognised only when they name their space under `"space"`.
pub fn parse_document(text: &str, dir: &Path) -> Result<Document> {
    let value = parse_value(text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("chi") {
        parse_envelope(text, dir).map(Document::Envelope)
    } else if has("sets") {
        parse_functor(text, dir).map(Document::Functor)
    } else if has("objects") {
        parse_category(text).map(Document::Category)
    } else if has("elements") {
        parse_poset(text).map(Document::Poset)
    } else if has("points") {
        parse_metric(text).map(Document::Metric)
    } else if has("f") {
        let SpaceRef { space } = from_value(value.clone())?;
        let space = match space {
            Value::String(s) => match s.strip_prefix("corpus:") {
                Some(name) => corpus::metric(name)?,
                None => load_metric(&dir.join(s))?,
            },
            other => Arc::new(GenMetric::new(from_value(other)?)?),
        };
        let mut value = value;
        take(&mut value, "space")?;
        let raw: RawCost = from_value(value)?;
        CostVector::from_raw(space, &raw).map(Document::Cost)
    } else {
        Err(Error::Parse("unrecognised file kind".to_string()))
    }
}

pub fn load_document(path: &Path) -> Result<Document> {
    parse_document(&read(path)?, &dir_of(path))
}
