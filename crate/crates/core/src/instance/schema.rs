//! JSON instance documents.
//!
//! ```json
//! { "horizon": 1.0,
//!   "resources": [{"id": 0, "capacity": 1.0}],
//!   "types": [{"id": 0, "utilization": [0.5], "rate": [{"t0": 0.0, "t1": 1.0, "rate": 2.0}]}] }
//! ```
//!
//! Scheduling instances carry an extra optional `schedule` object so that
//! waiting times and the layered LP solver survive a round trip.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CustomerType, Instance, RateFunction, RateSegment, Resource, Schedule};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub horizon: f64,
    pub resources: Vec<ResourceDoc>,
    pub types: Vec<TypeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceDoc {
    pub id: usize,
    pub capacity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeDoc {
    pub id: usize,
    pub utilization: Vec<f64>,
    pub rate: Vec<RateSegment>,
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Instance> {
        let horizon = doc.horizon;
        let resources = doc.resources.into_iter().map(|r| Resource { id: r.id, capacity: r.capacity }).collect();
        let types = doc
            .types
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let rate = RateFunction::new(t.rate, horizon).map_err(|e| match e {
                    Error::InvalidInstance(msg) => Error::InvalidInstance(format!("types[{i}]: {msg}")),
                    other => other,
                })?;
                Ok(CustomerType::new(t.id, t.utilization, rate))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(horizon, resources, types, doc.schedule)
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            horizon: inst.horizon(),
            resources: inst.resources().iter().map(|r| ResourceDoc { id: r.id, capacity: r.capacity }).collect(),
            types: inst
                .types()
                .iter()
                .map(|t| TypeDoc { id: t.id, utilization: t.utilization.clone(), rate: t.rate.segments().to_vec() })
                .collect(),
            schedule: inst.schedule().cloned(),
        }
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceDoc::from(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        Instance::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
