use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{validate, FiniteUltrametricSpace};
use crate::error::{Error, Result};
use crate::values::{RangeSet, Value};

/// A space as read from JSON, before validation.
///
/// A missing `range_set` means all non-negative rationals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSpace {
    pub points: Vec<String>,
    pub dist: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_set: Option<RangeSet>,
}

/// Borrowed serialization form of a validated space.
#[derive(Serialize)]
pub struct SpaceJson<'a> {
    points: Vec<&'a str>,
    dist: Vec<&'a [Value]>,
    range_set: &'a RangeSet,
}

impl RawSpace {
    /// Validates against the embedded range set, or `fallback` if there is none.
    pub fn into_space(self, fallback: Option<&RangeSet>) -> Result<FiniteUltrametricSpace> {
        let s = match (&self.range_set, fallback) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.clone(),
            (None, None) => RangeSet::All,
        };
        validate(self.points, &self.dist, &s)
    }

    /// Square CSV matrix with a header row of labels. An optional leading
    /// empty header cell (row-label column) is accepted.
    pub fn from_csv(text: &str) -> Result<RawSpace> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(csv_err)?.clone();
        let mut labels: Vec<String> = headers.iter().map(str::to_string).collect();
        let row_labels = labels.first().is_some_and(|h| h.is_empty());
        if row_labels {
            labels.remove(0);
        }
        let mut dist = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let cells = record.iter().skip(usize::from(row_labels));
            dist.push(cells.map(str::parse).collect::<Result<Vec<Value>>>()?);
        }
        Ok(RawSpace {
            points: labels,
            dist,
            range_set: None,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

impl FiniteUltrametricSpace {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("space serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawSpace = serde_json::from_str(text)?;
        raw.into_space(None)
    }

    pub fn to_raw(&self) -> RawSpace {
        RawSpace {
            points: self.labels().map(str::to_string).collect(),
            dist: self.rows(),
            range_set: Some(self.range_set().clone()),
        }
    }
}

impl Serialize for FiniteUltrametricSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceJson {
            points: self.labels().collect(),
            dist: (0..self.len()).map(|i| self.row(i)).collect(),
            range_set: self.range_set(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteUltrametricSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RawSpace::deserialize(d)?
            .into_space(None)
            .map_err(serde::de::Error::custom)
    }
}
