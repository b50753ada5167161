//! Instance files: a finite space plus a self-map, as JSON.
//!
//! ```json
//! {"points": ["a", "b"], "distances": [[0, "1/2"], ["1/2", 0]], "map": {"a": "b", "b": "b"}}
//! ```
//!
//! Distances are integers or `"p/q"` strings. The map must give an image for
//! every point.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metric::{validate_metric, FiniteMetricSpace, SelfMap, ValidationReport};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub space: FiniteMetricSpace,
    pub map: SelfMap,
}

/// Serialized shape of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub points: Vec<String>,
    pub distances: Vec<Vec<Rational>>,
    pub map: BTreeMap<String, String>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::InstanceFormat(msg.into())
}

fn parse_distance(v: &Value, i: usize, j: usize) -> Result<Rational> {
    let loc = || format!("distances[{i}][{j}]");
    match v {
        Value::Number(num) => match num.as_i64() {
            Some(x) => Ok(Rational::from_integer(x)),
            None => Err(format_err(format!(
                "{}: {num} is not an integer; write fractions as \"p/q\"",
                loc()
            ))),
        },
        Value::String(s) => s
            .parse()
            .map_err(|_| format_err(format!("{}: malformed rational {s:?}", loc()))),
        other => Err(format_err(format!("{}: expected number or string, got {other}", loc()))),
    }
}

fn parse_root(text: &str) -> Result<Value> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| format_err(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if !root.is_object() {
        return Err(format_err("top level must be an object"));
    }
    Ok(root)
}

fn parse_space_parts(obj: &serde_json::Map<String, Value>) -> Result<(Vec<String>, Vec<Vec<Rational>>)> {
    let points: Vec<String> = obj
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("missing array \"points\""))?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.as_str()
                .map(str::to_string)
                .ok_or_else(|| format_err(format!("points[{i}]: expected a string")))
        })
        .collect::<Result<_>>()?;

    let rows = obj
        .get("distances")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("missing array \"distances\""))?;
    let mut dist = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| format_err(format!("distances[{i}]: expected an array")))?;
        dist.push(
            row.iter()
                .enumerate()
                .map(|(j, v)| parse_distance(v, i, j))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if points.len() != dist.len() {
        return Err(Error::LabelCountMismatch {
            count: points.len(),
            size: dist.len(),
        });
    }
    Ok((points, dist))
}

/// Axiom report for the distance matrix of an instance file, without
/// requiring it to be a metric. The map is not inspected.
pub fn validate_json(text: &str) -> Result<ValidationReport> {
    let root = parse_root(text)?;
    let (_, dist) = parse_space_parts(root.as_object().expect("checked by parse_root"))?;
    validate_metric(&dist)
}

impl Instance {
    pub fn new(space: FiniteMetricSpace, map: SelfMap) -> Result<Self> {
        if map.len() != space.len() {
            return Err(format_err(format!(
                "map has {} entries for {} points",
                map.len(),
                space.len()
            )));
        }
        Ok(Instance { space, map })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root = parse_root(text)?;
        let obj = root.as_object().expect("checked by parse_root");
        let (points, dist) = parse_space_parts(obj)?;
        let space = FiniteMetricSpace::new(points, dist)?;

        let map_obj = obj
            .get("map")
            .and_then(Value::as_object)
            .ok_or_else(|| format_err("missing object \"map\""))?;
        for key in map_obj.keys() {
            if space.index_of(key).is_none() {
                return Err(Error::UnknownLabel(key.clone(), "map keys"));
            }
        }
        let mut image = Vec::with_capacity(space.len());
        for label in space.labels() {
            let target = map_obj
                .get(label)
                .ok_or_else(|| Error::NonTotalMap(label.clone()))?;
            let target = target
                .as_str()
                .ok_or_else(|| format_err(format!("map[{label:?}]: expected a label string")))?;
            let idx = space
                .index_of(target)
                .ok_or_else(|| Error::UnknownLabel(target.to_string(), "map values"))?;
            image.push(idx);
        }
        let map = SelfMap::new(image)?;
        Ok(Instance { space, map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| format_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file(&self) -> InstanceFile {
        let labels = self.space.labels();
        InstanceFile {
            points: labels.to_vec(),
            distances: self.space.matrix().to_vec(),
            map: labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), labels[self.map.at(i)].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EM_2_1: &str = r#"{
        "points": ["x1", "x2", "x3", "x4"],
        "distances": [[0, 2, 2, 2], [2, 0, 2, "1"], [2, 2, 0, "4/2"], [2, 1, 2, 0]],
        "map": {"x1": "x1", "x2": "x3", "x3": "x4", "x4": "x1"}
    }"#;

    #[test]
    fn parses_example() {
        let inst = Instance::from_json(EM_2_1).unwrap();
        assert_eq!(inst.space.len(), 4);
        assert_eq!(inst.map.images(), &[0, 2, 3, 0]);
        assert_eq!(inst.space.distance(1, 3), &Rational::from_integer(1));
    }

    #[test]
    fn roundtrip() {
        let inst = Instance::from_json(EM_2_1).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn rejects_malformed_rational_with_location() {
        let text = EM_2_1.replace("\"4/2\"", "\"4/0\"");
        let err = Instance::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("distances[2][3]"), "{err}");
        let text = EM_2_1.replace("\"4/2\"", "2.5");
        assert!(Instance::from_json(&text).is_err());
    }

    #[test]
    fn validation_reports_axioms_without_failing() {
        let text = EM_2_1.replace("[0, 2, 2, 2]", "[0, 2, 2, 9]");
        let report = validate_json(&text).unwrap();
        assert!(!report.is_valid());
        assert!(validate_json(EM_2_1).unwrap().is_valid());
        assert!(validate_json("[]").is_err());
    }

    #[test]
    fn rejects_non_total_map() {
        let text = EM_2_1.replace(", \"x4\": \"x1\"", "");
        assert_eq!(
            Instance::from_json(&text).unwrap_err(),
            Error::NonTotalMap("x4".into())
        );
        let text = EM_2_1.replace("\"x4\": \"x1\"", "\"x4\": \"x9\"");
        assert!(matches!(
            Instance::from_json(&text),
            Err(Error::UnknownLabel(..))
        ));
    }

    #[test]
    fn rejects_structural_and_metric_problems() {
        let text = EM_2_1.replace("[2, 1, 2, 0]", "[2, 1, 2]");
        assert!(matches!(
            Instance::from_json(&text),
            Err(Error::NonSquare { .. })
        ));
        let text = EM_2_1.replace("[0, 2, 2, 2]", "[0, 2, 2, 9]");
        assert!(matches!(
            Instance::from_json(&text),
            Err(Error::NotAMetric(_))
        ));
        let err = Instance::from_json("{\"points\": [").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }
}
