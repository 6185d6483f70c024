use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyhedron, Similarity, DEFAULT_TOLERANCE};
use crate::validator::{PolyhedralSystem, Settings, DEFAULT_PIECE_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronSpec {
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MapSpec {
    Explicit {
        ratio: f64,
        orthogonal: Vec<Vec<f64>>,
        translation: Vec<f64>,
    },
    #[serde(rename_all = "camelCase")]
    Vertices { target_vertices: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RunConfig {
    pub tolerance: f64,
    pub piece_budget: usize,
    /// Depth for expansions, skeletons and order analysis.
    pub depth: usize,
    pub cover_depths: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: DEFAULT_TOLERANCE,
            piece_budget: DEFAULT_PIECE_BUDGET,
            depth: 2,
            cover_depths: crate::dimension::DEFAULT_COVER_DEPTHS.to_vec(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Parse {
                location: "config.tolerance".into(),
                message: format!("must lie in (0, 1), got {}", self.tolerance),
            });
        }
        if self.piece_budget == 0 {
            return Err(Error::Parse {
                location: "config.pieceBudget".into(),
                message: "must be positive".into(),
            });
        }
        Ok(())
    }

    pub fn settings(&self) -> Settings {
        Settings {
            tolerance: self.tolerance,
            piece_budget: self.piece_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDescription {
    pub name: String,
    pub dimension: usize,
    pub polyhedron: PolyhedronSpec,
    pub maps: Vec<MapSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescription {
    name: String,
    dimension: usize,
    polyhedron: PolyhedronSpec,
    maps: Vec<Value>,
    #[serde(default)]
    config: Option<RunConfig>,
}

fn field_error(location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        location,
        message: message.into(),
    }
}

fn map_spec(k: usize, v: Value) -> Result<MapSpec> {
    let loc = |f: &str| format!("maps[{k}]{f}");
    let obj = v
        .as_object()
        .ok_or_else(|| field_error(loc(""), "expected an object"))?;
    let get = |key: &str| -> Result<Value> {
        obj.get(key)
            .cloned()
            .ok_or_else(|| field_error(loc(""), format!("missing field `{key}`")))
    };
    if obj.contains_key("targetVertices") {
        if obj.len() != 1 {
            return Err(field_error(
                loc(""),
                "`targetVertices` cannot be combined with other keys",
            ));
        }
        let target_vertices = serde_json::from_value(get("targetVertices")?)
            .map_err(|e| field_error(loc(".targetVertices"), e.to_string()))?;
        return Ok(MapSpec::Vertices { target_vertices });
    }
    if let Some(extra) = obj
        .keys()
        .find(|k| !["ratio", "orthogonal", "translation"].contains(&k.as_str()))
    {
        return Err(field_error(loc(""), format!("unknown field `{extra}`")));
    }
    Ok(MapSpec::Explicit {
        ratio: serde_json::from_value(get("ratio")?).map_err(|e| field_error(loc(".ratio"), e.to_string()))?,
        orthogonal: serde_json::from_value(get("orthogonal")?)
            .map_err(|e| field_error(loc(".orthogonal"), e.to_string()))?,
        translation: serde_json::from_value(get("translation")?)
            .map_err(|e| field_error(loc(".translation"), e.to_string()))?,
    })
}

/// Parses and structurally validates a system description.
pub fn parse_system_file(text: &str) -> Result<SystemDescription> {
    let raw: RawDescription = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let maps = raw
        .maps
        .into_iter()
        .enumerate()
        .map(|(k, v)| map_spec(k, v))
        .collect::<Result<Vec<_>>>()?;
    let desc = SystemDescription {
        name: raw.name,
        dimension: raw.dimension,
        polyhedron: raw.polyhedron,
        maps,
        config: raw.config,
    };
    desc.to_system()?;
    Ok(desc)
}

fn point(coords: &[f64], d: usize, location: impl Fn() -> String) -> Result<Point> {
    if coords.len() != d {
        return Err(field_error(
            location(),
            format!("expected {d} coordinates, got {}", coords.len()),
        ));
    }
    Point::new(coords.to_vec()).map_err(|e| field_error(location(), e.to_string()))
}

impl SystemDescription {
    pub fn config(&self) -> RunConfig {
        self.config.clone().unwrap_or_default()
    }

    pub fn build_polyhedron(&self) -> Result<Polyhedron> {
        let d = self.dimension;
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        let vertices = self
            .polyhedron
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| point(v, d, || format!("polyhedron.vertices[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        match (d, &self.polyhedron.faces) {
            (3, None) => Err(field_error(
                "polyhedron".into(),
                "missing field `faces` (required when dimension = 3)",
            )),
            (3, Some(f)) => Polyhedron::polytope(vertices, f.clone()),
            (_, Some(_)) => Err(field_error(
                "polyhedron.faces".into(),
                "faces are only used when dimension = 3",
            )),
            (_, None) => Polyhedron::new(vertices, Vec::new()),
        }
    }

    /// Resolves every map and assembles the system with the description's config.
    pub fn to_system(&self) -> Result<PolyhedralSystem> {
        self.to_system_with(&self.config())
    }

    pub fn to_system_with(&self, config: &RunConfig) -> Result<PolyhedralSystem> {
        config.validate()?;
        let poly = self.build_polyhedron()?;
        let d = self.dimension;
        let wrap = |index: usize| {
            move |e: Error| Error::Map {
                index,
                source: Box::new(e),
            }
        };
        let mut maps = Vec::new();
        for (k, m) in self.maps.iter().enumerate() {
            let s = match m {
                MapSpec::Explicit {
                    ratio,
                    orthogonal,
                    translation,
                } => {
                    let t = point(translation, d, || format!("maps[{k}].translation"))?;
                    if orthogonal.len() != d || orthogonal.iter().any(|r| r.len() != d) {
                        return Err(field_error(
                            format!("maps[{k}].orthogonal"),
                            format!("expected a {d}×{d} matrix"),
                        ));
                    }
                    Similarity::from_rows(*ratio, orthogonal, t).map_err(wrap(k))?
                }
                MapSpec::Vertices { target_vertices } => {
                    let targets = target_vertices
                        .iter()
                        .enumerate()
                        .map(|(j, v)| point(v, d, || format!("maps[{k}].targetVertices[{j}]")))
                        .collect::<Result<Vec<_>>>()?;
                    Similarity::from_vertex_map(&poly, &targets, config.tolerance).map_err(wrap(k))?
                }
            };
            maps.push(s);
        }
        PolyhedralSystem::with_settings(poly, maps, config.settings())
    }

    /// Describes a system with explicit maps.
    pub fn from_system(name: &str, sys: &PolyhedralSystem) -> Self {
        let p = sys.polyhedron();
        SystemDescription {
            name: name.to_string(),
            dimension: sys.dim(),
            polyhedron: PolyhedronSpec {
                vertices: p.vertices().iter().map(|v| v.coords().to_vec()).collect(),
                faces: (sys.dim() == 3).then(|| p.faces().to_vec()),
            },
            maps: sys
                .maps()
                .iter()
                .map(|s| MapSpec::Explicit {
                    ratio: s.ratio(),
                    orthogonal: s.orthogonal_rows(),
                    translation: s.translation().coords().to_vec(),
                })
                .collect(),
            config: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptions serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VICSEK: &str = r#"{
      "name": "vicsek",
      "dimension": 2,
      "polyhedron": { "vertices": [[0,0],[1,0],[1,1],[0,1]] },
      "maps": [
        { "ratio": 0.3333333333333333, "orthogonal": [[1,0],[0,1]], "translation": [0,0] },
        { "targetVertices": [[0.6666666666666666,0],[1,0],[1,0.3333333333333333],[0.6666666666666666,0.3333333333333333]] },
        { "ratio": 0.3333333333333333, "orthogonal": [[1,0],[0,1]], "translation": [0.6666666666666666,0.6666666666666666] },
        { "ratio": 0.3333333333333333, "orthogonal": [[1,0],[0,1]], "translation": [0,0.6666666666666666] },
        { "ratio": 0.3333333333333333, "orthogonal": [[1,0],[0,1]], "translation": [0.3333333333333333,0.3333333333333333] }
      ]
    }"#;

    #[test]
    fn parses_mixed_map_styles() {
        let d = parse_system_file(VICSEK).unwrap();
        assert_eq!((d.maps.len(), d.dimension), (5, 2));
        let sys = d.to_system().unwrap();
        assert!((sys.maps()[1].ratio() - 1.0 / 3.0).abs() < 1e-12);
        assert!(crate::validator::validate_system(&sys).is_dendrite());
    }

    #[test]
    fn missing_maps_is_named() {
        let text = r#"{ "name": "x", "dimension": 1, "polyhedron": { "vertices": [[0],[1]] } }"#;
        match parse_system_file(text) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("maps"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_and_bad_maps_are_rejected() {
        let text = VICSEK.replace("\"name\"", "\"title\"");
        assert!(matches!(parse_system_file(&text), Err(Error::Parse { .. })));
        let text = VICSEK.replace("[1,0.3333333333333333]", "[1,0.5]");
        match parse_system_file(&text) {
            Err(Error::Map { index: 1, source }) => assert!(matches!(*source, Error::NoSimilarityExists { .. })),
            other => panic!("{other:?}"),
        }
        let text = VICSEK.replace("\"translation\": [0,0] }", "\"translation\": [0,0], \"skew\": 1 }");
        assert!(matches!(parse_system_file(&text), Err(Error::Parse { location, .. }) if location == "maps[0]"));
    }

    #[test]
    fn round_trip() {
        let d = parse_system_file(VICSEK).unwrap();
        assert_eq!(parse_system_file(&d.to_json()).unwrap(), d);
    }
}
