//! TOML-backed configuration: table descriptions and run settings.
//!
//! A table file either names a builder with its parameters or lists raw
//! boundary pieces. All lengths are in table units, all angles in radians.

use crate::math::Vec2;
use crate::table::{self, BoundaryPiece, Gluing, Table};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A table description: one of the named builders or a raw piece list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum TableSpec {
    Strip { separation: f64 },
    Wedge { theta: f64 },
    RegularPolygon { sides: usize, circumradius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Circle { radius: f64 },
    Stadium { half_length: f64, cap_radius: f64 },
    Mushroom { cap_radius: f64, stem_width: f64, stem_depth: f64 },
    PocketedRectangle { width: f64, height: f64, pocket_radius: f64 },
    Moon { outer_radius: f64, inner_radius: f64, offset: f64 },
    DiskOnTorus { side: f64, scatterer_radius: f64 },
    BulgedPolygon { vertices: Vec<[f64; 2]>, sagitta: f64 },
    Pieces {
        pieces: Vec<PieceSpec>,
        #[serde(default)]
        gluings: Vec<GluingSpec>,
        bounded: bool,
        escape_radius: Option<f64>,
    },
}

/// Raw piece description for the `pieces` builder.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceSpec {
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        #[serde(default = "default_true")]
        interior_on_left: bool,
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        #[serde(default = "default_true")]
        interior_toward_center: bool,
    },
    Line {
        point: [f64; 2],
        direction: [f64; 2],
        #[serde(default = "default_true")]
        interior_on_left: bool,
        #[serde(default)]
        vertex_at_point: bool,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingSpec {
    pub source: usize,
    pub target: usize,
    pub translation: [f64; 2],
}

impl TableSpec {
    pub fn build(&self) -> Result<Table> {
        match self {
            TableSpec::Strip { separation } => table::strip(*separation),
            TableSpec::Wedge { theta } => table::wedge(*theta),
            TableSpec::RegularPolygon { sides, circumradius } => {
                table::regular_polygon(*sides, *circumradius)
            }
            TableSpec::Polygon { vertices } => {
                let vs: Vec<Vec2> = vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect();
                table::polygon(&vs)
            }
            TableSpec::Circle { radius } => table::circle(*radius),
            TableSpec::Stadium { half_length, cap_radius } => {
                table::stadium(*half_length, *cap_radius)
            }
            TableSpec::Mushroom { cap_radius, stem_width, stem_depth } => {
                table::mushroom(*cap_radius, *stem_width, *stem_depth)
            }
            TableSpec::PocketedRectangle { width, height, pocket_radius } => {
                table::pocketed_rectangle(*width, *height, *pocket_radius)
            }
            TableSpec::Moon { outer_radius, inner_radius, offset } => {
                table::moon(*outer_radius, *inner_radius, *offset)
            }
            TableSpec::DiskOnTorus { side, scatterer_radius } => {
                table::disk_on_torus(*side, *scatterer_radius)
            }
            TableSpec::BulgedPolygon { vertices, sagitta } => {
                let vs: Vec<Vec2> = vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect();
                table::bulged_polygon(&vs, *sagitta)
            }
            TableSpec::Pieces { pieces, gluings, bounded, escape_radius } => {
                let ps: Result<Vec<BoundaryPiece>> = pieces.iter().map(PieceSpec::build).collect();
                let gs = gluings
                    .iter()
                    .map(|g| Gluing {
                        source: g.source,
                        target: g.target,
                        translation: Vec2::new(g.translation[0], g.translation[1]),
                    })
                    .collect();
                Table::with_escape_radius(ps?, gs, *bounded, *escape_radius)
            }
        }
    }

    /// One-line description used in output headers.
    pub fn describe(&self) -> String {
        match self {
            TableSpec::Strip { separation } => format!("strip:separation={separation}"),
            TableSpec::Wedge { theta } => format!("wedge:theta={theta}"),
            TableSpec::RegularPolygon { sides, circumradius } => {
                format!("regular_polygon:sides={sides},circumradius={circumradius}")
            }
            TableSpec::Polygon { vertices } => format!("polygon:{} vertices", vertices.len()),
            TableSpec::Circle { radius } => format!("circle:radius={radius}"),
            TableSpec::Stadium { half_length, cap_radius } => {
                format!("stadium:half_length={half_length},cap_radius={cap_radius}")
            }
            TableSpec::Mushroom { cap_radius, stem_width, stem_depth } => format!(
                "mushroom:cap_radius={cap_radius},stem_width={stem_width},stem_depth={stem_depth}"
            ),
            TableSpec::PocketedRectangle { width, height, pocket_radius } => format!(
                "pocketed_rectangle:width={width},height={height},pocket_radius={pocket_radius}"
            ),
            TableSpec::Moon { outer_radius, inner_radius, offset } => format!(
                "moon:outer_radius={outer_radius},inner_radius={inner_radius},offset={offset}"
            ),
            TableSpec::DiskOnTorus { side, scatterer_radius } => {
                format!("disk_on_torus:side={side},scatterer_radius={scatterer_radius}")
            }
            TableSpec::BulgedPolygon { vertices, sagitta } => {
                format!("bulged_polygon:{} vertices,sagitta={sagitta}", vertices.len())
            }
            TableSpec::Pieces { pieces, .. } => format!("pieces:{} pieces", pieces.len()),
        }
    }

    /// Parse a compact command-line form: `name:key=value,key=value` with
    /// regular-polygon presets (`hexagon`, `triangle`, ...) accepted.
    pub fn parse_compact(text: &str) -> Result<TableSpec> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (text.trim(), ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("expected key=value, got `{part}`")))?;
                let val: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number `{v}` for `{k}`")))?;
                kv.insert(k.trim().to_string(), val);
            }
        }
        let get = |k: &str, default: Option<f64>| -> Result<f64> {
            kv.get(k).copied().or(default).ok_or_else(|| {
                Error::Config(format!("table `{name}` needs parameter `{k}`"))
            })
        };
        let spec = match name {
            "strip" => TableSpec::Strip { separation: get("separation", Some(1.0))? },
            "wedge" => TableSpec::Wedge { theta: get("theta", None)? },
            "regular_polygon" => TableSpec::RegularPolygon {
                sides: get("sides", None)? as usize,
                circumradius: get("circumradius", Some(1.0))?,
            },
            "triangle" => TableSpec::RegularPolygon {
                sides: 3,
                circumradius: get("circumradius", Some(1.0))?,
            },
            "pentagon" => TableSpec::RegularPolygon {
                sides: 5,
                circumradius: get("circumradius", Some(1.0))?,
            },
            "hexagon" => TableSpec::RegularPolygon {
                sides: 6,
                circumradius: get("circumradius", Some(1.0))?,
            },
            "circle" => TableSpec::Circle { radius: get("radius", Some(1.0))? },
            "stadium" => TableSpec::Stadium {
                half_length: get("half_length", Some(1.0))?,
                cap_radius: get("cap_radius", Some(0.5))?,
            },
            "mushroom" => TableSpec::Mushroom {
                cap_radius: get("cap_radius", Some(1.0))?,
                stem_width: get("stem_width", Some(0.8))?,
                stem_depth: get("stem_depth", Some(1.0))?,
            },
            "pocketed_rectangle" => TableSpec::PocketedRectangle {
                width: get("width", Some(2.0))?,
                height: get("height", Some(1.0))?,
                pocket_radius: get("pocket_radius", Some(0.2))?,
            },
            "moon" => TableSpec::Moon {
                outer_radius: get("outer_radius", Some(1.0))?,
                inner_radius: get("inner_radius", Some(0.7))?,
                offset: get("offset", Some(0.6))?,
            },
            "disk_on_torus" => TableSpec::DiskOnTorus {
                side: get("side", Some(1.0))?,
                scatterer_radius: get("scatterer_radius", Some(0.25))?,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown table `{other}`; see the README for the names"
                )))
            }
        };
        Ok(spec)
    }
}

impl PieceSpec {
    fn build(&self) -> Result<BoundaryPiece> {
        Ok(match self {
            PieceSpec::Segment { a, b, interior_on_left } => BoundaryPiece::Segment {
                a: Vec2::new(a[0], a[1]),
                b: Vec2::new(b[0], b[1]),
                interior_on_left: *interior_on_left,
            },
            PieceSpec::Arc { center, radius, start_angle, end_angle, interior_toward_center } => {
                let mut span = (end_angle - start_angle) % std::f64::consts::TAU;
                if span <= 0.0 {
                    span += std::f64::consts::TAU;
                }
                BoundaryPiece::Arc {
                    center: Vec2::new(center[0], center[1]),
                    radius: *radius,
                    start_angle: *start_angle,
                    span,
                    interior_toward_center: *interior_toward_center,
                }
            }
            PieceSpec::Line { point, direction, interior_on_left, vertex_at_point } => {
                let d = Vec2::new(direction[0], direction[1]);
                if d.norm() == 0.0 {
                    return Err(Error::Config("line direction must be nonzero".into()));
                }
                BoundaryPiece::Line {
                    point: Vec2::new(point[0], point[1]),
                    direction: d.normalized(),
                    interior_on_left: *interior_on_left,
                    vertex_at_point: *vertex_at_point,
                }
            }
        })
    }
}

/// Explicit initial condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialSpec {
    pub position: [f64; 2],
    /// `(v0, v1, v2)`; normalized to unit speed before the run.
    pub velocity: [f64; 3],
    #[serde(default)]
    pub x0: f64,
}

/// Output format of trace and dataset files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown format `{other}` (csv|jsonl)"))),
        }
    }
}

/// A complete run configuration, readable from a TOML file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub table: TableSpec,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_max_collisions")]
    pub max_collisions: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_seed() -> u64 {
    0
}
fn default_max_collisions() -> usize {
    1000
}
fn default_samples() -> usize {
    20
}
fn default_jobs() -> usize {
    1
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_table_spec(table: TableSpec) -> RunConfig {
        RunConfig {
            table,
            initial: None,
            seed: default_seed(),
            max_collisions: default_max_collisions(),
            samples: default_samples(),
            jobs: default_jobs(),
            format: default_format(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_config_round_trip() {
        let text = r#"
            seed = 42
            max_collisions = 500
            samples = 10
            jobs = 2
            format = "jsonl"

            [table]
            builder = "regular_polygon"
            sides = 6
            circumradius = 1.0

            [initial]
            position = [0.0, 0.5]
            velocity = [0.0, 0.6, 0.8]
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.format, OutputFormat::Jsonl);
        let table = cfg.table.build().unwrap();
        assert_eq!(table.pieces().len(), 6);
        assert!(cfg.initial.is_some());
    }

    #[test]
    fn raw_piece_table() {
        let text = r#"
            [table]
            builder = "pieces"
            bounded = false
            escape_radius = 100.0

            [[table.pieces]]
            kind = "line"
            point = [0.0, 0.0]
            direction = [1.0, 0.0]

            [[table.pieces]]
            kind = "line"
            point = [0.0, 1.0]
            direction = [1.0, 0.0]
            interior_on_left = false
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let table = cfg.table.build().unwrap();
        assert_eq!(table.pieces().len(), 2);
        assert!(!table.is_bounded());
        assert_eq!(table.escape_radius(), 100.0);
    }

    #[test]
    fn compact_table_strings() {
        let spec = TableSpec::parse_compact("wedge:theta=1.0472").unwrap();
        assert!(matches!(spec, TableSpec::Wedge { .. }));
        let spec = TableSpec::parse_compact("hexagon").unwrap();
        assert!(matches!(spec, TableSpec::RegularPolygon { sides: 6, .. }));
        assert!(TableSpec::parse_compact("klein_bottle").is_err());
        assert!(TableSpec::parse_compact("wedge:theta=abc").is_err());
        assert!(TableSpec::parse_compact("wedge").is_err());
    }

    #[test]
    fn bad_toml_is_a_config_error() {
        let r = RunConfig::from_toml("seed = \"not a number\"");
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
