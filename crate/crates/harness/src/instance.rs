//! Problem-instance files: a JSON description of (g, ell, constraint), the
//! runtime objects built from it, and a seeded generator for digraph-cut
//! benchmarks.
//!
//! The file schema is strict: unknown or missing fields are schema
//! violations reported with a `$.field` path, as are semantic problems
//! (lengths, ranges, signs). Serialization is canonical pretty-printed
//! JSON, so a fixed generator seed yields a byte-identical file.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use regsubmax::{compute_m, Matroid, ModularCost, RngStream, SetFunction};

use crate::error::{HarnessError, Result};

/// The submodular term of an instance, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Weighted digraph cut: g(A) = weight of arcs from A to its complement.
    DirectedCut { arcs: Vec<(usize, usize, f64)> },
    /// Weighted coverage: element e covers the items in covers[e].
    Coverage {
        item_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    /// Explicit table of 2^n values indexed by characteristic bits.
    Explicit { table: Vec<f64> },
}

/// The feasibility constraint of an instance, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintSpec {
    None,
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
}

/// On-disk form of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFile {
    pub n: usize,
    pub g: FunctionSpec,
    pub ell: Vec<f64>,
    pub constraint: ConstraintSpec,
}

/// A validated instance with its runtime oracle objects.
#[derive(Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub g: SetFunction,
    pub ell: ModularCost,
    pub matroid: Option<Matroid>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.file.n
    }

    /// Builds and validates the runtime objects for a file description.
    pub fn from_file_repr(file: InstanceFile) -> Result<Instance> {
        let n = file.n;
        if n == 0 {
            return Err(HarnessError::schema("$.n", "ground set must be non-empty"));
        }
        if file.ell.len() != n {
            return Err(HarnessError::schema(
                "$.ell",
                format!("expected {n} entries, found {}", file.ell.len()),
            ));
        }
        for (i, &w) in file.ell.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(HarnessError::schema(
                    format!("$.ell[{i}]"),
                    format!("cost must be a finite non-negative number, found {w}"),
                ));
            }
        }
        let g = match &file.g {
            FunctionSpec::DirectedCut { arcs } => {
                for (i, &(u, v, w)) in arcs.iter().enumerate() {
                    if u >= n || v >= n || u == v {
                        return Err(HarnessError::schema(
                            format!("$.g.arcs[{i}]"),
                            format!("arc ({u}, {v}) must join two distinct elements below {n}"),
                        ));
                    }
                    if w < 0.0 || !w.is_finite() {
                        return Err(HarnessError::schema(
                            format!("$.g.arcs[{i}]"),
                            format!("arc weight must be finite and non-negative, found {w}"),
                        ));
                    }
                }
                SetFunction::directed_cut(n, arcs)
                    .map_err(|e| HarnessError::schema("$.g.arcs", e))?
            }
            FunctionSpec::Coverage {
                item_weights,
                covers,
            } => {
                if covers.len() != n {
                    return Err(HarnessError::schema(
                        "$.g.covers",
                        format!("expected {n} cover lists, found {}", covers.len()),
                    ));
                }
                for (i, &w) in item_weights.iter().enumerate() {
                    if w < 0.0 || !w.is_finite() {
                        return Err(HarnessError::schema(
                            format!("$.g.item_weights[{i}]"),
                            format!("item weight must be finite and non-negative, found {w}"),
                        ));
                    }
                }
                for (e, list) in covers.iter().enumerate() {
                    for &item in list {
                        if item >= item_weights.len() {
                            return Err(HarnessError::schema(
                                format!("$.g.covers[{e}]"),
                                format!(
                                    "item {item} out of range for {} items",
                                    item_weights.len()
                                ),
                            ));
                        }
                    }
                }
                SetFunction::weighted_coverage(n, item_weights.clone(), covers)
                    .map_err(|e| HarnessError::schema("$.g", e))?
            }
            FunctionSpec::Explicit { table } => {
                if table.len() != 1usize << n.min(63) || n > regsubmax::EXACT_MAX_N {
                    return Err(HarnessError::schema(
                        "$.g.table",
                        format!(
                            "explicit tables need exactly 2^n entries with n <= {}, found {}",
                            regsubmax::EXACT_MAX_N,
                            table.len()
                        ),
                    ));
                }
                SetFunction::explicit(table.clone())
                    .map_err(|e| HarnessError::schema("$.g.table", e))?
            }
        };
        let ell =
            ModularCost::new(file.ell.clone()).map_err(|e| HarnessError::schema("$.ell", e))?;
        let matroid = match &file.constraint {
            ConstraintSpec::None => None,
            ConstraintSpec::Uniform { k } => {
                if *k > n {
                    return Err(HarnessError::schema(
                        "$.constraint.k",
                        format!("cardinality bound {k} exceeds ground set size {n}"),
                    ));
                }
                Some(Matroid::uniform(n, *k))
            }
            ConstraintSpec::Partition { blocks, capacities } => Some(
                Matroid::partition(n, blocks.clone(), capacities.clone())
                    .map_err(|e| HarnessError::schema("$.constraint", e))?,
            ),
        };
        Ok(Instance {
            file,
            g,
            ell,
            matroid,
        })
    }

    /// Same instance with a different constraint attached.
    pub fn with_constraint(mut self, constraint: ConstraintSpec) -> Result<Instance> {
        self.file.constraint = constraint;
        Instance::from_file_repr(self.file)
    }
}

fn object_keys_checked<'v>(
    value: &'v Value,
    path: &str,
    allowed: &[&str],
) -> Result<&'v serde_json::Map<String, Value>> {
    let obj = value
        .as_object()
        .ok_or_else(|| HarnessError::schema(path, "expected a JSON object"))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(HarnessError::schema(
                format!("{path}.{key}"),
                "unknown field",
            ));
        }
    }
    for key in allowed {
        if !obj.contains_key(*key) {
            return Err(HarnessError::schema(
                format!("{path}.{key}"),
                "missing field",
            ));
        }
    }
    Ok(obj)
}

/// Parses the strict instance schema, reporting violations with `$.field`
/// paths.
pub fn parse_instance_json(text: &str) -> Result<InstanceFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| HarnessError::schema("$", e))?;
    let obj = object_keys_checked(&value, "$", &["n", "g", "ell", "constraint"])?;
    let n = obj["n"]
        .as_u64()
        .ok_or_else(|| HarnessError::schema("$.n", "expected a non-negative integer"))?
        as usize;
    let ell: Vec<f64> =
        serde_json::from_value(obj["ell"].clone()).map_err(|e| HarnessError::schema("$.ell", e))?;

    let g_obj = obj["g"]
        .as_object()
        .ok_or_else(|| HarnessError::schema("$.g", "expected a JSON object"))?;
    let g_type = g_obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| HarnessError::schema("$.g.type", "missing or non-string field"))?;
    match g_type {
        "directed_cut" => object_keys_checked(&obj["g"], "$.g", &["type", "arcs"])?,
        "coverage" => object_keys_checked(&obj["g"], "$.g", &["type", "item_weights", "covers"])?,
        "explicit" => object_keys_checked(&obj["g"], "$.g", &["type", "table"])?,
        other => {
            return Err(HarnessError::schema(
                "$.g.type",
                format!("unknown function type {other:?}"),
            ))
        }
    };
    let g: FunctionSpec =
        serde_json::from_value(obj["g"].clone()).map_err(|e| HarnessError::schema("$.g", e))?;

    let c_obj = obj["constraint"]
        .as_object()
        .ok_or_else(|| HarnessError::schema("$.constraint", "expected a JSON object"))?;
    let c_type = c_obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| HarnessError::schema("$.constraint.type", "missing or non-string field"))?;
    match c_type {
        "none" => object_keys_checked(&obj["constraint"], "$.constraint", &["type"])?,
        "uniform" => object_keys_checked(&obj["constraint"], "$.constraint", &["type", "k"])?,
        "partition" => object_keys_checked(
            &obj["constraint"],
            "$.constraint",
            &["type", "blocks", "capacities"],
        )?,
        other => {
            return Err(HarnessError::schema(
                "$.constraint.type",
                format!("unknown constraint type {other:?}"),
            ))
        }
    };
    let constraint: ConstraintSpec = serde_json::from_value(obj["constraint"].clone())
        .map_err(|e| HarnessError::schema("$.constraint", e))?;

    Ok(InstanceFile {
        n,
        g,
        ell,
        constraint,
    })
}

/// Canonical serialization: pretty-printed JSON with a trailing newline.
pub fn instance_to_json(file: &InstanceFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("instance serializes");
    text.push('\n');
    text
}

/// Loads and fully validates an instance file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Instance::from_file_repr(parse_instance_json(&text)?)
}

/// Writes the instance's canonical JSON form.
pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(&instance.file)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Generates a random digraph-cut benchmark: each ordered pair carries an
/// arc with probability `edge_density` and a weight uniform on
/// (0, max_weight]; costs are uniform on [0, cost_scale * M) where M is the
/// generated function's scale parameter. Degenerate draws with M <= 0 are
/// regenerated from a fresh derived seed, up to 100 attempts. The same seed
/// always produces the same instance, byte for byte.
pub fn gen_digraph_cut_instance(
    n: usize,
    edge_density: f64,
    max_weight: f64,
    cost_scale: f64,
    seed: u64,
) -> Result<Instance> {
    if n < 2 {
        return Err(HarnessError::Config(format!(
            "cut generator needs at least two elements, got {n}"
        )));
    }
    if !(edge_density > 0.0 && edge_density <= 1.0) {
        return Err(HarnessError::Config(format!(
            "edge density {edge_density} outside (0, 1]"
        )));
    }
    if !(max_weight > 0.0 && max_weight.is_finite()) {
        return Err(HarnessError::Config(format!(
            "max weight {max_weight} must be positive and finite"
        )));
    }
    if !(cost_scale >= 0.0 && cost_scale.is_finite()) {
        return Err(HarnessError::Config(format!(
            "cost scale {cost_scale} must be non-negative and finite"
        )));
    }
    let base = RngStream::new(seed);
    let mut last_m = 0.0;
    for attempt in 0..100u64 {
        let mut rng = base.derive(attempt).rng();
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen::<f64>() < edge_density {
                    arcs.push((u, v, max_weight * (1.0 - rng.gen::<f64>())));
                }
            }
        }
        let g =
            SetFunction::directed_cut(n, &arcs).expect("generated arcs are valid by construction");
        let m = match compute_m(&g.clone()) {
            Ok(m) => m,
            Err(regsubmax::Error::NonTargetFunction { m }) => {
                last_m = m;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let ell: Vec<f64> = (0..n).map(|_| cost_scale * m * rng.gen::<f64>()).collect();
        let file = InstanceFile {
            n,
            g: FunctionSpec::DirectedCut { arcs },
            ell,
            constraint: ConstraintSpec::None,
        };
        return Instance::from_file_repr(file);
    }
    Err(HarnessError::Solver(regsubmax::Error::NonTargetFunction {
        m: last_m,
    }))
}
