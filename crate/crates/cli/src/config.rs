//! Versioned system configuration documents (TOML or JSON).

use std::fmt;
use std::path::Path;

use prodsys_core::{FactorKind, FiberDim, Monoid, MonoidKind, ProductSystem, Truncation};
use serde::Deserialize;

/// Only accepted value of the `schema` field.
pub const SCHEMA_VERSION: u32 = 1;

/// Working dimension used for infinite fibers when the config names none.
pub const DEFAULT_WORKING_DIM: u32 = 2;

/// Every problem found while validating a config document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        ConfigError { errors: vec![msg.into()] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.errors.join("; "))
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum DimSpec {
    Finite(u32),
    Named(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    dim: Option<DimSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonoid {
    kind: String,
    #[serde(default)]
    factors: Option<Vec<RawFactor>>,
    #[serde(default)]
    rank: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    style: String,
    #[serde(default)]
    dim: Option<DimSpec>,
    #[serde(default)]
    window: Option<u32>,
    #[serde(default)]
    window_box: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    #[serde(rename = "L", default)]
    length: Option<u32>,
    #[serde(rename = "box", default)]
    bounds: Option<Vec<u32>>,
    #[serde(default)]
    working_dim: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: u32,
    monoid: RawMonoid,
    #[serde(default)]
    system: Option<RawSystem>,
    #[serde(default)]
    truncation: Option<RawTruncation>,
}

/// A validated monoid, product system and optional Fock truncation.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub name: String,
    pub system: ProductSystem,
    pub truncation: Option<Truncation>,
    pub working_dim: u32,
}

impl SystemConfig {
    pub fn new(name: impl Into<String>, system: ProductSystem, truncation: Option<Truncation>) -> Self {
        SystemConfig { name: name.into(), system, truncation, working_dim: DEFAULT_WORKING_DIM }
    }

    pub fn monoid(&self) -> &Monoid {
        self.system.monoid()
    }

    /// The truncation, required by every Fock-space command.
    pub fn require_truncation(&self) -> Result<&Truncation, ConfigError> {
        self.truncation
            .as_ref()
            .ok_or_else(|| ConfigError::one("a [truncation] section with L or box is required for Fock commands"))
    }
}

/// Free product of two copies of ℕ with two-dimensional generator fibers, `L = 3`.
pub fn default_config() -> SystemConfig {
    let sys = ProductSystem::word_graded(Monoid::free_product(2), vec![FiberDim::Finite(2), FiberDim::Finite(2)])
        .expect("valid default system");
    SystemConfig::new("(N,2)*(N,2)", sys, Some(Truncation::Length(3)))
}

/// Reads a config file; `.json` files are JSON, everything else TOML.
pub fn parse_config(path: &Path) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::one(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_config_str(&text, is_json, &name)
}

/// Parses and validates a config document held in memory.
pub fn parse_config_str(text: &str, json: bool, name: &str) -> Result<SystemConfig, ConfigError> {
    let raw: RawConfig = if json {
        serde_json::from_str(text).map_err(|e| ConfigError::one(format!("malformed JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| ConfigError::one(format!("malformed TOML: {e}")))?
    };
    validate(raw, name)
}

fn parse_dim(spec: &Option<DimSpec>, working: u32, what: &str, errors: &mut Vec<String>) -> FiberDim {
    match spec {
        None => FiberDim::Finite(1),
        Some(DimSpec::Finite(0)) => {
            errors.push(format!("{what}: dimension must be positive"));
            FiberDim::Finite(1)
        }
        Some(DimSpec::Finite(d)) => FiberDim::Finite(*d),
        Some(DimSpec::Named(s)) if s == "infinite" => FiberDim::InfiniteTruncated(working),
        Some(DimSpec::Named(s)) => {
            errors.push(format!("{what}: dimension must be a positive integer or \"infinite\", got {s:?}"));
            FiberDim::Finite(1)
        }
    }
}

fn validate(raw: RawConfig, name: &str) -> Result<SystemConfig, ConfigError> {
    let mut errors = Vec::new();
    if raw.schema != SCHEMA_VERSION {
        errors.push(format!("unsupported schema {} (expected {SCHEMA_VERSION})", raw.schema));
    }
    let working = raw.truncation.as_ref().and_then(|t| t.working_dim).unwrap_or(DEFAULT_WORKING_DIM);
    if working == 0 {
        errors.push("truncation.working_dim must be positive".into());
    }

    let factors: Vec<RawFactor> = match (raw.monoid.factors, raw.monoid.rank) {
        (Some(f), None) => f,
        (None, Some(r)) => (0..r).map(|_| RawFactor { kind: None, dim: None }).collect(),
        (None, None) if raw.monoid.kind == "total-order" => vec![RawFactor { kind: None, dim: None }],
        (None, None) => {
            errors.push("monoid: give either factors or rank".into());
            Vec::new()
        }
        (Some(_), Some(_)) => {
            errors.push("monoid: give factors or rank, not both".into());
            Vec::new()
        }
    };
    let kind = match raw.monoid.kind.as_str() {
        "free-product" => Some(MonoidKind::FreeProduct),
        "direct-sum" => Some(MonoidKind::DirectSum),
        "total-order" => {
            if factors.len() != 1 {
                errors.push("monoid: total-order takes exactly one factor".into());
            }
            Some(MonoidKind::FreeProduct)
        }
        other => {
            errors.push(format!("monoid.kind must be free-product, direct-sum or total-order, got {other:?}"));
            None
        }
    };
    if factors.is_empty() && kind.is_some() && errors.is_empty() {
        errors.push("monoid: at least one factor is required".into());
    }
    let mut kinds = Vec::new();
    let mut dims = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let fk = match f.kind.as_deref().unwrap_or("integers") {
            "integers" => FactorKind::Integers,
            "rationals-dense" => FactorKind::RationalsDense,
            other => {
                errors.push(format!("factor {i}: kind must be integers or rationals-dense, got {other:?}"));
                FactorKind::Integers
            }
        };
        let d = parse_dim(&f.dim, working, &format!("factor {i}"), &mut errors);
        if fk == FactorKind::RationalsDense && d != FiberDim::Finite(1) {
            errors.push(format!("factor {i}: dense factors require dimension 1"));
        }
        kinds.push(fk);
        dims.push(d);
    }

    let truncation = match &raw.truncation {
        None => None,
        Some(t) => match (t.length, &t.bounds) {
            (Some(l), None) => Some(Truncation::Length(l)),
            (None, Some(b)) => {
                if b.len() != factors.len() {
                    errors.push(format!("truncation.box has {} entries for {} factors", b.len(), factors.len()));
                }
                Some(Truncation::Box(b.clone()))
            }
            (Some(_), Some(_)) => {
                errors.push("truncation: give L or box, not both".into());
                None
            }
            (None, None) => {
                errors.push("truncation: L or box is required".into());
                None
            }
        },
    };
    if !errors.is_empty() {
        return Err(ConfigError { errors });
    }
    let monoid = Monoid::new(kind.expect("checked above"), &kinds).map_err(|e| ConfigError::one(e.to_string()))?;

    let style = raw.system.as_ref().map(|s| s.style.as_str()).unwrap_or("word-graded");
    let sys_dim = raw.system.as_ref().map(|s| parse_dim(&s.dim, working, "system", &mut errors));
    let system = match style {
        "word-graded" => ProductSystem::word_graded(monoid, dims),
        "trivial" => Ok(ProductSystem::trivial(monoid)),
        "concatenated" => ProductSystem::concatenated(monoid, sys_dim.unwrap_or(FiberDim::Finite(1))),
        "vn-truncated" => {
            let s = raw.system.as_ref().expect("style came from the system section");
            let window = match (s.window, &s.window_box) {
                (Some(l), None) => Truncation::Length(l),
                (None, Some(b)) => Truncation::Box(b.clone()),
                _ => {
                    errors.push("system: vn-truncated needs exactly one of window or window_box".into());
                    Truncation::Length(0)
                }
            };
            ProductSystem::von_neumann(monoid, sys_dim.unwrap_or(FiberDim::Finite(2)), &window)
        }
        other => {
            errors.push(format!(
                "system.style must be word-graded, trivial, concatenated or vn-truncated, got {other:?}"
            ));
            return Err(ConfigError { errors });
        }
    };
    if !errors.is_empty() {
        return Err(ConfigError { errors });
    }
    let system = system.map_err(|e| ConfigError::one(e.to_string()))?;
    Ok(SystemConfig { name: name.to_string(), system, truncation, working_dim: working })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_total_order() {
        let cfg = parse_config_str(
            "schema = 1\n[monoid]\nkind = \"total-order\"\nfactors = [{ dim = 2 }]\n[truncation]\nL = 3\n",
            false,
            "min",
        )
        .unwrap();
        assert_eq!(cfg.monoid().rank(), 1);
        assert_eq!(cfg.truncation, Some(Truncation::Length(3)));
    }

    #[test]
    fn dense_factor_dimension_is_rejected() {
        let err = parse_config_str(
            "schema = 1\n[monoid]\nkind = \"total-order\"\nfactors = [{ kind = \"rationals-dense\", dim = 3 }]\n",
            false,
            "dense",
        )
        .unwrap_err();
        assert!(err.to_string().contains("dense factors require dimension 1"), "{err}");
    }

    #[test]
    fn fock_commands_need_a_truncation() {
        let cfg = parse_config_str(r#"{"schema": 1, "monoid": {"kind": "direct-sum", "rank": 2}}"#, true, "j").unwrap();
        assert!(cfg.require_truncation().is_err());
    }

    #[test]
    fn errors_are_collected() {
        let err = parse_config_str(
            "schema = 2\n[monoid]\nkind = \"free-product\"\nfactors = [{ kind = \"reals\" }, { dim = 0 }]\n",
            false,
            "bad",
        )
        .unwrap_err();
        assert_eq!(err.errors.len(), 3, "{err}");
    }

    #[test]
    fn von_neumann_and_concatenated_styles() {
        let vn = parse_config_str(
            "schema = 1\n[monoid]\nkind = \"total-order\"\n[system]\nstyle = \"vn-truncated\"\ndim = 2\nwindow = 4\n[truncation]\nL = 3\n",
            false,
            "vn",
        )
        .unwrap();
        assert!(matches!(vn.system.style(), prodsys_core::SystemStyle::VonNeumann { .. }));
        let cat = parse_config_str(
            "schema = 1\n[monoid]\nkind = \"direct-sum\"\nrank = 2\n[system]\nstyle = \"concatenated\"\ndim = 2\n[truncation]\nbox = [2, 2]\n",
            false,
            "cat",
        )
        .unwrap();
        assert!(matches!(cat.system.style(), prodsys_core::SystemStyle::Concatenated { .. }));
    }
}
