//! Flat-key TOML run configuration.
//!
//! Nested tables are flattened to dotted keys (`medium.n.preset`), every key
//! is checked against the schema, and unknown keys are rejected.

use super::{AsymptoticRegime, Domain, Impedance, MediumSpec, SampledField, ScalarField};
use crate::background::SolverOptions;
use crate::equivalent::IndexConvention;
use crate::geometry::{BodySpec, PartitionMode};
use crate::harness::FarFieldReference;
use crate::point::Point;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use toml::Value;

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub medium: MediumSpec,
    pub regime: AsymptoticRegime,
    pub kappa: f64,
    pub body: BodySpec,
    pub partition: PartitionMode,
    /// Sub-sampling resolution per axis used when measuring non-box cells.
    pub partition_samples: usize,
    pub seed: u64,
    pub solver: SolverOptions,
    pub sphere_order: usize,
    pub a_list: Vec<f64>,
    pub reference: FarFieldReference,
    pub convention: IndexConvention,
    pub lambda_tilde0: C64,
}

const FIELD_KEYS: &[&str] =
    &["preset", "value", "center", "radius", "inner", "outer", "base", "amplitude", "width", "file"];

const PLAIN_KEYS: &[&str] = &[
    "domain.shape",
    "domain.center",
    "domain.volume",
    "domain.lo",
    "domain.hi",
    "medium.gamma",
    "medium.lambda0.kappa_scaled",
    "regime.a",
    "regime.beta",
    "regime.s",
    "regime.t",
    "regime.m_max",
    "regime.d_min",
    "regime.d_max",
    "regime.kappa_max",
    "regime.lambda_minus",
    "regime.lambda_plus",
    "wave.kappa",
    "body.diameter",
    "body.perimeter",
    "body.perimeters",
    "geometry.partition",
    "geometry.samples",
    "geometry.seed",
    "solver.grid_h",
    "solver.background_h",
    "solver.dense_cap",
    "solver.gmres_tol",
    "solver.gmres_restart",
    "solver.gmres_max_iter",
    "sphere.order",
    "convergence.a",
    "convergence.reference",
    "design.convention",
    "design.lambda_tilde0",
];

const FIELD_PREFIXES: &[&str] = &["medium.n", "medium.K", "medium.lambda0"];

/// Every key accepted in a configuration file.
pub fn schema_keys() -> Vec<String> {
    let mut keys: Vec<String> = PLAIN_KEYS.iter().map(|s| s.to_string()).collect();
    for p in FIELD_PREFIXES {
        for k in FIELD_KEYS {
            keys.push(format!("{p}.{k}"));
        }
    }
    keys.sort();
    keys
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

struct Keys {
    map: BTreeMap<String, Value>,
    base: Option<PathBuf>,
}

impl Keys {
    fn bad(key: &str, what: &str) -> Error {
        Error::Config(format!("key `{key}`: expected {what}"))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(Self::bad(key, "a number")),
        }
    }

    fn f64_or(&self, key: &str, d: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(d))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(Self::bad(key, "a non-negative integer")),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(Self::bad(key, "true or false")),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(Self::bad(key, "a string")),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => Err(Self::bad(key, "a list of numbers")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(Self::bad(key, "a list of numbers")),
        }
    }

    fn point(&self, key: &str) -> Result<Option<Point>> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
            Some(_) => Err(Self::bad(key, "three coordinates")),
        }
    }

    /// A real number or a `[re, im]` pair.
    fn complex(&self, key: &str) -> Result<Option<C64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(C64::new(*f, 0.0))),
            Some(Value::Integer(i)) => Ok(Some(C64::new(*i as f64, 0.0))),
            Some(Value::Array(_)) => match self.list(key)? {
                Some(v) if v.len() == 2 => Ok(Some(C64::new(v[0], v[1]))),
                _ => Err(Self::bad(key, "a number or [re, im]")),
            },
            Some(_) => Err(Self::bad(key, "a number or [re, im]")),
        }
    }

    fn complex_req(&self, key: &str, d: Option<C64>) -> Result<C64> {
        self.complex(key)?
            .or(d)
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn field(&self, prefix: &str, default: f64, domain: &Domain) -> Result<Option<ScalarField>> {
        let preset = match self.str(&format!("{prefix}.preset"))? {
            Some(p) => p.to_string(),
            None if self.map.keys().any(|k| k.starts_with(&format!("{prefix}."))) => "constant".into(),
            None => return Ok(Some(ScalarField::constant(default))),
        };
        let key = |k: &str| format!("{prefix}.{k}");
        let center = self.point(&key("center"))?.unwrap_or_else(|| domain.center());
        let (lo, hi) = domain.bounding_box();
        let half_extent = (0..3).map(|d| 0.5 * (hi[d] - lo[d])).fold(0.0, f64::max);
        let f = match preset.as_str() {
            "constant" => ScalarField::Constant { value: self.complex_req(&key("value"), Some(C64::new(default, 0.0)))? },
            "radial_ramp" => ScalarField::RadialRamp {
                center,
                radius: self.f64_or(&key("radius"), half_extent)?,
                inner: self.complex_req(&key("inner"), None)?,
                outer: self.complex_req(&key("outer"), None)?,
            },
            "gaussian" => ScalarField::Gaussian {
                center,
                base: self.complex_req(&key("base"), Some(C64::new(default, 0.0)))?,
                amplitude: self.complex_req(&key("amplitude"), None)?,
                width: self.f64_or(&key("width"), 0.5 * half_extent)?,
            },
            "sampled" => {
                let file = self
                    .str(&key("file"))?
                    .ok_or_else(|| Error::Config(format!("missing required key `{}`", key("file"))))?;
                let path = match &self.base {
                    Some(b) if Path::new(file).is_relative() => b.join(file),
                    _ => PathBuf::from(file),
                };
                ScalarField::Sampled(SampledField::from_json_file(&path)?)
            }
            "cloak" if prefix == "medium.lambda0" => return Ok(None),
            other => return Err(Error::Config(format!("key `{}`: unknown preset `{other}`", key("preset")))),
        };
        f.validate()?;
        Ok(Some(f))
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().map(Path::to_path_buf))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::parse(text, None)
    }

    fn parse(text: &str, base: Option<PathBuf>) -> Result<Self> {
        let root: toml::Table = text.parse().map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        let mut map = BTreeMap::new();
        flatten("", &Value::Table(root), &mut map);
        let allowed = schema_keys();
        for k in map.keys() {
            if allowed.binary_search(k).is_err() {
                return Err(Error::Config(format!("unknown config key `{k}`")));
            }
        }
        let keys = Keys { map, base };

        let center = keys.point("domain.center")?.unwrap_or([0.5; 3]);
        let volume = keys.f64_or("domain.volume", 1.0)?;
        let domain = match keys.str("domain.shape")?.unwrap_or("cube") {
            "cube" => Domain::cube_of_volume(center, volume)?,
            "ball" => Domain::ball_of_volume(center, volume)?,
            "box" => Domain::Box {
                lo: keys.point("domain.lo")?.ok_or_else(|| Error::Config("box domain needs `domain.lo`".into()))?,
                hi: keys.point("domain.hi")?.ok_or_else(|| Error::Config("box domain needs `domain.hi`".into()))?,
            },
            other => return Err(Error::Config(format!("key `domain.shape`: unknown shape `{other}`"))),
        };
        domain.validate()?;

        let n = keys.field("medium.n", 1.0, &domain)?.unwrap_or_else(|| ScalarField::constant(1.0));
        let k = keys.field("medium.K", 0.0, &domain)?.unwrap_or_else(|| ScalarField::constant(0.0));
        let kappa_scaled = keys.bool("medium.lambda0.kappa_scaled")?.unwrap_or(false);
        let lambda0 = match keys.field("medium.lambda0", 1.0, &domain)? {
            Some(field) => Impedance::Field { field, kappa_scaled },
            None => Impedance::Cloak,
        };
        let medium = MediumSpec { domain, n, k, lambda0, gamma: keys.f64_or("medium.gamma", 1.0)? };
        medium.validate()?;

        let beta = keys.f64_or("regime.beta", 0.0)?;
        let s = keys.f64_or("regime.s", 2.0 - beta)?;
        let regime = AsymptoticRegime {
            a: keys.f64_or("regime.a", 0.1)?,
            beta,
            s,
            t: keys.f64_or("regime.t", s / 3.0)?,
            m_max: keys.f64_or("regime.m_max", 1.0)?,
            d_min: keys.f64_or("regime.d_min", 1.0)?,
            d_max: keys.f64_or("regime.d_max", 1.0)?,
            kappa_max: keys.f64_or("regime.kappa_max", 10.0)?,
            lambda_minus: keys.f64_or("regime.lambda_minus", 0.0)?,
            lambda_plus: keys.f64_or("regime.lambda_plus", f64::INFINITY)?,
        };

        let diameter = keys.f64_or("body.diameter", 1.0)?;
        let perimeter = keys.f64_or("body.perimeter", std::f64::consts::PI * diameter * diameter)?;
        let body = BodySpec { diameter, perimeter, perimeters: keys.list("body.perimeters")?.unwrap_or_default() };
        body.validate()?;

        let partition = match keys.str("geometry.partition")?.unwrap_or("lattice") {
            "lattice" => PartitionMode::Lattice,
            "balanced" => PartitionMode::Balanced,
            other => return Err(Error::Config(format!("key `geometry.partition`: unknown mode `{other}`"))),
        };
        let seed = match keys.map.get("geometry.seed") {
            None => 0,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(_) => return Err(Keys::bad("geometry.seed", "a non-negative integer")),
        };

        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            grid_h: keys.f64("solver.grid_h")?,
            background_h: keys.f64("solver.background_h")?,
            dense_cap: keys.usize("solver.dense_cap")?.unwrap_or(defaults.dense_cap),
            gmres_tol: keys.f64_or("solver.gmres_tol", defaults.gmres_tol)?,
            gmres_restart: keys.usize("solver.gmres_restart")?.unwrap_or(defaults.gmres_restart),
            gmres_max_iter: keys.usize("solver.gmres_max_iter")?.unwrap_or(defaults.gmres_max_iter),
        };
        solver.validate()?;

        let reference = match keys.str("convergence.reference")?.unwrap_or("equivalent") {
            "equivalent" => FarFieldReference::Equivalent,
            "background" => FarFieldReference::Background,
            other => return Err(Error::Config(format!("key `convergence.reference`: unknown value `{other}`"))),
        };
        let convention = match keys.str("design.convention")?.unwrap_or("standard") {
            "standard" => IndexConvention::Standard,
            "two_pi" => IndexConvention::TwoPi,
            other => return Err(Error::Config(format!("key `design.convention`: unknown value `{other}`"))),
        };

        let cfg = RunConfig {
            medium,
            regime,
            kappa: keys.f64_or("wave.kappa", 1.0)?,
            body,
            partition,
            partition_samples: keys.usize("geometry.samples")?.unwrap_or(8),
            seed,
            solver,
            sphere_order: keys.usize("sphere.order")?.unwrap_or(4),
            a_list: keys.list("convergence.a")?.unwrap_or_default(),
            reference,
            convention,
            lambda_tilde0: keys.complex("design.lambda_tilde0")?.unwrap_or(C64::new(1e-3, -1e-3)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        super::Wavenumber::new(self.kappa, self.regime.kappa_max)?;
        if self.sphere_order == 0 {
            return Err(Error::Config("key `sphere.order`: must be >= 1".into()));
        }
        if self.partition_samples == 0 {
            return Err(Error::Config("key `geometry.samples`: must be >= 1".into()));
        }
        if self.a_list.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Config("key `convergence.a`: entries must be positive".into()));
        }
        Ok(())
    }

    /// Copy with a different maximal hole diameter.
    pub fn with_a(&self, a: f64) -> Self {
        Self { regime: self.regime.with_a(a), ..self.clone() }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_toml_str("").expect("empty configuration is valid")
    }
}
