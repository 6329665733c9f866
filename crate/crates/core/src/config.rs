//! JSON run configuration.
//!
//! Every key is optional. Unknown keys anywhere in the document are
//! collected and reported together; constraint violations name the key
//! path that caused them.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::experiments::sampling::SampleFamily;
use crate::grid::Grid2D;
use crate::presets::{BoundaryPreset, ForcingPreset, InitialPreset};

/// Parameters of the scripted studies. Ignored by plain runs.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub samples: usize,
    pub family: SampleFamily,
    pub modes: usize,
    /// Mode `(k, l)` gets amplitude `N(0,1) · (k² + l²)^(−exponent/2)`.
    pub amplitude_exponent: f64,
    pub divergence_free: bool,
    /// Time steps of the stability sweep.
    pub dts: Vec<f64>,
    /// Grids of the spatial convergence study.
    pub grids: Vec<usize>,
    pub spatial_dt: f64,
    pub temporal_dts: Vec<f64>,
    pub temporal_n: usize,
    pub t_final: f64,
    /// Strip width of the Neumann-to-Dirichlet probe.
    pub s: f64,
    pub steady_tol: f64,
    /// Fitting window of the divergence decay study.
    pub window: [f64; 2],
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            family: SampleFamily::RandomSineSeries,
            modes: 4,
            amplitude_exponent: 2.0,
            divergence_free: true,
            dts: vec![1e-4, 1e-3, 1e-2, 1e-1],
            grids: vec![16, 32, 64],
            spatial_dt: 1e-5,
            temporal_dts: vec![4e-3, 2e-3, 1e-3],
            temporal_n: 128,
            t_final: 0.25,
            s: 0.1,
            steady_tol: 1e-6,
            window: [0.05, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid2D,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: ForcingPreset,
    pub initial: InitialPreset,
    pub bc: BoundaryPreset,
    /// Snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: usize,
    pub seed: u64,
    pub study: StudyConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid: Grid2D::square(64).expect("64 cells is valid"),
            nu: 1.0,
            dt: 1e-3,
            t_end: 1.0,
            forcing: ForcingPreset::Zero,
            initial: InitialPreset::Zero,
            bc: BoundaryPreset::Homogeneous,
            snapshot_every: 0,
            seed: 0,
            study: StudyConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be > 0, got {v}")))
            }
        };
        positive("nu", self.nu)?;
        positive("dt", self.dt)?;
        if !(self.t_end == 0.0 || self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::config("t_end", format!("must be 0 or >= dt, got {}", self.t_end)));
        }
        let finite = |path: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, "must be finite"))
            }
        };
        match self.forcing {
            ForcingPreset::Constant { f1, f2 } => {
                finite("forcing.f1", f1)?;
                finite("forcing.f2", f2)?;
            }
            ForcingPreset::Zero | ForcingPreset::Manufactured => {}
        }
        match self.initial {
            InitialPreset::Vortex { amplitude } | InitialPreset::DivergenceMode { amplitude } => {
                finite("initial.amplitude", amplitude)?
            }
            InitialPreset::Zero | InitialPreset::Manufactured => {}
        }
        match self.bc {
            BoundaryPreset::Lid { speed } => finite("bc.speed", speed)?,
            BoundaryPreset::Manufactured { rate } => finite("bc.rate", rate)?,
            BoundaryPreset::Homogeneous => {}
        }
        let st = &self.study;
        if st.samples == 0 {
            return Err(Error::config("study.samples", "must be >= 1"));
        }
        if st.modes == 0 {
            return Err(Error::config("study.modes", "must be >= 1"));
        }
        finite("study.amplitude_exponent", st.amplitude_exponent)?;
        for (path, list) in [("study.dts", &st.dts), ("study.temporal_dts", &st.temporal_dts)] {
            if list.is_empty() {
                return Err(Error::config(path, "must not be empty"));
            }
            for &v in list.iter() {
                positive(path, v)?;
            }
        }
        if st.grids.is_empty() {
            return Err(Error::config("study.grids", "must not be empty"));
        }
        for &n in st.grids.iter().chain([&st.temporal_n]) {
            Grid2D::square(n).map_err(|e| Error::config("study.grids", e.to_string()))?;
        }
        positive("study.spatial_dt", st.spatial_dt)?;
        positive("study.t_final", st.t_final)?;
        positive("study.s", st.s)?;
        positive("study.steady_tol", st.steady_tol)?;
        if !(st.window[0] >= 0.0 && st.window[1] > st.window[0]) {
            return Err(Error::config("study.window", "must satisfy 0 <= start < end"));
        }
        Ok(())
    }

    /// Canonical JSON form; parsing it back gives the same config.
    pub fn to_json(&self) -> Value {
        let forcing = match self.forcing {
            ForcingPreset::Zero => json!({"preset": "zero"}),
            ForcingPreset::Constant { f1, f2 } => json!({"preset": "constant", "f1": f1, "f2": f2}),
            ForcingPreset::Manufactured => json!({"preset": "manufactured"}),
        };
        let initial = match self.initial {
            InitialPreset::Zero => json!({"preset": "zero"}),
            InitialPreset::Vortex { amplitude } => json!({"preset": "vortex", "amplitude": amplitude}),
            InitialPreset::DivergenceMode { amplitude } => json!({"preset": "divergence-mode", "amplitude": amplitude}),
            InitialPreset::Manufactured => json!({"preset": "manufactured"}),
        };
        let bc = match self.bc {
            BoundaryPreset::Homogeneous => json!({"preset": "homogeneous"}),
            BoundaryPreset::Lid { speed } => json!({"preset": "lid", "speed": speed}),
            BoundaryPreset::Manufactured { rate } => json!({"preset": "manufactured", "rate": rate}),
        };
        let st = &self.study;
        json!({
            "grid": {"nx": self.grid.nx(), "ny": self.grid.ny()},
            "nu": self.nu,
            "dt": self.dt,
            "t_end": self.t_end,
            "forcing": forcing,
            "initial": initial,
            "bc": bc,
            "snapshot_every": self.snapshot_every,
            "seed": self.seed,
            "study": {
                "samples": st.samples,
                "family": st.family.name(),
                "modes": st.modes,
                "amplitude_exponent": st.amplitude_exponent,
                "divergence_free": st.divergence_free,
                "dts": st.dts,
                "grids": st.grids,
                "spatial_dt": st.spatial_dt,
                "temporal_dts": st.temporal_dts,
                "temporal_n": st.temporal_n,
                "t_final": st.t_final,
                "s": st.s,
                "steady_tol": st.steady_tol,
                "window": st.window,
            },
        })
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<SimConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::config("<root>", format!("malformed JSON: {e}")))?;
    parse_config_value(&value)
}

pub fn parse_config_value(value: &Value) -> Result<SimConfig> {
    let mut unknown = BTreeSet::new();
    let cfg = {
        let root = Section::root(value)?;
        let cfg = build(&root, &mut unknown)?;
        root.finish(&mut unknown);
        cfg
    };
    if !unknown.is_empty() {
        return Err(Error::UnknownKeys(unknown.into_iter().collect()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn build(root: &Section<'_>, unknown: &mut BTreeSet<String>) -> Result<SimConfig> {
    let d = SimConfig::default();
    let grid = match root.section("grid")? {
        Some(g) => {
            let nx = g.usize("nx", 64)?;
            let ny = g.usize("ny", 64)?;
            g.finish(unknown);
            Grid2D::new(nx, ny).map_err(|e| Error::config("grid", e.to_string()))?
        }
        None => d.grid,
    };

    let forcing = match root.section("forcing")? {
        Some(s) => {
            let f = match s.string("preset", "zero")?.as_str() {
                "zero" => ForcingPreset::Zero,
                "constant" => ForcingPreset::Constant {
                    f1: s.f64("f1", 0.0)?,
                    f2: s.f64("f2", 0.0)?,
                },
                "manufactured" => ForcingPreset::Manufactured,
                other => return Err(s.bad("preset", format!("unknown forcing preset `{other}`"))),
            };
            s.finish(unknown);
            f
        }
        None => d.forcing,
    };

    let initial = match root.section("initial")? {
        Some(s) => {
            let i = match s.string("preset", "zero")?.as_str() {
                "zero" => InitialPreset::Zero,
                "vortex" => InitialPreset::Vortex {
                    amplitude: s.f64("amplitude", 1.0)?,
                },
                "divergence-mode" => InitialPreset::DivergenceMode {
                    amplitude: s.f64("amplitude", 1e-3)?,
                },
                "manufactured" => InitialPreset::Manufactured,
                other => return Err(s.bad("preset", format!("unknown initial preset `{other}`"))),
            };
            s.finish(unknown);
            i
        }
        None => d.initial,
    };

    let bc = match root.section("bc")? {
        Some(s) => {
            let b = match s.string("preset", "zero")?.as_str() {
                "zero" | "homogeneous" => BoundaryPreset::Homogeneous,
                "lid" => BoundaryPreset::Lid {
                    speed: s.f64("speed", 1.0)?,
                },
                "manufactured" => BoundaryPreset::Manufactured {
                    rate: s.f64("rate", 1.0)?,
                },
                other => return Err(s.bad("preset", format!("unknown bc preset `{other}`"))),
            };
            s.finish(unknown);
            b
        }
        None => d.bc,
    };

    let study = match root.section("study")? {
        Some(s) => {
            let ds = StudyConfig::default();
            let family_name = s.string("family", ds.family.name())?;
            let family = SampleFamily::from_name(&family_name)
                .ok_or_else(|| s.bad("family", format!("unknown sample family `{family_name}`")))?;
            let window = s.f64_list("window", &ds.window)?;
            if window.len() != 2 {
                return Err(s.bad("window", "expected [start, end]"));
            }
            let st = StudyConfig {
                samples: s.usize("samples", ds.samples)?,
                family,
                modes: s.usize("modes", ds.modes)?,
                amplitude_exponent: s.f64("amplitude_exponent", ds.amplitude_exponent)?,
                divergence_free: s.bool("divergence_free", ds.divergence_free)?,
                dts: s.f64_list("dts", &ds.dts)?,
                grids: s.usize_list("grids", &ds.grids)?,
                spatial_dt: s.f64("spatial_dt", ds.spatial_dt)?,
                temporal_dts: s.f64_list("temporal_dts", &ds.temporal_dts)?,
                temporal_n: s.usize("temporal_n", ds.temporal_n)?,
                t_final: s.f64("t_final", ds.t_final)?,
                s: s.f64("s", ds.s)?,
                steady_tol: s.f64("steady_tol", ds.steady_tol)?,
                window: [window[0], window[1]],
            };
            s.finish(unknown);
            st
        }
        None => d.study,
    };

    Ok(SimConfig {
        grid,
        nu: root.f64("nu", d.nu)?,
        dt: root.f64("dt", d.dt)?,
        t_end: root.f64("t_end", d.t_end)?,
        forcing,
        initial,
        bc,
        snapshot_every: root.usize("snapshot_every", d.snapshot_every)?,
        seed: root.u64("seed", d.seed)?,
        study,
    })
}

/// A JSON object being read, remembering which keys were consumed.
struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
    used: std::cell::RefCell<BTreeSet<String>>,
}

impl<'a> Section<'a> {
    fn root(value: &'a Value) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Self {
                path: String::new(),
                map,
                used: Default::default(),
            }),
            _ => Err(Error::config("<root>", "expected a JSON object")),
        }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn bad(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::config(self.key_path(key), msg)
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.used.borrow_mut().insert(key.to_string());
        self.map.get(key)
    }

    fn section(&self, key: &str) -> Result<Option<Section<'a>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Object(map)) => Ok(Some(Section {
                path: self.key_path(key),
                map,
                used: Default::default(),
            })),
            Some(_) => Err(self.bad(key, "expected an object")),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| self.bad(key, "expected a number")),
        }
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| self.bad(key, "expected a non-negative integer")),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.u64(key, default as u64).map(|v| v as usize)
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| self.bad(key, "expected true or false")),
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(v) => v.as_str().map(str::to_string).ok_or_else(|| self.bad(key, "expected a string")),
        }
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| self.bad(key, "expected numbers")))
                .collect(),
            Some(_) => Err(self.bad(key, "expected an array")),
        }
    }

    fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_u64().map(|n| n as usize).ok_or_else(|| self.bad(key, "expected integers")))
                .collect(),
            Some(_) => Err(self.bad(key, "expected an array")),
        }
    }

    fn finish(&self, unknown: &mut BTreeSet<String>) {
        let used = self.used.borrow();
        for k in self.map.keys() {
            if !used.contains(k) {
                unknown.insert(self.key_path(k));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = parse_config_str("{}").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(cfg.grid.nx(), 64);
        assert_eq!(cfg.nu, 1.0);
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.t_end, 1.0);
    }

    #[test]
    fn negative_viscosity_names_the_key() {
        let err = parse_config_str(r#"{"nu": -1}"#).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "nu");
                assert!(message.contains("> 0"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_all_listed() {
        let err = parse_config_str(r#"{"nuu": 1, "grid": {"nx": 16, "nz": 3}, "bc": {"preset": "lid", "sped": 1}}"#)
            .unwrap_err();
        match err {
            Error::UnknownKeys(keys) => assert_eq!(keys, vec!["bc.sped", "grid.nz", "nuu"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_and_wrong_types() {
        assert!(matches!(parse_config_str("{"), Err(Error::Config { .. })));
        assert!(matches!(parse_config_str("[]"), Err(Error::Config { .. })));
        let err = parse_config_str(r#"{"grid": {"nx": "a"}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "grid.nx"));
        let err = parse_config_str(r#"{"grid": {"nx": 4}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "grid"));
        let err = parse_config_str(r#"{"bc": {"preset": "slip"}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "bc.preset"));
    }

    #[test]
    fn lid_config_round_trips() {
        let text = r#"{"grid": {"nx": 64, "ny": 64}, "dt": 1e-3, "nu": 0.1, "bc": {"preset": "lid", "speed": 1.0}}"#;
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.bc, BoundaryPreset::Lid { speed: 1.0 });
        assert_eq!(cfg.nu, 0.1);
        let echo = serde_json::to_string_pretty(&cfg.to_json()).unwrap();
        let again = parse_config_str(&echo).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(serde_json::to_string_pretty(&again.to_json()).unwrap(), echo);
    }

    #[test]
    fn missing_file_is_a_config_error() {
        let err = parse_config(Path::new("/nonexistent/cfg.json")).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }
}
