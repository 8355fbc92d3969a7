//! Scenario files and the named preset registry.
//!
//! A scenario is a JSON document
//! `{name, L, symbol: {kind, params}, windows: {kind, params, normalize}, lattice: {alpha, beta}, analysis, seed}`.
//! `windows` may carry a `synthesis` generator for distinct analysis and synthesis
//! windows, and `options` tunes the diagnostics.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gabor::LatticeSpec;
use crate::generators::{SymbolGenerator, WindowGenerator};
use crate::operator::Operator;
use crate::quantize::{localization_build, SymbolGrid};
use crate::signal::Signal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
}

impl GeneratorSpec {
    pub fn new(kind: &str, params: Value) -> Self {
        let params = match params {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            kind: kind.to_string(),
            params,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowsSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default = "default_true")]
    pub normalize: bool,
    /// Synthesis window; the analysis window is reused when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<GeneratorSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Spectrum,
    Decay,
    Norms,
    Weighted,
    Weyl,
}

fn default_floor() -> f64 {
    1e-8
}

fn default_fit_range() -> (usize, usize) {
    (4, 40)
}

fn default_s_list() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_p() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default = "default_fit_range")]
    pub fit_range: (usize, usize),
    #[serde(default = "default_s_list")]
    pub s_list: Vec<f64>,
    /// Exponent `p = q` of the weighted study.
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            floor: default_floor(),
            fit_range: default_fit_range(),
            s_list: default_s_list(),
            p: default_p(),
            top_k: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(rename = "L")]
    pub len: usize,
    pub symbol: GeneratorSpec,
    pub windows: WindowsSpec,
    pub lattice: LatticeParams,
    pub analysis: Vec<Analysis>,
    pub seed: u64,
    #[serde(default)]
    pub options: AnalysisOptions,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexParam {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexParam> for Complex64 {
    fn from(c: ComplexParam) -> Self {
        match c {
            ComplexParam::Real(re) => Complex64::new(re, 0.0),
            ComplexParam::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SymbolParams {
    Gaussian2d {
        center: Option<(f64, f64)>,
        width: Option<f64>,
    },
    DiskIndicator {
        center: Option<(f64, f64)>,
        radius: Option<f64>,
    },
    PowerDecay {
        rho: f64,
    },
    RandomComplex {
        seed: Option<u64>,
    },
    Delta {
        #[serde(default)]
        at: (i64, i64),
    },
    Constant {
        value: ComplexParam,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum WindowParams {
    Gaussian { s: Option<f64>, center: Option<f64> },
    Hann,
    Delta {
        #[serde(default)]
        at: i64,
    },
    File { path: PathBuf },
}

fn tagged(kind: &str, params: &Map<String, Value>) -> Value {
    let mut m = params.clone();
    m.insert("kind".into(), Value::String(kind.into()));
    Value::Object(m)
}

fn resolve(path: PathBuf, base: Option<&Path>) -> PathBuf {
    match base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path,
    }
}

impl GeneratorSpec {
    pub fn symbol_generator(&self, base: Option<&Path>) -> Result<SymbolGenerator> {
        let p: SymbolParams = serde_json::from_value(tagged(&self.kind, &self.params))
            .map_err(|e| Error::Schema(format!("symbol '{}': {e}", self.kind)))?;
        Ok(match p {
            SymbolParams::Gaussian2d { center, width } => SymbolGenerator::Gaussian2d { center, width },
            SymbolParams::DiskIndicator { center, radius } => SymbolGenerator::DiskIndicator { center, radius },
            SymbolParams::PowerDecay { rho } => SymbolGenerator::PowerDecay { rho },
            SymbolParams::RandomComplex { seed } => SymbolGenerator::RandomComplex { seed },
            SymbolParams::Delta { at } => SymbolGenerator::Delta { at },
            SymbolParams::Constant { value } => SymbolGenerator::Constant { value: value.into() },
            SymbolParams::File { path } => SymbolGenerator::File {
                path: resolve(path, base),
            },
        })
    }

    pub fn window_generator(&self, base: Option<&Path>) -> Result<WindowGenerator> {
        window_generator(&self.kind, &self.params, base)
    }
}

fn window_generator(kind: &str, params: &Map<String, Value>, base: Option<&Path>) -> Result<WindowGenerator> {
    let p: WindowParams =
        serde_json::from_value(tagged(kind, params)).map_err(|e| Error::Schema(format!("window '{kind}': {e}")))?;
    Ok(match p {
        WindowParams::Gaussian { s, center } => WindowGenerator::Gaussian { s, center },
        WindowParams::Hann => WindowGenerator::Hann,
        WindowParams::Delta { at } => WindowGenerator::Delta { at },
        WindowParams::File { path } => WindowGenerator::File {
            path: resolve(path, base),
        },
    })
}

/// Materialized scenario.
#[derive(Clone, Debug)]
pub struct BuiltScenario {
    pub operator: Operator,
    /// Analysis window `phi_1`, also used for the Gabor diagnostics.
    pub phi1: Signal,
    /// Synthesis window `phi_2`.
    pub phi2: Signal,
    pub lattice: LatticeSpec,
    pub symbol: SymbolGrid,
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.lattice.alpha, self.lattice.beta, self.len)
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analysis.contains(&a)
    }

    /// Checks everything that can be checked without building the operator.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Schema("name must be nonempty".into()));
        }
        if self.len < 2 {
            return Err(Error::Schema(format!("L must be at least 2, got {}", self.len)));
        }
        let lattice = self.lattice_spec()?;
        if self.wants(Analysis::Weyl) && self.len.is_multiple_of(2) {
            return Err(Error::EvenLength(self.len));
        }
        self.symbol.symbol_generator(None)?;
        window_generator(&self.windows.kind, &self.windows.params, None)?;
        if let Some(s) = &self.windows.synthesis {
            s.window_generator(None)?;
        }
        let o = &self.options;
        if !(o.floor > 0.0) {
            return Err(Error::Schema(format!("options.floor must be positive, got {}", o.floor)));
        }
        let (lo, hi) = o.fit_range;
        let m = lattice.point_count();
        if lo == 0 || lo > hi || hi > m {
            return Err(Error::Schema(format!(
                "options.fit_range ({lo}, {hi}) must satisfy 1 <= lo <= hi <= {m}"
            )));
        }
        if let Some(s) = o.s_list.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::Schema(format!("options.s_list entries must be nonnegative, got {s}")));
        }
        if !(o.p > 0.0) {
            return Err(Error::Schema(format!("options.p must be positive, got {}", o.p)));
        }
        Ok(())
    }
}

/// Builds symbol, windows and localization operator. Relative file paths in
/// generator params are resolved against `base`.
pub fn build_scenario(spec: &ScenarioSpec, base: Option<&Path>) -> Result<BuiltScenario> {
    spec.validate()?;
    let lattice = spec.lattice_spec()?;
    let symbol = spec.symbol.symbol_generator(base)?.generate(spec.len, spec.seed)?;
    let w = &spec.windows;
    let mut phi1 = window_generator(&w.kind, &w.params, base)?.generate(spec.len)?;
    let mut phi2 = match &w.synthesis {
        Some(s) => s.window_generator(base)?.generate(spec.len)?,
        None => phi1.clone(),
    };
    if w.normalize {
        phi1 = phi1.normalized()?;
        phi2 = phi2.normalized()?;
    }
    let operator = localization_build(&symbol, &phi1, &phi2)?;
    Ok(BuiltScenario {
        operator,
        phi1,
        phi2,
        lattice,
        symbol,
    })
}

/// Reads a scenario file, or a preset when `arg` names one and no such file exists.
pub fn load(arg: &str) -> Result<(ScenarioSpec, Option<PathBuf>)> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let spec = ScenarioSpec::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf);
        return Ok((spec, base));
    }
    if arg.ends_with(".json") || arg.contains('/') {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{arg}: no such file"),
        )));
    }
    Ok((lookup(arg)?, None))
}

pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "antiwick-gauss-63",
        description: "Gaussian symbol of width L/6 at the origin, equal Gaussian windows, L=63, lattice (3,3)",
    },
    PresetInfo {
        name: "power-decay-63",
        description: "power-decay symbol |z|^-4, equal Gaussian windows, L=63, lattice (3,3)",
    },
    PresetInfo {
        name: "disk-33",
        description: "disk indicator of radius L/5 at the origin, equal Gaussian windows, L=33",
    },
    PresetInfo {
        name: "delta-33",
        description: "delta symbol at the origin (rank-one operator), equal Gaussian windows, L=33",
    },
    PresetInfo {
        name: "identity-33",
        description: "constant symbol 1 (operator is the identity), equal Gaussian windows, L=33",
    },
    PresetInfo {
        name: "complex-asym-33",
        description: "random complex symbol, Gaussian analysis and Hann synthesis windows, L=33",
    },
    PresetInfo {
        name: "delta-window-8",
        description: "Gaussian symbol with delta windows on the full lattice, L=8",
    },
];

pub fn list_presets() -> &'static [PresetInfo] {
    PRESETS
}

fn preset(
    name: &str,
    len: usize,
    symbol: GeneratorSpec,
    windows: WindowsSpec,
    lattice: (usize, usize),
    analysis: Vec<Analysis>,
) -> ScenarioSpec {
    ScenarioSpec {
        name: name.to_string(),
        len,
        symbol,
        windows,
        lattice: LatticeParams {
            alpha: lattice.0,
            beta: lattice.1,
        },
        analysis,
        seed: 0,
        options: AnalysisOptions::default(),
    }
}

fn gaussian_windows(len: usize) -> WindowsSpec {
    WindowsSpec {
        kind: "gaussian".into(),
        params: GeneratorSpec::new("gaussian", serde_json::json!({ "s": (len as f64).sqrt() })).params,
        normalize: true,
        synthesis: None,
    }
}

pub fn lookup(name: &str) -> Result<ScenarioSpec> {
    use serde_json::json;
    use Analysis::*;
    let all = vec![Spectrum, Decay, Norms, Weighted, Weyl];
    let spec = match name {
        "antiwick-gauss-63" => preset(
            name,
            63,
            GeneratorSpec::new("gaussian2d", json!({ "center": [0.0, 0.0], "width": 10.5 })),
            gaussian_windows(63),
            (3, 3),
            all,
        ),
        "power-decay-63" => preset(
            name,
            63,
            GeneratorSpec::new("power-decay", json!({ "rho": 4.0 })),
            gaussian_windows(63),
            (3, 3),
            all,
        ),
        "disk-33" => preset(
            name,
            33,
            GeneratorSpec::new("disk-indicator", json!({ "center": [0.0, 0.0], "radius": 6.6 })),
            gaussian_windows(33),
            (3, 3),
            all,
        ),
        "delta-33" => preset(
            name,
            33,
            GeneratorSpec::new("delta", json!({ "at": [0, 0] })),
            gaussian_windows(33),
            (3, 3),
            all,
        ),
        "identity-33" => preset(
            name,
            33,
            GeneratorSpec::new("constant", json!({ "value": 1.0 })),
            gaussian_windows(33),
            (3, 3),
            all,
        ),
        "complex-asym-33" => {
            let mut w = gaussian_windows(33);
            w.synthesis = Some(GeneratorSpec::new("hann", Value::Null));
            preset(
                name,
                33,
                GeneratorSpec::new("random-complex", Value::Null),
                w,
                (3, 3),
                vec![Spectrum, Decay, Norms, Weyl],
            )
        }
        "delta-window-8" => preset(
            name,
            8,
            GeneratorSpec::new("gaussian2d", json!({ "center": [0.0, 0.0], "width": 2.0 })),
            WindowsSpec {
                kind: "delta".into(),
                params: Map::new(),
                normalize: true,
                synthesis: None,
            },
            (1, 1),
            vec![Spectrum, Decay, Norms],
        ),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_required_classes() {
        let names: Vec<_> = list_presets().iter().map(|p| p.name).collect();
        assert!(names.len() >= 6);
        for n in &names {
            let spec = lookup(n).unwrap();
            assert_eq!(&spec.name, n);
            spec.validate().unwrap();
        }
        assert!(matches!(lookup("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn json_round_trip() {
        let spec = lookup("complex-asym-33").unwrap();
        let back = ScenarioSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn missing_lattice_is_schema_error() {
        let text = r#"{"name":"x","L":8,"symbol":{"kind":"gaussian2d"},
            "windows":{"kind":"gaussian"},"analysis":["spectrum"],"seed":1}"#;
        assert!(matches!(ScenarioSpec::from_json(text), Err(Error::Schema(_))));
    }

    #[test]
    fn unknown_param_is_schema_error() {
        let mut spec = lookup("disk-33").unwrap();
        spec.symbol.params.insert("radious".into(), Value::from(2.0));
        assert!(matches!(spec.validate(), Err(Error::Schema(_))));
        let mut spec = lookup("disk-33").unwrap();
        spec.symbol.kind = "square".into();
        assert!(matches!(spec.validate(), Err(Error::Schema(_))));
    }

    #[test]
    fn divisibility_and_parity() {
        let mut spec = lookup("disk-33").unwrap();
        spec.lattice.alpha = 4;
        assert!(matches!(spec.validate(), Err(Error::Divisibility { step: 4, len: 33 })));
        let mut spec = lookup("delta-window-8").unwrap();
        spec.analysis.push(Analysis::Weyl);
        assert!(matches!(spec.validate(), Err(Error::EvenLength(8))));
    }

    #[test]
    fn build_is_deterministic() {
        let spec = lookup("complex-asym-33").unwrap();
        let a = build_scenario(&spec, None).unwrap();
        let b = build_scenario(&spec, None).unwrap();
        assert_eq!(a.symbol, b.symbol);
        assert_eq!(a.operator.content_hash(), b.operator.content_hash());
        assert!(!a.operator.is_hermitian());
    }

    #[test]
    fn identity_preset_is_identity() {
        let b = build_scenario(&lookup("identity-33").unwrap(), None).unwrap();
        assert!(b.operator.max_abs_diff(&Operator::identity(33)) < 1e-10);
    }
}
