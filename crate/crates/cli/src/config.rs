//! Sweep configuration: per-mode defaults, a flat JSON file and `--set` overrides.
//!
//! Precedence, lowest first: built-in defaults, the `--config` file, then each
//! `--set key=value` in command-line order.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    SingleBus,
    LangevinCompare,
    AttenuationChain,
    AddDrop,
    HommGrid,
    CriticalDip,
    EntropyGrid,
    Audit,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::SingleBus,
        Mode::LangevinCompare,
        Mode::AttenuationChain,
        Mode::AddDrop,
        Mode::HommGrid,
        Mode::CriticalDip,
        Mode::EntropyGrid,
        Mode::Audit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SingleBus => "single-bus",
            Mode::LangevinCompare => "langevin-compare",
            Mode::AttenuationChain => "attenuation-chain",
            Mode::AddDrop => "add-drop",
            Mode::HommGrid => "homm-grid",
            Mode::CriticalDip => "critical-dip",
            Mode::EntropyGrid => "entropy-grid",
            Mode::Audit => "audit",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| CliError::field("mode", format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::field("format", format!("expected `csv` or `json`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// Coupler magnitude in `[0, 1]`.
    Unit,
    /// Round-trip amplitude in `(0, 1]`.
    Alpha,
    /// Phase in `[-pi, pi]`.
    Phase,
    Real,
    Positive,
    NonNegative,
    /// Integer `>= 1`.
    Count,
    /// Integer `>= 0`.
    Seed,
    AlphaList,
    /// Numbers in `[0, 1]`.
    UnitList,
    Choice(&'static [&'static str]),
}

struct Field {
    key: &'static str,
    kind: Kind,
    default: Value,
}

fn f(key: &'static str, kind: Kind, default: f64) -> Field {
    Field { key, kind, default: Value::from(default) }
}

fn n(key: &'static str, kind: Kind, default: u64) -> Field {
    Field { key, kind, default: Value::from(default) }
}

fn list(key: &'static str, kind: Kind, default: &[f64]) -> Field {
    Field { key, kind, default: Value::from(default.to_vec()) }
}

fn choice(key: &'static str, options: &'static [&'static str], default: &str) -> Field {
    Field { key, kind: Kind::Choice(options), default: Value::from(default) }
}

fn theta_range(count: u64) -> [Field; 3] {
    [f("theta_start", Kind::Phase, -PI), f("theta_stop", Kind::Phase, PI), n("theta_count", Kind::Count, count)]
}

fn coupler_grid() -> Vec<Field> {
    let mut v = vec![
        f("tau_start", Kind::Unit, 0.0),
        f("tau_stop", Kind::Unit, 1.0),
        n("tau_count", Kind::Count, 101),
        f("eta_start", Kind::Unit, 0.0),
        f("eta_stop", Kind::Unit, 1.0),
        n("eta_count", Kind::Count, 101),
    ];
    v.extend(theta_range(201));
    v
}

const ROUTES: &[&str] = &["closed", "state", "coincidence"];
const EMIT: &[&str] = &["levels", "points"];

fn schema(mode: Mode) -> Vec<Field> {
    let mut v = match mode {
        Mode::SingleBus => vec![
            f("tau", Kind::Unit, 0.8),
            f("tau_phase", Kind::Real, 0.0),
            f("kappa_phase", Kind::Real, 0.0),
            f("alpha", Kind::Alpha, 0.9),
        ],
        Mode::LangevinCompare => vec![
            f("tau", Kind::Unit, 0.99),
            f("alpha", Kind::Alpha, 0.99),
            f("round_trip_time", Kind::Positive, 1.0),
            n("per_sign", Kind::Count, 50),
        ],
        Mode::AttenuationChain => vec![
            f("loss", Kind::NonNegative, 1.0),
            f("length", Kind::Positive, 1.0),
            f("beta", Kind::Real, 0.0),
            n("n_start", Kind::Count, 100),
            n("n_stop", Kind::Count, 100_000),
            n("n_count", Kind::Count, 7),
        ],
        Mode::AddDrop => vec![f("tau", Kind::Unit, 0.7), f("eta", Kind::Unit, 0.7), f("alpha", Kind::Alpha, 0.95)],
        Mode::HommGrid => {
            let mut g = vec![f("alpha", Kind::Alpha, 1.0), f("threshold", Kind::NonNegative, 1e-3)];
            g.extend(coupler_grid());
            g
        }
        Mode::CriticalDip => vec![
            f("tau", Kind::Unit, FRAC_1_SQRT_2),
            f("eta", Kind::Unit, FRAC_1_SQRT_2),
            list("alphas", Kind::AlphaList, &[1.0, 0.95, 0.75, 0.5]),
            choice("route", ROUTES, "closed"),
        ],
        Mode::EntropyGrid => {
            let mut g = vec![
                list("alphas", Kind::AlphaList, &[0.95, 0.75, 0.5, 0.25]),
                list("levels", Kind::UnitList, &[0.99, 0.95, 0.75, 0.5, 0.25, 0.1]),
                choice("emit", EMIT, "levels"),
            ];
            g.extend(coupler_grid());
            g
        }
        Mode::Audit => vec![n("seed", Kind::Seed, 0), n("samples", Kind::Count, 1000)],
    };
    match mode {
        Mode::SingleBus | Mode::AddDrop => v.extend(theta_range(401)),
        Mode::CriticalDip => v.extend(theta_range(1201)),
        _ => {}
    }
    v
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone)]
enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Flag,
}

impl Origin {
    fn describe(&self) -> String {
        match self {
            Origin::Default => String::new(),
            Origin::File { path, line } => format!("{}:{line}: ", path.display()),
            Origin::Flag => "--set: ".to_string(),
        }
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: Mode,
    values: BTreeMap<String, Value>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Raw inputs gathered from the command line.
#[derive(Debug, Clone, Default)]
pub struct ConfigSources<'a> {
    pub file: Option<&'a Path>,
    pub sets: &'a [String],
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn load(mode: Mode, sources: ConfigSources<'_>) -> Result<Self> {
        let fields = schema(mode);
        let mut raw: BTreeMap<String, (Value, Origin)> =
            fields.iter().map(|fd| (fd.key.to_string(), (fd.default.clone(), Origin::Default))).collect();

        if let Some(path) = sources.file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Syntax {
                path: path.to_path_buf(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let Value::Object(map) = doc else {
                return Err(CliError::Syntax {
                    path: path.to_path_buf(),
                    line: 1,
                    column: 1,
                    message: "expected a JSON object of key/value pairs".into(),
                });
            };
            for (key, value) in map {
                let origin = Origin::File { path: path.to_path_buf(), line: line_of_key(&text, &key) };
                if key == "mode" {
                    if value.as_str() != Some(mode.as_str()) {
                        return Err(located(origin, "mode", format!("file is for mode {value}, command is `{mode}`")));
                    }
                    continue;
                }
                insert(&mut raw, key, value, origin, mode)?;
            }
        }

        for set in sources.sets {
            let (key, text) =
                set.split_once('=').ok_or_else(|| located(Origin::Flag, set, "expected key=value".to_string()))?;
            let key = key.trim();
            let value = serde_json::from_str(text.trim()).unwrap_or_else(|_| Value::from(text.trim()));
            insert(&mut raw, key.to_string(), value, Origin::Flag, mode)?;
        }

        let mut values = BTreeMap::new();
        for fd in &fields {
            let (value, origin) = &raw[fd.key];
            let normalized = normalize(fd.kind, value).map_err(|msg| located(origin.clone(), fd.key, msg))?;
            values.insert(fd.key.to_string(), normalized);
        }
        let cfg = SweepConfig { mode, values, out: sources.out, format: sources.format };
        cfg.check_ranges(&raw)?;
        Ok(cfg)
    }

    fn check_ranges(&self, raw: &BTreeMap<String, (Value, Origin)>) -> Result<()> {
        for axis in ["tau", "eta", "theta", "n"] {
            let (start, stop) = (format!("{axis}_start"), format!("{axis}_stop"));
            if let (Some(a), Some(b)) = (self.values.get(&start), self.values.get(&stop)) {
                if a.as_f64() > b.as_f64() {
                    let origin = raw[&stop].1.clone();
                    return Err(located(origin, &stop, format!("must not be below {start} = {a}")));
                }
            }
        }
        Ok(())
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.values[key].as_f64().expect("validated numeric field")
    }

    pub fn usize(&self, key: &str) -> usize {
        self.values[key].as_u64().expect("validated integer field") as usize
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.values[key].as_u64().expect("validated integer field")
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        self.values[key]
            .as_array()
            .expect("validated list field")
            .iter()
            .map(|v| v.as_f64().expect("validated list entry"))
            .collect()
    }

    pub fn str(&self, key: &str) -> &str {
        self.values[key].as_str().expect("validated choice field")
    }

    /// `(start, stop, count)` of the axis `name`.
    pub fn range(&self, name: &str) -> (f64, f64, usize) {
        (self.f64(&format!("{name}_start")), self.f64(&format!("{name}_stop")), self.usize(&format!("{name}_count")))
    }

    /// Mode plus every resolved parameter, keys sorted.
    pub fn echo(&self) -> Map<String, Value> {
        let mut map: Map<String, Value> = self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        map.insert("mode".into(), Value::from(self.mode.as_str()));
        map
    }

    /// One-line canonical JSON of [`SweepConfig::echo`].
    pub fn canonical_json(&self) -> String {
        Value::Object(self.echo()).to_string()
    }
}

fn located(origin: Origin, field: &str, message: String) -> CliError {
    CliError::Config { field: field.to_string(), location: origin.describe(), message }
}

fn insert(
    raw: &mut BTreeMap<String, (Value, Origin)>,
    key: String,
    value: Value,
    origin: Origin,
    mode: Mode,
) -> Result<()> {
    match raw.get_mut(&key) {
        Some(slot) => {
            *slot = (value, origin);
            Ok(())
        }
        None => Err(located(origin, &key, format!("not a parameter of mode `{mode}`"))),
    }
}

fn line_of_key(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

fn number(v: &Value) -> std::result::Result<f64, String> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got {v}")),
    }
}

fn check_scalar(kind: Kind, x: f64) -> std::result::Result<(), String> {
    let ok = match kind {
        Kind::Unit | Kind::UnitList => (0.0..=1.0).contains(&x),
        Kind::Alpha | Kind::AlphaList => x > 0.0 && x <= 1.0,
        Kind::Phase => (-PI..=PI).contains(&x),
        Kind::Positive => x > 0.0,
        Kind::NonNegative => x >= 0.0,
        _ => true,
    };
    if ok {
        return Ok(());
    }
    let domain = match kind {
        Kind::Unit | Kind::UnitList => "[0, 1]",
        Kind::Alpha | Kind::AlphaList => "(0, 1]",
        Kind::Phase => "[-pi, pi]",
        Kind::Positive => "(0, inf)",
        _ => "[0, inf)",
    };
    Err(format!("{x} lies outside {domain}"))
}

fn normalize(kind: Kind, v: &Value) -> std::result::Result<Value, String> {
    match kind {
        Kind::Count | Kind::Seed => {
            let k = v.as_u64().ok_or_else(|| format!("expected a non-negative integer, got {v}"))?;
            if kind == Kind::Count && k == 0 {
                return Err("count must be at least 1".into());
            }
            Ok(Value::from(k))
        }
        Kind::AlphaList | Kind::UnitList => {
            let items = v.as_array().ok_or_else(|| format!("expected a list of numbers, got {v}"))?;
            if items.is_empty() {
                return Err("list must not be empty".into());
            }
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                let x = number(item)?;
                check_scalar(kind, x)?;
                out.push(Value::from(x));
            }
            Ok(Value::Array(out))
        }
        Kind::Choice(options) => match v.as_str() {
            Some(s) if options.contains(&s) => Ok(Value::from(s)),
            _ => Err(format!("expected one of {options:?}, got {v}")),
        },
        _ => {
            let x = number(v)?;
            check_scalar(kind, x)?;
            Ok(Value::from(x))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(mode: Mode, sets: &[&str]) -> Result<SweepConfig> {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        SweepConfig::load(mode, ConfigSources { sets: &sets, ..Default::default() })
    }

    #[test]
    fn defaults_load_for_every_mode() {
        for mode in Mode::ALL {
            let cfg = load(mode, &[]).unwrap();
            assert!(cfg.canonical_json().contains(&format!("\"mode\":\"{mode}\"")));
        }
    }

    #[test]
    fn canonical_json_sorts_keys_and_normalizes_numbers() {
        let a = load(Mode::AddDrop, &["tau=1", "eta=0.5"]).unwrap();
        let b = load(Mode::AddDrop, &["eta=0.5", "tau=1.0"]).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert!(a.canonical_json().starts_with("{\"alpha\":0.95,"));
        assert!(a.canonical_json().contains("\"tau\":1.0"));
    }

    #[test]
    fn later_set_wins() {
        let cfg = load(Mode::AddDrop, &["tau=0.2", "tau=0.3"]).unwrap();
        assert_eq!(cfg.f64("tau"), 0.3);
    }

    #[test]
    fn errors_name_the_field() {
        for (sets, field) in [
            (&["tau=1.5"][..], "tau"),
            (&["alpha=0"][..], "alpha"),
            (&["theta_count=0"][..], "theta_count"),
            (&["theta_start=1", "theta_stop=0"][..], "theta_stop"),
            (&["bogus=1"][..], "bogus"),
            (&["theta_stop=4"][..], "theta_stop"),
        ] {
            match load(Mode::AddDrop, sets) {
                Err(CliError::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{sets:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn list_and_choice_fields() {
        let cfg = load(Mode::CriticalDip, &["alphas=[1, 0.5]", "route=state"]).unwrap();
        assert_eq!(cfg.list("alphas"), vec![1.0, 0.5]);
        assert_eq!(cfg.str("route"), "state");
        assert!(load(Mode::CriticalDip, &["route=other"]).is_err());
        assert!(load(Mode::CriticalDip, &["alphas=[]"]).is_err());
    }

    #[test]
    fn file_values_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, "{\n  \"mode\": \"add-drop\",\n  \"tau\": 0.4,\n  \"eta\": 0.6\n}\n").unwrap();
        let sets = vec!["eta=0.1".to_string()];
        let cfg =
            SweepConfig::load(Mode::AddDrop, ConfigSources { file: Some(&path), sets: &sets, ..Default::default() })
                .unwrap();
        assert_eq!(cfg.f64("tau"), 0.4);
        assert_eq!(cfg.f64("eta"), 0.1);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, "{\n  \"tau\": 0.4,\n  \"eta\": 2\n}\n").unwrap();
        let err =
            SweepConfig::load(Mode::AddDrop, ConfigSources { file: Some(&path), ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");
        std::fs::write(&path, "{\n  \"tau\": 0.4,\n  \"eta\" 2\n}\n").unwrap();
        let err =
            SweepConfig::load(Mode::AddDrop, ConfigSources { file: Some(&path), ..Default::default() }).unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 3, .. }), "{err}");
        std::fs::write(&path, "{\"mode\": \"homm-grid\"}").unwrap();
        let err =
            SweepConfig::load(Mode::AddDrop, ConfigSources { file: Some(&path), ..Default::default() }).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG);
    }
}
