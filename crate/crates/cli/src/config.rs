//! Flat `key = value` configs with `[section]` headers.
//!
//! Keys are addressed as `section.key`; keys before the first header live in
//! the root section and are addressed by their bare name. Grammar and key
//! reference: `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use vpflow_core::Family;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Flow,
    RevHC,
    Nelson,
    Laplace,
    BLConst,
    LrVol,
    Tropical,
    LegendreCheck,
    Validate,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Flow,
        Scenario::RevHC,
        Scenario::Nelson,
        Scenario::Laplace,
        Scenario::BLConst,
        Scenario::LrVol,
        Scenario::Tropical,
        Scenario::LegendreCheck,
        Scenario::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Flow => "flow",
            Scenario::RevHC => "revhc",
            Scenario::Nelson => "nelson",
            Scenario::Laplace => "laplace",
            Scenario::BLConst => "blconst",
            Scenario::LrVol => "lrvol",
            Scenario::Tropical => "tropical",
            Scenario::LegendreCheck => "legendre-check",
            Scenario::Validate => "validate",
        }
    }

    /// Keys the scenario accepts, beyond the ones every scenario accepts.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Flow => &["density.family", "params.times", "assert.monotone", "assert.unflagged"],
            Scenario::RevHC => &[
                "density.family",
                "params.s",
                "params.p",
                "params.q",
                "assert.slack",
                "assert.equality",
                "assert.unflagged",
            ],
            Scenario::Nelson => &[
                "params.s",
                "params.p",
                "params.q",
                "params.q_offsets",
                "params.betas",
                "params.shifts",
                "assert.admissible_min",
                "assert.below_max",
            ],
            Scenario::Laplace => &[
                "density.family",
                "params.kind",
                "params.s",
                "params.t",
                "params.times",
                "params.p",
                "assert.rel_gap",
                "assert.monotone",
                "assert.ratio",
                "assert.unflagged",
            ],
            Scenario::BLConst => &["params.s", "params.n", "assert.unit", "assert.grid_gap"],
            Scenario::LrVol => &["params.bodies", "params.r", "assert.ball_max"],
            Scenario::Tropical => &[
                "density.family",
                "params.s",
                "assert.decreasing",
                "assert.final_rel",
            ],
            Scenario::LegendreCheck => &["params.seed", "params.cases", "assert.bitwise"],
            Scenario::Validate => &[],
        }
    }

    /// Keys that must be present.
    fn required(self) -> &'static [&'static str] {
        match self {
            Scenario::Flow => &["density.family", "params.times"],
            Scenario::RevHC => &["density.family", "params.s"],
            Scenario::Nelson => &["params.s", "params.p", "params.betas"],
            Scenario::Laplace => &["density.family"],
            Scenario::BLConst => &["params.s"],
            Scenario::LrVol => &["params.bodies", "params.r"],
            Scenario::Tropical => &["density.family", "params.s"],
            Scenario::LegendreCheck | Scenario::Validate => &[],
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const COMMON_KEYS: &[&str] = &[
    "scenario",
    "grid.dim",
    "grid.half_width",
    "grid.points",
    "params.flag_threshold",
    "output.csv",
    "output.svg",
    "output.log_x",
    "output.log_y",
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but untyped key/value pairs with their line numbers.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    last_line: usize,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError {
                        line,
                        message: "unterminated section header".into(),
                    })?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return err(line, format!("bad section name `{name}`"));
                }
                section = name.to_string();
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, format!("expected `key = value`, found `{content}`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return err(line, format!("bad key `{key}`"));
            }
            if value.is_empty() {
                return err(line, format!("empty value for `{key}`"));
            }
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if let Some(prev) = entries.get(&full) {
                let prev: &Entry = prev;
                return err(line, format!("duplicate key `{full}` (first set on line {})", prev.line));
            }
            entries.insert(
                full,
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(Self { entries, last_line })
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.last_line, |e| e.line)
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|e| parse_f64(&e.value, e.line, key))
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|e| {
                e.value
                    .parse::<usize>()
                    .or_else(|_| err(e.line, format!("`{key}` must be a nonnegative integer, got `{}`", e.value)))
            })
            .transpose()
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|e| match e.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                v => err(e.line, format!("`{key}` must be true or false, got `{v}`")),
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let body = e.value.trim_start_matches('[').trim_end_matches(']');
        let items: Vec<&str> = body.split(',').map(str::trim).collect();
        if items.iter().any(|s| s.is_empty()) {
            return err(e.line, format!("`{key}` must be a nonempty comma-separated list"));
        }
        items.iter().map(|s| parse_f64(s, e.line, key)).collect::<Result<_, _>>().map(Some)
    }

    fn words(&self, key: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let body = e.value.trim_start_matches('[').trim_end_matches(']');
        let items: Vec<String> = body.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(|s| s.is_empty()) {
            return err(e.line, format!("`{key}` must be a nonempty comma-separated list"));
        }
        Ok(Some(items))
    }
}

fn parse_f64(s: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    match s {
        "ln2/2" | "half_ln2" => Ok(0.5 * 2f64.ln()),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map_or_else(|| err(line, format!("`{key}`: `{s}` is not a finite number")), Ok),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridParams {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
}

/// One enabled in-config assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub grid: GridParams,
    pub family: Option<Family>,
    pub family_name: Option<String>,
    pub times: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub q_offsets: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub r: Option<Vec<f64>>,
    pub betas: Option<Vec<f64>>,
    pub shifts: Option<Vec<f64>>,
    pub bodies: Option<Vec<String>>,
    pub kind: Option<String>,
    pub n: usize,
    pub seed: u64,
    pub cases: usize,
    pub flag_threshold: f64,
    pub csv: String,
    pub svg: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub assertions: Vec<Assertion>,
    /// Multiplies every tolerance-type assertion.
    pub tol_scale: f64,
}

impl ExperimentConfig {
    pub fn load(path: &Path, scenario: Scenario, tol_scale: f64) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_text(&text, scenario, tol_scale)
    }

    pub fn from_text(text: &str, scenario: Scenario, tol_scale: f64) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;
        Self::from_raw(&raw, scenario, tol_scale)
    }

    fn from_raw(raw: &RawConfig, scenario: Scenario, tol_scale: f64) -> Result<Self, ConfigError> {
        if !(tol_scale > 0.0 && tol_scale.is_finite()) {
            return err(0, format!("--tol-scale must be positive, got {tol_scale}"));
        }
        if let Some(e) = raw.get("scenario") {
            if e.value != scenario.name() {
                return err(
                    e.line,
                    format!("config is for scenario `{}` but `{}` was requested", e.value, scenario),
                );
            }
        }
        for (key, e) in &raw.entries {
            if !COMMON_KEYS.contains(&key.as_str()) && !scenario.keys().contains(&key.as_str()) {
                return err(e.line, format!("unknown key `{key}` for scenario `{scenario}`"));
            }
        }

        let lrvol = scenario == Scenario::LrVol;
        let dim = raw.usize("grid.dim")?.unwrap_or(if lrvol { 2 } else { 1 });
        if !(1..=3).contains(&dim) {
            return err(raw.line_of("grid.dim"), format!("grid.dim must be 1, 2 or 3, got {dim}"));
        }
        // L^r bodies live in the unit box; the other scenarios integrate
        // decaying densities.
        let (default_r, default_n) = match (lrvol, dim) {
            (true, _) => (1.0, 65),
            (false, 1) => (8.0, 513),
            (false, _) => (6.0, 129),
        };
        let half_width = raw.f64("grid.half_width")?.unwrap_or(default_r);
        if half_width <= 0.0 {
            return err(raw.line_of("grid.half_width"), "grid.half_width must be positive");
        }
        let points = raw.usize("grid.points")?.unwrap_or(default_n);
        if points < 3 || points % 2 == 0 {
            return err(raw.line_of("grid.points"), format!("grid.points must be odd and at least 3, got {points}"));
        }

        let (family, family_name) = match raw.get("density.family") {
            Some(e) => {
                let fam = Family::parse(&e.value).map_err(|x| ConfigError {
                    line: e.line,
                    message: x.to_string(),
                })?;
                (Some(fam), Some(e.value.clone()))
            }
            None => (None, None),
        };

        let list = |key: &str| -> Result<Option<Vec<f64>>, ConfigError> { raw.list(key) };
        let times = list("params.times")?;
        let s = list("params.s")?;
        let p = list("params.p")?;
        let q = list("params.q")?;
        let q_offsets = list("params.q_offsets")?;
        let t = list("params.t")?;
        let r = list("params.r")?;
        let betas = list("params.betas")?;
        let shifts = list("params.shifts")?;

        for key in scenario.required() {
            if raw.get(key).is_none() {
                return err(
                    raw.last_line,
                    format!("missing key `{key}` (required by scenario `{scenario}`)"),
                );
            }
        }
        if let Some(s) = &s {
            if s.iter().any(|v| *v <= 0.0) {
                return err(raw.line_of("params.s"), "params.s must be positive");
            }
        }
        if let Some(b) = &betas {
            if b.iter().any(|v| *v <= 0.0) {
                return err(raw.line_of("params.betas"), "params.betas must be positive");
            }
        }
        if let Some(r) = &r {
            if r.iter().any(|v| *v <= 0.0) {
                return err(raw.line_of("params.r"), "params.r must be positive");
            }
        }
        for key in ["params.times", "params.t"] {
            if let Some(v) = raw.list(key)? {
                if v.iter().any(|t| *t < 0.0) {
                    return err(raw.line_of(key), format!("{key} must be nonnegative"));
                }
            }
        }
        if scenario == Scenario::Nelson {
            if q.is_none() && q_offsets.is_none() {
                return err(raw.last_line, "scenario `nelson` needs params.q or params.q_offsets");
            }
            if q.is_some() && q_offsets.is_some() {
                return err(raw.line_of("params.q_offsets"), "give params.q or params.q_offsets, not both");
            }
            for key in ["params.s", "params.p"] {
                if raw.list(key)?.map_or(0, |v| v.len()) != 1 {
                    return err(raw.line_of(key), format!("{key} must be a single value for `nelson`"));
                }
            }
        }
        if scenario == Scenario::RevHC {
            let n = s.as_ref().map_or(0, Vec::len);
            for key in ["params.p", "params.q"] {
                if let Some(v) = raw.list(key)? {
                    if v.len() != 1 && v.len() != n {
                        return err(raw.line_of(key), format!("{key} needs 1 or {n} entries"));
                    }
                }
            }
            if p.is_some() != q.is_some() {
                return err(raw.line_of("params.p").min(raw.line_of("params.q")), "give both params.p and params.q, or neither");
            }
        }

        let kind = raw.get("params.kind").map(|e| e.value.clone());
        if scenario == Scenario::Laplace {
            let k = kind.as_deref().unwrap_or("dual");
            let needed: &[&str] = match k {
                "dual" => &["params.s"],
                "q" => &["params.s", "params.times"],
                "ratio" => &[],
                _ => return err(raw.line_of("params.kind"), format!("params.kind must be dual, q or ratio, got `{k}`")),
            };
            for key in needed {
                if raw.get(key).is_none() {
                    return err(raw.last_line, format!("missing key `{key}` (required by laplace kind `{k}`)"));
                }
            }
        }

        let bodies = raw.words("params.bodies")?;
        if let Some(b) = &bodies {
            for name in b {
                if crate::scenarios::parse_body(name, dim).is_err() {
                    return err(raw.line_of("params.bodies"), format!("unknown body `{name}`"));
                }
            }
        }

        let n = raw.usize("params.n")?.unwrap_or(1);
        if n == 0 {
            return err(raw.line_of("params.n"), "params.n must be positive");
        }
        let seed = raw.usize("params.seed")?.unwrap_or(11) as u64;
        let cases = raw.usize("params.cases")?.unwrap_or(50);
        let flag_threshold = raw.f64("params.flag_threshold")?.unwrap_or(1e-6);

        let mut assertions = Vec::new();
        for (key, e) in raw.entries.range("assert.".to_string()..) {
            let Some(name) = key.strip_prefix("assert.") else { break };
            let value = match e.value.as_str() {
                "true" => 1.0,
                "false" => continue,
                v => parse_f64(v, e.line, key)?,
            };
            assertions.push(Assertion {
                name: name.to_string(),
                value,
                line: e.line,
            });
        }

        Ok(Self {
            scenario,
            grid: GridParams {
                dim,
                half_width,
                points,
            },
            family,
            family_name,
            times,
            s,
            p,
            q,
            q_offsets,
            t,
            r,
            betas,
            shifts,
            bodies,
            kind,
            n,
            seed,
            cases,
            flag_threshold,
            csv: raw
                .get("output.csv")
                .map_or_else(|| format!("{}.csv", scenario.name()), |e| e.value.clone()),
            svg: raw.get("output.svg").map(|e| e.value.clone()),
            log_x: raw.bool("output.log_x")?.unwrap_or(false),
            log_y: raw.bool("output.log_y")?.unwrap_or(false),
            assertions,
            tol_scale,
        })
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Tolerance of an assertion, scaled by `--tol-scale`.
    pub fn tolerance(&self, name: &str) -> Option<f64> {
        self.assertion(name).map(|a| a.value * self.tol_scale)
    }

    /// The fully resolved configuration as `key=value` pairs, defaults
    /// included, in a fixed order.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let fmt_list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("scenario".to_string(), self.scenario.to_string()),
            ("grid.dim".into(), self.grid.dim.to_string()),
            ("grid.half_width".into(), format!("{}", self.grid.half_width)),
            ("grid.points".into(), self.grid.points.to_string()),
        ];
        if let Some(f) = &self.family_name {
            out.push(("density.family".into(), f.clone()));
        }
        let lists = [
            ("params.times", &self.times),
            ("params.s", &self.s),
            ("params.p", &self.p),
            ("params.q", &self.q),
            ("params.q_offsets", &self.q_offsets),
            ("params.t", &self.t),
            ("params.r", &self.r),
            ("params.betas", &self.betas),
            ("params.shifts", &self.shifts),
        ];
        for (k, v) in lists {
            if let Some(v) = v {
                out.push((k.into(), fmt_list(v)));
            }
        }
        if let Some(b) = &self.bodies {
            out.push(("params.bodies".into(), b.join(",")));
        }
        if let Some(k) = &self.kind {
            out.push(("params.kind".into(), k.clone()));
        }
        let sc = self.scenario;
        if sc == Scenario::BLConst {
            out.push(("params.n".into(), self.n.to_string()));
        }
        if sc == Scenario::LegendreCheck {
            out.push(("params.seed".into(), self.seed.to_string()));
            out.push(("params.cases".into(), self.cases.to_string()));
        }
        out.push(("params.flag_threshold".into(), format!("{}", self.flag_threshold)));
        out.push(("output.csv".into(), self.csv.clone()));
        if let Some(svg) = &self.svg {
            out.push(("output.svg".into(), svg.clone()));
        }
        out.push(("output.log_x".into(), self.log_x.to_string()));
        out.push(("output.log_y".into(), self.log_y.to_string()));
        for a in &self.assertions {
            out.push((format!("assert.{}", a.name), format!("{}", a.value)));
        }
        out.push(("tol_scale".into(), format!("{}", self.tol_scale)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOW: &str = "\
scenario = flow
[grid]
dim = 1
[density]
family = box
[params]
times = 0.05, 0.1, 0.2
[assert]
monotone = 1e-4
";

    #[test]
    fn parses_flow_config_with_defaults() {
        let c = ExperimentConfig::from_text(FLOW, Scenario::Flow, 1.0).unwrap();
        assert_eq!(c.grid, GridParams { dim: 1, half_width: 8.0, points: 513 });
        assert_eq!(c.times.as_deref(), Some(&[0.05, 0.1, 0.2][..]));
        assert_eq!(c.tolerance("monotone"), Some(1e-4));
        assert_eq!(c.csv, "flow.csv");
    }

    #[test]
    fn tol_scale_multiplies_tolerances() {
        let c = ExperimentConfig::from_text(FLOW, Scenario::Flow, 10.0).unwrap();
        assert!((c.tolerance("monotone").unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = FLOW.replace("times = 0.05, 0.1, 0.2", "times = 0.05, oops");
        let e = ExperimentConfig::from_text(&bad, Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 7);
        let e = ExperimentConfig::from_text("[grid]\ndim = 1\nwhat\n", Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 3);
        let e = ExperimentConfig::from_text("[grid\n", Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn rejects_unknown_duplicate_and_missing_keys() {
        let e = ExperimentConfig::from_text(&format!("{FLOW}bogus = 1\n"), Scenario::Flow, 1.0).unwrap_err();
        assert!(e.message.contains("unknown key"), "{e}");
        assert_eq!(e.line, 10);
        let e = ExperimentConfig::from_text("[grid]\ndim = 1\ndim = 2\n", Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 3);
        let e = ExperimentConfig::from_text("[density]\nfamily = box\n", Scenario::Flow, 1.0).unwrap_err();
        assert!(e.message.contains("params.times"), "{e}");
        // a malformed value is reported before a missing key
        let e = ExperimentConfig::from_text("[grid]\ndim = x\n", Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("grid.dim"), "{e}");
    }

    #[test]
    fn scenario_mismatch_is_an_error() {
        let e = ExperimentConfig::from_text(FLOW, Scenario::RevHC, 1.0).unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn grid_points_must_be_odd() {
        let bad = FLOW.replace("dim = 1", "dim = 1\npoints = 64");
        let e = ExperimentConfig::from_text(&bad, Scenario::Flow, 1.0).unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn comments_and_bracketed_lists() {
        let text = "# header\n[density]\nfamily = gauss # inline\n[params]\ntimes = [0.5, 1]\n";
        let c = ExperimentConfig::from_text(text, Scenario::Flow, 1.0).unwrap();
        assert_eq!(c.times.as_deref(), Some(&[0.5, 1.0][..]));
    }

    #[test]
    fn resolved_config_lists_defaults() {
        let c = ExperimentConfig::from_text(FLOW, Scenario::Flow, 1.0).unwrap();
        let r = c.resolved();
        assert!(r.contains(&("grid.points".to_string(), "513".to_string())));
        assert!(r.contains(&("assert.monotone".to_string(), "0.0001".to_string())));
    }
}
