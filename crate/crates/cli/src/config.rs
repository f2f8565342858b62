use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use f13_core::conformal::{ExpProfile, LinearProfile, Profile};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}", .0.join("\n"))]
pub struct ConfigError(pub Vec<String>);

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        Self(vec![msg.into()])
    }
}

/// Flat `section.key -> value` map of a `[section]` / `key = value` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    /// Keys outside any section are stored without a prefix. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        let mut errors = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if !name.trim().is_empty() && !name.contains(['[', ']', '.']) => {
                        section = name.trim().to_string()
                    }
                    _ => errors.push(format!("line {line_no}: malformed section header `{line}`")),
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(format!("line {line_no}: expected `key = value`, got `{line}`"));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                errors.push(format!("line {line_no}: empty key or value"));
                continue;
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if let Some((_, first)) = entries.get(&key) {
                errors.push(format!("line {line_no}: `{key}` already set on line {first}"));
                continue;
            }
            entries.insert(key, (v.to_string(), line_no));
        }
        if errors.is_empty() {
            Ok(Self { entries })
        } else {
            Err(ConfigError(errors))
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    A1,
    A1Shearless,
    A2,
    A2Branch1,
    A2Branch2,
    GeneralResidual,
    FutureworkResidual,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::A1 => "a1",
            Case::A1Shearless => "a1-shearless",
            Case::A2 => "a2",
            Case::A2Branch1 => "a2-branch1",
            Case::A2Branch2 => "a2-branch2",
            Case::GeneralResidual => "general-residual",
            Case::FutureworkResidual => "futurework-residual",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Case::A1,
            Case::A1Shearless,
            Case::A2,
            Case::A2Branch1,
            Case::A2Branch2,
            Case::GeneralResidual,
            Case::FutureworkResidual,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown case `{s}`"))
    }
}

/// Which pipeline the configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSpec {
    Constant(f64),
    /// CSV file with columns `z,F`.
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Exp(ExpProfile),
    Linear(LinearProfile),
}

impl Profile for ProfileSpec {
    fn eval(&self, z: f64) -> [f64; 3] {
        match self {
            ProfileSpec::Exp(p) => p.eval(z),
            ProfileSpec::Linear(p) => p.eval(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z0: f64,
    pub z1: f64,
    pub n: usize,
}

/// Validated scenario. Fields that do not apply to the case are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub case: Case,
    pub scale: Option<ScaleSpec>,
    pub profile: Option<ProfileSpec>,
    pub grid: Option<GridSpec>,
    /// `initial.*` values by key.
    pub initial: BTreeMap<String, f64>,
    /// `constants.*` values by key (`A`, `B`, `C`, `D`, `sign`).
    pub constants: BTreeMap<String, f64>,
    pub residual_tol: f64,
    pub conservation_tol: f64,
    pub output: Option<PathBuf>,
    pub frame_check: bool,
    pub perturb_a3: f64,
    pub table: Option<PathBuf>,
    pub direction: usize,
}

impl ScenarioConfig {
    pub fn initial(&self, key: &str) -> f64 {
        self.initial[key]
    }

    pub fn constant(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.expect("validated config has a grid")
    }
}

const ALWAYS: &[&str] = &[
    "scenario.case",
    "scenario.output",
    "scenario.frame_check",
    "tolerances.residual_tol",
    "tolerances.conservation_tol",
];
const GRID: &[&str] = &["grid.z0", "grid.z1", "grid.N"];

struct Rules {
    required: Vec<&'static str>,
    optional: Vec<&'static str>,
    /// Groups of which exactly one key must be present.
    one_of: Vec<Vec<&'static str>>,
}

fn rules(case: Case, mode: Mode, raw: &RawConfig) -> Result<Rules, ConfigError> {
    let scale = vec!["scale.F", "scale.table"];
    let mut r = Rules { required: GRID.to_vec(), optional: vec![], one_of: vec![] };
    let unsupported = || ConfigError::one(format!("case `{case}` has no closed form to verify"));
    match (case, mode) {
        (Case::A1, Mode::Solve) => {
            r.required.extend(["initial.sigma11", "initial.Omega3"]);
            r.one_of.push(scale);
            r.one_of.push(vec!["initial.a3", "constants.A"]);
            if raw.get("constants.A").is_some() {
                r.optional.push("constants.sign");
            }
        }
        (Case::A1, Mode::Verify) => {
            r.required.extend(["profile.kind", "constants.A", "constants.B"]);
            r.optional.extend(["constants.sign", "scenario.perturb_a3"]);
            match raw.get("profile.kind") {
                Some("exp") => r.required.extend(["profile.amplitude", "profile.rate"]),
                Some("linear") => r.required.extend(["profile.offset", "profile.slope"]),
                Some(other) => {
                    return Err(ConfigError::one(format!("profile.kind: expected `exp` or `linear`, got `{other}`")))
                }
                None => {}
            }
        }
        (Case::A1Shearless | Case::A2Branch1, _) => {
            r.required.extend(["constants.C", "constants.B"]);
            r.one_of.push(scale);
            if mode == Mode::Verify {
                r.optional.push("scenario.perturb_a3");
            }
        }
        (Case::A2Branch2, _) => {
            r.required.extend(["constants.D", "constants.B"]);
            r.one_of.push(scale);
            if mode == Mode::Verify {
                r.optional.push("scenario.perturb_a3");
            }
        }
        (Case::A2, Mode::Solve) => {
            r.required.extend(["initial.p", "initial.udot3", "initial.a3", "initial.Omega3"]);
            r.one_of.push(scale);
        }
        (Case::GeneralResidual | Case::FutureworkResidual, Mode::Solve) => {
            r.required = vec!["input.table"];
            r.optional.push("input.direction");
        }
        (Case::A2 | Case::GeneralResidual | Case::FutureworkResidual, Mode::Verify) => return Err(unsupported()),
    }
    Ok(r)
}

fn parse_f64(raw: &RawConfig, key: &str, errors: &mut Vec<String>) -> Option<f64> {
    let v = raw.get(key)?;
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Some(x),
        _ => {
            errors.push(format!("{key} (line {}): `{v}` is not a finite number", raw.line(key).unwrap_or(0)));
            None
        }
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl ScenarioConfig {
    /// Validates `raw` for `mode`. Relative paths are resolved against `base`.
    pub fn from_raw(raw: &RawConfig, mode: Mode, base: &Path) -> Result<Self, ConfigError> {
        let case: Case = raw
            .get("scenario.case")
            .ok_or_else(|| ConfigError::one("scenario.case: missing"))?
            .parse()
            .map_err(|e: String| ConfigError::one(format!("scenario.case: {e}")))?;
        let rules = rules(case, mode, raw)?;
        let mut errors = Vec::new();
        for key in &rules.required {
            if raw.get(key).is_none() {
                errors.push(format!("{key}: required for case `{case}`"));
            }
        }
        for group in &rules.one_of {
            let present: Vec<_> = group.iter().filter(|k| raw.get(k).is_some()).collect();
            if present.len() != 1 {
                errors.push(format!("exactly one of {} is required for case `{case}`", group.join(", ")));
            }
        }
        let allowed = |k: &str| {
            ALWAYS.contains(&k)
                || rules.required.contains(&k)
                || rules.optional.contains(&k)
                || rules.one_of.iter().any(|g| g.contains(&k))
        };
        for key in raw.keys() {
            if !allowed(key) {
                errors.push(format!("{key} (line {}): not used by case `{case}`", raw.line(key).unwrap_or(0)));
            }
        }

        let scale = match (raw.get("scale.F"), raw.get("scale.table")) {
            (Some(_), None) => parse_f64(raw, "scale.F", &mut errors).map(ScaleSpec::Constant),
            (None, Some(path)) => Some(ScaleSpec::Table(resolve(base, path))),
            _ => None,
        };
        if let Some(ScaleSpec::Constant(c)) = scale {
            if c <= 0.0 {
                errors.push(format!("scale.F: must be positive, got {c}"));
            }
        }

        let grid = if raw.get("grid.N").is_some() || raw.get("grid.z0").is_some() {
            let z0 = parse_f64(raw, "grid.z0", &mut errors);
            let z1 = parse_f64(raw, "grid.z1", &mut errors);
            let n = raw.get("grid.N").and_then(|v| match v.parse::<usize>() {
                Ok(n) if n >= 4 => Some(n),
                _ => {
                    errors.push(format!("grid.N: expected an integer ≥ 4, got `{v}`"));
                    None
                }
            });
            match (z0, z1, n) {
                (Some(z0), Some(z1), Some(n)) if z1 > z0 => Some(GridSpec { z0, z1, n }),
                (Some(_), Some(_), Some(_)) => {
                    errors.push("grid: z1 must exceed z0".into());
                    None
                }
                _ => None,
            }
        } else {
            None
        };

        let profile = match raw.get("profile.kind") {
            Some("exp") => match (
                parse_f64(raw, "profile.amplitude", &mut errors),
                parse_f64(raw, "profile.rate", &mut errors),
            ) {
                (Some(amplitude), Some(rate)) => Some(ProfileSpec::Exp(ExpProfile { amplitude, rate })),
                _ => None,
            },
            Some("linear") => {
                match (parse_f64(raw, "profile.offset", &mut errors), parse_f64(raw, "profile.slope", &mut errors)) {
                    (Some(offset), Some(slope)) => Some(ProfileSpec::Linear(LinearProfile { offset, slope })),
                    _ => None,
                }
            }
            _ => None,
        };

        let mut initial = BTreeMap::new();
        let mut constants = BTreeMap::new();
        for key in raw.keys() {
            if let Some(name) = key.strip_prefix("initial.") {
                if let Some(v) = parse_f64(raw, key, &mut errors) {
                    initial.insert(name.to_string(), v);
                }
            } else if let Some(name) = key.strip_prefix("constants.") {
                if let Some(v) = parse_f64(raw, key, &mut errors) {
                    constants.insert(name.to_string(), v);
                }
            }
        }
        if let Some(s) = constants.get("sign") {
            if *s != 1.0 && *s != -1.0 {
                errors.push(format!("constants.sign: must be 1 or -1, got {s}"));
            }
        }

        let positive_tol = |key: &str, default: f64, errors: &mut Vec<String>| match parse_f64(raw, key, errors) {
            Some(v) if v > 0.0 => v,
            Some(v) => {
                errors.push(format!("{key}: must be positive, got {v}"));
                default
            }
            None => default,
        };
        let residual_tol = positive_tol("tolerances.residual_tol", 1e-10, &mut errors);
        let conservation_tol = positive_tol("tolerances.conservation_tol", 1e-8, &mut errors);
        let frame_check = match raw.get("scenario.frame_check") {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => {
                errors.push(format!("scenario.frame_check: expected true or false, got `{v}`"));
                false
            }
        };
        let perturb_a3 = parse_f64(raw, "scenario.perturb_a3", &mut errors).unwrap_or(0.0);
        let direction = match raw.get("input.direction") {
            None => 3,
            Some(v) => match v.parse::<usize>() {
                Ok(d) if d <= 3 => d,
                _ => {
                    errors.push(format!("input.direction: expected 0, 1, 2 or 3, got `{v}`"));
                    3
                }
            },
        };

        if !errors.is_empty() {
            return Err(ConfigError(errors));
        }
        Ok(Self {
            case,
            scale,
            profile,
            grid,
            initial,
            constants,
            residual_tol,
            conservation_tol,
            output: raw.get("scenario.output").map(|p| resolve(base, p)),
            frame_check,
            perturb_a3,
            table: raw.get("input.table").map(|p| resolve(base, p)),
            direction,
        })
    }
}
