//! Run configuration: per-command defaults, an optional `key = value` file and
//! command-line overrides, merged in that order and validated key by key.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use fwbesov::solver::{CALIBRATED_C_STAR, PILOT_AMPLITUDE, PILOT_COUNT, PILOT_KMAX, PILOT_POINTS, PILOT_SEED};
use fwbesov::{Summability, TorusGrid};

use crate::initial::{parse_initial, Extras, InitialData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    BesovNorm,
    Iterate,
    Nonuniform,
    Peakon,
    Taylor,
    Blowup,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::BesovNorm => "besov-norm",
            Command::Iterate => "iterate",
            Command::Nonuniform => "nonuniform",
            Command::Peakon => "peakon",
            Command::Taylor => "taylor",
            Command::Blowup => "blowup",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("N", "grid points, a power of two >= 8"),
    ("L", "period; accepts forms like 2pi, 40*pi, 6.5"),
    ("dt", "time step upper bound"),
    ("t_end", "final time; `auto` = half the lifespan for iterate"),
    ("s", "Besov smoothness index"),
    ("r", "Besov summability index >= 1 or `inf`"),
    ("n_list", "comma-separated increasing frequencies"),
    ("K", "time-Taylor truncation order (<= 30)"),
    ("C_star", "lifespan constant C in T = 1/(4 C |u0|)"),
    ("initial", "zero | random | peakon | Fourier sum like 1 + 0.1cos(x)"),
    ("amplitude", "amplitude of random data"),
    ("kmax", "top mode of random data"),
    ("seed", "seed of random data"),
    ("count", "number of random fields (calibrate)"),
    ("A", "peakon amplitude"),
    ("c", "peakon speed"),
    ("iterations", "number of iterates (iterate)"),
    ("formats", "comma list from json, csv, plot"),
    ("out", "output directory (FWBESOV_OUT overrides the file value)"),
];

/// Defaults as text, so they go through the same parser as user input.
pub fn defaults(cmd: Command) -> BTreeMap<&'static str, String> {
    let mut d: BTreeMap<&'static str, String> = [
        ("N", "512".to_string()),
        ("L", "2pi".into()),
        ("dt", "1e-3".into()),
        ("t_end", "1".into()),
        ("s", "2".into()),
        ("r", "2".into()),
        ("n_list", "16,32,64,128,256".into()),
        ("K", "12".into()),
        ("C_star", format!("{CALIBRATED_C_STAR:?}")),
        ("initial", "0.1cos(x)".into()),
        ("amplitude", format!("{PILOT_AMPLITUDE:?}")),
        ("kmax", PILOT_KMAX.to_string()),
        ("seed", PILOT_SEED.to_string()),
        ("count", PILOT_COUNT.to_string()),
        ("A", "8/9".into()),
        ("c", "4/3".into()),
        ("iterations", "6".into()),
        ("formats", "json,csv".into()),
        ("out", "fwbesov-out".into()),
    ]
    .into_iter()
    .collect();
    let over: &[(&str, &str)] = match cmd {
        Command::Simulate => &[],
        Command::BesovNorm => &[("initial", "cos(x) + 0.5sin(3x)")],
        Command::Iterate => &[("N", "64"), ("t_end", "auto"), ("initial", "1 + 0.1cos(x) + 0.05sin(2x)")],
        Command::Nonuniform => &[("r", "inf")],
        Command::Peakon => &[("N", "4096"), ("L", "40pi"), ("initial", "peakon")],
        Command::Taylor => &[("N", "64"), ("t_end", "0.05")],
        Command::Blowup => &[("N", "2048"), ("t_end", "0.31"), ("initial", "-2sin(x)")],
        Command::Calibrate => &[("initial", "random")],
    };
    for (k, v) in over {
        d.insert(k, v.to_string());
    }
    if cmd == Command::Calibrate {
        d.insert("N", PILOT_POINTS.to_string());
    }
    d
}

pub fn help_text() -> String {
    let mut s = String::from("Keys (set in --config FILE as `key = value` or as --key value):\n");
    for (k, desc) in KEYS {
        s.push_str(&format!("  {k:<11} {desc}\n"));
    }
    s.push_str("\nDefaults per command (simulate shown; others override the listed keys):\n");
    let base = defaults(Command::Simulate);
    for (k, _) in KEYS {
        s.push_str(&format!("  {k:<11} {}\n", base[k]));
    }
    for cmd in Command::value_variants() {
        let d = defaults(*cmd);
        let diff: Vec<String> = d
            .iter()
            .filter(|(k, v)| base.get(*k) != Some(v))
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if !diff.is_empty() {
            s.push_str(&format!("  [{}] {}\n", cmd.name(), diff.join(", ")));
        }
    }
    s
}

/// Parse `key = value` lines; `#` and `;` start comments, `[section]` lines are ignored.
pub fn parse_file_text(text: &str, path: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax {
            path: path.to_string(),
            line: i + 1,
        })?;
        let k = k.trim();
        if !KEYS.iter().any(|(name, _)| *name == k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        map.insert(k.to_string(), v.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_file_text(&text, &path.display().to_string())
}

/// Real number: decimal, `a/b`, or a multiple of pi (`pi`, `2pi`, `40*pi`).
pub fn parse_real(key: &str, text: &str) -> Result<f64, ConfigError> {
    let t = text.trim().to_ascii_lowercase();
    let value = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            Ok(1.0)
        } else {
            head.parse::<f64>()
        };
        factor.map(|f| f * PI).map_err(|_| invalid(key, format!("cannot parse `{text}`")))?
    } else if let Some((a, b)) = t.split_once('/') {
        let (a, b) = (a.trim().parse::<f64>(), b.trim().parse::<f64>());
        match (a, b) {
            (Ok(a), Ok(b)) if b != 0.0 => a / b,
            _ => return Err(invalid(key, format!("cannot parse `{text}`"))),
        }
    } else {
        t.parse::<f64>().map_err(|_| invalid(key, format!("cannot parse `{text}`")))?
    };
    if !value.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(value)
}

fn parse_positive(key: &str, text: &str) -> Result<f64, ConfigError> {
    let v = parse_real(key, text)?;
    if v <= 0.0 {
        return Err(invalid(key, format!("{v} must be positive")));
    }
    Ok(v)
}

fn parse_count(key: &str, text: &str, min: usize) -> Result<usize, ConfigError> {
    let v: usize = text
        .trim()
        .parse()
        .map_err(|_| invalid(key, format!("`{text}` is not a non-negative integer")))?;
    if v < min {
        return Err(invalid(key, format!("{v} is below the minimum {min}")));
    }
    Ok(v)
}

pub fn parse_summability(key: &str, text: &str) -> Result<Summability, ConfigError> {
    text.trim().parse::<Summability>().map_err(|e| invalid(key, e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    /// `None` means `auto`.
    pub t_end: Option<f64>,
    pub s: f64,
    pub r: Summability,
    pub n_list: Vec<usize>,
    pub k: usize,
    pub c_star: f64,
    pub initial: InitialData,
    pub amplitude: f64,
    pub kmax: usize,
    pub seed: u64,
    pub count: usize,
    pub a: f64,
    pub c: f64,
    pub iterations: usize,
    pub formats: Formats,
    pub out: PathBuf,
}

impl RunConfig {
    /// Merge defaults, file values and flags (later wins), then validate.
    pub fn resolve(
        command: Command,
        file: &BTreeMap<String, String>,
        flags: &BTreeMap<String, String>,
        env_out: Option<String>,
    ) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<String, String> =
            defaults(command).into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        for (k, v) in file {
            if !values.contains_key(k) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            values.insert(k.clone(), v.clone());
        }
        if let Some(dir) = env_out {
            values.insert("out".into(), dir);
        }
        for (k, v) in flags {
            if !values.contains_key(k) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            values.insert(k.clone(), v.clone());
        }
        Self::from_values(command, &values)
    }

    fn from_values(command: Command, v: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let get = |k: &str| v[k].as_str();

        let n = parse_count("N", get("N"), 8)?;
        if !n.is_power_of_two() {
            return Err(invalid("N", format!("{n} is not a power of two")));
        }
        let length = parse_positive("L", get("L"))?;
        let dt = parse_positive("dt", get("dt"))?;
        let t_end = match get("t_end").trim() {
            "auto" if command == Command::Iterate => None,
            "auto" => return Err(invalid("t_end", "`auto` is only meaningful for iterate")),
            text => {
                let t = parse_real("t_end", text)?;
                if t < 0.0 {
                    return Err(invalid("t_end", format!("{t} must be non-negative")));
                }
                Some(t)
            }
        };
        let s = parse_real("s", get("s"))?;
        let r = parse_summability("r", get("r"))?;
        let n_list = get("n_list")
            .split(',')
            .map(|x| parse_count("n_list", x, 1))
            .collect::<Result<Vec<_>, _>>()?;
        if n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("n_list", "must be strictly increasing"));
        }
        let k = parse_count("K", get("K"), 0)?;
        if k > 30 {
            return Err(invalid("K", format!("{k} exceeds 30")));
        }
        let c_star = parse_positive("C_star", get("C_star"))?;
        let initial = parse_initial(get("initial")).map_err(|e| invalid("initial", e))?;
        let amplitude = parse_positive("amplitude", get("amplitude"))?;
        let kmax = parse_count("kmax", get("kmax"), 1)?;
        let seed: u64 = get("seed")
            .trim()
            .parse()
            .map_err(|_| invalid("seed", format!("`{}` is not an unsigned integer", get("seed"))))?;
        let count = parse_count("count", get("count"), 1)?;
        let a = parse_real("A", get("A"))?;
        let c = parse_real("c", get("c"))?;
        let iterations = parse_count("iterations", get("iterations"), 1)?;
        let mut formats = Formats {
            json: true,
            csv: false,
            plot: false,
        };
        for f in get("formats").split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match f {
                "json" => {}
                "csv" => formats.csv = true,
                "plot" | "svg" => formats.plot = true,
                other => return Err(invalid("formats", format!("unknown format `{other}`"))),
            }
        }
        let out = PathBuf::from(get("out"));

        let cfg = Self {
            command,
            n,
            length,
            dt,
            t_end,
            s,
            r,
            n_list,
            k,
            c_star,
            initial,
            amplitude,
            kmax,
            seed,
            count,
            a,
            c,
            iterations,
            formats,
            out,
        };
        cfg.check_command()?;
        Ok(cfg)
    }

    /// Preconditions of the module each command dispatches to.
    fn check_command(&self) -> Result<(), ConfigError> {
        let two_pi = (self.length - 2.0 * PI).abs() < 1e-12;
        if self.command == Command::Iterate && !(fwbesov::BesovParams { s: self.s, r: self.r }).well_posed() {
            return Err(invalid("s", format!("(s, r) = ({}, {}) is outside the well-posed range", self.s, self.r)));
        }
        match self.command {
            Command::Nonuniform => {
                if !two_pi {
                    return Err(invalid("L", "the approximate solutions live on the 2π torus"));
                }
                if self.n_list.len() < 4 {
                    return Err(invalid("n_list", "need at least 4 frequencies to fit exponents"));
                }
                if self.s <= 0.5 {
                    return Err(invalid("s", "need s > 1/2 for the error exponent"));
                }
            }
            Command::Peakon => {
                if self.a == 0.0 {
                    return Err(invalid("A", "zero amplitude"));
                }
                if self.c == 0.0 {
                    return Err(invalid("c", "zero speed"));
                }
            }
            Command::Taylor => {
                if let Some(top) = self.initial.top_mode() {
                    if top as usize >= self.n / 6 {
                        return Err(invalid("initial", format!("mode {top} is not below N/6 = {}", self.n / 6)));
                    }
                }
            }
            Command::Calibrate if self.kmax >= self.n / 2 => {
                return Err(invalid("kmax", format!("{} must be below N/2", self.kmax)));
            }
            _ => {}
        }
        if let Some(top) = self.initial.top_mode() {
            if top as usize >= self.n / 2 {
                return Err(invalid("initial", format!("mode {top} is not resolved on N = {}", self.n)));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.n, self.length).expect("validated")
    }

    pub fn extras(&self) -> Extras {
        Extras {
            amplitude: self.amplitude,
            kmax: self.kmax,
            seed: self.seed,
            peakon_amplitude: self.a,
        }
    }

    /// Resolved configuration for the report.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command.name(),
            "N": self.n,
            "L": self.length,
            "dt": self.dt,
            "t_end": self.t_end.map_or(serde_json::Value::from("auto"), serde_json::Value::from),
            "s": self.s,
            "r": self.r.to_string(),
            "n_list": self.n_list,
            "K": self.k,
            "C_star": self.c_star,
            "initial": self.initial.to_string(),
            "amplitude": self.amplitude,
            "kmax": self.kmax,
            "seed": self.seed,
            "count": self.count,
            "A": self.a,
            "c": self.c,
            "iterations": self.iterations,
            "formats": self.formats,
        })
    }
}
