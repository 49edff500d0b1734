//! Plain-text `key=value` experiment configuration: one pair per line,
//! `#` comments, no sections. The grammar is deliberately trivial so any
//! language can parse and emit it byte-identically.

use std::fmt;
use std::str::FromStr;

/// Named experiments the driver can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Caps,
    Netcheck,
    Example,
    Sweep,
    Decouple,
    Distset,
    Energy,
    Threshold,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Caps,
        Command::Netcheck,
        Command::Example,
        Command::Sweep,
        Command::Decouple,
        Command::Distset,
        Command::Energy,
        Command::Threshold,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Caps => "caps",
            Command::Netcheck => "netcheck",
            Command::Example => "example",
            Command::Sweep => "sweep",
            Command::Decouple => "decouple",
            Command::Distset => "distset",
            Command::Energy => "energy",
            Command::Threshold => "threshold",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .iter()
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully validated experiment configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub d: usize,
    pub m: usize,
    pub alpha: f64,
    pub p: f64,
    pub c: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub c0: f64,
    pub r_list: Vec<f64>,
    pub seed: u64,
    pub budget: usize,
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        ExperimentConfig {
            command,
            d: 2,
            m: 2,
            alpha: 0.5,
            p: 4.0,
            c: 0.001,
            beta: 0.0,
            epsilon: 0.1,
            eta: 0.05,
            c0: 8.0,
            r_list: vec![256.0],
            seed: 0,
            budget: 1_000_000,
            output_path: "report.csv".to_string(),
        }
    }

    /// Canonical document form: fixed key order, full-precision floats.
    /// `parse_config` on this text reproduces the config exactly.
    pub fn canonical_text(&self) -> String {
        let f = |v: f64| format!("{v:e}");
        let r_list = self
            .r_list
            .iter()
            .map(|&v| f(v))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "command={}\nd={}\nm={}\nalpha={}\np={}\nc={}\nbeta={}\nepsilon={}\neta={}\nC0={}\nR_list={}\nseed={}\nbudget={}\noutput_path={}\n",
            self.command,
            self.d,
            self.m,
            f(self.alpha),
            f(self.p),
            f(self.c),
            f(self.beta),
            f(self.epsilon),
            f(self.eta),
            f(self.c0),
            r_list,
            self.seed,
            self.budget,
            self.output_path,
        )
    }

    /// Cross-field invariants; the per-command numeric ranges are checked
    /// again by the core operations at run time.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError { line: None, msg });
        if !(self.beta < self.eta && self.eta < self.epsilon) {
            return bad(format!(
                "parameter ordering violated: need beta < eta < epsilon, got {} {} {}",
                self.beta, self.eta, self.epsilon
            ));
        }
        if self.d < 1 {
            return bad("d must be at least 1".into());
        }
        if self.r_list.is_empty() {
            return bad("R_list must be nonempty".into());
        }
        if self.r_list.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
            return bad("R_list entries must be positive".into());
        }
        match self.command {
            Command::Distset => {
                let m = self.m as f64;
                if !(self.alpha > m - 1.0 && self.alpha <= m) {
                    return bad(format!(
                        "distset needs m-1 < alpha <= m, got alpha={} m={}",
                        self.alpha, self.m
                    ));
                }
            }
            Command::Example | Command::Sweep => {
                let lo = self.d as f64 - (self.m as f64 + 1.0) / 2.0;
                if !(lo <= self.alpha && self.alpha <= self.d as f64) {
                    return bad(format!(
                        "example/sweep needs {lo} <= alpha <= {}, got {}",
                        self.d, self.alpha
                    ));
                }
                if self.m < 2 || self.m > self.d {
                    return bad(format!("example/sweep needs 2 <= m <= d, got m={}", self.m));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parse error with a 1-based line number when one applies.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.msg),
            None => write!(f, "config: {}", self.msg),
        }
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: [&str; 14] = [
    "command",
    "d",
    "m",
    "alpha",
    "p",
    "c",
    "beta",
    "epsilon",
    "eta",
    "C0",
    "R_list",
    "seed",
    "budget",
    "output_path",
];

/// Parses a configuration document; `fallback_command` supplies the command
/// when the document omits it (the CLI passes its subcommand here). A
/// command key that contradicts the fallback is rejected.
pub fn parse_config(
    text: &str,
    fallback_command: Option<Command>,
) -> Result<ExperimentConfig, ConfigError> {
    let mut seen: Vec<&str> = Vec::new();
    let mut cfg = ExperimentConfig::defaults(fallback_command.unwrap_or(Command::Threshold));
    let mut command_from_file = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ConfigError {
            line: Some(line_no),
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        if seen.contains(&key) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        // keep the borrow alive via the static key list
        seen.push(KNOWN_KEYS.iter().find(|k| **k == key).unwrap());
        let parse_f64 = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| err(format!("bad number '{v}': {e}")))
        };
        match key {
            "command" => {
                command_from_file =
                    Some(value.parse::<Command>().map_err(|e| err(e))?);
            }
            "d" => cfg.d = value.parse().map_err(|e| err(format!("bad d: {e}")))?,
            "m" => cfg.m = value.parse().map_err(|e| err(format!("bad m: {e}")))?,
            "alpha" => cfg.alpha = parse_f64(value)?,
            "p" => cfg.p = parse_f64(value)?,
            "c" => cfg.c = parse_f64(value)?,
            "beta" => cfg.beta = parse_f64(value)?,
            "epsilon" => cfg.epsilon = parse_f64(value)?,
            "eta" => cfg.eta = parse_f64(value)?,
            "C0" => cfg.c0 = parse_f64(value)?,
            "R_list" => {
                cfg.r_list = value
                    .split(',')
                    .map(|v| parse_f64(v.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "seed" => cfg.seed = value.parse().map_err(|e| err(format!("bad seed: {e}")))?,
            "budget" => {
                cfg.budget = value
                    .parse()
                    .map_err(|e| err(format!("bad budget: {e}")))?
            }
            "output_path" => cfg.output_path = value.to_string(),
            _ => unreachable!(),
        }
    }
    match (command_from_file, fallback_command) {
        (Some(file_cmd), Some(cli_cmd)) if file_cmd != cli_cmd => {
            return Err(ConfigError {
                line: None,
                msg: format!(
                    "config names command '{file_cmd}' but the invocation asked for '{cli_cmd}'"
                ),
            });
        }
        (Some(file_cmd), _) => cfg.command = file_cmd,
        (None, Some(cli_cmd)) => cfg.command = cli_cmd,
        (None, None) => {
            return Err(ConfigError {
                line: None,
                msg: "no command given (neither in config nor by the invocation)".into(),
            });
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
