//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is checked against
//! the schema of the selected suite before anything runs; missing keys take
//! their defaults, which are the acceptance thresholds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Other(String),
}

fn at(line: Option<usize>, message: String) -> ConfigError {
    match line {
        Some(line) => ConfigError::Line { line, message },
        None => ConfigError::Other(message),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Identities,
    Paraproduct,
    Commutators,
    Cancellation,
    Localization,
    Solve,
    Morrey,
    Seq,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Identities,
        Suite::Paraproduct,
        Suite::Commutators,
        Suite::Cancellation,
        Suite::Localization,
        Suite::Solve,
        Suite::Morrey,
        Suite::Seq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Paraproduct => "paraproduct",
            Suite::Commutators => "commutators",
            Suite::Cancellation => "cancellation",
            Suite::Localization => "localization",
            Suite::Solve => "solve",
            Suite::Morrey => "morrey",
            Suite::Seq => "seq",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn summary(self) -> &'static str {
        match self {
            Suite::Identities => {
                "multiplier identities: round trip, Plancherel, compositions, adjoints"
            }
            Suite::Paraproduct => {
                "partition of unity, paraproduct recombination, maximal-function constant"
            }
            Suite::Commutators => {
                "vanishing, mean-freeness, bilinearity, Euler gap, random ratio sweep"
            }
            Suite::Cancellation => {
                "neighboring-mode ladder: one product term grows, the commutator stays bounded"
            }
            Suite::Localization => "annulus localization and Poincaré ratios across resolutions",
            Suite::Solve => {
                "gradient flow to a half-harmonic map, fixed points, structure residual refinement"
            }
            Suite::Morrey => "Morrey profiles, exponent fits and annuli constants",
            Suite::Seq => "dyadic decay exponents and the sequence decay bound",
        }
    }

    pub fn keys(self) -> Vec<&'static KeySpec> {
        let own: &'static [KeySpec] = match self {
            Suite::Identities => IDENTITIES,
            Suite::Paraproduct => PARAPRODUCT,
            Suite::Commutators => COMMUTATORS,
            Suite::Cancellation => CANCELLATION,
            Suite::Localization => LOCALIZATION,
            Suite::Solve => SOLVE,
            Suite::Morrey => MORREY,
            Suite::Seq => SEQ,
        };
        let flow: &'static [KeySpec] = match self {
            Suite::Solve | Suite::Morrey => FLOW,
            _ => &[],
        };
        COMMON.iter().chain(own).chain(flow).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Integer `≥` the bound.
    Int(i64),
    /// Any integer.
    AnyInt,
    /// Power of two `≥ 8`.
    GridSize,
    /// Finite real `>` 0.
    Positive,
    /// Finite real `≥ 0`.
    NonNegative,
    /// Real in the open interval `(0, 1)`.
    Fraction,
    /// Any finite real.
    Real,
    /// Comma-separated integers `≥` the bound.
    IntList(i64),
    /// Comma-separated powers of two `≥ 8`.
    GridList,
    /// Comma-separated positive reals.
    PositiveList,
    /// Comma-separated finite reals.
    RealList,
    Text,
}

#[derive(Debug)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        help,
    }
}

static COMMON: &[KeySpec] = &[
    key(
        "suite",
        Kind::Text,
        "",
        "suite name; must match the command line if given",
    ),
    key(
        "seed",
        Kind::Int(0),
        "1",
        "base seed; trial i uses seed + i",
    ),
    key(
        "period",
        Kind::Positive,
        "2pi",
        "torus length L (accepts `pi` multiples)",
    ),
    key("out", Kind::Text, "results", "output directory"),
];

static IDENTITIES: &[KeySpec] = &[
    key("n", Kind::GridSize, "1024", "grid size"),
    key("trials", Kind::Int(1), "20", "random band-limited fields"),
    key(
        "tol",
        Kind::Positive,
        "1e-10",
        "max relative error of every identity",
    ),
];

static PARAPRODUCT: &[KeySpec] = &[
    key(
        "n",
        Kind::GridSize,
        "1024",
        "grid size for the product recombination",
    ),
    key("trials", Kind::Int(1), "100", "random pairs"),
    key(
        "ceiling",
        Kind::Int(1),
        "100",
        "highest mode of the random pairs",
    ),
    key(
        "decay",
        Kind::NonNegative,
        "0.5",
        "mode amplitudes scale like k^-decay",
    ),
    key(
        "cm_coarse",
        Kind::GridSize,
        "512",
        "coarse grid for the maximal constant",
    ),
    key(
        "cm_fine",
        Kind::GridSize,
        "2048",
        "fine grid for the maximal constant",
    ),
    key(
        "cm_ceiling",
        Kind::Int(1),
        "40",
        "highest mode for the maximal constant",
    ),
    key(
        "product_tol",
        Kind::Positive,
        "1e-12",
        "max |fg - Π1 - Π2 - Π3| / (|f| |g|)",
    ),
    key(
        "partition_tol",
        Kind::Positive,
        "1e-12",
        "max |Σ ψ_j - 1| over modes",
    ),
    key(
        "max_cm_drift",
        Kind::Positive,
        "0.10",
        "max relative change of C_M from coarse to fine",
    ),
];

static COMMUTATORS: &[KeySpec] = &[
    key("n", Kind::GridSize, "512", "coarse grid size"),
    key(
        "refine",
        Kind::GridSize,
        "4",
        "fine grid is n * refine (power of two)",
    ),
    key("trials", Kind::Int(1), "200", "random (Q, u) pairs"),
    key(
        "unit_maps",
        Kind::Int(0),
        "50",
        "random unit maps for the Euler gap",
    ),
    key("ceiling", Kind::Int(1), "32", "highest mode of Q and u"),
    key(
        "decay",
        Kind::NonNegative,
        "1.0",
        "mode amplitudes scale like k^-decay",
    ),
    key("rows", Kind::Int(1), "2", "rows of Q"),
    key("m", Kind::Int(2), "3", "components of u (columns of Q)"),
    key(
        "vanish_tol",
        Kind::Positive,
        "1e-12",
        "max relative size for constant Q or u",
    ),
    key(
        "mean_tol",
        Kind::Positive,
        "1e-10",
        "max relative |mean| of each output",
    ),
    key(
        "gap_tol",
        Kind::Positive,
        "1e-10",
        "max Euler commutator gap",
    ),
    key(
        "bilinear_tol",
        Kind::Positive,
        "1e-10",
        "max relative bilinearity defect",
    ),
    key(
        "max_sweep_change",
        Kind::Positive,
        "0.20",
        "max relative change of max rT, max rS from n to n*refine",
    ),
];

static CANCELLATION: &[KeySpec] = &[
    key("n", Kind::GridSize, "2048", "grid size"),
    key(
        "ladder",
        Kind::IntList(1),
        "8,16,32,64,128",
        "frequencies K",
    ),
    key(
        "min_growth",
        Kind::Positive,
        "1.25",
        "min factor of rLone per ladder step",
    ),
    key(
        "median_factor",
        Kind::Positive,
        "2.0",
        "rT stays within this factor of its median",
    ),
];

static LOCALIZATION: &[KeySpec] = &[
    key(
        "n",
        Kind::GridSize,
        "1024",
        "coarse grid size; the fine grid is 2n",
    ),
    key("trials", Kind::Int(1), "50", "smooth random functions"),
    key("ceiling", Kind::Int(1), "8", "highest mode"),
    key(
        "decay",
        Kind::NonNegative,
        "1.0",
        "mode amplitudes scale like k^-decay",
    ),
    key(
        "center",
        Kind::Real,
        "0",
        "center of the unit interval and annuli",
    ),
    key(
        "max_change",
        Kind::Positive,
        "0.05",
        "max relative change of each ratio from n to 2n",
    ),
    key(
        "scale_tol",
        Kind::Positive,
        "1e-12",
        "max relative change of the Poincaré ratio under f -> 2f",
    ),
];

static FLOW: &[KeySpec] = &[
    key("m", Kind::Int(2), "2", "target sphere S^(m-1)"),
    key("degree", Kind::AnyInt, "1", "degree of the initial map"),
    key(
        "amplitude",
        Kind::NonNegative,
        "0.2",
        "tangential perturbation size, below 0.5",
    ),
    key(
        "ceiling",
        Kind::Int(1),
        "8",
        "highest mode of the perturbation",
    ),
    key(
        "decay",
        Kind::NonNegative,
        "1.0",
        "perturbation amplitudes scale like k^-decay",
    ),
    key("flow_seed", Kind::Int(0), "7", "seed of the perturbation"),
    key(
        "initial_step",
        Kind::Positive,
        "1.0",
        "first trial step in units of 1/max|xi|",
    ),
    key("backtrack", Kind::Fraction, "0.5", "step shrink factor"),
    key(
        "sufficient_decrease",
        Kind::Positive,
        "1e-4",
        "Armijo constant",
    ),
    key("max_iters", Kind::Int(1), "5000", "iteration cap"),
    key(
        "tolerance",
        Kind::Positive,
        "1e-7",
        "stop when the dual residual falls below this",
    ),
];

static SOLVE: &[KeySpec] = &[
    key("n", Kind::GridSize, "512", "grid size"),
    key("energy_tol", Kind::Positive, "1e-4", "max |E - 2π|degree||"),
    key(
        "residual_tol",
        Kind::Positive,
        "1e-6",
        "max final dual residual",
    ),
    key(
        "fixed_degrees",
        Kind::IntList(0),
        "0,1,2,3,4,5,6,7,8",
        "degrees checked as fixed points",
    ),
    key(
        "fixed_tol",
        Kind::Positive,
        "1e-10",
        "max residual and structure residual of degree maps",
    ),
    key(
        "refine_sizes",
        Kind::GridList,
        "256,512,1024,2048",
        "grids of the structure refinement study",
    ),
    key(
        "refine_trials",
        Kind::Int(1),
        "20",
        "projected random maps per grid",
    ),
    key(
        "refine_m",
        Kind::Int(2),
        "3",
        "components of the random unit maps",
    ),
    key(
        "refine_decay",
        Kind::NonNegative,
        "1.0",
        "noise amplitudes scale like k^-decay, modes up to n/8",
    ),
    key(
        "max_slope",
        Kind::Real,
        "-1.0",
        "max log-log slope of the structure residual",
    ),
];

static MORREY: &[KeySpec] = &[
    key("n", Kind::GridSize, "512", "grid size"),
    key("centers", Kind::RealList, "0,1,2.5", "profile centers"),
    key(
        "profile_tol",
        Kind::Positive,
        "1e-8",
        "max |E(r) - 2r| for the degree-1 map",
    ),
    key(
        "beta_tol",
        Kind::Positive,
        "0.01",
        "max |beta - 1| for the degree-1 map",
    ),
    key(
        "beta_min",
        Kind::Real,
        "0.9",
        "min fitted beta of the flow solution",
    ),
    key(
        "max_annuli_drift",
        Kind::Positive,
        "0.20",
        "max drift of the annuli constant",
    ),
];

static SEQ: &[KeySpec] = &[
    key(
        "c_values",
        Kind::PositiveList,
        "0.1,1,10,100",
        "constants for the exponent table",
    ),
    key(
        "trials",
        Kind::Int(1),
        "100",
        "random hypothesis-satisfying sequences",
    ),
    key(
        "head",
        Kind::Int(1),
        "40",
        "indices k <= 0 carried by each sequence",
    ),
    key(
        "tail",
        Kind::Int(1),
        "5",
        "indices k >= 1 carried by each sequence",
    ),
    key("tau_expected", Kind::Real, "0.146447", "tau at C = 1"),
    key("beta_expected", Kind::Real, "0.22845", "beta at C = 1"),
    key("tau_tol", Kind::Positive, "1e-6", "tolerance on tau"),
    key(
        "beta_tol",
        Kind::Positive,
        "1e-5",
        "tolerance on beta (reference has five digits)",
    ),
    key(
        "bound_slack",
        Kind::Positive,
        "1e-12",
        "relative slack for sequences that saturate the bound",
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    List(Vec<f64>),
    Text(String),
}

fn parse_real(raw: &str) -> Option<f64> {
    let s = raw.trim();
    let v = match s.strip_suffix("pi") {
        Some(prefix) => {
            let prefix = prefix.trim().trim_end_matches('*').trim();
            let factor = if prefix.is_empty() {
                1.0
            } else {
                prefix.parse::<f64>().ok()?
            };
            factor * std::f64::consts::PI
        }
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let int = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| format!("`{}` is not an integer", s.trim()))
    };
    let real =
        |s: &str| parse_real(s).ok_or_else(|| format!("`{}` is not a finite number", s.trim()));
    let grid = |s: &str| -> Result<i64, String> {
        let v = int(s)?;
        if v >= 8 && (v as u64).is_power_of_two() {
            Ok(v)
        } else {
            Err(format!("grid size {v} is not a power of two >= 8"))
        }
    };
    fn list(s: &str) -> Vec<&str> {
        s.split(',').collect()
    }
    Ok(match kind {
        Kind::Int(min) => {
            let v = int(raw)?;
            if v < min {
                return Err(format!("{v} is below the minimum {min}"));
            }
            Value::Int(v)
        }
        Kind::AnyInt => Value::Int(int(raw)?),
        Kind::GridSize => {
            // `refine` reuses this kind for factors; allow 1, 2 and 4 as well.
            let v = int(raw)?;
            if v >= 1 && (v as u64).is_power_of_two() && (v < 8 || grid(raw).is_ok()) {
                Value::Int(v)
            } else {
                return Err(format!("{v} is not a power of two"));
            }
        }
        Kind::Positive | Kind::NonNegative | Kind::Fraction | Kind::Real => {
            let v = real(raw)?;
            let ok = match kind {
                Kind::Positive => v > 0.0,
                Kind::NonNegative => v >= 0.0,
                Kind::Fraction => v > 0.0 && v < 1.0,
                _ => true,
            };
            if !ok {
                return Err(format!("{v} is out of range"));
            }
            Value::Float(v)
        }
        Kind::IntList(min) => Value::List(
            list(raw)
                .into_iter()
                .map(|s| {
                    let v = int(s)?;
                    if v < min {
                        Err(format!("{v} is below the minimum {min}"))
                    } else {
                        Ok(v as f64)
                    }
                })
                .collect::<Result<_, _>>()?,
        ),
        Kind::GridList => Value::List(
            list(raw)
                .into_iter()
                .map(|s| grid(s).map(|v| v as f64))
                .collect::<Result<_, _>>()?,
        ),
        Kind::PositiveList | Kind::RealList => Value::List(
            list(raw)
                .into_iter()
                .map(|s| {
                    let v = real(s)?;
                    if kind == Kind::PositiveList && v <= 0.0 {
                        Err(format!("{v} is not positive"))
                    } else {
                        Ok(v)
                    }
                })
                .collect::<Result<_, _>>()?,
        ),
        Kind::Text => Value::Text(raw.trim().to_owned()),
    })
}

/// Validated settings for one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    values: BTreeMap<&'static str, Value>,
    /// Line each explicitly set key came from.
    lines: BTreeMap<&'static str, usize>,
}

impl ExperimentConfig {
    /// All defaults.
    pub fn defaults(suite: Suite) -> Self {
        Self::parse(suite, "").expect("defaults are valid")
    }

    pub fn parse(suite: Suite, text: &str) -> Result<Self, ConfigError> {
        let schema = suite.keys();
        let mut values = BTreeMap::new();
        let mut lines = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| {
                at(
                    Some(line),
                    format!("expected `key = value`, found `{content}`"),
                )
            })?;
            let k = k.trim();
            let spec = schema.iter().find(|s| s.name == k).ok_or_else(|| {
                at(
                    Some(line),
                    format!("unknown key `{k}` for suite {}", suite.name()),
                )
            })?;
            if lines.contains_key(spec.name) {
                return Err(at(Some(line), format!("duplicate key `{k}`")));
            }
            let value =
                parse_value(spec.kind, v).map_err(|m| at(Some(line), format!("{k}: {m}")))?;
            if spec.name == "suite" {
                let Value::Text(name) = &value else {
                    unreachable!()
                };
                if Suite::parse(name) != Some(suite) {
                    return Err(at(
                        Some(line),
                        format!("config is for suite `{name}`, not {}", suite.name()),
                    ));
                }
            }
            values.insert(spec.name, value);
            lines.insert(spec.name, line);
        }
        for spec in &schema {
            if !values.contains_key(spec.name) {
                let value = if spec.kind == Kind::Text {
                    Value::Text(spec.default.to_owned())
                } else {
                    parse_value(spec.kind, spec.default).expect("schema defaults parse")
                };
                values.insert(spec.name, value);
            }
        }
        let cfg = Self {
            suite,
            values,
            lines,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces one value, as a command-line flag would.
    pub fn set(&mut self, name: &str, raw: &str) -> Result<(), ConfigError> {
        let spec = self
            .suite
            .keys()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| {
                at(
                    None,
                    format!("suite {} has no `{name}` setting", self.suite.name()),
                )
            })?;
        let value = parse_value(spec.kind, raw).map_err(|m| at(None, format!("{name}: {m}")))?;
        self.values.insert(spec.name, value);
        self.lines.remove(spec.name);
        self.validate()
    }

    fn line(&self, name: &str) -> Option<usize> {
        self.lines.get(name).copied()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let has = |k: &str| self.values.contains_key(k);
        let grids: Vec<i64> = ["n", "cm_coarse", "cm_fine"]
            .iter()
            .filter(|k| has(k))
            .map(|k| self.int(k))
            .collect();
        if let Some(&smallest) = grids.iter().min() {
            for k in ["ceiling", "cm_ceiling"] {
                if has(k) && self.int(k) >= smallest / 2 {
                    return Err(at(
                        self.line(k),
                        format!(
                            "{k} = {} must stay below n/2 = {}",
                            self.int(k),
                            smallest / 2
                        ),
                    ));
                }
            }
        }
        if has("ladder") {
            let n = self.int("n");
            if let Some(&k) = self
                .list("ladder")
                .iter()
                .find(|&&k| k + 1.0 >= (n / 2) as f64)
            {
                return Err(at(
                    self.line("ladder"),
                    format!("ladder entry {k} needs K + 1 < n/2"),
                ));
            }
        }
        if has("amplitude") && self.float("amplitude") >= 0.5 {
            return Err(at(
                self.line("amplitude"),
                "amplitude must be below 0.5".into(),
            ));
        }
        if has("refine_sizes") {
            if let Some(&n) = self.list("refine_sizes").iter().find(|&&n| n < 32.0) {
                return Err(at(
                    self.line("refine_sizes"),
                    format!("refine size {n} leaves no modes below n/8"),
                ));
            }
            if self.list("refine_sizes").len() < 2 {
                return Err(at(
                    self.line("refine_sizes"),
                    "slope needs at least two sizes".into(),
                ));
            }
        }
        let needs_room = matches!(
            self.suite,
            Suite::Localization | Suite::Morrey | Suite::Solve
        );
        if needs_room && self.float("period") < 4.0 {
            return Err(at(
                self.line("period"),
                format!("suite {} needs period >= 4", self.suite.name()),
            ));
        }
        if self.suite == Suite::Cancellation
            && (self.float("period") - std::f64::consts::TAU).abs() > 1e-12
        {
            return Err(at(
                self.line("period"),
                "the ladder family is defined for period 2pi".into(),
            ));
        }
        if self.suite == Suite::Commutators && self.int("n") * self.int("refine") > 1 << 20 {
            return Err(at(self.line("refine"), "fine grid above 2^20".into()));
        }
        Ok(())
    }

    fn get(&self, name: &str) -> &Value {
        self.values
            .get(name)
            .unwrap_or_else(|| panic!("suite {} has no key {name}", self.suite.name()))
    }

    pub fn int(&self, name: &str) -> i64 {
        match self.get(name) {
            Value::Int(v) => *v,
            other => panic!("{name} is {other:?}, not an integer"),
        }
    }

    pub fn usize(&self, name: &str) -> usize {
        self.int(name) as usize
    }

    pub fn seed(&self) -> u64 {
        self.int("seed") as u64
    }

    pub fn float(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Float(v) => *v,
            Value::Int(v) => *v as f64,
            other => panic!("{name} is {other:?}, not a number"),
        }
    }

    pub fn list(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Value::List(v) => v,
            other => panic!("{name} is {other:?}, not a list"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Text(v) => v,
            other => panic!("{name} is {other:?}, not text"),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.text("out"))
    }
}

/// Keys, defaults and descriptions of every suite.
pub fn describe() -> String {
    let mut s = String::new();
    for suite in Suite::ALL {
        let _ = writeln!(s, "{}: {}", suite.name(), suite.summary());
        for k in suite.keys() {
            let default = if k.default.is_empty() { "-" } else { k.default };
            let _ = writeln!(s, "    {:<20} {:<18} {}", k.name, default, k.help);
        }
    }
    s
}
