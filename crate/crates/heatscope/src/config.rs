//! Experiment configuration: JSON schema, conversion into core types and
//! validation. Validation is pure and returns diagnostics as data.

use std::fmt;
use std::str::FromStr;

use heatscope_core::diophantine::{ClassifyThresholds, Real, MAX_CF_DEPTH};
use heatscope_core::pointsets::Generator;
use heatscope_core::PI_SQUARED;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Gamma,
    Remez,
    Spectral,
    ProductSpectral,
    HeatObs,
    PointObs,
    NodalDemo,
    LrChain,
    ProductObs,
    Diophantine,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::Gamma,
        Kind::Remez,
        Kind::Spectral,
        Kind::ProductSpectral,
        Kind::HeatObs,
        Kind::PointObs,
        Kind::NodalDemo,
        Kind::LrChain,
        Kind::ProductObs,
        Kind::Diophantine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Gamma => "gamma",
            Kind::Remez => "remez",
            Kind::Spectral => "spectral",
            Kind::ProductSpectral => "product_spectral",
            Kind::HeatObs => "heat_obs",
            Kind::PointObs => "point_obs",
            Kind::NodalDemo => "nodal_demo",
            Kind::LrChain => "lr_chain",
            Kind::ProductObs => "product_obs",
            Kind::Diophantine => "diophantine",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Kind::ALL.iter().map(|k| k.as_str()).collect();
            format!("unknown experiment kind `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Eigenvalue convention: `"pi2"` for `π²` or an explicit positive number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Named(String),
    Value(f64),
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec::Named("pi2".into())
    }
}

impl ScaleSpec {
    pub fn value(&self) -> Option<f64> {
        match self {
            ScaleSpec::Named(s) if s == "pi2" => Some(PI_SQUARED),
            ScaleSpec::Named(_) => None,
            ScaleSpec::Value(v) if *v > 0.0 && v.is_finite() => Some(*v),
            ScaleSpec::Value(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub scale: ScaleSpec,
}

fn one() -> usize {
    1
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec { n: 1, scale: ScaleSpec::default() }
    }
}

/// Point-set descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    OmegaAlpha { alpha: f64, count: usize },
    OmegaExp { count: usize },
    Singleton { point: Vec<f64> },
    UniformGrid { per_axis: Vec<usize> },
    Cantor { level: u32, ratio: f64 },
    Product { a: Box<GeneratorSpec>, b: Box<GeneratorSpec> },
    Explicit { points: Vec<Vec<f64>> },
    /// `count` uniform points in `(lo, hi)^dimension` from the run seed.
    Random {
        count: usize,
        dimension: usize,
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
}

fn default_lo() -> f64 {
    0.05
}

fn default_hi() -> f64 {
    0.95
}

impl GeneratorSpec {
    /// Core generator; `Random` is drawn by the caller.
    pub fn to_generator(&self) -> Option<Generator> {
        Some(match self {
            GeneratorSpec::OmegaAlpha { alpha, count } => Generator::OmegaAlpha { alpha: *alpha, count: *count },
            GeneratorSpec::OmegaExp { count } => Generator::OmegaExp { count: *count },
            GeneratorSpec::Singleton { point } => Generator::Singleton { point: point.clone() },
            GeneratorSpec::UniformGrid { per_axis } => Generator::UniformGrid { per_axis: per_axis.clone() },
            GeneratorSpec::Cantor { level, ratio } => Generator::Cantor { level: *level, ratio: *ratio },
            GeneratorSpec::Product { a, b } => Generator::Product {
                a: Box::new(a.to_generator()?),
                b: Box::new(b.to_generator()?),
            },
            GeneratorSpec::Explicit { points } => Generator::Explicit { points: points.clone() },
            GeneratorSpec::Random { .. } => return None,
        })
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            GeneratorSpec::OmegaAlpha { .. } | GeneratorSpec::OmegaExp { .. } | GeneratorSpec::Cantor { .. } => Some(1),
            GeneratorSpec::Singleton { point } => Some(point.len()),
            GeneratorSpec::UniformGrid { per_axis } => Some(per_axis.len()),
            GeneratorSpec::Product { a, b } => Some(a.dimension()? + b.dimension()?),
            GeneratorSpec::Explicit { points } => points.first().map(Vec::len),
            GeneratorSpec::Random { dimension, .. } => Some(*dimension),
        }
    }

    fn check(&self, field: &str, out: &mut Vec<Diagnostic>) {
        let mut bad = |msg: &str| out.push(Diagnostic::new(field, msg));
        match self {
            GeneratorSpec::OmegaAlpha { alpha, count } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    bad("alpha must be positive");
                }
                if *count == 0 {
                    bad("count must be at least 1");
                }
            }
            GeneratorSpec::OmegaExp { count } => {
                if *count == 0 || *count > 1000 {
                    bad("count must lie in 1..=1000");
                }
            }
            GeneratorSpec::Singleton { point } => {
                if point.is_empty() || point.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                    bad("point must be nonempty with coordinates in (0, 1)");
                }
            }
            GeneratorSpec::UniformGrid { per_axis } => {
                if per_axis.is_empty() || per_axis.contains(&0) {
                    bad("per_axis must be nonempty with positive entries");
                }
            }
            GeneratorSpec::Cantor { level, ratio } => {
                if *level > 20 {
                    bad("level must be at most 20");
                }
                if !(*ratio > 0.0 && *ratio < 0.5) {
                    bad("ratio must lie in (0, 1/2)");
                }
            }
            GeneratorSpec::Product { a, b } => {
                a.check(&format!("{field}.a"), out);
                b.check(&format!("{field}.b"), out);
            }
            GeneratorSpec::Explicit { points } => {
                if points.is_empty() {
                    bad("points must be nonempty");
                }
                let d = points.first().map_or(0, Vec::len);
                if d == 0 || points.iter().any(|p| p.len() != d) {
                    bad("points must share one positive dimension");
                }
                if points.iter().flatten().any(|x| !(*x >= 0.0 && *x <= 1.0)) {
                    bad("coordinates must lie in [0, 1]");
                }
            }
            GeneratorSpec::Random { count, dimension, lo, hi } => {
                if *count == 0 || *dimension == 0 {
                    bad("count and dimension must be positive");
                }
                if !(0.0 < *lo && lo < hi && *hi < 1.0) {
                    bad("need 0 < lo < hi < 1");
                }
            }
        }
    }
}

/// A point of `(0,1)` for the diophantine and point-observation panels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RealSpec {
    /// `[num, den]`
    Rational([i64; 2]),
    /// `[a, b, d, c]` for `(a + b√d)/c`
    Surd([i64; 4]),
    Float(f64),
    Golden,
}

impl RealSpec {
    pub fn to_real(&self) -> Result<Real, String> {
        match self {
            RealSpec::Rational([n, d]) => Real::rational(i128::from(*n), i128::from(*d)),
            RealSpec::Surd([a, b, d, c]) => {
                Real::surd(i128::from(*a), i128::from(*b), i128::from(*d), i128::from(*c))
            }
            RealSpec::Float(x) => Real::float(*x),
            RealSpec::Golden => Ok(Real::golden()),
        }
        .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Exact,
    Greedy,
    FirstK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpec {
    L2,
    Linf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceSpec {
    SupL1,
    L2Sum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// `None` selects `1e-10·√N`.
    #[serde(default)]
    pub nullspace: Option<f64>,
    /// Relative agreement required between a worst-case value and its witness.
    #[serde(default = "default_witness_tol")]
    pub witness: f64,
    /// Relative change allowed when the time quadrature is doubled.
    #[serde(default = "default_refinement_tol")]
    pub refinement: f64,
    #[serde(default = "default_zero_trace")]
    pub zero_trace: f64,
}

fn default_witness_tol() -> f64 {
    1e-8
}

fn default_refinement_tol() -> f64 {
    1e-3
}

fn default_zero_trace() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            nullspace: None,
            witness: default_witness_tol(),
            refinement: default_refinement_tol(),
            zero_trace: default_zero_trace(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
}

fn default_starts() -> usize {
    32
}

fn default_iterations() -> usize {
    200
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec { starts: default_starts(), iterations: default_iterations() }
    }
}

/// Classifier thresholds of the diophantine kind; absent fields keep the
/// defaults of [`ClassifyThresholds`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    #[serde(default)]
    pub window_start: Option<u64>,
    #[serde(default)]
    pub badly_min_exponent: Option<f64>,
    #[serde(default)]
    pub liouville_max_exponent: Option<f64>,
    #[serde(default)]
    pub sustain: Option<usize>,
    #[serde(default)]
    pub zero_tol: Option<f64>,
    #[serde(default)]
    pub min_k_max: Option<u64>,
}

impl ThresholdSpec {
    pub fn resolve(&self) -> ClassifyThresholds {
        let d = ClassifyThresholds::default();
        ClassifyThresholds {
            window_start: self.window_start.unwrap_or(d.window_start),
            badly_min_exponent: self.badly_min_exponent.unwrap_or(d.badly_min_exponent),
            liouville_max_exponent: self.liouville_max_exponent.unwrap_or(d.liouville_max_exponent),
            sustain: self.sustain.unwrap_or(d.sustain),
            zero_tol: self.zero_tol.unwrap_or(d.zero_tol),
            min_k_max: self.min_k_max.unwrap_or(d.min_k_max),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory used when `--out` is not given.
    #[serde(default)]
    pub dir: Option<String>,
}

/// One experiment. Fields not used by the selected kind are ignored, and
/// [`validate`] reports the ones it needs but lacks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub omega: Option<GeneratorSpec>,
    #[serde(default)]
    pub omega2: Option<GeneratorSpec>,
    /// Factor dimensions `[n1, n2]` for the product kinds.
    #[serde(default)]
    pub dims: Option<[usize; 2]>,
    /// Λ sweep, strictly ascending.
    #[serde(default)]
    pub cutoffs: Option<Vec<f64>>,
    /// Inclusive `[k_min, k_max]`.
    #[serde(default)]
    pub k_range: Option<[usize; 2]>,
    /// Maximal frequencies `K` (remez, point_obs).
    #[serde(default)]
    pub frequencies: Option<Vec<u32>>,
    /// Time horizons `T`, strictly ascending.
    #[serde(default)]
    pub horizons: Option<Vec<f64>>,
    #[serde(default)]
    pub x0: Option<Vec<RealSpec>>,
    /// Eigenvalue level `r` (nodal_demo), in units of the scale.
    #[serde(default)]
    pub level: Option<u64>,
    #[serde(default)]
    pub k_max: Option<u64>,
    #[serde(default)]
    pub depth: Option<usize>,
    /// Number of random draws (remez, heat_obs, lr_chain panel).
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub method: Option<MethodSpec>,
    #[serde(default)]
    pub norm: Option<NormSpec>,
    #[serde(default)]
    pub trace: Option<TraceSpec>,
    /// Product cutoff (product_obs) or slice cutoff (heat_obs, lr_chain).
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub schedule_count: Option<usize>,
    #[serde(default)]
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub thresholds: ThresholdSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn empty() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn scale(&self) -> f64 {
        self.domain.scale.value().unwrap_or(PI_SQUARED)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// A validation finding tied to a config field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: &str, message: &str) -> Self {
        Diagnostic { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn ascending_positive(field: &str, v: &Option<Vec<f64>>, out: &mut Vec<Diagnostic>) {
    match v {
        None => out.push(Diagnostic::new(field, "required for this experiment kind")),
        Some(v) if v.is_empty() => out.push(Diagnostic::new(field, "must be nonempty")),
        Some(v) => {
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                out.push(Diagnostic::new(field, "entries must be positive and finite"));
            }
            if v.windows(2).any(|w| !(w[0] < w[1])) {
                out.push(Diagnostic::new(field, "must be in strictly ascending order"));
            }
        }
    }
}

fn require<T>(field: &str, v: &Option<T>, out: &mut Vec<Diagnostic>) {
    if v.is_none() {
        out.push(Diagnostic::new(field, "required for this experiment kind"));
    }
}

fn positive_count(field: &str, v: Option<usize>, out: &mut Vec<Diagnostic>) {
    match v {
        None => out.push(Diagnostic::new(field, "required for this experiment kind")),
        Some(0) => out.push(Diagnostic::new(field, "must be at least 1")),
        _ => {}
    }
}

fn omega_dim(field: &str, g: &Option<GeneratorSpec>, dim: usize, out: &mut Vec<Diagnostic>) {
    match g {
        None => out.push(Diagnostic::new(field, "required for this experiment kind")),
        Some(g) => {
            g.check(field, out);
            if g.dimension().is_some_and(|d| d != dim) {
                out.push(Diagnostic::new(field, &format!("dimension must be {dim}")));
            }
        }
    }
}

fn x0_panel(cfg: &ExperimentConfig, out: &mut Vec<Diagnostic>) {
    match &cfg.x0 {
        None => out.push(Diagnostic::new("x0", "required for this experiment kind")),
        Some(v) if v.is_empty() => out.push(Diagnostic::new("x0", "must be nonempty")),
        Some(v) => {
            for (i, r) in v.iter().enumerate() {
                if let Err(e) = r.to_real() {
                    out.push(Diagnostic::new(&format!("x0[{i}]"), &e));
                }
            }
        }
    }
}

/// Schema and range checks for `kind`; never touches the filesystem.
pub fn validate(cfg: &ExperimentConfig, kind: Kind) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Some(k) = cfg.kind {
        if k != kind {
            out.push(Diagnostic::new("kind", &format!("config is for `{k}` but `{kind}` was requested")));
        }
    }
    if cfg.domain.scale.value().is_none() {
        out.push(Diagnostic::new("domain.scale", "must be \"pi2\" or a positive number"));
    }
    if cfg.domain.n == 0 || cfg.domain.n > 8 {
        out.push(Diagnostic::new("domain.n", "must lie in 1..=8"));
    }
    let n = cfg.domain.n;
    let t = &cfg.tolerances;
    if t.nullspace.is_some_and(|v| !(v > 0.0)) {
        out.push(Diagnostic::new("tolerances.nullspace", "must be positive"));
    }
    for (name, v) in [("tolerances.witness", t.witness), ("tolerances.refinement", t.refinement), ("tolerances.zero_trace", t.zero_trace)] {
        if !(v > 0.0 && v < 1.0) {
            out.push(Diagnostic::new(name, "must lie in (0, 1)"));
        }
    }
    if cfg.search.starts == 0 {
        out.push(Diagnostic::new("search.starts", "must be at least 1"));
    }
    let k_range = |out: &mut Vec<Diagnostic>, lo_min: usize| match cfg.k_range {
        None => out.push(Diagnostic::new("k_range", "required for this experiment kind")),
        Some([a, b]) => {
            if a < lo_min || a > b {
                out.push(Diagnostic::new("k_range", &format!("need {lo_min} <= k_min <= k_max")));
            }
        }
    };
    let one_d = |out: &mut Vec<Diagnostic>| {
        if n != 1 {
            out.push(Diagnostic::new("domain.n", "this experiment kind is one-dimensional"));
        }
    };
    match kind {
        Kind::Gamma => {
            one_d(&mut out);
            omega_dim("omega", &cfg.omega, 1, &mut out);
            k_range(&mut out, 2);
        }
        Kind::Remez => {
            one_d(&mut out);
            omega_dim("omega", &cfg.omega, 1, &mut out);
            match &cfg.frequencies {
                None => out.push(Diagnostic::new("frequencies", "required for this experiment kind")),
                Some(f) if f.is_empty() => out.push(Diagnostic::new("frequencies", "must be nonempty")),
                Some(f) if f.contains(&0) => out.push(Diagnostic::new("frequencies", "entries must be positive")),
                _ => {}
            }
            positive_count("samples", cfg.samples, &mut out);
            if cfg.grid_size.is_some_and(|g| g < 2) {
                out.push(Diagnostic::new("grid_size", "must be at least 2"));
            }
        }
        Kind::Spectral => {
            omega_dim("omega", &cfg.omega, n, &mut out);
            ascending_positive("cutoffs", &cfg.cutoffs, &mut out);
        }
        Kind::ProductSpectral | Kind::ProductObs => {
            match cfg.dims {
                None => out.push(Diagnostic::new("dims", "required for this experiment kind")),
                Some([a, b]) => {
                    if a == 0 || b == 0 || a + b != n {
                        out.push(Diagnostic::new("dims", "factor dimensions must be positive and sum to domain.n"));
                    } else {
                        omega_dim("omega", &cfg.omega, a, &mut out);
                        omega_dim("omega2", &cfg.omega2, b, &mut out);
                    }
                }
            }
            ascending_positive("cutoffs", &cfg.cutoffs, &mut out);
            if kind == Kind::ProductSpectral {
                if cfg.cutoffs.as_ref().is_some_and(|c| c.len() < 3) {
                    out.push(Diagnostic::new("cutoffs", "need at least 3 cutoffs for the factor fits"));
                }
            } else {
                ascending_positive("horizons", &cfg.horizons, &mut out);
                require("cutoff", &cfg.cutoff, &mut out);
                if cfg.horizons.as_ref().is_some_and(|h| h.len() < 2) {
                    out.push(Diagnostic::new("horizons", "need at least 2 horizons for the factor cost fit"));
                }
                if cfg.cutoffs.as_ref().is_some_and(|c| c.len() < 3) {
                    out.push(Diagnostic::new("cutoffs", "need at least 3 cutoffs for the factor fit"));
                }
            }
        }
        Kind::HeatObs => {
            omega_dim("omega", &cfg.omega, n, &mut out);
            ascending_positive("horizons", &cfg.horizons, &mut out);
            require("cutoff", &cfg.cutoff, &mut out);
            positive_count("samples", cfg.samples, &mut out);
        }
        Kind::PointObs => {
            one_d(&mut out);
            x0_panel(cfg, &mut out);
            match &cfg.frequencies {
                None => out.push(Diagnostic::new("frequencies", "required for this experiment kind")),
                Some(f) if f.is_empty() => out.push(Diagnostic::new("frequencies", "must be nonempty")),
                Some(f) if f.contains(&0) || f.windows(2).any(|w| w[0] >= w[1]) => {
                    out.push(Diagnostic::new("frequencies", "entries must be positive and strictly ascending"))
                }
                _ => {}
            }
            ascending_positive("horizons", &cfg.horizons, &mut out);
        }
        Kind::NodalDemo => {
            omega_dim("omega", &cfg.omega, n, &mut out);
            match cfg.level {
                None => out.push(Diagnostic::new("level", "required for this experiment kind")),
                Some(0) => out.push(Diagnostic::new("level", "must be positive")),
                _ => {}
            }
        }
        Kind::LrChain => {
            omega_dim("omega", &cfg.omega, n, &mut out);
            ascending_positive("horizons", &cfg.horizons, &mut out);
            require("cutoff", &cfg.cutoff, &mut out);
            positive_count("samples", cfg.samples, &mut out);
            if cfg.schedule_count.is_some_and(|c| c < 2) {
                out.push(Diagnostic::new("schedule_count", "must be at least 2"));
            }
        }
        Kind::Diophantine => {
            x0_panel(cfg, &mut out);
            match cfg.k_max {
                None => out.push(Diagnostic::new("k_max", "required for this experiment kind")),
                Some(0) => out.push(Diagnostic::new("k_max", "must be at least 1")),
                Some(k) if k > 10_000_000 => out.push(Diagnostic::new("k_max", "must be at most 10^7")),
                _ => {}
            }
            if cfg.depth.is_some_and(|d| d > MAX_CF_DEPTH) {
                out.push(Diagnostic::new("depth", "must be at most 40"));
            }
            let th = cfg.thresholds.resolve();
            if !(th.liouville_max_exponent < th.badly_min_exponent) {
                out.push(Diagnostic::new("thresholds", "liouville_max_exponent must lie below badly_min_exponent"));
            }
            if !(th.zero_tol >= 0.0) {
                out.push(Diagnostic::new("thresholds.zero_tol", "must be nonnegative"));
            }
        }
    }
    if let Some(c) = cfg.cutoff {
        if !(c > 0.0 && c.is_finite()) {
            out.push(Diagnostic::new("cutoff", "must be positive and finite"));
        }
    }
    out
}
