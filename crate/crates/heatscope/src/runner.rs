//! Dispatch of validated configs to the core crate.
//!
//! Sweeps run on a rayon pool and collect in input order; every random draw
//! comes from `substream(seed, index)` with a fixed index per sub-experiment,
//! so results do not depend on the thread count.

use heatscope_core::diophantine::{
    classify, continued_fraction, exponents, nodal_gap_profile, Real,
};
use heatscope_core::eigenbasis::{multiplicity, CoefVec, SpectrumSlice};
use heatscope_core::heat::{
    fit_obs_cost, lr_schedule, obs_ratio, product_obs_check, telescoping_verify, worst_case_obs, ObsConstant,
    ObsExperiment, ObsMethod, ProductObsSetup, ScheduleVariant, TelescopingOptions, TerminalNorm, TimeQuadrature,
    TraceKind, WorstCaseOptions,
};
use heatscope_core::pointsets::{
    fit_growth_samples, gamma_exact, gamma_first_k, gamma_greedy_leja, log_log_exponent, GammaEstimate, GammaMethod,
    GrowthLaw, PointSet,
};
use heatscope_core::remez::{remez_verify, RemezOptions};
use heatscope_core::rng::{normal_vec, substream};
use heatscope_core::spectral::{
    beta_grid, fit_growth, fit_growth_at, nullspace_witness, product_compose_check, spectral_constant,
    ProductSetup, SearchOptions, SpectralConstant, SpectralFit,
};
use heatscope_core::stats::fit_line;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{validate, ExperimentConfig, GeneratorSpec, Kind, MethodSpec, NormSpec, TraceSpec};
use crate::error::{ErrorClass, RunError};
use crate::output::{config_hash, float_value, floats_value, ResultRecord, Table};

/// Stream indices reserved for random observation sets; sample streams
/// count up from 0.
pub const OMEGA_STREAM: u64 = u64::MAX;
pub const OMEGA2_STREAM: u64 = u64::MAX - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub threads: usize,
    pub strict: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { threads: 1, strict: false }
    }
}

type Res<T> = Result<T, RunError>;

/// Validates, runs and, in strict mode, rejects a run that raised warnings.
pub fn run(cfg: &ExperimentConfig, kind: Kind, options: &RunOptions) -> Res<ResultRecord> {
    let diagnostics = validate(cfg, kind);
    if !diagnostics.is_empty() {
        return Err(RunError::validation(diagnostics));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .map_err(|e| RunError::new(ErrorClass::Resource, format!("thread pool: {e}")))?;
    let (hash, config) = config_hash(cfg);
    let mut ctx = Ctx {
        cfg,
        seed: cfg.seed(),
        scale: cfg.scale(),
        summary: Map::new(),
        provenance: Map::new(),
        warnings: Vec::new(),
        extra: Vec::new(),
    };
    let table = pool.install(|| match kind {
        Kind::Gamma => gamma(&mut ctx),
        Kind::Remez => remez(&mut ctx),
        Kind::Spectral => spectral(&mut ctx),
        Kind::ProductSpectral => product_spectral(&mut ctx),
        Kind::HeatObs => heat_obs(&mut ctx),
        Kind::PointObs => point_obs(&mut ctx),
        Kind::NodalDemo => nodal_demo(&mut ctx),
        Kind::LrChain => lr_chain(&mut ctx),
        Kind::ProductObs => product_obs(&mut ctx),
        Kind::Diophantine => diophantine(&mut ctx),
    })?;
    ctx.provenance.insert("scale".into(), float_value(ctx.scale));
    ctx.provenance.insert("tolerances".into(), serde_json::to_value(&cfg.tolerances).expect("serializes"));
    if options.strict && !ctx.warnings.is_empty() {
        let mut e = RunError::new(ErrorClass::Strict, "tolerance warnings escalated by strict mode");
        e.message.push_str(&format!(": {}", ctx.warnings.join("; ")));
        return Err(e);
    }
    Ok(ResultRecord {
        kind,
        seed: ctx.seed,
        config_hash: hash,
        config,
        table,
        extra: ctx.extra,
        summary: ctx.summary,
        provenance: ctx.provenance,
        warnings: ctx.warnings,
    })
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    seed: u64,
    scale: f64,
    summary: Map<String, Value>,
    provenance: Map<String, Value>,
    warnings: Vec<String>,
    extra: Vec<Table>,
}

impl Ctx<'_> {
    fn omega(&self, spec: &Option<GeneratorSpec>, stream: u64) -> Res<PointSet> {
        let spec = spec.as_ref().ok_or_else(|| RunError::new(ErrorClass::Validation, "missing point set"))?;
        build_omega(spec, self.seed, stream)
    }

    fn search(&self) -> SearchOptions {
        SearchOptions {
            tol: self.cfg.tolerances.nullspace,
            starts: self.cfg.search.starts,
            iterations: self.cfg.search.iterations,
            seed: self.seed,
        }
    }

    fn worst_case_options(&self) -> WorstCaseOptions {
        WorstCaseOptions { tol: self.cfg.tolerances.nullspace, ..WorstCaseOptions::default() }
    }

    fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.provenance.insert(key.into(), v.into());
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }
}

/// Materializes a point set; `random` draws from `substream(seed, stream)`.
pub fn build_omega(spec: &GeneratorSpec, seed: u64, stream: u64) -> Res<PointSet> {
    if let GeneratorSpec::Random { count, dimension, lo, hi } = spec {
        let mut rng = substream(seed, stream);
        let mut pts: Vec<Vec<f64>> =
            (0..*count).map(|_| (0..*dimension).map(|_| rng.random_range(*lo..*hi)).collect()).collect();
        if *dimension == 1 {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
        }
        return Ok(PointSet::explicit(pts)?);
    }
    let g = spec.to_generator().expect("non-random generator");
    Ok(PointSet::generate(&g)?)
}

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> Res<R> + Sync + Send) -> Res<Vec<R>> {
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

fn slice(n: usize, cutoff: f64, scale: f64) -> Res<SpectrumSlice> {
    let s = SpectrumSlice::enumerate(n, cutoff, scale)?;
    if s.is_empty() {
        return Err(RunError::new(ErrorClass::Domain, format!("cutoff {cutoff} lies below the first eigenvalue")));
    }
    Ok(s)
}

/// Slice of the 1D modes `k ≤ K`.
fn frequency_slice(k: u32, scale: f64) -> Res<SpectrumSlice> {
    slice(1, scale * f64::from(k * k), scale)
}

fn random_coefs(seed: u64, stream: u64, len: usize) -> CoefVec {
    CoefVec::new(normal_vec(&mut substream(seed, stream), len))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn method_name(m: GammaMethod) -> &'static str {
    match m {
        GammaMethod::Exact => "exact",
        GammaMethod::GreedyLeja => "greedy_leja",
        GammaMethod::FirstK => "first_k",
    }
}

fn fit_json(fit: &SpectralFit) -> Value {
    json!({
        "c": float_value(fit.c),
        "beta": float_value(fit.beta),
        "residual": float_value(fit.residual),
    })
}

fn constant_status(c: &SpectralConstant) -> &'static str {
    if c.is_finite() { "finite" } else { "infinite_nullspace" }
}

fn relative_change(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) if a != 0.0 => ((b - a) / a).abs(),
        (true, true) => (b - a).abs(),
        (false, false) => 0.0,
        _ => f64::INFINITY,
    }
}

fn gamma(ctx: &mut Ctx<'_>) -> Res<Table> {
    let e = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let [lo, hi] = ctx.cfg.k_range.expect("validated");
    let method = ctx.cfg.method.unwrap_or(MethodSpec::Greedy);
    let ks: Vec<usize> = (lo..=hi).collect();
    let estimates: Vec<GammaEstimate> = par_map(&ks, |_, &k| {
        Ok(match method {
            MethodSpec::Exact => gamma_exact(&e, k)?,
            MethodSpec::Greedy => gamma_greedy_leja(&e, k)?,
            MethodSpec::FirstK => gamma_first_k(&e, k)?,
        })
    })?;
    let mut t = Table::new("gamma", vec!["k", "log_gamma", "method", "witness_indices"]);
    for g in &estimates {
        t.push(vec![g.k.into(), g.log_value.into(), method_name(g.method).into(), join(&g.witness).into()]);
    }
    let samples: Vec<(usize, f64)> = estimates.iter().map(|g| (g.k, g.log_value)).collect();
    let mut fits = Map::new();
    for (name, law) in [("k_log_k", GrowthLaw::KLogK), ("k_squared", GrowthLaw::KSquared)] {
        let v = fit_growth_samples(&samples, law).map_or(Value::Null, |f| {
            json!({"slope": float_value(f.slope), "intercept": float_value(f.intercept), "residual": float_value(f.residual)})
        });
        fits.insert(name.into(), v);
    }
    ctx.put("fits", fits);
    ctx.put("log_log_exponent", log_log_exponent(&samples).map_or(Value::Null, float_value));
    let witnesses: Vec<Value> =
        estimates.iter().map(|g| json!({"k": g.k, "points": floats_value(&g.witness_points)})).collect();
    ctx.put("witnesses", witnesses);
    ctx.put("set_size", e.len());
    ctx.note("method", method_name(estimates[0].method));
    Ok(t)
}

fn remez(ctx: &mut Ctx<'_>) -> Res<Table> {
    let e = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let freqs = ctx.cfg.frequencies.clone().expect("validated");
    let samples = ctx.cfg.samples.expect("validated");
    let opts = RemezOptions { grid_size: ctx.cfg.grid_size.unwrap_or(10_000), ..RemezOptions::default() };
    // frequencies only enter through k, so the scale is irrelevant here
    let slices: Vec<SpectrumSlice> = freqs.iter().map(|&k| frequency_slice(k, 1.0)).collect::<Res<_>>()?;
    let tasks: Vec<(usize, usize)> = (0..freqs.len()).flat_map(|f| (0..samples).map(move |s| (f, s))).collect();
    let seed = ctx.seed;
    let certs = par_map(&tasks, |i, &(f, _)| {
        let c = random_coefs(seed, i as u64, slices[f].len());
        Ok(remez_verify(&slices[f], &c, &e, &opts)?)
    })?;
    let mut t = Table::new(
        "remez",
        vec![
            "K", "sample", "ell0", "node_method", "log_gamma", "log_factor", "lhs", "lhs_upper", "sup_on_set",
            "log_rhs", "holds",
        ],
    );
    let mut per_k: Vec<Value> = Vec::new();
    for (fi, &k) in freqs.iter().enumerate() {
        let mut held = 0;
        for ((f, s), c) in tasks.iter().zip(&certs) {
            if *f != fi {
                continue;
            }
            held += usize::from(c.holds);
            t.push(vec![
                k.into(),
                (*s).into(),
                c.ell0.into(),
                method_name(c.node_method).into(),
                c.log_gamma.into(),
                c.log_factor.into(),
                c.lhs.into(),
                c.lhs_upper.into(),
                c.sup_on_set.into(),
                c.log_rhs.into(),
                c.holds.into(),
            ]);
        }
        per_k.push(json!({"K": k, "held": held, "samples": samples}));
    }
    ctx.put("per_frequency", per_k);
    ctx.put("all_hold", certs.iter().all(|c| c.holds));
    ctx.note("grid_size", opts.grid_size);
    ctx.note("derivative_bound", "bernstein");
    Ok(t)
}

fn spectral(ctx: &mut Ctx<'_>) -> Res<Table> {
    let omega = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let cutoffs = ctx.cfg.cutoffs.clone().expect("validated");
    let (n, scale, search) = (ctx.cfg.domain.n, ctx.scale, ctx.search());
    let consts = par_map(&cutoffs, |_, &cutoff| Ok(spectral_constant(&slice(n, cutoff, scale)?, &omega, &search)?))?;
    let mut t = Table::new("spectral", vec!["cutoff", "modes", "points", "sigma_min", "lower", "upper", "status"]);
    for c in &consts {
        t.push(vec![
            c.cutoff.into(),
            c.modes.into(),
            c.points.into(),
            c.sigma_min.into(),
            c.lower.into(),
            c.upper.into(),
            constant_status(c).into(),
        ]);
    }
    let finite: Vec<(f64, f64)> = consts.iter().filter(|c| c.is_finite()).map(|c| (c.cutoff, c.upper)).collect();
    match fit_growth(&finite) {
        Ok(f) => ctx.put("fit", fit_json(&f)),
        Err(e) => {
            ctx.put("fit", Value::Null);
            ctx.note("fit_skipped", e.to_string());
        }
    }
    if finite.len() < consts.len() {
        ctx.note("fit_samples", "upper brackets at cutoffs with a finite constant");
    }
    let witnesses: Vec<Value> = consts
        .iter()
        .map(|c| json!({"cutoff": float_value(c.cutoff), "coefficients": floats_value(c.witness.as_slice())}))
        .collect();
    ctx.put("witnesses", witnesses);
    ctx.note("search_starts", ctx.cfg.search.starts);
    Ok(t)
}

/// Best common-β fits of two factor sweeps: the β of the grid minimizing
/// the summed squared log-residuals.
pub fn joint_fits(a: &[(f64, f64)], b: &[(f64, f64)]) -> Res<(SpectralFit, SpectralFit)> {
    let mut best: Option<(f64, SpectralFit, SpectralFit)> = None;
    for beta in beta_grid() {
        let fa = fit_growth_at(a, beta)?;
        let fb = fit_growth_at(b, beta)?;
        let sse = fa.residual * fa.residual + fb.residual * fb.residual;
        if best.as_ref().is_none_or(|(s, _, _)| sse < *s) {
            best = Some((sse, fa, fb));
        }
    }
    let (_, fa, fb) = best.expect("beta grid is nonempty");
    Ok((fa, fb))
}

fn factor_constants(
    n: usize,
    scale: f64,
    omega: &PointSet,
    cutoffs: &[f64],
    search: &SearchOptions,
) -> Res<Vec<SpectralConstant>> {
    par_map(cutoffs, |_, &cutoff| Ok(spectral_constant(&slice(n, cutoff, scale)?, omega, search)?))
}

/// `(Λ, upper bracket)` at the cutoffs where the constant is finite; `None`
/// when fewer than three remain for a fit.
fn uppers(consts: &[SpectralConstant]) -> Option<Vec<(f64, f64)>> {
    let v: Vec<(f64, f64)> = consts.iter().filter(|c| c.is_finite()).map(|c| (c.cutoff, c.upper)).collect();
    (v.len() >= 3).then_some(v)
}

fn product_spectral(ctx: &mut Ctx<'_>) -> Res<Table> {
    let [n1, n2] = ctx.cfg.dims.expect("validated");
    let omega1 = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let omega2 = ctx.omega(&ctx.cfg.omega2, OMEGA2_STREAM)?;
    let cutoffs = ctx.cfg.cutoffs.clone().expect("validated");
    let search = ctx.search();
    let c1 = factor_constants(n1, ctx.scale, &omega1, &cutoffs, &search)?;
    let c2 = factor_constants(n2, ctx.scale, &omega2, &cutoffs, &search)?;
    let fits = match (uppers(&c1), uppers(&c2)) {
        (Some(a), Some(b)) => Some(joint_fits(&a, &b)?),
        _ => None,
    };
    let setup = ProductSetup {
        dims: (n1, n2),
        scale: ctx.scale,
        omega1: &omega1,
        omega2: &omega2,
        cutoffs: &cutoffs,
        fits: fits.as_ref().map(|(a, b)| (a, b)),
        search,
    };
    let report = product_compose_check(&setup)?;
    let mut t = Table::new(
        "product_spectral",
        vec![
            "cutoff",
            "product_modes",
            "factor1_modes",
            "measured_lower",
            "measured_upper",
            "measured_status",
            "factor1_upper",
            "factor2_upper",
            "composed_bound",
            "composed_upper",
            "c_prime_bound",
            "inherited_infinite",
            "holds",
        ],
    );
    for r in &report.rows {
        t.push(vec![
            r.cutoff.into(),
            r.product_modes.into(),
            r.factor1_modes.into(),
            r.measured_lower.into(),
            r.measured.upper.into(),
            constant_status(&r.measured).into(),
            r.factor1.upper.into(),
            r.factor2.upper.into(),
            r.composed_bound.into(),
            r.composed_upper.into(),
            r.c_prime_bound.into(),
            r.inherited_infinite.into(),
            r.holds.into(),
        ]);
    }
    ctx.put("all_hold", report.all_hold());
    ctx.put("beta", report.beta.map_or(Value::Null, float_value));
    ctx.put("c_prime", report.c_prime.map_or(Value::Null, float_value));
    if let Some((a, b)) = &fits {
        ctx.put("fit1", fit_json(a));
        ctx.put("fit2", fit_json(b));
    }
    ctx.note(
        "factor_fit",
        "common beta minimizing the summed squared log-residuals of both factor fits, over cutoffs with finite factor constants",
    );
    Ok(t)
}

fn obs_kinds(ctx: &Ctx<'_>) -> (TerminalNorm, TraceKind) {
    let norm = match ctx.cfg.norm.unwrap_or(NormSpec::L2) {
        NormSpec::L2 => TerminalNorm::L2,
        NormSpec::Linf => TerminalNorm::LInf { per_axis: ctx.cfg.grid_size.unwrap_or(257) },
    };
    let trace = match ctx.cfg.trace.unwrap_or(TraceSpec::SupL1) {
        TraceSpec::SupL1 => TraceKind::SupL1,
        TraceSpec::L2Sum => TraceKind::L2Sum,
    };
    (norm, trace)
}

fn heat_obs(ctx: &mut Ctx<'_>) -> Res<Table> {
    let omega = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let s = slice(ctx.cfg.domain.n, ctx.cfg.cutoff.expect("validated"), ctx.scale)?;
    let horizons = ctx.cfg.horizons.clone().expect("validated");
    let samples = ctx.cfg.samples.expect("validated");
    let (norm, trace) = obs_kinds(ctx);
    let quad = TimeQuadrature::default();
    let zero_tol = ctx.cfg.tolerances.zero_trace;
    let mut exps = Vec::with_capacity(horizons.len());
    for &h in &horizons {
        let mut a = ObsExperiment::new(&s, &omega, h, norm, trace, quad)?;
        let mut b = ObsExperiment::new(&s, &omega, h, norm, trace, quad.doubled())?;
        a.zero_trace_tol = zero_tol;
        b.zero_trace_tol = zero_tol;
        exps.push((a, b));
    }
    let panel: Vec<CoefVec> = (0..samples).map(|i| random_coefs(ctx.seed, i as u64, s.len())).collect();
    let tasks: Vec<(usize, usize)> = (0..horizons.len()).flat_map(|h| (0..samples).map(move |i| (h, i))).collect();
    let results = par_map(&tasks, |_, &(h, i)| {
        let r = obs_ratio(&panel[i], &exps[h].0)?;
        let fine = obs_ratio(&panel[i], &exps[h].1)?;
        Ok((r, fine))
    })?;
    let mut t = Table::new(
        "heat_obs",
        vec![
            "horizon",
            "sample",
            "numerator",
            "denominator",
            "ratio",
            "zero_trace",
            "refined_ratio",
            "refinement_change",
            "linf_error_bound",
        ],
    );
    let refine_tol = ctx.cfg.tolerances.refinement;
    let mut worst = vec![0.0f64; horizons.len()];
    for (&(h, i), (r, fine)) in tasks.iter().zip(&results) {
        let change = relative_change(r.ratio, fine.ratio);
        if change > refine_tol {
            ctx.warnings.push(format!(
                "horizon {} sample {i}: ratio moved by {change:e} under quadrature refinement",
                horizons[h]
            ));
        }
        worst[h] = worst[h].max(r.ratio);
        t.push(vec![
            horizons[h].into(),
            i.into(),
            r.numerator.into(),
            r.denominator.into(),
            r.ratio.into(),
            r.zero_trace.into(),
            fine.ratio.into(),
            change.into(),
            r.linf_error_bound.into(),
        ]);
    }
    ctx.put("max_ratio", floats_value(&worst));
    ctx.put("modes", s.len());
    ctx.note("quadrature", "Gauss-Legendre on dyadic time panels, checked against the doubled rule");
    ctx.note("norm", format!("{norm:?}"));
    ctx.note("trace", format!("{trace:?}"));
    Ok(t)
}

/// Disagreement a witness may show without a warning: the tolerance, or
/// what the trace cancellation allows to be resolved in double precision.
fn witness_allowance(c: &ObsConstant, tol: f64) -> f64 {
    tol.max(64.0 * f64::EPSILON * c.cancellation)
}

fn point_obs(ctx: &mut Ctx<'_>) -> Res<Table> {
    let reals: Vec<Real> =
        ctx.cfg.x0.as_ref().expect("validated").iter().map(|r| r.to_real().expect("validated")).collect();
    let freqs = ctx.cfg.frequencies.clone().expect("validated");
    let horizons = ctx.cfg.horizons.clone().expect("validated");
    let slices: Vec<SpectrumSlice> = freqs.iter().map(|&k| frequency_slice(k, ctx.scale)).collect::<Res<_>>()?;
    let sets: Vec<PointSet> = reals.iter().map(|r| PointSet::from_coords(&[r.to_f64()])).collect::<Result<_, _>>()?;
    let mut tasks = Vec::new();
    for x in 0..reals.len() {
        for f in 0..freqs.len() {
            for h in 0..horizons.len() {
                tasks.push((x, f, h));
            }
        }
    }
    let opts = ctx.worst_case_options();
    let values = par_map(&tasks, |_, &(x, f, h)| Ok(worst_case_obs(&slices[f], &sets[x], horizons[h], &opts)?))?;
    let mut t = Table::new(
        "point_obs",
        vec![
            "x0",
            "x0_value",
            "K",
            "modes",
            "horizon",
            "value",
            "finite",
            "method",
            "nodal_eigenvalue",
            "cancellation",
            "witness_discrepancy",
        ],
    );
    let tol = ctx.cfg.tolerances.witness;
    for (&(x, f, h), c) in tasks.iter().zip(&values) {
        let d = c.witness_discrepancy();
        if d > witness_allowance(c, tol) {
            ctx.warnings.push(format!(
                "x0 {} K {} T {}: witness reproduces the value only to {d:e}",
                reals[x], freqs[f], horizons[h]
            ));
        }
        t.push(vec![
            reals[x].to_string().into(),
            reals[x].to_f64().into(),
            freqs[f].into(),
            slices[f].len().into(),
            horizons[h].into(),
            c.value.into(),
            c.is_finite().into(),
            match c.method {
                ObsMethod::GenEig => "gen_eig",
                ObsMethod::RatioMeasured => "ratio_measured",
            }
            .into(),
            c.nodal_eigenvalue.into(),
            c.cancellation.into(),
            d.into(),
        ]);
    }
    // superlinearity: slope of ln ln(value) against ln K
    let mut growth = Vec::new();
    for (x, r) in reals.iter().enumerate() {
        for (h, &horizon) in horizons.iter().enumerate() {
            let pts: Vec<(f64, f64)> = tasks
                .iter()
                .zip(&values)
                .filter(|((xi, _, hi), c)| *xi == x && *hi == h && c.value.is_finite() && c.value > 1.0)
                .map(|((_, f, _), c)| (f64::from(freqs[*f]).ln(), c.value.ln().ln()))
                .collect();
            let (lx, ly): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let exponent = fit_line(&lx, &ly).map_or(Value::Null, |l| float_value(l.slope));
            growth.push(json!({"x0": r.to_string(), "horizon": float_value(horizon), "exponent": exponent}));
        }
    }
    ctx.put("growth_exponents", growth);
    ctx.note("criterion", "largest generalized eigenvalue of (terminal Gram, observation Gramian)");
    ctx.note("witness_allowance", "max(witness tolerance, 64 eps * cancellation)");
    Ok(t)
}

fn nodal_demo(ctx: &mut Ctx<'_>) -> Res<Table> {
    let omega = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let n = ctx.cfg.domain.n;
    let level = ctx.cfg.level.expect("validated");
    let horizon = ctx.cfg.horizons.as_ref().and_then(|h| h.first().copied()).unwrap_or(1.0);
    let s = slice(n, ctx.scale * level as f64, ctx.scale)?;
    let mult = multiplicity(n, level);
    let level_modes: Vec<Vec<u32>> =
        s.modes().iter().filter(|m| m.level() == level).map(|m| m.index().components().to_vec()).collect();
    let witness = nullspace_witness(&s, &omega, ctx.cfg.tolerances.nullspace)?;
    let ratio = match &witness {
        Some(w) => {
            let mut exp = ObsExperiment::new(&s, &omega, horizon, TerminalNorm::L2, TraceKind::SupL1, TimeQuadrature::default())?;
            exp.zero_trace_tol = ctx.cfg.tolerances.zero_trace;
            Some(obs_ratio(&w.coefficients, &exp)?)
        }
        None => None,
    };
    let wc = worst_case_obs(&s, &omega, horizon, &ctx.worst_case_options())?;
    let mut t = Table::new(
        "nodal_demo",
        vec![
            "level",
            "multiplicity",
            "modes",
            "points",
            "witness_found",
            "witness_residual",
            "witness_eigenvalue",
            "obs_ratio",
            "obs_ratio_infinite",
            "worst_case",
            "worst_case_infinite",
        ],
    );
    t.push(vec![
        level.into(),
        mult.into(),
        s.len().into(),
        omega.len().into(),
        witness.is_some().into(),
        witness.as_ref().map(|w| w.residual).into(),
        witness.as_ref().and_then(|w| w.eigenvalue).into(),
        ratio.as_ref().map(|r| r.ratio).into(),
        ratio.as_ref().is_some_and(|r| r.ratio.is_infinite()).into(),
        wc.value.into(),
        wc.value.is_infinite().into(),
    ]);
    ctx.put("level_modes", serde_json::to_value(&level_modes).expect("serializes"));
    ctx.put("points", serde_json::to_value(omega.points()).expect("serializes"));
    ctx.put(
        "witness",
        witness.as_ref().map_or(Value::Null, |w| {
            json!({
                "coefficients": floats_value(w.coefficients.as_slice()),
                "residual": float_value(w.residual),
                "eigenvalue": w.eigenvalue.map_or(Value::Null, float_value),
            })
        }),
    );
    ctx.put(
        "obs_ratio",
        ratio.as_ref().map_or(Value::Null, |r| {
            json!({
                "numerator": float_value(r.numerator),
                "denominator": float_value(r.denominator),
                "ratio": float_value(r.ratio),
                "zero_trace": r.zero_trace,
            })
        }),
    );
    ctx.put("obs_ratio_infinite", ratio.as_ref().is_some_and(|r| r.ratio.is_infinite()));
    ctx.note("horizon", float_value(horizon));
    ctx.note("nullspace_tol", ctx.cfg.tolerances.nullspace.map_or(Value::from("1e-10*sqrt(N)"), float_value));
    Ok(t)
}

fn lr_chain(ctx: &mut Ctx<'_>) -> Res<Table> {
    let omega = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let s = slice(ctx.cfg.domain.n, ctx.cfg.cutoff.expect("validated"), ctx.scale)?;
    let horizons = ctx.cfg.horizons.clone().expect("validated");
    let count = ctx.cfg.schedule_count.unwrap_or(8);
    let panel: Vec<CoefVec> =
        (0..ctx.cfg.samples.expect("validated")).map(|i| random_coefs(ctx.seed, i as u64, s.len())).collect();
    let opts = TelescopingOptions { zero_trace_tol: ctx.cfg.tolerances.zero_trace, ..TelescopingOptions::default() };
    let reports = par_map(&horizons, |_, &h| {
        let schedule = lr_schedule(ScheduleVariant::Dyadic, h, count)?;
        let report = telescoping_verify(&s, &omega, &schedule, &panel, &opts)?;
        Ok((schedule, report))
    })?;
    let mut t = Table::new(
        "lr_chain",
        vec![
            "horizon",
            "intervals",
            "empirical_a",
            "final_constant",
            "telescoped_holds",
            "regularization_factor",
            "non_observable",
        ],
    );
    let mut detail = Vec::new();
    for (&h, (schedule, r)) in horizons.iter().zip(&reports) {
        t.push(vec![
            h.into(),
            r.intervals.len().into(),
            r.empirical_a.into(),
            r.final_constant.into(),
            r.telescoped_holds.into(),
            r.regularization_factor.into(),
            r.non_observable.into(),
        ]);
        let per_datum: Vec<Value> = r
            .data
            .iter()
            .map(|d| {
                json!({
                    "a": d.a.map_or(Value::Null, float_value),
                    "zero_trace": d.zero_trace,
                    "norm_l1": float_value(d.norm_l1),
                    "trace_integral": float_value(d.trace_integral),
                })
            })
            .collect();
        let identity = (0..count.saturating_sub(2))
            .map(|m| (2.0 / schedule.gap(m) - 1.0 / schedule.gap(m + 1)).abs() * schedule.gap(m + 1))
            .fold(0.0, f64::max);
        detail.push(json!({
            "horizon": float_value(h),
            "times": floats_value(&schedule.times),
            "data": per_datum,
            "dyadic_identity_error": float_value(identity),
        }));
    }
    ctx.put("schedules", detail);
    ctx.put("modes", s.len());
    ctx.note("schedule", "dyadic");
    ctx.note("c_const", float_value(opts.c_const));
    Ok(t)
}

fn product_obs(ctx: &mut Ctx<'_>) -> Res<Table> {
    let [n1, n2] = ctx.cfg.dims.expect("validated");
    let omega1 = ctx.omega(&ctx.cfg.omega, OMEGA_STREAM)?;
    let omega2 = ctx.omega(&ctx.cfg.omega2, OMEGA2_STREAM)?;
    let cutoffs = ctx.cfg.cutoffs.clone().expect("validated");
    let cutoff = ctx.cfg.cutoff.expect("validated");
    let horizons = ctx.cfg.horizons.clone().expect("validated");
    let c2 = factor_constants(n2, ctx.scale, &omega2, &cutoffs, &ctx.search())?;
    let samples2 = uppers(&c2).ok_or_else(|| {
        RunError::new(ErrorClass::Contract, "second factor has fewer than three cutoffs with a finite spectral constant")
    })?;
    let fit2 = fit_growth(&samples2)?;
    if !(fit2.beta < 1.0) {
        return Err(RunError::new(ErrorClass::Contract, "second factor fit has beta = 1; the cost prediction needs beta < 1"));
    }
    let alpha = fit2.beta / (1.0 - fit2.beta);
    let s1 = slice(n1, cutoff, ctx.scale)?;
    let opts = ctx.worst_case_options();
    let f1 = par_map(&horizons, |_, &h| Ok(worst_case_obs(&s1, &omega1, h, &opts)?))?;
    let factor_samples: Vec<(f64, f64)> = horizons.iter().zip(&f1).map(|(&h, c)| (h, c.value)).collect();
    let factor1 = fit_obs_cost(&factor_samples, alpha)?;
    let setup = ProductObsSetup {
        dims: (n1, n2),
        scale: ctx.scale,
        cutoff,
        omega1: &omega1,
        omega2: &omega2,
        fit2: &fit2,
        factor1: &factor1,
        horizons: &horizons,
        options: opts,
    };
    let report = product_obs_check(&setup)?;
    let mut t = Table::new(
        "product_obs",
        vec!["horizon", "factor1_value", "measured", "predicted", "lambda_split", "holds", "inherited_infinite", "cancellation"],
    );
    for (r, c) in report.rows.iter().zip(&f1) {
        t.push(vec![
            r.horizon.into(),
            c.value.into(),
            r.measured.value.into(),
            r.predicted.into(),
            r.lambda_split.into(),
            r.holds.into(),
            r.inherited_infinite.into(),
            r.measured.cancellation.into(),
        ]);
    }
    let p = &report.prediction;
    ctx.put(
        "prediction",
        json!({
            "alpha": float_value(p.alpha),
            "beta": float_value(p.beta),
            "c1": float_value(p.c1),
            "c3": float_value(p.c3),
            "c_prime": float_value(p.c_prime),
            "eta": float_value(p.eta),
            "gamma": float_value(p.gamma),
            "identity_error": float_value(p.identity_error),
        }),
    );
    ctx.put("fit2", fit_json(&fit2));
    ctx.put("factor1_fit", json!({"c": float_value(factor1.c), "alpha": float_value(factor1.alpha), "residual": float_value(factor1.residual)}));
    ctx.put("product_modes", report.product_modes);
    ctx.put("points", report.points);
    ctx.put("all_hold", report.rows.iter().all(|r| r.holds));
    ctx.note("trace", "sum over points of |u|^2, integrated in time");
    Ok(t)
}

fn diophantine(ctx: &mut Ctx<'_>) -> Res<Table> {
    let reals: Vec<Real> =
        ctx.cfg.x0.as_ref().expect("validated").iter().map(|r| r.to_real().expect("validated")).collect();
    let k_max = ctx.cfg.k_max.expect("validated");
    let depth = ctx.cfg.depth.unwrap_or(20);
    let th = ctx.cfg.thresholds.resolve();
    let results = par_map(&reals, |_, r| {
        let cf = continued_fraction(r, depth)?;
        let profile = nodal_gap_profile(r, k_max)?;
        let label = classify(&profile, &th);
        let exps = exponents(&profile, th.window_start);
        // the running minimum is a step function; its jumps describe it exactly
        let mut steps = Table::new("profile", vec!["K", "g", "argmin"]);
        for k in 1..=k_max {
            let i = (k - 1) as usize;
            if k == 1 || k == k_max || profile.g[i] != profile.g[i - 1] {
                steps.push(vec![k.into(), profile.g[i].into(), profile.argmin[i].into()]);
            }
        }
        Ok((cf, label, exps, steps, profile.at(k_max), profile.argmin[(k_max - 1) as usize]))
    })?;
    let mut t = Table::new(
        "diophantine",
        vec![
            "index",
            "x0",
            "x0_value",
            "label",
            "quotients",
            "cf_terminated",
            "cf_truncated",
            "g_at_k_max",
            "argmin_at_k_max",
            "exponent_at_k_max",
            "min_exponent",
        ],
    );
    let mut convergents = Vec::new();
    for (i, (r, (cf, label, exps, steps, g, argmin))) in reals.iter().zip(results).enumerate() {
        let last = exps.last().map(|e| e.1);
        let min = exps.iter().map(|e| e.1).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
        t.push(vec![
            i.into(),
            r.to_string().into(),
            r.to_f64().into(),
            label.as_str().into(),
            join(&cf.quotients).into(),
            cf.terminated.into(),
            cf.truncated.into(),
            g.into(),
            argmin.into(),
            last.into(),
            min.into(),
        ]);
        // u128 convergents can exceed the JSON integer range, so they are strings
        let pq: Vec<Value> = cf.convergents.iter().map(|(p, q)| json!([p.to_string(), q.to_string()])).collect();
        convergents.push(json!({"x0": r.to_string(), "convergents": pq}));
        let mut steps = steps;
        steps.name = format!("profile_{i}");
        ctx.extra.push(steps);
    }
    ctx.put("convergents", convergents);
    ctx.note("profile_files", "one step table per x0: the K at which the running minimum g(K) changes");
    ctx.note(
        "thresholds",
        json!({
            "window_start": th.window_start,
            "badly_min_exponent": float_value(th.badly_min_exponent),
            "liouville_max_exponent": float_value(th.liouville_max_exponent),
            "sustain": th.sustain,
            "zero_tol": float_value(th.zero_tol),
            "min_k_max": th.min_k_max,
        }),
    );
    Ok(t)
}
