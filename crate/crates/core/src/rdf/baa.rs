use super::distortion::{DistortionSpec, Slope};
use super::marginal::ReproductionMarginal;
use crate::directed::{directed_information, directed_value};
use crate::error::{Error, Result};
use crate::prob::{
    causal_product, expand, mass_total, nats_to_bits, CausalKernelFamily, FeedbackFreeSource, KernelKind,
    StageTable,
};

/// How the channel is derived from the current reproduction law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UpdateRule {
    /// `P(y_i | y^{i-1}, x_i) ∝ e^{sρ(x_i, y_i)} P̄(y_i | y^{i-1})`, the
    /// stationary exponential-family form.
    #[default]
    Stationary,
    /// Exact minimizer over causal channels for fixed `P̄`, by backward
    /// recursion. Adds the cost-to-go factor `exp(−E[G_{i+1} | x^i])` to the
    /// stationary form; identical to it whenever `P̄` has no memory.
    CausalExact,
}

/// Starting reproduction law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Init {
    #[default]
    Uniform,
    /// Independent `U[0.05, 1]` weights, normalized.
    SeededRandomPositive(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaaConfig {
    /// Stop once `max |P̄^{r+1} − P̄^r|` falls below this...
    pub tol_marginal: f64,
    /// ...and the reproduction kernels match those induced by the channel.
    pub tol_fixed_point: f64,
    pub max_iter: usize,
    pub init: Init,
    pub rule: UpdateRule,
}

impl Default for BaaConfig {
    fn default() -> Self {
        Self {
            tol_marginal: 1e-10,
            tol_fixed_point: 1e-9,
            max_iter: 10_000,
            init: Init::Uniform,
            rule: UpdateRule::Stationary,
        }
    }
}

impl BaaConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !ok(self.tol_marginal) || !ok(self.tol_fixed_point) {
            return Err(Error::InvalidArgument("tolerances must be finite and positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_rule(mut self, rule: UpdateRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `I(X^n → Y^n) − s · (n+1) · D` of the channel derived from `P̄^r`, nats.
    pub objective: f64,
    /// Per-letter distortion of that channel.
    pub distortion: f64,
    /// `max |P̄^{r+1} − P̄^r|`.
    pub marginal_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaaTrace {
    pub slope: Slope,
    pub rule: UpdateRule,
    pub iterates: Vec<TraceEntry>,
    pub converged: bool,
    pub final_channel: CausalKernelFamily,
    pub final_marginal: ReproductionMarginal,
    /// Fixed-point residual of `(final_channel, final_marginal)`.
    pub final_residual: f64,
    pub tol_fixed_point: f64,
}

impl BaaTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len()
    }

    /// Largest increase of the objective between consecutive iterates
    /// (`≤ 0` for a monotone run).
    pub fn max_objective_rise(&self) -> f64 {
        self.iterates
            .windows(2)
            .map(|w| w[1].objective - w[0].objective)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn objective_is_nonincreasing(&self, slack: f64) -> bool {
        self.iterates.len() < 2 || self.max_objective_rise() <= slack
    }

    pub fn final_objective(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |e| e.objective)
    }
}

/// One point `(D_s, R(D_s))` of the causal R(D) curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RDPoint {
    pub s: Slope,
    /// Per-letter distortion `D_s`.
    pub distortion: f64,
    /// Per-letter rate in nats.
    pub rate_nats: f64,
    pub iterations: usize,
    /// Fixed-point residual at termination.
    pub residual: f64,
    pub converged: bool,
    /// `|R_formula − I(X^n → Y^n)|` over the whole horizon, nats.
    pub rate_cross_check: f64,
}

impl RDPoint {
    pub fn rate_bits(&self) -> f64 {
        nats_to_bits(self.rate_nats)
    }
}

fn check_problem(source: &FeedbackFreeSource, d: &DistortionSpec, marginal: &ReproductionMarginal) -> Result<()> {
    d.check_layout(source.x_indexer(), source.y_indexer())?;
    if !marginal.y_indexer().same_shape(source.y_indexer()) {
        return Err(Error::Dimension("reproduction law and source disagree on Y^n".into()));
    }
    Ok(())
}

fn require_positive(marginal: &ReproductionMarginal) -> Result<()> {
    if marginal.is_positive() {
        Ok(())
    } else {
        Err(Error::Precondition("reproduction kernels must be strictly positive".into()))
    }
}

/// `A(x, y) = e^{sρ(x, y)}`, row-major.
fn tilt(d: &DistortionSpec, s: Slope) -> Vec<f64> {
    let mut a = Vec::with_capacity(d.nx() * d.ny());
    for x in 0..d.nx() {
        for y in 0..d.ny() {
            a.push((s.value() * d.rho(x, y)).exp());
        }
    }
    a
}

/// `Z_i(x_i, y^{i-1}) = Σ_y e^{sρ(x_i, y)} P̄(y | y^{i-1})`, laid out
/// `y_prefix * |X| + x_i`.
fn stage_normalizers(marginal: &ReproductionMarginal, d: &DistortionSpec, a: &[f64], stage: usize) -> Vec<f64> {
    let (nx, ny) = (d.nx(), d.ny());
    let nyp = marginal.y_indexer().prefix_count(stage);
    let mut z = vec![0.0; nyp * nx];
    for yp in 0..nyp {
        let row = marginal.kernel_row(stage, yp);
        for xv in 0..nx {
            z[yp * nx + xv] = (0..ny).map(|y| a[xv * ny + y] * row[y]).sum();
        }
    }
    z
}

/// Channel in stationary exponential-family form:
/// `P(y_i | y^{i-1}, x^i) = e^{sρ(x_i, y_i)} P̄(y_i | y^{i-1}) / Z_i(x_i, y^{i-1})`.
///
/// Rows depend on `x^i` only through `x_i`; the table is stored with full
/// `(x^i, y^{i-1})` conditioning.
pub fn optimal_channel_for_marginals(
    source: &FeedbackFreeSource,
    marginal: &ReproductionMarginal,
    d: &DistortionSpec,
    s: Slope,
) -> Result<CausalKernelFamily> {
    check_problem(source, d, marginal)?;
    require_positive(marginal)?;
    stationary_channel(source, marginal, d, s)
}

fn stationary_channel(
    source: &FeedbackFreeSource,
    marginal: &ReproductionMarginal,
    d: &DistortionSpec,
    s: Slope,
) -> Result<CausalKernelFamily> {
    let (x, y) = (source.x_indexer(), source.y_indexer());
    let (nx, ny) = (d.nx(), d.ny());
    let a = tilt(d, s);
    let mut stages = Vec::with_capacity(x.stages());
    for i in 0..x.stages() {
        let z = stage_normalizers(marginal, d, &a, i);
        let (nxp, nyp) = (x.prefix_count(i + 1), y.prefix_count(i));
        let mut data = Vec::with_capacity(nxp * nyp * ny);
        for xp in 0..nxp {
            let xv = xp % nx;
            for yp in 0..nyp {
                let zi = z[yp * nx + xv];
                if !(zi > 0.0 && zi.is_finite()) {
                    return Err(Error::Inconsistency(format!(
                        "zero normalizer at stage {i}, x_i = {xv}, y-prefix {yp}"
                    )));
                }
                let row = marginal.kernel_row(i, yp);
                data.extend((0..ny).map(|yv| a[xv * ny + yv] * row[yv] / zi));
            }
        }
        let rows = nxp * nyp;
        stages.push(StageTable::from_parts(rows, ny, data, vec![false; rows]));
    }
    Ok(CausalKernelFamily::from_stages(
        KernelKind::ChannelFeedforward,
        x.clone(),
        y.clone(),
        stages,
    ))
}

/// Exact fixed-`P̄` minimizer of `E[ln Q⃗/P̄] − s E d` over causal channels.
///
/// Backward recursion with cost-to-go `G_i(x^i, y^{i-1}) = −ln Z_i`:
/// `q_i(y | y^{i-1}, x^i) ∝ P̄(y | y^{i-1}) e^{sρ(x_i, y)} exp(−E[G_{i+1}(X^{i+1}, y^{i-1}y) | x^i])`.
/// Also returns `G_0(x_0)`.
fn causal_exact_channel(
    source: &FeedbackFreeSource,
    marginal: &ReproductionMarginal,
    d: &DistortionSpec,
    s: Slope,
) -> Result<(CausalKernelFamily, Vec<f64>)> {
    let (x, y) = (source.x_indexer(), source.y_indexer());
    let (nx, ny) = (d.nx(), d.ny());
    let n = x.horizon();
    let mut stages: Vec<StageTable> = Vec::with_capacity(x.stages());
    let mut g_next: Vec<f64> = Vec::new();
    let mut expo = vec![0.0; ny];
    for i in (0..=n).rev() {
        let (nxp, nyp) = (x.prefix_count(i + 1), y.prefix_count(i));
        let nyp_next = nyp * ny;
        let mut data = Vec::with_capacity(nxp * nyp * ny);
        let mut g = vec![0.0; nxp * nyp];
        for xp in 0..nxp {
            let xv = xp % nx;
            for yp in 0..nyp {
                let row = marginal.kernel_row(i, yp);
                for (yv, e) in expo.iter_mut().enumerate() {
                    let mut v = row[yv].ln() + s.value() * d.rho(xv, yv);
                    if i < n {
                        let cont: f64 = (0..nx)
                            .map(|xn| {
                                source.conditional(i + 1, xp, xn) * g_next[(xp * nx + xn) * nyp_next + yp * ny + yv]
                            })
                            .sum();
                        v -= cont;
                    }
                    *e = v;
                }
                let m = expo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !m.is_finite() {
                    return Err(Error::Inconsistency(format!("zero normalizer at stage {i}")));
                }
                let log_z = m + expo.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
                data.extend(expo.iter().map(|e| (e - log_z).exp()));
                g[xp * nyp + yp] = -log_z;
            }
        }
        let rows = nxp * nyp;
        stages.push(StageTable::from_parts(rows, ny, data, vec![false; rows]));
        g_next = g;
    }
    stages.reverse();
    let channel = CausalKernelFamily::from_stages(KernelKind::ChannelFeedforward, x.clone(), y.clone(), stages);
    Ok((channel, g_next))
}

fn rule_channel(
    rule: UpdateRule,
    source: &FeedbackFreeSource,
    marginal: &ReproductionMarginal,
    d: &DistortionSpec,
    s: Slope,
) -> Result<CausalKernelFamily> {
    match rule {
        UpdateRule::Stationary => stationary_channel(source, marginal, d, s),
        UpdateRule::CausalExact => causal_exact_channel(source, marginal, d, s).map(|(c, _)| c),
    }
}

/// One reproduction-law update:
///
/// `P̄^{r+1}(y^n) = P̄^r(y^n) Σ_{x^n} P(x^n) Π_i A_i(x_i, y_i) / Σ_{y'} A_i(x_i, y') P̄^r(y' | y^{i-1})`
///
/// with `A_i = e^{sρ}`, renormalized to unit mass; stage kernels re-derived
/// by conditioning.
pub fn baa_update(
    source: &FeedbackFreeSource,
    marginal: &ReproductionMarginal,
    d: &DistortionSpec,
    s: Slope,
) -> Result<ReproductionMarginal> {
    check_problem(source, d, marginal)?;
    require_positive(marginal)?;
    let (x, y) = (source.x_indexer(), source.y_indexer());
    let (nx, ny) = (d.nx(), d.ny());
    let a = tilt(d, s);
    let z: Vec<Vec<f64>> = (0..x.stages()).map(|i| stage_normalizers(marginal, d, &a, i)).collect();
    let w = expand(x, y, |i, xa, xv, yb, yv| {
        source.conditional(i, xa, xv) * a[xv * ny + yv] / z[i][yb * nx + xv]
    });
    let n_y = y.len();
    let mut next = marginal.joint().to_vec();
    for (yf, v) in next.iter_mut().enumerate() {
        *v *= (0..x.len()).map(|xf| w[xf * n_y + yf]).sum::<f64>();
    }
    let total = mass_total(&next);
    next.iter_mut().for_each(|v| *v /= total);
    ReproductionMarginal::from_joint(y.clone(), next)
}

/// Largest gap between `marginal`'s stage kernels and those induced by
/// `source ⊗ channel`, over prefixes both charge. Zero at a fixed point.
pub fn fixed_point_residual(
    source: &FeedbackFreeSource,
    channel: &CausalKernelFamily,
    marginal: &ReproductionMarginal,
) -> Result<f64> {
    let joint = causal_product(source.kernel(), channel)?;
    let induced = induced_marginal(&joint.y_marginal(), source)?;
    Ok(marginal.max_kernel_diff(&induced))
}

fn induced_marginal(nu: &[f64], source: &FeedbackFreeSource) -> Result<ReproductionMarginal> {
    let total = mass_total(nu);
    ReproductionMarginal::from_joint(source.y_indexer().clone(), nu.iter().map(|v| v / total).collect())
}

struct PairEval {
    objective: f64,
    distortion: f64,
    induced: Vec<f64>,
}

fn evaluate(source: &FeedbackFreeSource, channel: &CausalKernelFamily, d: &DistortionSpec, s: Slope) -> Result<PairEval> {
    let joint = causal_product(source.kernel(), channel)?;
    let (x, y) = (joint.x_indexer(), joint.y_indexer());
    let letters = (d.horizon() + 1) as f64;
    let distortion = joint.expect(|xf, yf| d.sequence_distortion(x, y, xf, yf)) / letters;
    let info = directed_value(&joint, channel);
    Ok(PairEval {
        objective: info - s.value() * letters * distortion,
        distortion,
        induced: joint.y_marginal(),
    })
}

fn initial_marginal(source: &FeedbackFreeSource, init: Init) -> ReproductionMarginal {
    match init {
        Init::Uniform => ReproductionMarginal::uniform(source.y_indexer().clone()),
        Init::SeededRandomPositive(seed) => ReproductionMarginal::random_positive(source.y_indexer().clone(), seed),
    }
}

/// Alternate channel and reproduction-law updates from `cfg.init`.
pub fn baa_run(source: &FeedbackFreeSource, d: &DistortionSpec, s: Slope, cfg: &BaaConfig) -> Result<BaaTrace> {
    baa_run_from(source, d, s, cfg, initial_marginal(source, cfg.init))
}

/// As [`baa_run`], starting from an explicit positive reproduction law.
///
/// Stops when the law moves less than `tol_marginal` and the fixed-point
/// residual is below `tol_fixed_point`, or after `max_iter` iterations
/// (`converged = false`).
pub fn baa_run_from(
    source: &FeedbackFreeSource,
    d: &DistortionSpec,
    s: Slope,
    cfg: &BaaConfig,
    start: ReproductionMarginal,
) -> Result<BaaTrace> {
    cfg.validate()?;
    check_problem(source, d, &start)?;
    require_positive(&start)?;
    let mut state = start;
    let mut iterates = Vec::new();
    let mut converged = false;
    let mut last = None;
    for iteration in 0..cfg.max_iter {
        let channel = rule_channel(cfg.rule, source, &state, d, s)?;
        let eval = evaluate(source, &channel, d, s)?;
        let next = match cfg.rule {
            UpdateRule::Stationary => baa_update(source, &state, d, s)?,
            UpdateRule::CausalExact => induced_marginal(&eval.induced, source)?,
        };
        let marginal_change = next.sup_distance(&state);
        iterates.push(TraceEntry {
            iteration,
            objective: eval.objective,
            distortion: eval.distortion,
            marginal_change,
        });
        state = next;
        require_positive(&state)?;
        if marginal_change < cfg.tol_marginal {
            let channel = rule_channel(cfg.rule, source, &state, d, s)?;
            let residual = fixed_point_residual(source, &channel, &state)?;
            if residual < cfg.tol_fixed_point {
                converged = true;
                last = Some((channel, residual));
                break;
            }
        }
    }
    let (final_channel, final_residual) = match last {
        Some(done) => done,
        None => {
            let channel = rule_channel(cfg.rule, source, &state, d, s)?;
            let residual = fixed_point_residual(source, &channel, &state)?;
            (channel, residual)
        }
    };
    Ok(BaaTrace {
        slope: s,
        rule: cfg.rule,
        iterates,
        converged,
        final_channel,
        final_marginal: state,
        final_residual,
        tol_fixed_point: cfg.tol_fixed_point,
    })
}

/// Rate and distortion of a finished run.
///
/// For the stationary rule the rate is
/// `R = s(n+1)D − Σ_i E[ln Z_i(X_i, Y^{i-1})]`; for the exact rule it is
/// `R = s(n+1)D + E[G_0(X_0)]`. Either is cross-checked against the
/// directed information of the final pair; a converged trace that disagrees
/// by more than `10 · tol_fixed_point` is an error.
pub fn na_rdf_value(
    source: &FeedbackFreeSource,
    d: &DistortionSpec,
    s: Slope,
    trace: &BaaTrace,
) -> Result<RDPoint> {
    check_problem(source, d, &trace.final_marginal)?;
    let marginal = &trace.final_marginal;
    let channel = &trace.final_channel;
    let joint = causal_product(source.kernel(), channel)?;
    let (x, y) = (joint.x_indexer(), joint.y_indexer());
    let letters = (d.horizon() + 1) as f64;
    let distortion = joint.expect(|xf, yf| d.sequence_distortion(x, y, xf, yf)) / letters;
    let potential = match trace.rule {
        UpdateRule::Stationary => {
            let a = tilt(d, s);
            let z: Vec<Vec<f64>> = (0..x.stages()).map(|i| stage_normalizers(marginal, d, &a, i)).collect();
            let nx = d.nx();
            -joint.expect(|xf, yf| {
                (0..x.stages())
                    .map(|i| z[i][y.prefix(yf, i) * nx + x.symbol(xf, i)].ln())
                    .sum::<f64>()
            })
        }
        UpdateRule::CausalExact => {
            let (_, g0) = causal_exact_channel(source, marginal, d, s)?;
            source.prefix_law(1).iter().zip(&g0).map(|(p, g)| p * g).sum()
        }
    };
    let rate = s.value() * letters * distortion + potential;
    let di = directed_information(source.kernel(), channel)?.value_nats;
    let rate_cross_check = (rate - di).abs();
    if trace.converged && rate_cross_check > 10.0 * trace.tol_fixed_point {
        return Err(Error::Inconsistency(format!(
            "rate formula {rate} and directed information {di} disagree by {rate_cross_check:e}"
        )));
    }
    Ok(RDPoint {
        s,
        distortion,
        rate_nats: rate / letters,
        iterations: trace.iterations(),
        residual: trace.final_residual,
        converged: trace.converged,
        rate_cross_check,
    })
}
