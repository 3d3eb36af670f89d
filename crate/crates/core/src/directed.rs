//! Directed information `I(X^n → Y^n)` as a relative entropy, and its two
//! variational characterizations.
//!
//! With `P = P⃖ ⊗ Q⃗` the causal product of source and channel kernels and
//! `Π = P⃖ ⊗ ν` its reference measure,
//!
//! ```text
//! I(X^n → Y^n) = D(P || Π) = E_P[ ln Q⃗(Y^n|X^n) / ν(Y^n) ]
//!              = min over ν̄  E_P[ ln Q⃗ / ν̄ ]                (attained at ν̄ = ν)
//!              = max over (s, r)  E_P[ ln (S⃖ ⊗ R⃗) / Π ]       (attained at the conditionals of P)
//! ```
//!
//! The gaps are `D(ν || ν̄)` and `D(P || S⃖ ⊗ R⃗)` respectively.

use rand::Rng;

use crate::error::{Error, Result};
use crate::prob::{
    causal_product, condition_joint, entropy, kernel_product, kl_divergence, kl_raw, nats_to_bits,
    normalize_row, pi_measure, prefix_marginal, CausalKernelFamily, FinitePmf, JointCausalDistribution,
    KernelKind, StageTable,
};
use crate::random;

/// Directed information with its chain-rule decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedInfoReport {
    /// `E[ln Q⃗(Y^n|X^n) / ν(Y^n)]` in nats.
    pub value_nats: f64,
    /// `I(X^i; Y_i | Y^{i-1})` for `i = 0..=n`, from prefix entropies.
    pub per_stage: Vec<f64>,
    /// `|value_nats − Σ per_stage|`.
    pub chain_check_residual: f64,
}

impl DirectedInfoReport {
    pub fn value_bits(&self) -> f64 {
        nats_to_bits(self.value_nats)
    }
}

fn expect_kind(k: &CausalKernelFamily, kind: KernelKind, what: &str) -> Result<()> {
    if k.kind() != kind {
        return Err(Error::Dimension(format!("{what} must be {kind:?}, got {:?}", k.kind())));
    }
    Ok(())
}

/// `Σ joint · ln(numer / denom_y)` over the support of `joint`, where
/// `numer` is x-major and `denom_y` indexed by y. `+∞` if `denom_y` vanishes
/// on the support.
fn log_ratio_expectation(joint: &JointCausalDistribution, numer: &[f64], denom_y: &[f64]) -> f64 {
    let ny = denom_y.len();
    let mut acc = 0.0;
    for (k, &m) in joint.masses().iter().enumerate() {
        if m > 0.0 {
            let d = denom_y[k % ny];
            if d <= 0.0 {
                return f64::INFINITY;
            }
            acc += m * (numer[k] / d).ln();
        }
    }
    acc
}

/// `I(X^i; Y_i | Y^{i-1}) = H(X^i,Y^{i-1}) + H(Y^i) − H(Y^{i-1}) − H(X^i,Y^i)`.
fn stage_conditional_mi(joint: &JointCausalDistribution, i: usize) -> f64 {
    let h = |a, b| entropy(&prefix_marginal(joint, a, b));
    h(i + 1, i) + h(0, i + 1) - h(0, i) - h(i + 1, i + 1)
}

/// Directed information of the causal pair `(p, q)`.
///
/// The value is the log-ratio expectation; `per_stage` is recomputed from
/// entropies of prefix marginals of the joint, so the residual compares two
/// independent routes.
pub fn directed_information(p: &CausalKernelFamily, q: &CausalKernelFamily) -> Result<DirectedInfoReport> {
    expect_kind(p, KernelKind::SourceFeedback, "source")?;
    expect_kind(q, KernelKind::ChannelFeedforward, "channel")?;
    let joint = causal_product(p, q)?;
    let value_nats = directed_value(&joint, q);
    let per_stage: Vec<f64> = (0..joint.x_indexer().stages())
        .map(|i| stage_conditional_mi(&joint, i))
        .collect();
    let chain_check_residual = (value_nats - per_stage.iter().sum::<f64>()).abs();
    Ok(DirectedInfoReport { value_nats, per_stage, chain_check_residual })
}

/// `E_joint[ln Q⃗ / ν]` for a joint already built from `q`.
pub(crate) fn directed_value(joint: &JointCausalDistribution, q: &CausalKernelFamily) -> f64 {
    log_ratio_expectation(joint, &kernel_product(q), &joint.y_marginal())
}

/// `I(X^n; Y^n) = D(joint || μ ⊗ ν)`.
pub fn mutual_information(j: &JointCausalDistribution) -> f64 {
    let (mu, nu) = (j.x_marginal(), j.y_marginal());
    let ny = nu.len();
    let prod: Vec<f64> = (0..j.masses().len()).map(|k| mu[k / ny] * nu[k % ny]).collect();
    kl_raw(j.masses(), &prod)
}

/// Part A objective `E_P[ln Q⃗(Y^n|X^n) / ν̄(Y^n)]`; `+∞` when `ν̄` misses
/// the support of `ν`.
pub fn variational_a(p: &CausalKernelFamily, q: &CausalKernelFamily, nu_bar: &FinitePmf) -> Result<f64> {
    expect_kind(p, KernelKind::SourceFeedback, "source")?;
    expect_kind(q, KernelKind::ChannelFeedforward, "channel")?;
    if nu_bar.len() != q.y_indexer().len() {
        return Err(Error::Dimension(format!(
            "ν̄ has {} entries, y-sequence space has {}",
            nu_bar.len(),
            q.y_indexer().len()
        )));
    }
    let joint = causal_product(p, q)?;
    Ok(log_ratio_expectation(&joint, &kernel_product(q), nu_bar.mass()))
}

/// Part B objective `E_P[ln (S⃖ ⊗ R⃗) / Π]`; `−∞` when `S⃖ ⊗ R⃗` vanishes on
/// the support of `P`.
pub fn variational_b(
    p: &CausalKernelFamily,
    q: &CausalKernelFamily,
    s: &CausalKernelFamily,
    r: &CausalKernelFamily,
) -> Result<f64> {
    expect_kind(s, KernelKind::SKind, "s")?;
    expect_kind(r, KernelKind::RKind, "r")?;
    let joint = causal_product(p, q)?;
    let sr = causal_product(s, r)?;
    let pi = pi_measure(&joint, p)?;
    Ok(variational_b_joint(&joint, &sr, &pi))
}

fn variational_b_joint(
    joint: &JointCausalDistribution,
    sr: &JointCausalDistribution,
    pi: &JointCausalDistribution,
) -> f64 {
    let mut acc = 0.0;
    for ((&m, &a), &b) in joint.masses().iter().zip(sr.masses()).zip(pi.masses()) {
        if m > 0.0 {
            if a <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += m * (a / b).ln();
        }
    }
    acc
}

/// Closed-form achiever of Part B:
/// `r_i(x_i | x^{i-1}, y^i) ∝ p_i(x_i | x^{i-1}, y^{i-1}) · q_i(y_i | y^{i-1}, x^i)`.
///
/// Rows with a zero normalizer are filled uniform and flagged.
pub fn optimal_r_kernel(p: &CausalKernelFamily, q: &CausalKernelFamily) -> Result<CausalKernelFamily> {
    expect_kind(p, KernelKind::SourceFeedback, "source")?;
    expect_kind(q, KernelKind::ChannelFeedforward, "channel")?;
    p.check_layout_matches(q.x_indexer(), q.y_indexer())?;
    let (x, y) = (p.x_indexer(), p.y_indexer());
    let stages = (0..x.stages())
        .map(|i| {
            let (kx, ky) = (x.stage_size(i), y.stage_size(i));
            let (nxp, nyp) = (x.prefix_count(i), y.prefix_count(i));
            let rows = nxp * nyp * ky;
            let mut data = vec![0.0; rows * kx];
            let mut filled = vec![false; rows];
            for xa in 0..nxp {
                for yb in 0..nyp {
                    for yv in 0..ky {
                        let row = xa * (nyp * ky) + yb * ky + yv;
                        let cell = &mut data[row * kx..(row + 1) * kx];
                        for (xv, c) in cell.iter_mut().enumerate() {
                            *c = p.factor(i, xa, xv, yb, yv) * q.factor(i, xa, xv, yb, yv);
                        }
                        filled[row] = !normalize_row(cell);
                    }
                }
            }
            StageTable::from_parts(rows, kx, data, filled)
        })
        .collect();
    Ok(CausalKernelFamily::from_stages(KernelKind::RKind, x.clone(), y.clone(), stages))
}

/// `|I(X^n; Y^n) − I(X^n → Y^n)|` for a source without feedback.
pub fn mi_equals_di_check(p: &CausalKernelFamily, q: &CausalKernelFamily) -> Result<f64> {
    if !p.is_feedback_free(1e-12) {
        return Err(Error::InvalidArgument(
            "mutual and directed information coincide only for sources without feedback".into(),
        ));
    }
    let di = directed_information(p, q)?;
    let joint = causal_product(p, q)?;
    Ok((mutual_information(&joint) - di.value_nats).abs())
}

/// Tolerances applied by [`VariationalAudit::passes`].
pub const BOUND_SLACK: f64 = 1e-12;
pub const EQUALITY_TOL: f64 = 1e-10;
pub const R_KERNEL_TOL: f64 = 1e-12;

/// Randomized check of both variational equalities on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalAudit {
    pub trials: usize,
    pub directed_information: f64,
    /// `min (variational_a − I)` over random `ν̄`; must be `≥ −BOUND_SLACK`.
    pub part_a_min_gap: f64,
    /// `max |(variational_a − I) − D(ν || ν̄)|`.
    pub part_a_gap_error: f64,
    /// `|variational_a(ν) − I|`.
    pub part_a_achiever_residual: f64,
    /// `min (I − variational_b)` over random `(s, r)`; must be `≥ −BOUND_SLACK`.
    pub part_b_min_gap: f64,
    /// `max |(I − variational_b) − D(P || S⃖ ⊗ R⃗)|`.
    pub part_b_gap_error: f64,
    /// `|variational_b(conditionals of P) − I|`.
    pub part_b_achiever_residual: f64,
    /// `optimal_r_kernel` vs. conditioning of the joint, on supported rows.
    pub r_kernel_residual: f64,
}

impl VariationalAudit {
    pub fn passes(&self) -> bool {
        self.part_a_min_gap >= -BOUND_SLACK
            && self.part_a_gap_error <= EQUALITY_TOL
            && self.part_a_achiever_residual <= EQUALITY_TOL
            && self.part_b_min_gap >= -BOUND_SLACK
            && self.part_b_gap_error <= EQUALITY_TOL
            && self.part_b_achiever_residual <= EQUALITY_TOL
            && self.r_kernel_residual <= R_KERNEL_TOL
    }
}

/// Draw `trials` random `ν̄` and `(s, r)` pairs and measure both bounds.
pub fn audit_variational<R: Rng + ?Sized>(
    p: &CausalKernelFamily,
    q: &CausalKernelFamily,
    trials: usize,
    rng: &mut R,
) -> Result<VariationalAudit> {
    let di = directed_information(p, q)?.value_nats;
    let joint = causal_product(p, q)?;
    let qv = kernel_product(q);
    let nu = joint.y_marginal();
    let pi = pi_measure(&joint, p)?;
    let (x, y) = (joint.x_indexer().clone(), joint.y_indexer().clone());

    let part_a_achiever_residual = (log_ratio_expectation(&joint, &qv, &nu) - di).abs();
    let s_star = condition_joint(&joint, KernelKind::SKind);
    let r_star = condition_joint(&joint, KernelKind::RKind);
    let part_b_achiever_residual =
        (variational_b_joint(&joint, &causal_product(&s_star, &r_star)?, &pi) - di).abs();
    let r_closed = optimal_r_kernel(p, q)?;
    let r_kernel_residual = r_closed.max_abs_diff_where(&r_star, |i, row| !r_star.stage(i).is_filled(row))?;

    let mut audit = VariationalAudit {
        trials,
        directed_information: di,
        part_a_min_gap: f64::INFINITY,
        part_a_gap_error: 0.0,
        part_a_achiever_residual,
        part_b_min_gap: f64::INFINITY,
        part_b_gap_error: 0.0,
        part_b_achiever_residual,
        r_kernel_residual,
    };
    for _ in 0..trials {
        let nu_bar = random::sequence_pmf(rng, &y);
        let gap_a = log_ratio_expectation(&joint, &qv, nu_bar.mass()) - di;
        audit.part_a_min_gap = audit.part_a_min_gap.min(gap_a);
        audit.part_a_gap_error = audit.part_a_gap_error.max((gap_a - kl_raw(&nu, nu_bar.mass())).abs());

        let s = random::kernel(rng, KernelKind::SKind, &x, &y)?;
        let r = random::kernel(rng, KernelKind::RKind, &x, &y)?;
        let sr = causal_product(&s, &r)?;
        let gap_b = di - variational_b_joint(&joint, &sr, &pi);
        audit.part_b_min_gap = audit.part_b_min_gap.min(gap_b);
        audit.part_b_gap_error = audit.part_b_gap_error.max((gap_b - kl_divergence(&joint, &sr)?).abs());
    }
    Ok(audit)
}
