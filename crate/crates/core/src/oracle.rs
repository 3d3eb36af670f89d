//! Independent reference values for the rate-distortion solver.
//!
//! Nothing here calls into [`crate::rdf`]'s algorithms; only its plain data
//! types ([`DistortionSpec`], [`Slope`]) are shared.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prob::{binary_entropy, CausalKernelFamily, FeedbackFreeSource, FinitePmf, KernelKind, StageTable};
use crate::rdf::{DistortionSpec, Slope};

/// Upper bound on Lagrangian evaluations for one grid search.
pub const MAX_GRID_EVALUATIONS: f64 = 1e9;
pub const GRID_STEP_N0: f64 = 0.01;
pub const GRID_STEP_N1: f64 = 0.02;
const BA_TOL: f64 = 1e-14;
const BA_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Grid,
    ClassicalBaa,
    AnalyticBinary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub method: OracleMethod,
    /// Grid: minimal `I(X^n → Y^n) − s Σ_i E ρ(X_i, Y_i)`. Otherwise the
    /// per-letter rate. Nats.
    pub value_nats: f64,
    /// Per-letter distortion at the reported point, when there is one.
    pub distortion: Option<f64>,
    pub argmin_channel: Option<CausalKernelFamily>,
    /// Grid step.
    pub resolution: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Points of `{k/m : k ∈ ℕ^len, Σk = m}` in lexicographic order of `k`.
fn simplex_grid(len: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(len: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == len {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / m as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(len, left - k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, m, m, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Single-letter grid problem: rows `g ∈ G` for each input letter.
struct LetterGrid {
    points: Vec<Vec<f64>>,
    /// `Σ_y g(y) ln g(y)` per point.
    neg_entropy: Vec<f64>,
    /// `Σ_y g(y) ρ(x, y)` per input letter, then point.
    rho_dot: Vec<Vec<f64>>,
    nx: usize,
    ny: usize,
    s: f64,
}

impl LetterGrid {
    fn new(d: &DistortionSpec, s: Slope, m: usize) -> Self {
        let (nx, ny) = (d.nx(), d.ny());
        let points = simplex_grid(ny, m);
        let neg_entropy = points.iter().map(|g| g.iter().map(|&v| xlnx(v)).sum()).collect();
        let rho_dot = (0..nx)
            .map(|x| points.iter().map(|g| (0..ny).map(|y| g[y] * d.rho(x, y)).sum()).collect())
            .collect();
        Self { points, neg_entropy, rho_dot, nx, ny, s: s.value() }
    }

    fn combos(&self) -> usize {
        self.points.len().pow(self.nx as u32)
    }

    fn decode(&self, mut c: usize, rows: &mut [usize]) {
        let g = self.points.len();
        for r in rows.iter_mut().rev() {
            *r = c % g;
            c /= g;
        }
    }

    /// `I(X; Y) − s E ρ` for the channel with row `rows[x]` at input `x`.
    fn eval(&self, letter: &[f64], rows: &[usize]) -> f64 {
        let mut nu = [0.0f64; 3];
        let mut acc = 0.0;
        for (x, &r) in rows.iter().enumerate() {
            let px = letter[x];
            if px == 0.0 {
                continue;
            }
            acc += px * (self.neg_entropy[r] - self.s * self.rho_dot[x][r]);
            for (y, v) in nu.iter_mut().enumerate().take(self.ny) {
                *v += px * self.points[r][y];
            }
        }
        acc - nu[..self.ny].iter().map(|&v| xlnx(v)).sum::<f64>()
    }

    fn distortion(&self, letter: &[f64], rows: &[usize]) -> f64 {
        rows.iter().enumerate().map(|(x, &r)| letter[x] * self.rho_dot[x][r]).sum()
    }

    /// Smallest value and the first combination attaining it.
    fn minimize(&self, letter: &[f64]) -> (f64, usize) {
        let mut rows = vec![0; self.nx];
        let mut best = (f64::INFINITY, 0);
        for c in 0..self.combos() {
            self.decode(c, &mut rows);
            let v = self.eval(letter, &rows);
            if v < best.0 {
                best = (v, c);
            }
        }
        best
    }

    fn rows_of(&self, c: usize) -> Vec<usize> {
        let mut rows = vec![0; self.nx];
        self.decode(c, &mut rows);
        rows
    }
}

fn earlier((va, ia): (f64, usize), (vb, ib): (f64, usize)) -> (f64, usize) {
    if va < vb || (va == vb && ia <= ib) {
        (va, ia)
    } else {
        (vb, ib)
    }
}

/// Brute-force minimum of `I(X^n → Y^n) − s Σ_i E ρ(X_i, Y_i)` over channels
/// whose rows lie on the simplex grid of the given step.
///
/// For `n = 1` the second-stage rows depend on `(y_0, x_1)`; a channel that
/// also looks at `x_0` can be averaged over it given `(y_0, x_1)` without
/// changing the distortion or raising the information term, so the
/// restriction does not move the optimum. The stage-1 problem then splits
/// into one single-letter problem per `y_0`, under the posterior of `x_1`.
pub fn grid_lagrangian_min(
    source: &FeedbackFreeSource,
    d: &DistortionSpec,
    s: Slope,
    step: f64,
) -> Result<OracleReport> {
    d.check_layout(source.x_indexer(), source.y_indexer())?;
    let n = source.horizon();
    let (nx, ny) = (d.nx(), d.ny());
    if nx > 3 || ny > 3 || n > 1 {
        return Err(Error::TooLarge(format!(
            "grid oracle supports |X|, |Y| ≤ 3 and horizon ≤ 1; got |X|={nx}, |Y|={ny}, horizon {n}"
        )));
    }
    if !(step > 0.0 && step <= 0.05) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 0.05]")));
    }
    let m = (1.0 / step).round();
    if ((1.0 / step) - m).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("1/step must be an integer, got step {step}")));
    }
    let grid = LetterGrid::new(d, s, m as usize);
    let combos = grid.combos() as f64;
    let evaluations = if n == 0 { combos } else { combos * (1.0 + ny as f64 * combos) };
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(Error::TooLarge(format!(
            "grid search needs {evaluations:.3e} evaluations (limit {MAX_GRID_EVALUATIONS:.0e}); use a coarser step"
        )));
    }
    let p0 = source.prefix_law(1);
    let (value, distortion, stages) = if n == 0 {
        let (v, c) = (0..grid.combos())
            .into_par_iter()
            .map(|c| (grid.eval(&p0, &grid.rows_of(c)), c))
            .reduce(|| (f64::INFINITY, usize::MAX), earlier);
        let rows = grid.rows_of(c);
        let table: Vec<f64> = rows.iter().flat_map(|&r| grid.points[r].clone()).collect();
        (v, grid.distortion(&p0, &rows), vec![StageTable::from_parts(nx, ny, table, vec![false; nx])])
    } else {
        let trans: Vec<Vec<f64>> = (0..nx).map(|x0| (0..nx).map(|x1| source.conditional(1, x0, x1)).collect()).collect();
        let stage1 = |rows0: &[usize], keep: bool| {
            let mut total = 0.0;
            let mut dist = 0.0;
            let mut picks = Vec::new();
            for y0 in 0..ny {
                let py0: f64 = (0..nx).map(|x0| p0[x0] * grid.points[rows0[x0]][y0]).sum();
                if py0 == 0.0 {
                    picks.push(0);
                    continue;
                }
                let post: Vec<f64> = (0..nx)
                    .map(|x1| (0..nx).map(|x0| p0[x0] * grid.points[rows0[x0]][y0] * trans[x0][x1]).sum::<f64>() / py0)
                    .collect();
                let (v, c) = grid.minimize(&post);
                total += py0 * v;
                if keep {
                    dist += py0 * grid.distortion(&post, &grid.rows_of(c));
                    picks.push(c);
                }
            }
            (total, dist, picks)
        };
        let (v, c) = (0..grid.combos())
            .into_par_iter()
            .map(|c| {
                let rows0 = grid.rows_of(c);
                (grid.eval(&p0, &rows0) + stage1(&rows0, false).0, c)
            })
            .reduce(|| (f64::INFINITY, usize::MAX), earlier);
        let rows0 = grid.rows_of(c);
        let (_, dist1, picks) = stage1(&rows0, true);
        let t0: Vec<f64> = rows0.iter().flat_map(|&r| grid.points[r].clone()).collect();
        let mut t1 = Vec::with_capacity(nx * nx * ny * ny);
        for xp in 0..nx * nx {
            let x1 = xp % nx;
            for &pick in &picks {
                t1.extend_from_slice(&grid.points[grid.rows_of(pick)[x1]]);
            }
        }
        let rows1 = nx * nx * ny;
        let stages = vec![
            StageTable::from_parts(nx, ny, t0, vec![false; nx]),
            StageTable::from_parts(rows1, ny, t1, vec![false; rows1]),
        ];
        (v, (grid.distortion(&p0, &rows0) + dist1) / 2.0, stages)
    };
    let channel = CausalKernelFamily::from_stages(
        KernelKind::ChannelFeedforward,
        source.x_indexer().clone(),
        source.y_indexer().clone(),
        stages,
    );
    Ok(OracleReport {
        method: OracleMethod::Grid,
        value_nats: value,
        distortion: Some(distortion),
        argmin_channel: Some(channel),
        resolution: Some(step),
        converged: true,
        iterations: evaluations as usize,
    })
}

/// Classical alternating minimization for a memoryless source at slope `s`.
///
/// Reports the per-letter rate with its distortion; `converged` is false if
/// the output law still moved by more than `1e-14` after `10^6` rounds.
pub fn classical_blahut(letter: &FinitePmf, rho: &[Vec<f64>], s: Slope) -> Result<OracleReport> {
    let nx = letter.len();
    if rho.len() != nx || rho.iter().any(|r| r.is_empty() || r.len() != rho[0].len()) {
        return Err(Error::Dimension(format!("distortion matrix must be {nx} rows of equal length")));
    }
    if rho.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument("distortion entries must be finite and non-negative".into()));
    }
    let p = letter.mass();
    let ny = rho[0].len();
    let a: Vec<Vec<f64>> = rho.iter().map(|r| r.iter().map(|v| (s.value() * v).exp()).collect()).collect();
    let mut out = vec![1.0 / ny as f64; ny];
    let mut cond = vec![vec![0.0; ny]; nx];
    let channel = |out: &[f64], cond: &mut [Vec<f64>]| {
        for x in 0..nx {
            let z: f64 = (0..ny).map(|y| a[x][y] * out[y]).sum();
            for y in 0..ny {
                cond[x][y] = a[x][y] * out[y] / z;
            }
        }
    };
    let mut converged = false;
    let mut iterations = 0;
    while iterations < BA_MAX_ITER {
        iterations += 1;
        channel(&out, &mut cond);
        let next: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| p[x] * cond[x][y]).sum()).collect();
        let change = next.iter().zip(&out).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        out = next;
        if change < BA_TOL {
            converged = true;
            break;
        }
    }
    channel(&out, &mut cond);
    let induced: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| p[x] * cond[x][y]).sum()).collect();
    let mut rate = 0.0;
    let mut distortion = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let w = p[x] * cond[x][y];
            if w > 0.0 {
                rate += w * (cond[x][y] / induced[y]).ln();
                distortion += w * rho[x][y];
            }
        }
    }
    Ok(OracleReport {
        method: OracleMethod::ClassicalBaa,
        value_nats: rate.max(0.0),
        distortion: Some(distortion),
        argmin_channel: None,
        resolution: None,
        converged,
        iterations,
    })
}

/// `R(D) = h(p) − h(D)` for `D < min(p, 1 − p)`, else 0; binary Hamming.
pub fn analytic_binary_rdf(p: f64, distortion: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("source bias {p} outside (0, 1)")));
    }
    if !(distortion >= 0.0 && distortion.is_finite()) {
        return Err(Error::InvalidArgument(format!("distortion {distortion} must be finite and ≥ 0")));
    }
    let p = p.min(1.0 - p);
    Ok(if distortion < p { binary_entropy(p) - binary_entropy(distortion) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn iid(p: f64, n: usize) -> FeedbackFreeSource {
        FeedbackFreeSource::memoryless(&FinitePmf::bernoulli(p).unwrap(), &Alphabet::binary("y"), n).unwrap()
    }

    fn ham() -> Vec<Vec<f64>> {
        vec![vec![0.0, 1.0], vec![1.0, 0.0]]
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 5);
        assert_eq!(simplex_grid(3, 10).len(), 66);
        assert_eq!(simplex_grid(2, 2), vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
    }

    #[test]
    fn analytic_values() {
        assert_abs_diff_eq!(analytic_binary_rdf(0.5, 0.1).unwrap(), LN_2 - binary_entropy(0.1), epsilon = 1e-15);
        assert_abs_diff_eq!(analytic_binary_rdf(0.5, 0.1).unwrap(), 0.368_064_2, epsilon = 1e-7);
        assert_eq!(analytic_binary_rdf(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(analytic_binary_rdf(0.7, 0.4).unwrap(), 0.0);
        assert_abs_diff_eq!(analytic_binary_rdf(0.7, 0.0).unwrap(), binary_entropy(0.3), epsilon = 1e-15);
        assert!(analytic_binary_rdf(0.0, 0.1).is_err());
        assert!(analytic_binary_rdf(0.5, -0.1).is_err());
    }

    #[test]
    fn analytic_is_decreasing_and_convex() {
        let p = 0.3;
        let r: Vec<f64> = (0..=400).map(|k| analytic_binary_rdf(p, k as f64 * 1e-3).unwrap()).collect();
        for w in r.windows(3) {
            assert!(w[1] <= w[0] + 1e-15);
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12);
        }
    }

    #[test]
    fn classical_matches_closed_form() {
        let u = FinitePmf::uniform(Alphabet::binary("x"));
        let rep = classical_blahut(&u, &ham(), Slope::new(-(9.0f64).ln()).unwrap()).unwrap();
        assert!(rep.converged);
        assert_abs_diff_eq!(rep.distortion.unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.value_nats, LN_2 - binary_entropy(0.1), epsilon = 1e-12);
        let zero = classical_blahut(&u, &ham(), Slope::new(0.0).unwrap()).unwrap();
        assert!(zero.value_nats.abs() < 1e-15);

        let b = FinitePmf::bernoulli(0.7).unwrap();
        for s in [-6.0, -4.0, -3.0, -2.0] {
            let rep = classical_blahut(&b, &ham(), Slope::new(s).unwrap()).unwrap();
            let d = rep.distortion.unwrap();
            assert!(d < 0.3);
            assert_abs_diff_eq!(rep.value_nats, analytic_binary_rdf(0.7, d).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn grid_finds_the_binary_symmetric_channel() {
        let src = iid(0.5, 0);
        let d = DistortionSpec::hamming(2, 0).unwrap();
        let s = Slope::new(-(9.0f64).ln()).unwrap();
        let rep = grid_lagrangian_min(&src, &d, s, 0.005).unwrap();
        let exact = LN_2 - binary_entropy(0.1) + (9.0f64).ln() * 0.1;
        assert!(rep.value_nats >= exact - 1e-12);
        assert!(rep.value_nats - exact < 1e-3);
        let bsc = CausalKernelFamily::binary_symmetric_channel(0.1, 0).unwrap();
        assert!(rep.argmin_channel.unwrap().max_abs_diff(&bsc).unwrap() < 0.02);
    }

    #[test]
    fn grid_at_zero_slope_is_zero() {
        let src = iid(0.7, 1);
        let d = DistortionSpec::hamming(2, 1).unwrap();
        let rep = grid_lagrangian_min(&src, &d, Slope::new(0.0).unwrap(), 0.05).unwrap();
        assert!(rep.value_nats.abs() < 1e-12);
    }

    #[test]
    fn grid_horizon_one_iid_doubles_single_letter() {
        let d0 = DistortionSpec::hamming(2, 0).unwrap();
        let d1 = DistortionSpec::hamming(2, 1).unwrap();
        let s = Slope::new(-2.0).unwrap();
        let one = grid_lagrangian_min(&iid(0.7, 0), &d0, s, 0.02).unwrap();
        let two = grid_lagrangian_min(&iid(0.7, 1), &d1, s, 0.02).unwrap();
        assert_abs_diff_eq!(two.value_nats, 2.0 * one.value_nats, epsilon = 1e-12);
        let ch = two.argmin_channel.unwrap();
        assert_eq!(ch.kind(), KernelKind::ChannelFeedforward);
        assert_eq!(ch.stage(1).rows(), 8);
    }

    #[test]
    fn grid_limits() {
        let d2 = DistortionSpec::hamming(2, 2).unwrap();
        assert!(matches!(
            grid_lagrangian_min(&iid(0.5, 2), &d2, Slope::new(-1.0).unwrap(), 0.05),
            Err(Error::TooLarge(_))
        ));
        let d0 = DistortionSpec::hamming(2, 0).unwrap();
        assert!(grid_lagrangian_min(&iid(0.5, 0), &d0, Slope::new(-1.0).unwrap(), 0.1).is_err());
        assert!(grid_lagrangian_min(&iid(0.5, 0), &d0, Slope::new(-1.0).unwrap(), 0.03).is_err());
        let t = FinitePmf::uniform(Alphabet::new(3, "x").unwrap());
        let src = FeedbackFreeSource::memoryless(&t, &Alphabet::new(3, "y").unwrap(), 0).unwrap();
        let d3 = DistortionSpec::hamming(3, 0).unwrap();
        assert!(matches!(
            grid_lagrangian_min(&src, &d3, Slope::new(-1.0).unwrap(), 0.005),
            Err(Error::TooLarge(_))
        ));
    }
}
