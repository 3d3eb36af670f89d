use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use causalrd::directed::{audit_variational, directed_information, mutual_information};
use causalrd::oracle::{classical_blahut, grid_lagrangian_min, GRID_STEP_N0, GRID_STEP_N1};
use causalrd::prob::{causal_product, nats_to_bits, FinitePmf};
use causalrd::random;
use causalrd::rdf::{baa_run, na_rdf_value, rd_curve, CurveMode, CurveShape, RDPoint};
use causalrd::Error;

use crate::error::{CliError, CliResult};
use crate::problem::Problem;

pub const CSV_HEADER: &str = "s,D,R_nats_per_letter,R_bits_per_letter,iterations,residual,converged";

/// Whether a command's own check passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn both(nats: f64) -> String {
    // Display only: keep round-off from printing as "-0.000000".
    let nats = if nats.abs() < 1e-12 { 0.0 } else { nats };
    format!("{nats:.9} nats ({:.6} bits)", nats_to_bits(nats))
}

pub fn dirinfo(problem: &Problem, out: &mut dyn Write) -> CliResult<Verdict> {
    let q = problem.require_channel()?;
    let report = directed_information(&problem.source, q)?;
    let mi = mutual_information(&causal_product(&problem.source, q)?);
    let mut text = String::new();
    let _ = writeln!(text, "directed information I(X^n -> Y^n): {}", both(report.value_nats));
    let _ = writeln!(text, "mutual information   I(X^n ; Y^n):  {}", both(mi));
    let _ = writeln!(text, "per stage I(X^i ; Y_i | Y^(i-1)):");
    for (i, v) in report.per_stage.iter().enumerate() {
        let _ = writeln!(text, "  stage {i}: {}", both(*v));
    }
    let _ = writeln!(text, "chain-rule residual: {:.3e}", report.chain_check_residual);
    emit(out, &text)?;
    if let Some(path) = &problem.output.report {
        write_file(path, &text)?;
    }
    Ok(Verdict::Pass)
}

pub fn check_variational(problem: &Problem, trials: usize, seed: u64, out: &mut dyn Write) -> CliResult<Verdict> {
    let q = problem.require_channel()?;
    if trials == 0 {
        return Err(CliError::field("--trials", "must be at least 1"));
    }
    let a = audit_variational(&problem.source, q, trials, &mut random::seeded(seed))?;
    let verdict = Verdict::from(a.passes());
    let mut text = String::new();
    let _ = writeln!(text, "trials: {trials} (seed {seed})");
    let _ = writeln!(text, "directed information: {}", both(a.directed_information));
    let _ = writeln!(text, "part A: min gap {:.3e}, gap vs D(nu||nu_bar) {:.3e}, achiever residual {:.3e}",
        a.part_a_min_gap, a.part_a_gap_error, a.part_a_achiever_residual);
    let _ = writeln!(text, "part B: min gap {:.3e}, gap vs D(P||SxR) {:.3e}, achiever residual {:.3e}",
        a.part_b_min_gap, a.part_b_gap_error, a.part_b_achiever_residual);
    let _ = writeln!(text, "optimal r kernel residual: {:.3e}", a.r_kernel_residual);
    let _ = writeln!(text, "{}", verdict.label());
    emit(out, &text)?;
    if let Some(path) = &problem.output.report {
        write_file(path, &text)?;
    }
    Ok(verdict)
}

pub fn curve_csv(points: &[RDPoint]) -> String {
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for p in points {
        let _ = writeln!(
            csv,
            "{:.12},{:.12},{:.12},{:.12},{},{:.12e},{}",
            p.s.value(),
            p.distortion,
            p.rate_nats,
            p.rate_bits(),
            p.iterations,
            p.residual,
            p.converged
        );
    }
    csv
}

pub fn rdf_curve(
    problem: &Problem,
    csv_path: Option<&Path>,
    warm_start: bool,
    parallel: bool,
    out: &mut dyn Write,
) -> CliResult<Verdict> {
    let mode = match (warm_start, parallel) {
        (true, false) => CurveMode::WarmStart,
        (false, false) => CurveMode::Cold,
        (false, true) => CurveMode::ColdParallel,
        (true, true) => return Err(CliError::Validation("--parallel requires --no-warm-start".into())),
    };
    let source = problem.require_feedback_free()?;
    let d = problem.require_distortion()?;
    let slopes = problem.require_slopes()?;
    let path = csv_path
        .or(problem.output.curve_csv.as_deref())
        .ok_or_else(|| CliError::Validation("no CSV destination: pass --out or set output.curve_csv".into()))?;
    log::info!("sweeping {} slopes ({mode:?}, {:?} rule)", slopes.len(), problem.config.rule);
    let points = rd_curve(source, d, slopes, &problem.config, mode)?;
    for p in &points {
        log::debug!("s={} D={} R={} iterations={}", p.s.value(), p.distortion, p.rate_nats, p.iterations);
    }
    write_file(path, &curve_csv(&points))?;

    let stalled = points.iter().filter(|p| !p.converged).count();
    if stalled > 0 {
        log::warn!("{stalled} of {} points did not converge (flagged converged=false)", points.len());
    }
    let shape = CurveShape::check(&points, 1e-7);
    let mut text = String::new();
    let _ = writeln!(text, "wrote {} points to {}", points.len(), path.display());
    let (first, last) = (&points[0], &points[points.len() - 1]);
    for (tag, p) in [("first", first), ("last", last)] {
        let _ = writeln!(
            text,
            "{tag}: s={:.6} D={:.9} R={:.9} nats/letter ({:.9} bits)",
            p.s.value(),
            p.distortion,
            p.rate_nats,
            p.rate_bits()
        );
    }
    let _ = writeln!(text, "non-converged: {stalled}");
    let _ = writeln!(text, "monotone: {}", shape.distortion_nondecreasing() && shape.rate_nonincreasing());
    let _ = writeln!(text, "convex: {}", shape.convex());
    emit(out, &text)?;
    Ok(Verdict::Pass)
}

pub fn oracle_compare(problem: &Problem, step: Option<f64>, out: &mut dyn Write) -> CliResult<Verdict> {
    let source = problem.require_feedback_free()?;
    let d = problem.require_distortion()?;
    let slopes = problem.require_slopes()?;
    let step = step.unwrap_or(if source.horizon() == 0 { GRID_STEP_N0 } else { GRID_STEP_N1 });
    let letter = source.memoryless_letter();
    let mut text = String::new();
    let mut ok = true;
    for &s in slopes {
        let oracle = grid_lagrangian_min(source, d, s, step).map_err(|e| match e {
            Error::TooLarge(msg) => CliError::Validation(format!(
                "instance outside the grid oracle's limits (horizon ≤ 1, alphabets ≤ 3, ≤ 1e9 evaluations): {msg}"
            )),
            other => other.into(),
        })?;
        let trace = baa_run(source, d, s, &problem.config)?;
        let gap = trace.final_objective() - oracle.value_nats;
        let pass = trace.converged && gap.abs() <= 3.0 * step;
        ok &= pass;
        let _ = writeln!(
            text,
            "s={:.6}: alternating {:.9} grid {:.9} gap {gap:+.3e} (limit {:.3e}) {}",
            s.value(),
            trace.final_objective(),
            oracle.value_nats,
            3.0 * step,
            Verdict::from(pass).label()
        );
        if let Some(l) = &letter {
            let pt = na_rdf_value(source, d, s, &trace)?;
            let classical = classical_blahut(&FinitePmf::from_vec(l.clone())?, &d.rows(), s)?;
            let gap = pt.rate_nats - classical.value_nats;
            let pass = gap.abs() <= 1e-8;
            ok &= pass;
            let _ = writeln!(
                text,
                "         i.i.d. rate {:.12} classical {:.12} gap {gap:+.3e} (limit 1e-8) {}",
                pt.rate_nats,
                classical.value_nats,
                Verdict::from(pass).label()
            );
        }
    }
    let verdict = Verdict::from(ok);
    let _ = writeln!(text, "{}", verdict.label());
    emit(out, &text)?;
    Ok(verdict)
}
