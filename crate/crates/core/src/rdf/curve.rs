use rayon::prelude::*;

use super::baa::{baa_run, baa_run_from, na_rdf_value, BaaConfig, RDPoint};
use super::distortion::{DistortionSpec, Slope};
use crate::error::{Error, Result};
use crate::prob::FeedbackFreeSource;

/// Points closer than this in distortion are treated as one when checking
/// convexity; their chord slope is dominated by convergence noise.
const SAME_DISTORTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurveMode {
    /// Sequential; each slope starts from the previous final law.
    #[default]
    WarmStart,
    /// Sequential; every slope starts from `cfg.init`.
    Cold,
    /// As `Cold`, slopes solved concurrently.
    ColdParallel,
}

/// Sweep an ascending grid of slopes (most negative first).
///
/// Points are returned in grid order, so distortion should not decrease
/// along the output.
pub fn rd_curve(
    source: &FeedbackFreeSource,
    d: &DistortionSpec,
    slopes: &[Slope],
    cfg: &BaaConfig,
    mode: CurveMode,
) -> Result<Vec<RDPoint>> {
    cfg.validate()?;
    d.check_layout(source.x_indexer(), source.y_indexer())?;
    if slopes.is_empty() {
        return Err(Error::InvalidArgument("empty slope grid".into()));
    }
    if slopes.windows(2).any(|w| w[0].value() > w[1].value()) {
        return Err(Error::InvalidArgument("slope grid must be ascending".into()));
    }
    let cold = |&s: &Slope| baa_run(source, d, s, cfg).and_then(|t| na_rdf_value(source, d, s, &t));
    match mode {
        CurveMode::Cold => slopes.iter().map(cold).collect(),
        CurveMode::ColdParallel => slopes.par_iter().map(cold).collect(),
        CurveMode::WarmStart => {
            let mut out = Vec::with_capacity(slopes.len());
            let mut start = None;
            for &s in slopes {
                let trace = match start.take() {
                    Some(m) => baa_run_from(source, d, s, cfg, m)?,
                    None => baa_run(source, d, s, cfg)?,
                };
                out.push(na_rdf_value(source, d, s, &trace)?);
                if trace.final_marginal.is_positive() {
                    start = Some(trace.final_marginal);
                }
            }
            Ok(out)
        }
    }
}

/// Shape diagnostics of a curve given in grid order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveShape {
    /// Largest decrease of `D` between consecutive points.
    pub distortion_drop: f64,
    /// Largest increase of `R` between consecutive points.
    pub rate_rise: f64,
    /// Largest decrease of the chord slope `ΔR/ΔD` between consecutive
    /// chords, over points at least `1e-6` apart in `D`.
    pub slope_drop: f64,
    pub slack: f64,
}

impl CurveShape {
    pub fn check(points: &[RDPoint], slack: f64) -> Self {
        let mut distortion_drop = 0.0f64;
        let mut rate_rise = 0.0f64;
        for w in points.windows(2) {
            distortion_drop = distortion_drop.max(w[0].distortion - w[1].distortion);
            rate_rise = rate_rise.max(w[1].rate_nats - w[0].rate_nats);
        }
        let mut kept: Vec<(f64, f64)> = Vec::new();
        for p in points {
            match kept.last() {
                Some(&(d, _)) if p.distortion - d < SAME_DISTORTION => {}
                _ => kept.push((p.distortion, p.rate_nats)),
            }
        }
        let chords: Vec<f64> = kept.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        let slope_drop = chords.windows(2).map(|c| c[0] - c[1]).fold(0.0f64, f64::max);
        Self { distortion_drop, rate_rise, slope_drop, slack }
    }

    pub fn distortion_nondecreasing(&self) -> bool {
        self.distortion_drop <= self.slack
    }

    pub fn rate_nonincreasing(&self) -> bool {
        self.rate_rise <= self.slack
    }

    pub fn convex(&self) -> bool {
        self.slope_drop <= self.slack
    }

    pub fn holds(&self) -> bool {
        self.distortion_nondecreasing() && self.rate_nonincreasing() && self.convex()
    }
}
