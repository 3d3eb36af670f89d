//! JSON problem files.
//!
//! ```json
//! {
//!   "horizon": 1,
//!   "x_alphabet": 2,
//!   "y_alphabet": 2,
//!   "source": { "kind": "iid", "letter": [0.5, 0.5] },
//!   "channel": { "kind": "memoryless", "matrix": [[0.9, 0.1], [0.1, 0.9]] },
//!   "distortion": [[0.0, 1.0], [1.0, 0.0]],
//!   "s_grid": [-4.0, -2.0, -1.0],
//!   "baa": { "rule": "stationary", "max_iter": 5000 },
//!   "output": { "report": "report.txt", "curve_csv": "curve.csv" }
//! }
//! ```
//!
//! All values are in nats. `horizon` is `n`, so sequences have `n + 1` letters.

use std::path::{Path, PathBuf};

use causalrd::prob::{Alphabet, CausalKernelFamily, FeedbackFreeSource, FinitePmf, KernelKind, SequenceIndexer, MAX_JOINT_ENTRIES};
use causalrd::rdf::{BaaConfig, DistortionSpec, Init, Slope, UpdateRule};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub horizon: usize,
    pub x_alphabet: usize,
    pub y_alphabet: usize,
    pub source: SourceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baa: Option<BaaOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Iid {
        letter: Vec<f64>,
    },
    Markov {
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    },
    /// `stages[i]` lists `p_i(· | x^{i-1})` for every x-prefix in
    /// lexicographic order, or `p_i(· | x^{i-1}, y^{i-1})` for every
    /// `(x-prefix, y-prefix)` pair (y varying fastest) to model feedback.
    Explicit {
        stages: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// `q(y_i | x_i) = matrix[x_i][y_i]` at every stage.
    Memoryless { matrix: Vec<Vec<f64>> },
    /// `stages[i]` lists `q_i(· | y^{i-1}, x^i)` for every `(x^i, y^{i-1})`,
    /// x-prefix major.
    Explicit { stages: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    Stationary,
    CausalExact,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaaOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_marginal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_fixed_point: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Seeded random positive start instead of the uniform law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleName>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_csv: Option<PathBuf>,
}

/// A validated problem, ready for the library.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub source: CausalKernelFamily,
    /// Present when the source has no feedback.
    pub feedback_free: Option<FeedbackFreeSource>,
    pub channel: Option<CausalKernelFamily>,
    pub distortion: Option<DistortionSpec>,
    pub slopes: Vec<Slope>,
    pub config: BaaConfig,
    pub output: OutputPaths,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn validate(&self) -> CliResult<Problem> {
        let (nx, ny, n) = (self.x_alphabet, self.y_alphabet, self.horizon);
        if nx == 0 {
            return Err(CliError::field("x_alphabet", "must be at least 1"));
        }
        if ny == 0 {
            return Err(CliError::field("y_alphabet", "must be at least 1"));
        }
        let entries = (nx as f64 * ny as f64).powi(n as i32 + 1);
        if entries > MAX_JOINT_ENTRIES as f64 {
            return Err(CliError::field(
                "horizon",
                format!("|X^n|·|Y^n| = {entries:.3e} exceeds the limit of {MAX_JOINT_ENTRIES} joint entries"),
            ));
        }
        let x = SequenceIndexer::uniform(n, &Alphabet::new(nx, "x")?)?;
        let y = SequenceIndexer::uniform(n, &Alphabet::new(ny, "y")?)?;
        let source = self.source_kernel(&x, &y)?;
        let feedback_free = FeedbackFreeSource::new(source.clone()).ok();
        let channel = self.channel.as_ref().map(|c| channel_kernel(c, &x, &y)).transpose()?;
        let distortion = self
            .distortion
            .as_ref()
            .map(|rows| {
                if rows.len() != nx || rows.iter().any(|r| r.len() != ny) {
                    return Err(CliError::field("distortion", format!("must be {nx}×{ny}")));
                }
                DistortionSpec::new(n, rows).map_err(|e| CliError::field("distortion", e))
            })
            .transpose()?;
        let slopes = self
            .s_grid
            .iter()
            .enumerate()
            .map(|(k, &s)| Slope::new(s).map_err(|e| CliError::field(&format!("s_grid[{k}]"), e)))
            .collect::<CliResult<Vec<_>>>()?;
        if let Some(k) = slopes.windows(2).position(|w| w[0].value() > w[1].value()) {
            return Err(CliError::field(&format!("s_grid[{}]", k + 1), "grid must be ascending"));
        }
        Ok(Problem {
            source,
            feedback_free,
            channel,
            distortion,
            slopes,
            config: self.config()?,
            output: self.output.clone().unwrap_or_default(),
        })
    }

    fn config(&self) -> CliResult<BaaConfig> {
        let mut cfg = BaaConfig::default();
        if let Some(o) = &self.baa {
            if let Some(t) = o.tol_marginal {
                cfg.tol_marginal = t;
            }
            if let Some(t) = o.tol_fixed_point {
                cfg.tol_fixed_point = t;
            }
            if let Some(m) = o.max_iter {
                cfg.max_iter = m;
            }
            if let Some(seed) = o.init_seed {
                cfg.init = Init::SeededRandomPositive(seed);
            }
            if let Some(r) = o.rule {
                cfg.rule = match r {
                    RuleName::Stationary => UpdateRule::Stationary,
                    RuleName::CausalExact => UpdateRule::CausalExact,
                };
            }
        }
        cfg.validate().map_err(|e| CliError::field("baa", e))?;
        Ok(cfg)
    }

    fn source_kernel(&self, x: &SequenceIndexer, y: &SequenceIndexer) -> CliResult<CausalKernelFamily> {
        let (nx, ny) = (self.x_alphabet, self.y_alphabet);
        let y_alpha = Alphabet::new(ny, "y")?;
        let letter_pmf = |field: &str, v: &[f64]| -> CliResult<FinitePmf> {
            if v.len() != nx {
                return Err(CliError::field(field, format!("needs {nx} entries, got {}", v.len())));
            }
            FinitePmf::new(Alphabet::new(nx, "x")?, v.to_vec()).map_err(|e| CliError::field(field, e))
        };
        match &self.source {
            SourceSpec::Iid { letter } => {
                let pmf = letter_pmf("source.letter", letter)?;
                CausalKernelFamily::memoryless_source(&pmf, &y_alpha, self.horizon).map_err(|e| CliError::field("source", e))
            }
            SourceSpec::Markov { initial, transition } => {
                let init = letter_pmf("source.initial", initial)?;
                for (k, row) in transition.iter().enumerate() {
                    letter_pmf(&format!("source.transition[{k}]"), row)?;
                }
                if transition.len() != nx {
                    return Err(CliError::field("source.transition", format!("needs {nx} rows")));
                }
                CausalKernelFamily::markov_source(&init, transition, &y_alpha, self.horizon)
                    .map_err(|e| CliError::field("source", e))
            }
            SourceSpec::Explicit { stages } => {
                check_stage_count("source.stages", stages, x.stages())?;
                let mut short = Vec::with_capacity(stages.len());
                for (i, t) in stages.iter().enumerate() {
                    let (xp, yp) = (x.prefix_count(i), y.prefix_count(i));
                    short.push(if t.len() == xp {
                        true
                    } else if t.len() == xp * yp {
                        false
                    } else {
                        return Err(CliError::field(
                            &format!("source.stages[{i}]"),
                            format!("needs {xp} rows (no feedback) or {} rows, got {}", xp * yp, t.len()),
                        ));
                    });
                    check_rows(&format!("source.stages[{i}]"), t, nx)?;
                }
                CausalKernelFamily::from_fn(KernelKind::SourceFeedback, x.clone(), y.clone(), |i, xs, ys| {
                    let xp = x.encode(xs).expect("decoded prefix");
                    let row = if short[i] { xp } else { xp * y.prefix_count(i) + y.encode(ys).expect("decoded prefix") };
                    stages[i][row].clone()
                })
                .map_err(|e| CliError::field("source.stages", e))
            }
        }
    }
}

fn check_stage_count(field: &str, stages: &[Vec<Vec<f64>>], expected: usize) -> CliResult<()> {
    if stages.len() != expected {
        return Err(CliError::field(field, format!("needs {expected} stages (horizon + 1), got {}", stages.len())));
    }
    Ok(())
}

fn check_rows(field: &str, rows: &[Vec<f64>], width: usize) -> CliResult<()> {
    for (k, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(CliError::field(&format!("{field}[{k}]"), format!("needs {width} entries, got {}", r.len())));
        }
        if let Err(e) = FinitePmf::from_vec(r.clone()) {
            return Err(CliError::field(&format!("{field}[{k}]"), e));
        }
    }
    Ok(())
}

fn channel_kernel(spec: &ChannelSpec, x: &SequenceIndexer, y: &SequenceIndexer) -> CliResult<CausalKernelFamily> {
    let (nx, ny) = (x.stage_size(0), y.stage_size(0));
    match spec {
        ChannelSpec::Memoryless { matrix } => {
            if matrix.len() != nx {
                return Err(CliError::field("channel.matrix", format!("needs {nx} rows, got {}", matrix.len())));
            }
            check_rows("channel.matrix", matrix, ny)?;
            CausalKernelFamily::memoryless_channel(&Alphabet::new(nx, "x")?, matrix, x.horizon())
                .map_err(|e| CliError::field("channel", e))
        }
        ChannelSpec::Explicit { stages } => {
            check_stage_count("channel.stages", stages, x.stages())?;
            for (i, t) in stages.iter().enumerate() {
                let rows = x.prefix_count(i + 1) * y.prefix_count(i);
                if t.len() != rows {
                    return Err(CliError::field(&format!("channel.stages[{i}]"), format!("needs {rows} rows, got {}", t.len())));
                }
                check_rows(&format!("channel.stages[{i}]"), t, ny)?;
            }
            CausalKernelFamily::from_tables(KernelKind::ChannelFeedforward, x.clone(), y.clone(), stages)
                .map_err(|e| CliError::field("channel.stages", e))
        }
    }
}

impl Problem {
    pub fn require_channel(&self) -> CliResult<&CausalKernelFamily> {
        self.channel
            .as_ref()
            .ok_or_else(|| CliError::field("channel", "this command needs a channel"))
    }

    pub fn require_feedback_free(&self) -> CliResult<&FeedbackFreeSource> {
        self.feedback_free
            .as_ref()
            .ok_or_else(|| CliError::field("source", "rate-distortion needs a source without feedback"))
    }

    pub fn require_distortion(&self) -> CliResult<&DistortionSpec> {
        self.distortion
            .as_ref()
            .ok_or_else(|| CliError::field("distortion", "this command needs a distortion matrix"))
    }

    pub fn require_slopes(&self) -> CliResult<&[Slope]> {
        if self.slopes.is_empty() {
            return Err(CliError::field("s_grid", "this command needs at least one slope"));
        }
        Ok(&self.slopes)
    }
}
