use rand::Rng;

use crate::error::{Error, Result};
use crate::prob::{mass_total, max_abs, normalize_row, SequenceIndexer, MASS_TOL};
use crate::random;

/// Reproduction law `P̄(y^n)` with its stage kernels `P̄(y_i | y^{i-1})`.
///
/// Stage `i` kernel is a `|Y^{i-1}| × |Y_i|` table indexed by the y-prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionMarginal {
    y: SequenceIndexer,
    joint: Vec<f64>,
    kernels: Vec<Vec<f64>>,
    /// Probability of each conditioning prefix, per stage.
    prefix_mass: Vec<Vec<f64>>,
}

impl ReproductionMarginal {
    pub fn from_joint(y: SequenceIndexer, mut joint: Vec<f64>) -> Result<Self> {
        if joint.len() != y.len() {
            return Err(Error::Dimension(format!(
                "reproduction law needs {} entries, got {}",
                y.len(),
                joint.len()
            )));
        }
        for v in joint.iter_mut() {
            if !v.is_finite() || *v < -1e-15 {
                return Err(Error::InvalidDistribution(format!("reproduction entry {v}")));
            }
            *v = v.max(0.0);
        }
        let total = mass_total(&joint);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("reproduction law sums to {total:.15}")));
        }
        let mut kernels = Vec::with_capacity(y.stages());
        let mut prefix_mass = Vec::with_capacity(y.stages());
        for i in 0..y.stages() {
            let k = y.stage_size(i);
            let mut table = vec![0.0; y.prefix_count(i + 1)];
            for (f, &m) in joint.iter().enumerate() {
                table[y.prefix(f, i + 1)] += m;
            }
            let mass: Vec<f64> = table.chunks(k).map(|r| r.iter().sum()).collect();
            table.chunks_mut(k).for_each(|r| {
                normalize_row(r);
            });
            kernels.push(table);
            prefix_mass.push(mass);
        }
        Ok(Self { y, joint, kernels, prefix_mass })
    }

    pub fn uniform(y: SequenceIndexer) -> Self {
        let u = 1.0 / y.len() as f64;
        let n = y.len();
        Self::from_joint(y, vec![u; n]).expect("uniform law")
    }

    /// Positive random law: independent `U[0.05, 1]` weights, normalized.
    pub fn random_positive(y: SequenceIndexer, seed: u64) -> Self {
        let mut rng = random::seeded(seed);
        let mut w: Vec<f64> = (0..y.len()).map(|_| rng.random_range(0.05..=1.0)).collect();
        normalize_row(&mut w);
        Self::from_joint(y, w).expect("normalized weights")
    }

    pub fn y_indexer(&self) -> &SequenceIndexer {
        &self.y
    }

    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn kernel(&self, stage: usize) -> &[f64] {
        &self.kernels[stage]
    }

    #[inline]
    pub fn kernel_row(&self, stage: usize, y_prefix: usize) -> &[f64] {
        let k = self.y.stage_size(stage);
        &self.kernels[stage][y_prefix * k..(y_prefix + 1) * k]
    }

    /// Every stage-kernel entry is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.kernels.iter().flatten().all(|&v| v > 0.0)
    }

    /// `max_y |P̄(y^n) − other(y^n)|`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        max_abs(&self.joint, &other.joint)
    }

    /// Largest stage-kernel difference over prefixes that both laws charge.
    pub fn max_kernel_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.y.stages() {
            let k = self.y.stage_size(i);
            for p in 0..self.prefix_mass[i].len() {
                if self.prefix_mass[i][p] > 0.0 && other.prefix_mass[i][p] > 0.0 {
                    let (a, b) = (&self.kernels[i][p * k..(p + 1) * k], &other.kernels[i][p * k..(p + 1) * k]);
                    worst = worst.max(max_abs(a, b));
                }
            }
        }
        worst
    }
}
