use crate::error::{Error, Result};
use crate::prob::{causal_product, CausalKernelFamily, FeedbackFreeSource, SequenceIndexer};

/// Single-letter distortion `ρ(x, y) ≥ 0` applied at every stage:
/// `d(x^n, y^n) = Σ_{i=0}^n ρ(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    horizon: usize,
    nx: usize,
    ny: usize,
    rho: Vec<f64>,
}

impl DistortionSpec {
    pub fn new(horizon: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if nx == 0 || ny == 0 || rows.iter().any(|r| r.len() != ny) {
            return Err(Error::Dimension("distortion matrix must be a non-empty rectangle".into()));
        }
        let rho: Vec<f64> = rows.concat();
        if let Some(bad) = rho.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!("distortion entry {bad} is not finite and non-negative")));
        }
        Ok(Self { horizon, nx, ny, rho })
    }

    /// `ρ(x, y) = [x ≠ y]` on a `k`-letter alphabet.
    pub fn hamming(k: usize, horizon: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|a| (0..k).map(|b| if a == b { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(horizon, &rows)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn rho(&self, x: usize, y: usize) -> f64 {
        self.rho[x * self.ny + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.rho.chunks(self.ny).map(<[f64]>::to_vec).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    /// `d_{0,n}` for flat sequence indices.
    pub fn sequence_distortion(&self, x: &SequenceIndexer, y: &SequenceIndexer, xf: usize, yf: usize) -> f64 {
        (0..x.stages()).map(|i| self.rho(x.symbol(xf, i), y.symbol(yf, i))).sum()
    }

    /// Same horizon as the sequence spaces, and every stage alphabet matches
    /// the matrix.
    pub fn check_layout(&self, x: &SequenceIndexer, y: &SequenceIndexer) -> Result<()> {
        if x.horizon() != self.horizon || y.horizon() != self.horizon {
            return Err(Error::Dimension(format!(
                "distortion horizon {} vs sequence horizon {}",
                self.horizon,
                x.horizon()
            )));
        }
        let ok = (0..x.stages()).all(|i| x.stage_size(i) == self.nx && y.stage_size(i) == self.ny);
        if !ok {
            return Err(Error::Dimension(format!(
                "distortion matrix is {}×{} but stage alphabets differ",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// Lagrange multiplier of the distortion constraint, in nats per unit of
/// distortion. Always `≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Slope(f64);

impl Slope {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s > 0.0 {
            return Err(Error::InvalidArgument(format!("slope must be finite and ≤ 0, got {s}")));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Per-letter expected distortion `(1/(n+1)) E d_{0,n}` of a source–channel pair.
pub fn expected_distortion(
    source: &FeedbackFreeSource,
    channel: &CausalKernelFamily,
    d: &DistortionSpec,
) -> Result<f64> {
    d.check_layout(source.x_indexer(), source.y_indexer())?;
    let joint = causal_product(source.kernel(), channel)?;
    let (x, y) = (joint.x_indexer(), joint.y_indexer());
    let total = joint.expect(|xf, yf| d.sequence_distortion(x, y, xf, yf));
    Ok(total / (d.horizon + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Alphabet, FinitePmf};
    use approx::assert_abs_diff_eq;

    fn src(p: f64, n: usize) -> FeedbackFreeSource {
        FeedbackFreeSource::memoryless(&FinitePmf::bernoulli(p).unwrap(), &Alphabet::binary("y"), n).unwrap()
    }

    #[test]
    fn distortion_examples() {
        let ham = DistortionSpec::hamming(2, 0).unwrap();
        let id = CausalKernelFamily::identity_channel(&Alphabet::binary("x"), 0).unwrap();
        assert_eq!(expected_distortion(&src(0.3, 0), &id, &ham).unwrap(), 0.0);
        let zero = CausalKernelFamily::memoryless_channel(&Alphabet::binary("x"), &[vec![1.0, 0.0], vec![1.0, 0.0]], 0)
            .unwrap();
        assert_abs_diff_eq!(expected_distortion(&src(0.9, 0), &zero, &ham).unwrap(), 0.9, epsilon = 1e-15);
        let ham3 = DistortionSpec::hamming(2, 3).unwrap();
        let bsc = CausalKernelFamily::binary_symmetric_channel(0.1, 3).unwrap();
        for p in [0.1, 0.5, 0.77] {
            assert_abs_diff_eq!(expected_distortion(&src(p, 3), &bsc, &ham3).unwrap(), 0.1, epsilon = 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(DistortionSpec::new(0, &[vec![0.0, -1.0], vec![1.0, 0.0]]).is_err());
        assert!(DistortionSpec::new(0, &[vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(DistortionSpec::new(0, &[vec![0.0, f64::INFINITY]]).is_err());
        assert!(Slope::new(0.1).is_err());
        assert!(Slope::new(f64::NAN).is_err());
        assert_eq!(Slope::new(-0.0).unwrap().value(), 0.0);
        let ham = DistortionSpec::hamming(2, 1).unwrap();
        assert!(expected_distortion(
            &src(0.5, 0),
            &CausalKernelFamily::binary_symmetric_channel(0.1, 0).unwrap(),
            &ham
        )
        .is_err());
    }
}
