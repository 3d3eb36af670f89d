use super::joint::JointCausalDistribution;
use super::pmf::FinitePmf;
use crate::error::{Error, Result};

/// Anything that is a flat table of probabilities with a shape.
pub trait Measure {
    fn masses(&self) -> &[f64];
    /// `(rows, cols)`; a pmf is a single column.
    fn shape(&self) -> (usize, usize);
}

impl Measure for FinitePmf {
    fn masses(&self) -> &[f64] {
        self.mass()
    }

    fn shape(&self) -> (usize, usize) {
        (self.len(), 1)
    }
}

impl Measure for JointCausalDistribution {
    fn masses(&self) -> &[f64] {
        JointCausalDistribution::masses(self)
    }

    fn shape(&self) -> (usize, usize) {
        (self.x_indexer().len(), self.y_indexer().len())
    }
}

/// `D(a || b)` in nats, `0 ln(0/·) = 0`, `+∞` on absolute-continuity failure.
pub fn kl_divergence<M: Measure + ?Sized>(a: &M, b: &M) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "divergence between shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(kl_raw(a.masses(), b.masses()))
}

pub(crate) fn kl_raw(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&p, &q) in a.iter().zip(b) {
        if p > 0.0 {
            if q <= 0.0 {
                return f64::INFINITY;
            }
            acc += p * (p / q).ln();
        }
    }
    acc.max(0.0)
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// Binary entropy `h₂(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
