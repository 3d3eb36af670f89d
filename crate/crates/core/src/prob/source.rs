use super::indexer::SequenceIndexer;
use super::joint::expand;
use super::kernel::{CausalKernelFamily, KernelKind};
use super::pmf::{Alphabet, FinitePmf};
use crate::error::{Error, Result};

const FEEDBACK_TOL: f64 = 1e-12;

/// A source kernel with no dependence on past reproductions, together with
/// its sequence law `P(x^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackFreeSource {
    kernel: CausalKernelFamily,
    law: Vec<f64>,
}

impl FeedbackFreeSource {
    pub fn new(kernel: CausalKernelFamily) -> Result<Self> {
        if kernel.kind() != KernelKind::SourceFeedback {
            return Err(Error::InvalidArgument(format!(
                "expected a source kernel, got {:?}",
                kernel.kind()
            )));
        }
        if !kernel.is_feedback_free(FEEDBACK_TOL) {
            return Err(Error::InvalidArgument(
                "source kernel depends on past reproductions (feedback)".into(),
            ));
        }
        let single = SequenceIndexer::new(
            (0..kernel.x_indexer().stages())
                .map(|_| Alphabet::new(1, "·").expect("size 1"))
                .collect(),
        )?;
        // Evaluate on y-prefix 0: rows do not depend on it.
        let law = expand(kernel.x_indexer(), &single, |i, xa, xv, _, _| {
            kernel.stage(i).at(kernel.row_index(i, xa, 0), xv)
        });
        Ok(Self { kernel, law })
    }

    pub fn memoryless(letter: &FinitePmf, y_alphabet: &Alphabet, horizon: usize) -> Result<Self> {
        Self::new(CausalKernelFamily::memoryless_source(letter, y_alphabet, horizon)?)
    }

    pub fn markov(
        initial: &FinitePmf,
        transition: &[Vec<f64>],
        y_alphabet: &Alphabet,
        horizon: usize,
    ) -> Result<Self> {
        Self::new(CausalKernelFamily::markov_source(initial, transition, y_alphabet, horizon)?)
    }

    pub fn kernel(&self) -> &CausalKernelFamily {
        &self.kernel
    }

    /// `P(x^n)` over flat x-indices.
    pub fn law(&self) -> &[f64] {
        &self.law
    }

    pub fn x_indexer(&self) -> &SequenceIndexer {
        self.kernel.x_indexer()
    }

    pub fn y_indexer(&self) -> &SequenceIndexer {
        self.kernel.y_indexer()
    }

    pub fn horizon(&self) -> usize {
        self.kernel.horizon()
    }

    /// `p_i(x_i = xv | x^{i-1} = x_prefix)`.
    #[inline]
    pub fn conditional(&self, stage: usize, x_prefix: usize, xv: usize) -> f64 {
        self.kernel.stage(stage).at(self.kernel.row_index(stage, x_prefix, 0), xv)
    }

    /// Law of the prefix `(x_0, …, x_{len-1})`.
    pub fn prefix_law(&self, len: usize) -> Vec<f64> {
        let x = self.x_indexer();
        let mut out = vec![0.0; x.prefix_count(len)];
        for (k, &m) in self.law.iter().enumerate() {
            out[x.prefix(k, len)] += m;
        }
        out
    }

    /// Letter pmf when every stage row equals the stage-0 row (i.i.d. source).
    pub fn memoryless_letter(&self) -> Option<Vec<f64>> {
        let first = self.kernel.stage(0).row(0).to_vec();
        let same = self.kernel.stages().iter().all(|t| {
            (0..t.rows()).all(|r| t.row(r).iter().zip(&first).all(|(a, b)| (a - b).abs() <= FEEDBACK_TOL))
        });
        same.then_some(first)
    }
}
