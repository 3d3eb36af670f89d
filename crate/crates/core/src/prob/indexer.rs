use super::pmf::Alphabet;
use crate::error::{Error, Result};

/// Largest joint table (`|X^n| · |Y^n|`) the enumerating routines accept.
pub const MAX_JOINT_ENTRIES: usize = 10_000_000;

/// Bijection between tuples `(s_0, …, s_n)` and flat indices.
///
/// Row-major with stage 0 most significant, so the flat index of a prefix of
/// length `k` is `flat / tail(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceIndexer {
    alphabets: Vec<Alphabet>,
    /// `tail[k]` = product of stage sizes `k..=n`; `tail[n+1] = 1`.
    tail: Vec<usize>,
}

impl SequenceIndexer {
    pub fn new(alphabets: Vec<Alphabet>) -> Result<Self> {
        if alphabets.is_empty() {
            return Err(Error::InvalidArgument("a sequence needs at least one stage".into()));
        }
        let mut tail = vec![1usize; alphabets.len() + 1];
        for k in (0..alphabets.len()).rev() {
            tail[k] = tail[k + 1]
                .checked_mul(alphabets[k].size())
                .filter(|&t| t <= MAX_JOINT_ENTRIES)
                .ok_or_else(|| {
                    Error::TooLarge(format!(
                        "sequence space exceeds {MAX_JOINT_ENTRIES} points"
                    ))
                })?;
        }
        Ok(Self { alphabets, tail })
    }

    /// Same alphabet at every stage `0..=horizon`.
    pub fn uniform(horizon: usize, alphabet: &Alphabet) -> Result<Self> {
        Self::new(vec![alphabet.clone(); horizon + 1])
    }

    pub fn horizon(&self) -> usize {
        self.alphabets.len() - 1
    }

    pub fn stages(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet(&self, stage: usize) -> &Alphabet {
        &self.alphabets[stage]
    }

    pub fn stage_size(&self, stage: usize) -> usize {
        self.alphabets[stage].size()
    }

    /// Number of full sequences.
    pub fn len(&self) -> usize {
        self.tail[0]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of distinct prefixes of length `len` (`len = 0` gives 1).
    pub fn prefix_count(&self, len: usize) -> usize {
        self.tail[0] / self.tail[len]
    }

    /// Flat index of the length-`len` prefix of the sequence at `flat`.
    #[inline]
    pub fn prefix(&self, flat: usize, len: usize) -> usize {
        flat / self.tail[len]
    }

    /// Symbol at `stage` of the sequence at `flat`.
    #[inline]
    pub fn symbol(&self, flat: usize, stage: usize) -> usize {
        (flat / self.tail[stage + 1]) % self.alphabets[stage].size()
    }

    /// Flat index of a (possibly partial) prefix tuple.
    pub fn encode(&self, symbols: &[usize]) -> Result<usize> {
        if symbols.len() > self.stages() {
            return Err(Error::Dimension(format!(
                "tuple of length {} exceeds {} stages",
                symbols.len(),
                self.stages()
            )));
        }
        let mut flat = 0usize;
        for (k, &s) in symbols.iter().enumerate() {
            let size = self.alphabets[k].size();
            if s >= size {
                return Err(Error::Dimension(format!(
                    "symbol {s} out of range for stage {k} (size {size})"
                )));
            }
            flat = flat * size + s;
        }
        Ok(flat)
    }

    /// Tuple of the length-`len` prefix with flat index `flat`.
    pub fn decode_prefix(&self, mut flat: usize, len: usize) -> Vec<usize> {
        let mut out = vec![0; len];
        for k in (0..len).rev() {
            let size = self.alphabets[k].size();
            out[k] = flat % size;
            flat /= size;
        }
        out
    }

    pub fn decode(&self, flat: usize) -> Vec<usize> {
        self.decode_prefix(flat, self.stages())
    }

    /// Stage sizes agree with `other` (labels ignored).
    pub fn same_shape(&self, other: &Self) -> bool {
        self.alphabets.len() == other.alphabets.len()
            && self
                .alphabets
                .iter()
                .zip(&other.alphabets)
                .all(|(a, b)| a.size() == b.size())
    }
}

/// Reject joint tables above [`MAX_JOINT_ENTRIES`].
pub(crate) fn check_joint_size(x: &SequenceIndexer, y: &SequenceIndexer) -> Result<()> {
    match x.len().checked_mul(y.len()) {
        Some(n) if n <= MAX_JOINT_ENTRIES => Ok(()),
        _ => Err(Error::TooLarge(format!(
            "joint table |X^n|·|Y^n| = {}·{} exceeds {MAX_JOINT_ENTRIES} entries",
            x.len(),
            y.len()
        ))),
    }
}
