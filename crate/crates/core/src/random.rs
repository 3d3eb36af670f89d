//! Seeded random pmfs and kernel families.
//!
//! Rows are drawn uniformly on the simplex (normalized `Exp(1)` draws) and
//! then mixed with the uniform floor so that every entry is at least
//! [`MIN_MASS`]. Same seed, same draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::prob::{Alphabet, CausalKernelFamily, FinitePmf, KernelKind, SequenceIndexer};

pub const MIN_MASS: f64 = 1e-6;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the `k`-simplex with every entry `≥ MIN_MASS`.
pub fn simplex_row<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = row.iter().sum();
    let scale = 1.0 - k as f64 * MIN_MASS;
    row.iter_mut().for_each(|v| *v = MIN_MASS + scale * *v / total);
    row
}

pub fn pmf<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet) -> FinitePmf {
    FinitePmf::new(alphabet.clone(), simplex_row(rng, alphabet.size())).expect("simplex draw")
}

/// Random pmf over whole sequences of `ix`.
pub fn sequence_pmf<R: Rng + ?Sized>(rng: &mut R, ix: &SequenceIndexer) -> FinitePmf {
    let a = Alphabet::new(ix.len(), "sequence").expect("non-empty");
    pmf(rng, &a)
}

pub fn kernel<R: Rng + ?Sized>(
    rng: &mut R,
    kind: KernelKind,
    x: &SequenceIndexer,
    y: &SequenceIndexer,
) -> Result<CausalKernelFamily> {
    CausalKernelFamily::from_fn(kind, x.clone(), y.clone(), |i, _, _| {
        let k = if kind.emits_x() { x.stage_size(i) } else { y.stage_size(i) };
        simplex_row(rng, k)
    })
}

/// Random layout with per-stage alphabets in `2..=max_alphabet` and horizon
/// in `0..=max_horizon`.
pub fn layout<R: Rng + ?Sized>(
    rng: &mut R,
    max_alphabet: usize,
    max_horizon: usize,
) -> Result<(SequenceIndexer, SequenceIndexer)> {
    let n = rng.random_range(0..=max_horizon);
    let kx = rng.random_range(2..=max_alphabet);
    let ky = rng.random_range(2..=max_alphabet);
    Ok((
        SequenceIndexer::uniform(n, &Alphabet::new(kx, "x")?)?,
        SequenceIndexer::uniform(n, &Alphabet::new(ky, "y")?)?,
    ))
}

/// A random source (with feedback unless `feedback_free`) and channel pair.
pub fn instance<R: Rng + ?Sized>(
    rng: &mut R,
    max_alphabet: usize,
    max_horizon: usize,
    feedback_free: bool,
) -> Result<(CausalKernelFamily, CausalKernelFamily)> {
    let (x, y) = layout(rng, max_alphabet, max_horizon)?;
    let p = if feedback_free {
        // One row per x-prefix, shared across every y-prefix.
        let rows: Vec<Vec<Vec<f64>>> = (0..x.stages())
            .map(|i| (0..x.prefix_count(i)).map(|_| simplex_row(rng, x.stage_size(i))).collect())
            .collect();
        CausalKernelFamily::from_fn(KernelKind::SourceFeedback, x.clone(), y.clone(), |i, xs, _| {
            rows[i][x.encode(xs).expect("decoded prefix")].clone()
        })?
    } else {
        kernel(rng, KernelKind::SourceFeedback, &x, &y)?
    };
    let q = kernel(rng, KernelKind::ChannelFeedforward, &x, &y)?;
    Ok((p, q))
}
