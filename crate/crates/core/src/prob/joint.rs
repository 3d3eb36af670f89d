use super::indexer::{check_joint_size, SequenceIndexer};
use super::kernel::{CausalKernelFamily, KernelKind, StageTable};
use super::pmf::{mass_total, normalize_row, Alphabet, FinitePmf, MASS_TOL};
use crate::error::{Error, Result};

/// Joint pmf over `X^n × Y^n`, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCausalDistribution {
    x: SequenceIndexer,
    y: SequenceIndexer,
    mass: Vec<f64>,
}

impl JointCausalDistribution {
    pub fn new(x: SequenceIndexer, y: SequenceIndexer, mut mass: Vec<f64>) -> Result<Self> {
        check_joint_size(&x, &y)?;
        if x.stages() != y.stages() {
            return Err(Error::Dimension("x and y horizons differ".into()));
        }
        if mass.len() != x.len() * y.len() {
            return Err(Error::Dimension(format!(
                "joint needs {} entries, got {}",
                x.len() * y.len(),
                mass.len()
            )));
        }
        for v in mass.iter_mut() {
            if !v.is_finite() || *v < -1e-15 {
                return Err(Error::InvalidDistribution(format!("joint entry {v}")));
            }
            *v = v.max(0.0);
        }
        let total = mass_total(&mass);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint mass sums to {total:.15}, expected 1"
            )));
        }
        Ok(Self { x, y, mass })
    }

    /// Product law `μ ⊗ ν`.
    pub fn product(x: SequenceIndexer, y: SequenceIndexer, mu: &[f64], nu: &[f64]) -> Result<Self> {
        if mu.len() != x.len() || nu.len() != y.len() {
            return Err(Error::Dimension("marginal lengths do not match the indexers".into()));
        }
        let mass = mu.iter().flat_map(|&a| nu.iter().map(move |&b| a * b)).collect();
        Self::new(x, y, mass)
    }

    pub fn x_indexer(&self) -> &SequenceIndexer {
        &self.x
    }

    pub fn y_indexer(&self) -> &SequenceIndexer {
        &self.y
    }

    pub fn horizon(&self) -> usize {
        self.x.horizon()
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    #[inline]
    pub fn get(&self, x_flat: usize, y_flat: usize) -> f64 {
        self.mass[x_flat * self.y.len() + y_flat]
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        let ny = self.y.len();
        self.mass.chunks(ny).map(|r| r.iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        let ny = self.y.len();
        let mut nu = vec![0.0; ny];
        for row in self.mass.chunks(ny) {
            nu.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        nu
    }

    /// Expectation of `f(x_flat, y_flat)`.
    pub fn expect<F: FnMut(usize, usize) -> f64>(&self, mut f: F) -> f64 {
        let ny = self.y.len();
        let mut acc = 0.0;
        for (k, &m) in self.mass.iter().enumerate() {
            if m > 0.0 {
                acc += m * f(k / ny, k % ny);
            }
        }
        acc
    }
}

/// Forward expansion of a causal product over prefixes.
///
/// `factor(i, xa, xv, yb, yv)` gives the stage-`i` multiplier for x-prefix
/// `xa`, y-prefix `yb` (both of length `i`) extended by `xv`, `yv`. Returns
/// the x-major table of products over full sequences.
pub(crate) fn expand<F>(x: &SequenceIndexer, y: &SequenceIndexer, mut factor: F) -> Vec<f64>
where
    F: FnMut(usize, usize, usize, usize, usize) -> f64,
{
    let mut buf = vec![1.0];
    let (mut nxp, mut nyp) = (1usize, 1usize);
    for i in 0..x.stages() {
        let (kx, ky) = (x.stage_size(i), y.stage_size(i));
        let nyn = nyp * ky;
        let mut next = vec![0.0; nxp * kx * nyn];
        for xa in 0..nxp {
            for yb in 0..nyp {
                let base = buf[xa * nyp + yb];
                if base == 0.0 {
                    continue;
                }
                for xv in 0..kx {
                    let row = (xa * kx + xv) * nyn + yb * ky;
                    for yv in 0..ky {
                        next[row + yv] = base * factor(i, xa, xv, yb, yv);
                    }
                }
            }
        }
        buf = next;
        nxp *= kx;
        nyp = nyn;
    }
    buf
}

/// `∏_i k_i` over every `(x^n, y^n)`, e.g. `Q⃗(y^n|x^n)` or `P⃖(x^n|y^{n-1})`.
pub(crate) fn kernel_product(k: &CausalKernelFamily) -> Vec<f64> {
    expand(k.x_indexer(), k.y_indexer(), |i, xa, xv, yb, yv| k.factor(i, xa, xv, yb, yv))
}

/// Joint law of a complementary pair of kernel families:
/// `(SourceFeedback, ChannelFeedforward)` or `(SKind, RKind)`, in either order.
pub fn causal_product(a: &CausalKernelFamily, b: &CausalKernelFamily) -> Result<JointCausalDistribution> {
    if a.kind().complement() != b.kind() {
        return Err(Error::Dimension(format!(
            "{:?} and {:?} do not form a causal product",
            a.kind(),
            b.kind()
        )));
    }
    a.check_layout_matches(b.x_indexer(), b.y_indexer())?;
    let mass = expand(a.x_indexer(), a.y_indexer(), |i, xa, xv, yb, yv| {
        a.factor(i, xa, xv, yb, yv) * b.factor(i, xa, xv, yb, yv)
    });
    // Labels come from the kernel that emits each sequence.
    let (xk, yk) = if a.kind().emits_x() { (a, b) } else { (b, a) };
    JointCausalDistribution::new(xk.x_indexer().clone(), yk.y_indexer().clone(), mass)
}

/// Sequence-space marginals `(μ, ν)`.
pub fn marginals(j: &JointCausalDistribution) -> (FinitePmf, FinitePmf) {
    let pmf = |ix: &SequenceIndexer, name: &str, v: Vec<f64>| {
        let a = Alphabet::new(ix.len(), format!("{name}^{}", ix.horizon())).expect("non-empty");
        FinitePmf::new(a, v).expect("marginal of a valid joint")
    };
    (
        pmf(&j.x, "X", j.x_marginal()),
        pmf(&j.y, "Y", j.y_marginal()),
    )
}

/// `Π = P⃖ ⊗ ν`: the source kernels composed with the y-marginal of `j`.
pub fn pi_measure(j: &JointCausalDistribution, p: &CausalKernelFamily) -> Result<JointCausalDistribution> {
    if p.kind() != KernelKind::SourceFeedback {
        return Err(Error::Dimension(format!("expected a source kernel, got {:?}", p.kind())));
    }
    p.check_layout_matches(&j.x, &j.y)?;
    let nu = j.y_marginal();
    let ny = j.y.len();
    let mut mass = kernel_product(p);
    for (k, v) in mass.iter_mut().enumerate() {
        *v *= nu[k % ny];
    }
    JointCausalDistribution::new(j.x.clone(), j.y.clone(), mass)
}

/// Exact conditional pmfs of `j` under the conditioning pattern of `kind`.
///
/// Rows whose conditioning event has zero probability are filled uniform
/// and flagged (see [`StageTable::is_filled`]).
pub fn condition_joint(j: &JointCausalDistribution, kind: KernelKind) -> CausalKernelFamily {
    let (x, y) = (&j.x, &j.y);
    let ny = y.len();
    let mut tables: Vec<Vec<f64>> = (0..x.stages())
        .map(|i| {
            let (a, b) = kind.conditioning(i);
            let width = if kind.emits_x() { x.stage_size(i) } else { y.stage_size(i) };
            vec![0.0; x.prefix_count(a) * y.prefix_count(b) * width]
        })
        .collect();
    for (k, &m) in j.mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (xf, yf) = (k / ny, k % ny);
        for (i, table) in tables.iter_mut().enumerate() {
            let (a, b) = kind.conditioning(i);
            let row = x.prefix(xf, a) * y.prefix_count(b) + y.prefix(yf, b);
            let (out, width) = if kind.emits_x() {
                (x.symbol(xf, i), x.stage_size(i))
            } else {
                (y.symbol(yf, i), y.stage_size(i))
            };
            table[row * width + out] += m;
        }
    }
    let stages = tables
        .into_iter()
        .enumerate()
        .map(|(i, mut data)| {
            let width = if kind.emits_x() { x.stage_size(i) } else { y.stage_size(i) };
            let rows = data.len() / width;
            let filled = data.chunks_mut(width).map(|r| !normalize_row(r)).collect();
            StageTable::from_parts(rows, width, data, filled)
        })
        .collect();
    CausalKernelFamily::from_stages(kind, x.clone(), y.clone(), stages)
}

/// Marginal of `j` on prefixes `(x^{a-1}, y^{b-1})`, laid out
/// `x_prefix * |Y^b| + y_prefix`.
pub(crate) fn prefix_marginal(j: &JointCausalDistribution, a: usize, b: usize) -> Vec<f64> {
    let (x, y) = (&j.x, &j.y);
    let ny = y.len();
    let nyb = y.prefix_count(b);
    let mut out = vec![0.0; x.prefix_count(a) * nyb];
    for (k, &m) in j.mass.iter().enumerate() {
        if m > 0.0 {
            out[x.prefix(k / ny, a) * nyb + y.prefix(k % ny, b)] += m;
        }
    }
    out
}
