use super::indexer::{check_joint_size, SequenceIndexer};
use super::pmf::{check_row, Alphabet, FinitePmf};
use crate::error::{Error, Result};

/// Conditioning pattern of a causal kernel family.
///
/// | kind | emits | conditions on |
/// |---|---|---|
/// | `SourceFeedback` | `x_i` | `(x^{i-1}, y^{i-1})` |
/// | `ChannelFeedforward` | `y_i` | `(y^{i-1}, x^i)` |
/// | `SKind` | `y_i` | `(y^{i-1}, x^{i-1})` |
/// | `RKind` | `x_i` | `(x^{i-1}, y^i)` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    SourceFeedback,
    ChannelFeedforward,
    SKind,
    RKind,
}

impl KernelKind {
    pub fn emits_x(self) -> bool {
        matches!(self, KernelKind::SourceFeedback | KernelKind::RKind)
    }

    /// Lengths `(a, b)` of the x- and y-prefixes conditioned on at `stage`.
    pub fn conditioning(self, stage: usize) -> (usize, usize) {
        match self {
            KernelKind::SourceFeedback | KernelKind::SKind => (stage, stage),
            KernelKind::ChannelFeedforward => (stage + 1, stage),
            KernelKind::RKind => (stage, stage + 1),
        }
    }

    /// The kind whose causal product with `self` is a joint law.
    pub fn complement(self) -> KernelKind {
        match self {
            KernelKind::SourceFeedback => KernelKind::ChannelFeedforward,
            KernelKind::ChannelFeedforward => KernelKind::SourceFeedback,
            KernelKind::SKind => KernelKind::RKind,
            KernelKind::RKind => KernelKind::SKind,
        }
    }
}

/// One stage of a kernel family: `rows × width` row-stochastic table.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTable {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    /// Rows that had no mass to condition on and were filled uniform.
    filled: Vec<bool>,
}

impl StageTable {
    pub(crate) fn from_parts(rows: usize, width: usize, data: Vec<f64>, filled: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), rows * width);
        debug_assert_eq!(filled.len(), rows);
        Self { rows, width, data, filled }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.width..(r + 1) * self.width]
    }

    #[inline]
    pub fn at(&self, r: usize, out: usize) -> f64 {
        self.data[r * self.width + out]
    }

    pub fn is_filled(&self, r: usize) -> bool {
        self.filled[r]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Per-stage conditional pmfs with a declared causal conditioning pattern.
///
/// Stage `i` row index for conditioning prefixes `(x^{a-1}, y^{b-1})` with
/// `(a, b) = kind.conditioning(i)` is `x_prefix * |Y^{b}| + y_prefix`, where
/// `|Y^b|` counts y-prefixes of length `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalKernelFamily {
    kind: KernelKind,
    x: SequenceIndexer,
    y: SequenceIndexer,
    stages: Vec<StageTable>,
}

impl CausalKernelFamily {
    /// Build by evaluating `row(stage, x_prefix, y_prefix)` for every
    /// conditioning tuple. Prefix lengths follow `kind.conditioning(stage)`.
    pub fn from_fn<F>(kind: KernelKind, x: SequenceIndexer, y: SequenceIndexer, mut row: F) -> Result<Self>
    where
        F: FnMut(usize, &[usize], &[usize]) -> Vec<f64>,
    {
        check_layout(&x, &y)?;
        let mut stages = Vec::with_capacity(x.stages());
        for i in 0..x.stages() {
            let (a, b) = kind.conditioning(i);
            let (nxp, nyp) = (x.prefix_count(a), y.prefix_count(b));
            let width = output_size(kind, &x, &y, i);
            let mut data = Vec::with_capacity(nxp * nyp * width);
            for xp in 0..nxp {
                let xs = x.decode_prefix(xp, a);
                for yp in 0..nyp {
                    let ys = y.decode_prefix(yp, b);
                    let mut r = row(i, &xs, &ys);
                    if r.len() != width {
                        return Err(Error::Dimension(format!(
                            "stage {i} row for x={xs:?}, y={ys:?} has {} entries, expected {width}",
                            r.len()
                        )));
                    }
                    check_row(&mut r, &|| format!("stage {i} row x={xs:?} y={ys:?}"))?;
                    data.extend_from_slice(&r);
                }
            }
            let rows = nxp * nyp;
            stages.push(StageTable::from_parts(rows, width, data, vec![false; rows]));
        }
        Ok(Self { kind, x, y, stages })
    }

    /// Build from explicit tables: `tables[stage][row]` in row-index order.
    pub fn from_tables(
        kind: KernelKind,
        x: SequenceIndexer,
        y: SequenceIndexer,
        tables: &[Vec<Vec<f64>>],
    ) -> Result<Self> {
        if tables.len() != x.stages() {
            return Err(Error::Dimension(format!(
                "expected {} stage tables, got {}",
                x.stages(),
                tables.len()
            )));
        }
        for (i, t) in tables.iter().enumerate() {
            let (a, b) = kind.conditioning(i);
            let rows = x.prefix_count(a) * y.prefix_count(b);
            if t.len() != rows {
                return Err(Error::Dimension(format!(
                    "stage {i} needs {rows} rows, got {}",
                    t.len()
                )));
            }
        }
        Self::from_fn(kind, x.clone(), y.clone(), |i, xs, ys| {
            let (a, b) = kind.conditioning(i);
            let xp = x.encode(&xs[..a]).expect("decoded prefix");
            let yp = y.encode(&ys[..b]).expect("decoded prefix");
            tables[i][xp * y.prefix_count(b) + yp].clone()
        })
    }

    /// Internal constructor for tables that are stochastic by construction.
    pub(crate) fn from_stages(
        kind: KernelKind,
        x: SequenceIndexer,
        y: SequenceIndexer,
        stages: Vec<StageTable>,
    ) -> Self {
        debug_assert_eq!(stages.len(), x.stages());
        Self { kind, x, y, stages }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.x.horizon()
    }

    pub fn x_indexer(&self) -> &SequenceIndexer {
        &self.x
    }

    pub fn y_indexer(&self) -> &SequenceIndexer {
        &self.y
    }

    pub fn stage(&self, i: usize) -> &StageTable {
        &self.stages[i]
    }

    pub fn stages(&self) -> &[StageTable] {
        &self.stages
    }

    /// Row index at `stage` for conditioning prefixes given as flat indices
    /// of the required lengths.
    #[inline]
    pub fn row_index(&self, stage: usize, x_prefix: usize, y_prefix: usize) -> usize {
        let (_, b) = self.kind.conditioning(stage);
        x_prefix * self.y.prefix_count(b) + y_prefix
    }

    /// Kernel value for the stage-`i` symbols of full (or long enough)
    /// tuples `xs`, `ys`.
    pub fn prob(&self, stage: usize, xs: &[usize], ys: &[usize]) -> Result<f64> {
        let (a, b) = self.kind.conditioning(stage);
        let need_x = if self.kind.emits_x() { stage + 1 } else { a };
        let need_y = if self.kind.emits_x() { b } else { stage + 1 };
        if xs.len() < need_x || ys.len() < need_y {
            return Err(Error::Dimension(format!(
                "stage {stage} needs {need_x} x-symbols and {need_y} y-symbols"
            )));
        }
        let xp = self.x.encode(&xs[..a])?;
        let yp = self.y.encode(&ys[..b])?;
        let out = if self.kind.emits_x() { xs[stage] } else { ys[stage] };
        Ok(self.stages[stage].at(self.row_index(stage, xp, yp), out))
    }

    /// Stage-`i` factor during a forward expansion over prefixes `xa`, `yb`
    /// of length `i` extended by symbols `xv`, `yv`.
    #[inline]
    pub(crate) fn factor(&self, i: usize, xa: usize, xv: usize, yb: usize, yv: usize) -> f64 {
        let (a, b) = self.kind.conditioning(i);
        let xp = if a == i { xa } else { xa * self.x.stage_size(i) + xv };
        let yp = if b == i { yb } else { yb * self.y.stage_size(i) + yv };
        let out = if self.kind.emits_x() { xv } else { yv };
        self.stages[i].at(xp * self.y.prefix_count(b) + yp, out)
    }

    /// Number of rows filled uniform for lack of conditioning mass.
    pub fn filled_rows(&self) -> usize {
        self.stages.iter().map(|s| s.filled.iter().filter(|&&f| f).count()).sum()
    }

    /// Stage rows do not vary with the y-prefix (x-emitting kinds) or with
    /// the x-prefix (y-emitting kinds), within `tol`.
    pub fn ignores_other_sequence(&self, tol: f64) -> bool {
        (0..self.stages.len()).all(|i| {
            let (a, b) = self.kind.conditioning(i);
            let (nxp, nyp) = (self.x.prefix_count(a), self.y.prefix_count(b));
            let t = &self.stages[i];
            if self.kind.emits_x() {
                (0..nxp).all(|xp| {
                    let r0 = t.row(xp * nyp);
                    (1..nyp).all(|yp| max_abs(r0, t.row(xp * nyp + yp)) <= tol)
                })
            } else {
                (0..nyp).all(|yp| {
                    let r0 = t.row(yp);
                    (1..nxp).all(|xp| max_abs(r0, t.row(xp * nyp + yp)) <= tol)
                })
            }
        })
    }

    /// A source kernel with no dependence on past reproductions.
    pub fn is_feedback_free(&self, tol: f64) -> bool {
        self.kind == KernelKind::SourceFeedback && self.ignores_other_sequence(tol)
    }

    /// Largest entrywise difference to `other` over rows accepted by `keep`.
    pub fn max_abs_diff_where<F>(&self, other: &Self, mut keep: F) -> Result<f64>
    where
        F: FnMut(usize, usize) -> bool,
    {
        self.check_same_shape(other)?;
        let mut worst = 0.0f64;
        for (i, (s, o)) in self.stages.iter().zip(&other.stages).enumerate() {
            for r in 0..s.rows {
                if keep(i, r) {
                    worst = worst.max(max_abs(s.row(r), o.row(r)));
                }
            }
        }
        Ok(worst)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.max_abs_diff_where(other, |_, _| true)
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::Dimension(format!(
                "kernel kinds differ: {:?} vs {:?}",
                self.kind, other.kind
            )));
        }
        self.check_layout_matches(&other.x, &other.y)
    }

    pub(crate) fn check_layout_matches(&self, x: &SequenceIndexer, y: &SequenceIndexer) -> Result<()> {
        if !self.x.same_shape(x) || !self.y.same_shape(y) {
            return Err(Error::Dimension(
                "kernel families disagree on horizon or stage alphabets".into(),
            ));
        }
        Ok(())
    }

    /// Memoryless source without feedback: `p_i(x_i | ·) = letter(x_i)`.
    pub fn memoryless_source(letter: &FinitePmf, y_alphabet: &Alphabet, horizon: usize) -> Result<Self> {
        let x = SequenceIndexer::uniform(horizon, letter.alphabet())?;
        let y = SequenceIndexer::uniform(horizon, y_alphabet)?;
        Self::from_fn(KernelKind::SourceFeedback, x, y, |_, _, _| letter.mass().to_vec())
    }

    /// First-order Markov source without feedback:
    /// `p_0 = initial`, `p_i(x_i | x_{i-1}) = transition[x_{i-1}][x_i]`.
    pub fn markov_source(
        initial: &FinitePmf,
        transition: &[Vec<f64>],
        y_alphabet: &Alphabet,
        horizon: usize,
    ) -> Result<Self> {
        let k = initial.len();
        if transition.len() != k || transition.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension(format!("transition matrix must be {k}×{k}")));
        }
        let x = SequenceIndexer::uniform(horizon, initial.alphabet())?;
        let y = SequenceIndexer::uniform(horizon, y_alphabet)?;
        Self::from_fn(KernelKind::SourceFeedback, x, y, |i, xs, _| {
            if i == 0 {
                initial.mass().to_vec()
            } else {
                transition[xs[i - 1]].clone()
            }
        })
    }

    /// Memoryless channel `q_i(y_i | y^{i-1}, x^i) = matrix[x_i][y_i]`.
    pub fn memoryless_channel(x_alphabet: &Alphabet, matrix: &[Vec<f64>], horizon: usize) -> Result<Self> {
        let ny = matrix.first().map_or(0, Vec::len);
        if matrix.len() != x_alphabet.size() || ny == 0 || matrix.iter().any(|r| r.len() != ny) {
            return Err(Error::Dimension(format!(
                "channel matrix must be {}×|Y| with |Y| ≥ 1",
                x_alphabet.size()
            )));
        }
        let x = SequenceIndexer::uniform(horizon, x_alphabet)?;
        let y = SequenceIndexer::uniform(horizon, &Alphabet::new(ny, "y")?)?;
        Self::from_fn(KernelKind::ChannelFeedforward, x, y, |i, xs, _| matrix[xs[i]].clone())
    }

    /// Noiseless channel `y_i = x_i`.
    pub fn identity_channel(alphabet: &Alphabet, horizon: usize) -> Result<Self> {
        let k = alphabet.size();
        let matrix: Vec<Vec<f64>> = (0..k)
            .map(|a| (0..k).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::memoryless_channel(alphabet, &matrix, horizon)
    }

    /// Binary symmetric channel with crossover `eps` at every stage.
    pub fn binary_symmetric_channel(eps: f64, horizon: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!("crossover {eps} outside [0, 1]")));
        }
        let m = vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]];
        Self::memoryless_channel(&Alphabet::binary("x"), &m, horizon)
    }
}

fn check_layout(x: &SequenceIndexer, y: &SequenceIndexer) -> Result<()> {
    if x.stages() != y.stages() {
        return Err(Error::Dimension(format!(
            "x has {} stages but y has {}",
            x.stages(),
            y.stages()
        )));
    }
    check_joint_size(x, y)
}

fn output_size(kind: KernelKind, x: &SequenceIndexer, y: &SequenceIndexer, stage: usize) -> usize {
    if kind.emits_x() {
        x.stage_size(stage)
    } else {
        y.stage_size(stage)
    }
}

#[inline]
pub(crate) fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}
