use crate::error::{Error, Result};

/// Tolerance on the total mass of a pmf or kernel row.
pub const MASS_TOL: f64 = 1e-12;

/// Negative round-off tolerated (and clamped to zero) in probability entries.
const NEG_ROUNDOFF: f64 = 1e-15;

/// A finite symbol set `{0, …, size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
    label: String,
}

impl Alphabet {
    pub fn new(size: usize, label: impl Into<String>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
        }
        Ok(Self { size, label: label.into() })
    }

    pub fn binary(label: impl Into<String>) -> Self {
        Self { size: 2, label: label.into() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Validate a probability row in place: finite, non-negative up to round-off
/// (clamped), summing to one within [`MASS_TOL`].
pub(crate) fn check_row(row: &mut [f64], what: &dyn Fn() -> String) -> Result<()> {
    for v in row.iter_mut() {
        if !v.is_finite() {
            return Err(Error::InvalidDistribution(format!("{}: non-finite entry {v}", what())));
        }
        if *v < 0.0 {
            if *v < -NEG_ROUNDOFF {
                return Err(Error::InvalidDistribution(format!("{}: negative entry {v}", what())));
            }
            *v = 0.0;
        }
    }
    let total = mass_total(row);
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{}: mass sums to {total:.15}, expected 1",
            what()
        )));
    }
    Ok(())
}

/// Compensated (Neumaier) sum, so large tables are checked against
/// [`MASS_TOL`] without accumulated round-off.
pub(crate) fn mass_total(v: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in v {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// Normalize a non-negative row. Returns `false` (and fills uniform) when the
/// row carries no mass.
pub(crate) fn normalize_row(row: &mut [f64]) -> bool {
    let total: f64 = row.iter().sum();
    if total > 0.0 && total.is_finite() {
        row.iter_mut().for_each(|v| *v /= total);
        true
    } else {
        let u = 1.0 / row.len() as f64;
        row.iter_mut().for_each(|v| *v = u);
        false
    }
}

/// Probability vector over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf {
    alphabet: Alphabet,
    mass: Vec<f64>,
}

impl FinitePmf {
    pub fn new(alphabet: Alphabet, mut mass: Vec<f64>) -> Result<Self> {
        if mass.len() != alphabet.size() {
            return Err(Error::Dimension(format!(
                "pmf over '{}' needs {} entries, got {}",
                alphabet.label(),
                alphabet.size(),
                mass.len()
            )));
        }
        check_row(&mut mass, &|| format!("pmf over '{}'", alphabet.label()))?;
        Ok(Self { alphabet, mass })
    }

    /// Build from raw weights over an anonymous alphabet.
    pub fn from_vec(mass: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(mass.len(), "")?;
        Self::new(alphabet, mass)
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let u = 1.0 / alphabet.size() as f64;
        let mass = vec![u; alphabet.size()];
        Self { alphabet, mass }
    }

    /// `P(1) = p` on a binary alphabet.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Self::new(Alphabet::binary(""), vec![1.0 - p, p])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.mass[symbol]
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        super::entropy(&self.mass)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        let a = Alphabet::binary("x");
        assert!(FinitePmf::new(a.clone(), vec![0.5, 0.49]).is_err());
        assert!(FinitePmf::new(a.clone(), vec![1.1, -0.1]).is_err());
        assert!(FinitePmf::new(a.clone(), vec![f64::NAN, 1.0]).is_err());
        assert!(FinitePmf::new(a, vec![1.0]).is_err());
        assert!(Alphabet::new(0, "empty").is_err());
    }

    #[test]
    fn clamps_negative_roundoff() {
        let p = FinitePmf::from_vec(vec![1.0 + 1e-16, -1e-16]).unwrap();
        assert_eq!(p.get(1), 0.0);
    }

    #[test]
    fn empty_row_fills_uniform() {
        let mut row = [0.0; 4];
        assert!(!normalize_row(&mut row));
        assert_eq!(row, [0.25; 4]);
        let mut row = [1.0, 3.0];
        assert!(normalize_row(&mut row));
        assert_eq!(row, [0.25, 0.75]);
    }
}
