#![allow(dead_code)]

use causalrd::prob::{Alphabet, FeedbackFreeSource, FinitePmf, JointCausalDistribution};

pub fn iid(p: f64, n: usize) -> FeedbackFreeSource {
    FeedbackFreeSource::memoryless(&FinitePmf::bernoulli(p).unwrap(), &Alphabet::binary("y"), n).unwrap()
}

pub fn iid_letter(letter: &[f64], ny: usize, n: usize) -> FeedbackFreeSource {
    let pmf = FinitePmf::from_vec(letter.to_vec()).unwrap();
    FeedbackFreeSource::memoryless(&pmf, &Alphabet::new(ny, "y").unwrap(), n).unwrap()
}

/// Two-state chain started from (½, ½): `a = P(0→1)`, `b = P(1→0)`.
pub fn markov(a: f64, b: f64, n: usize) -> FeedbackFreeSource {
    FeedbackFreeSource::markov(
        &FinitePmf::bernoulli(0.5).unwrap(),
        &[vec![1.0 - a, a], vec![b, 1.0 - b]],
        &Alphabet::binary("y"),
        n,
    )
    .unwrap()
}

/// `Σ p ln(p/q)` over `p > 0`, written independently of the library.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

/// `I(X^n; Y^n)` straight from the joint table.
pub fn mutual_information(j: &JointCausalDistribution) -> f64 {
    let ny = j.y_indexer().len();
    let m = j.masses();
    let mu: Vec<f64> = m.chunks(ny).map(|r| r.iter().sum()).collect();
    let mut nu = vec![0.0; ny];
    for r in m.chunks(ny) {
        for (v, a) in nu.iter_mut().zip(r) {
            *v += a;
        }
    }
    let mut acc = 0.0;
    for (xf, r) in m.chunks(ny).enumerate() {
        for (yf, &w) in r.iter().enumerate() {
            if w > 0.0 {
                acc += w * (w / (mu[xf] * nu[yf])).ln();
            }
        }
    }
    acc
}

pub fn h2(p: f64) -> f64 {
    let t = |v: f64| if v > 0.0 { -v * v.ln() } else { 0.0 };
    t(p) + t(1.0 - p)
}
