//! Criterion benchmarks for `causalrd`; see `benches/`.
