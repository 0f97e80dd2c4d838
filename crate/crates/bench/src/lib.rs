//! Criterion benchmarks for the sketch matcher live in `benches/`.
