//! Criterion benchmarks for ratfit; see `benches/fit.rs`.
