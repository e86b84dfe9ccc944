//! Benchmarks for the hyperlat crate live in `benches/`.
