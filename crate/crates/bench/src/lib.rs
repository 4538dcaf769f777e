//! Criterion benchmarks for the `ptwell` solvers; see `benches/solvers.rs`.
