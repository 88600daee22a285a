//! Criterion benchmarks for `knotgate-core`. See `benches/kernels.rs`.
