//! Criterion benchmarks for the moyal-core hot paths; see `benches/`.
