//! Benchmark harness for the Fisher and model engines; see `benches/`.
