//! Benchmarks for tiltcube live in `benches/`; run them with
//! `cargo bench -p tiltcube-bench`.
