//! Benchmarks for `modal-topos` live in `benches/`.
