//! Benchmark crate; see benches/rings.rs.
