//! End-to-end acceptance checks for `scslab-core`; see `tests/acceptance.rs`.
