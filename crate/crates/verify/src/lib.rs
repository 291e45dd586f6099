//! Acceptance checks live under `tests/`.
