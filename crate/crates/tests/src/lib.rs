//! Acceptance suite for `expchaos`; see `tests/acceptance.rs`.
