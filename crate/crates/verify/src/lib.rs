//! Acceptance suite for `sfnn_core`; see `tests/acceptance.rs`.
//!
//! Run with `cargo test -p sfnn-verify`. The suite trains full-size
//! populations and takes tens of minutes on a single core.
