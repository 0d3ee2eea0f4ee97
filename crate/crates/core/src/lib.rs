//! Event-driven quasi-static simulator for crawling robot modules driven by
//! shape-memory-alloy coils against a snap-through curved beam, with a
//! mechanical self-switching circuit and an optional two-module connector.

// `!(x > 0.0)` is used on purpose so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actuator;
pub mod beam;
pub mod calibrate;
pub mod config;
pub mod control;
pub mod engine;
pub mod error;
pub mod locomotion;
pub mod output;

pub use error::{Error, Result};
