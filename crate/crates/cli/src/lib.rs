//! Command-line harness around the `fwbesov` experiments.

pub mod commands;
pub mod config;
pub mod initial;
pub mod plot;
pub mod report;
