//! Command-line front end: argument handling, check harness, acceptance criteria and golden fixtures.

pub mod checks;
pub mod commands;
pub mod config;
pub mod criteria;
pub mod golden;
pub mod report;
