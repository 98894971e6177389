//! Command-line front end: JSON game documents in, JSON solutions,
//! reports and CSV sweeps out.

pub mod commands;
pub mod document;
