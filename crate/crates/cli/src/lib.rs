//! Library surface of the command-line front end, exposed so the
//! integration tests can drive the command implementations and parse the
//! emitted CSV files with the tool's own reader.

pub mod commands;
pub mod csvio;
pub mod manifest;
