//! Library surface of the `darkstore` binary: the subcommand
//! implementations, reused by the integration and acceptance suites.

pub mod ops;
