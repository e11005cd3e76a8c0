//! IO companion to the `netchisq` statistics crate: campaign data file
//! formats and the report/plot writers behind the `netchisq` binary.

pub mod ingest;
pub mod report;
