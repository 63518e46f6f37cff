//! Command line and local HTTP front end for discourse network analysis.
//!
//! Sessions hold a loaded transcript and word list with their graphs built
//! eagerly; the HTTP API and the CLI share the operations in [`ops`].

pub mod api;
pub mod cli;
pub mod error;
pub mod ops;
pub mod store;

pub use api::{router, serve};
pub use error::{ApiError, ErrorBody};
pub use store::{Session, SessionInfo, SessionStore, SessionSummary};
