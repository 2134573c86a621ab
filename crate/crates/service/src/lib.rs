//! HTTP service over the graph engine: uploads, measures, mutations with
//! server-sent change events, filters, generators, exports and workspaces.

pub mod config;
pub mod error;
mod routes;
pub mod state;
pub mod workspace;

pub use config::Cli;
pub use error::ApiError;
pub use routes::router;
pub use state::{AppState, GraphEvent, ServiceConfig};
