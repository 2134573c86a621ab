use std::net::IpAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use graphvis_core::cache::DEFAULT_EXACT_THRESHOLD;

use crate::state::ServiceConfig;

/// Command line of the server binary. Every flag can also be set through the
/// matching `GRAPHVIS_*` environment variable.
#[derive(Debug, Clone, Parser)]
#[command(name = "graphvis-server", version, about = "Interactive graph analytics service")]
pub struct Cli {
    #[arg(long, env = "GRAPHVIS_PORT", default_value_t = 8472)]
    pub port: u16,
    #[arg(long, env = "GRAPHVIS_HOST", default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Workspace file loaded at startup and written on shutdown and on `POST /workspace/save`.
    #[arg(long, env = "GRAPHVIS_WORKSPACE")]
    pub workspace: Option<PathBuf>,
    /// Graphs with at most this many nodes get exact path-based measures.
    #[arg(long, env = "GRAPHVIS_EXACT_THRESHOLD", default_value_t = DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: usize,
    /// Computations running longer than this answer 202 and continue as a job.
    #[arg(long, env = "GRAPHVIS_JOB_TIMEOUT_MS", default_value_t = 2000)]
    pub job_timeout_ms: u64,
    #[arg(long, env = "GRAPHVIS_MAX_BODY_BYTES", default_value_t = 256 << 20)]
    pub max_body_bytes: usize,
}

impl Cli {
    pub fn service_config(&self) -> ServiceConfig {
        ServiceConfig {
            exact_threshold: self.exact_threshold,
            job_timeout: Duration::from_millis(self.job_timeout_ms),
            workspace_path: self.workspace.clone(),
            max_body_bytes: self.max_body_bytes,
        }
    }
}
