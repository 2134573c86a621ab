use std::future::IntoFuture;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use graphvis_server::workspace::WorkspaceFile;
use graphvis_server::{router, AppState, Cli};
use tokio::sync::Notify;
use tracing_subscriber::EnvFilter;

const DRAIN: Duration = Duration::from_secs(3);

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let cli = Cli::parse();
    let state = AppState::new(cli.service_config());

    if let Some(path) = cli.workspace.as_ref().filter(|p| p.exists()) {
        let bytes = std::fs::read(path)?;
        let file = WorkspaceFile::from_bytes(&bytes).map_err(|e| format!("{}: {}", path.display(), e.message))?;
        tracing::info!(graphs = file.graphs.len(), path = %path.display(), "workspace loaded");
        state.load_file(file);
    }

    let addr = SocketAddr::new(cli.host, cli.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    let stop = Arc::new(Notify::new());
    let server = tokio::spawn({
        let stop = stop.clone();
        axum::serve(listener, router(state.clone())).with_graceful_shutdown(async move { stop.notified().await }).into_future()
    });
    tokio::signal::ctrl_c().await?;
    stop.notify_one();
    // Event streams never finish on their own, so draining gets a deadline.
    if tokio::time::timeout(DRAIN, server).await.is_err() {
        tracing::warn!("open connections dropped at shutdown");
    }

    if let Some(path) = &cli.workspace {
        std::fs::write(path, state.to_file().await.to_bytes())?;
        tracing::info!(path = %path.display(), "workspace saved");
    }
    Ok(())
}
