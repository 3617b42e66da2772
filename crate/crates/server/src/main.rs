use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;
use qpoker_server::{router, AppState};

#[derive(Parser)]
#[command(name = "qpoker-server", about = "Serve quantum poker tables over WebSocket")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory for game logs. Games found there are reloaded at start.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    tracing_subscriber::fmt::init();
    let args = Args::parse();
    let state = match args.data_dir {
        Some(dir) => AppState::with_data_dir(dir).await?,
        None => AppState::in_memory(),
    };
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
