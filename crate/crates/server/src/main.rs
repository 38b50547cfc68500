use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use qrewrite::rules::register_user_rules;
use qrewrite::strategy::MAX_STEPS_ENV;
use qrewrite::syntax::parse_rules;
use qrewrite_server::{router, spawn_reaper, AppState, ServerConfig};

/// Serve interactive derivations over JSON HTTP.
#[derive(Parser)]
#[command(name = "qrewrite-server", version)]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Seconds a session may sit unused before it is discarded.
    #[arg(long, default_value_t = 1800, value_name = "SECONDS")]
    idle_timeout: u64,
    /// Extra user rule file (repeatable).
    #[arg(long, value_name = "FILE")]
    rules: Vec<PathBuf>,
    #[arg(long, env = MAX_STEPS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: Option<u64>,
}

fn config(args: &Args) -> Result<ServerConfig, String> {
    let mut config = ServerConfig { idle_timeout: Duration::from_secs(args.idle_timeout), ..ServerConfig::default() };
    if let Some(n) = args.max_steps {
        config.normalize.max_steps = n as usize;
    }
    for path in &args.rules {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let rules = parse_rules(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.registry = register_user_rules(config.registry, rules).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(config)
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let state = AppState::new(config);
    spawn_reaper(state.clone());
    let addr = SocketAddr::new(args.host, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot listen on {addr}: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!("listening on http://{}", listener.local_addr().map_or(addr, |a| a));
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
