//! HTTP/JSON API over rule-engine sessions.
//!
//! Each model (a bundled fixture or an upload) lives in its own [`Session`]
//! behind a read/write lock: explanations and listings share the lock, rule
//! edits take it exclusively while re-inference runs. Sessions are in
//! memory only; a restart restores the pristine fixtures.
//!
//! | Method | Path | Purpose |
//! |---|---|---|
//! | GET | `/api/models` | list models |
//! | GET | `/api/models/{id}/statements?which=base\|inferred\|rules` | inspect a model |
//! | POST | `/api/models/{id}/explain` | explain one statement |
//! | PUT | `/api/models/{id}/rules` | replace the rules and re-infer |
//! | POST | `/api/models` | upload facts + rules (multipart) |
//! | POST | `/api/models/{id}/revert` | undo the last edit |

mod api;
mod error;
mod state;

pub use api::router;
pub use error::ApiError;
pub use state::{AppState, Session, SessionError};

use std::net::SocketAddr;

use tracing::info;

/// Binds `addr` and serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!(addr = %listener.local_addr()?, "serving");
    axum::serve(listener, router(state)).await
}
