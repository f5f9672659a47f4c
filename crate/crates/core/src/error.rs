use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("voice {voice} at bin {bin} is outside the usable grid range {lo}..={hi}")]
    VoiceOutOfGrid {
        voice: usize,
        bin: i64,
        lo: usize,
        hi: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
