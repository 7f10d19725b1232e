use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("byte {byte:#04x} at offset {offset} is not in the alphabet")]
    SymbolNotInAlphabet { byte: u8, offset: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("corrupt container: {0}")]
    Corrupt(String),

    /// The payload ran out or produced a token the model cannot hold.
    #[error("decoder desynchronized: {0}")]
    Desync(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
