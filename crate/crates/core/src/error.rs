use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {pos} outside 1..={len}")]
    OutOfRange { pos: usize, len: usize },

    #[error("rank prefix {pos} exceeds length {len}")]
    RankOutOfRange { pos: usize, len: usize },

    #[error("symbol {symbol} outside alphabet 1..={sigma}")]
    SymbolOutOfRange { symbol: u32, sigma: u32 },

    #[error("sequences have different alphabets ({left} vs {right})")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("id {id} outside universe 1..={universe}")]
    IdOutOfRange { id: u32, universe: u32 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty graph")]
    EmptyGraph,

    #[error("malformed query: {0}")]
    Query(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("index section `{section}`: {msg}")]
    Corrupt { section: String, msg: String },

    #[error("variant mismatch: expected {expected}, found {found}")]
    VariantMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn corrupt(section: &str, msg: impl Into<String>) -> Self {
        Error::Corrupt {
            section: section.to_string(),
            msg: msg.into(),
        }
    }
}
