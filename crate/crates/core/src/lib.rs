pub mod codec;
pub mod error;
pub mod index;
pub mod ingest;
pub mod ltj;
pub mod model;
pub mod oracle;
pub mod par;
pub mod rdfcsa;
pub mod ring;
pub mod succinct;
pub mod wavelet;

pub use error::{Error, Result};
