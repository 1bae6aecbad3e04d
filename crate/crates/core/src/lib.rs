//! Identification of complaint speech acts in short social-media texts.

pub mod analysis;
pub mod clusters;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicons;
pub mod models;
pub mod scalar;
pub mod textproc;
mod util;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use util::{derive_seed, fingerprint};

pub type FeatureVector = features::FeatureVector<f64>;
pub type LinearModel = models::LinearModel<f64>;
pub type MlpModel = models::MlpModel<f64>;
pub type Model = models::Model<f64>;
pub type EmbeddingTable = clusters::EmbeddingTable<f64>;
pub type SymMatrix = clusters::SymMatrix<f64>;
