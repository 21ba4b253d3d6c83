pub mod centrality;
pub mod error;
pub mod filter;
pub mod graph;
pub mod ingest;
pub mod scalar;
pub mod ssgan;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GanModelF32 = ssgan::GanModel<f32>;
pub type GanModelF64 = ssgan::GanModel<f64>;
pub type DiscriminatorF32 = ssgan::Discriminator<f32>;
pub type DiscriminatorF64 = ssgan::Discriminator<f64>;
pub type GeneratorF32 = ssgan::Generator<f32>;
pub type GeneratorF64 = ssgan::Generator<f64>;
pub type CentralityF32 = centrality::CentralityVector<f32>;
pub type CentralityF64 = centrality::CentralityVector<f64>;
