pub mod corpus;
pub mod eval;
pub mod model;
pub mod nn;
mod scalar;
pub mod treebank;

pub use scalar::Scalar;
pub use twofloat::TwoFloat;

pub type ParamStoreF32 = nn::ParamStore<f32>;
pub type ParamStoreF64 = nn::ParamStore<f64>;
pub type ParamStoreDd = nn::ParamStore<TwoFloat>;
pub type ParserModelF32 = model::ParserModel<f32>;
pub type ParserModelF64 = model::ParserModel<f64>;
/// Double-double model, for reference computations such as gradient checks.
pub type ParserModelDd = model::ParserModel<TwoFloat>;
pub type ScoreMatrixF32 = model::ScoreMatrix<f32>;
pub type ScoreMatrixF64 = model::ScoreMatrix<f64>;
