//! The Lemin–Lemin module `L(S, F(ℤ, X, o), o)` and the isometric
//! embedding of finite `S`-valued ultrametric spaces into it.

mod lemin;
mod vector;

pub use lemin::{
    embed_finite, independence_check, rational_rank, submodule_svalued_exhaustive, submodule_svalued_sample,
    EmbeddingCertificate, SubmoduleReport,
};
pub use vector::{Coeffs, UltraVector};
