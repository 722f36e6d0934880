//! Finite-witness properties: the doubling bound and its violations,
//! approximation into a smaller range set, and the tail perturbation that
//! makes a telescope anti-doubling.

mod approx;
mod doubling;
mod perturb;

pub use approx::t_approx;
pub use doubling::{
    alpha_delta, anti_doubling_witness, doubling_check, search_exhaustive, DoublingCheck, SearchMode,
    TransmissibleCheck, TransmissibleVerdict, Witness, EXHAUSTIVE_LIMIT,
};
pub use perturb::{
    genericity_perturb, lazy_alpha_delta, perturbed_anti_doubling_witness, telescope_anti_doubling_witness,
    PerturbCertificate, PerturbedTelescope, PREFIX_MARGIN,
};
