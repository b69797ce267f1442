//! Constitutive layer: cofactor algebra, the Mooney–Rivlin energy and its
//! stress, admissible deformations, the strain `sigma = DL(grad u) (grad u)^T`
//! and its push-forward to the deformed domain.

mod deformation;
mod energy;
pub mod matrix;

pub use deformation::{
    cauchy_green_strain, deformed_volume, pushforward, pushforward_fn, validate_admissible, AdmissibilityReport,
    AnalyticMap, Deformation, NEWTON_MAX_ITER, NEWTON_TOL,
};
pub use energy::{growth_check, mr_energy, mr_stress, strain_of_gradient, GrowthReport, Material};
pub use matrix::{cofactor, det, Matrix};
