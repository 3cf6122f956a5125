//! Fractional volume integration, the F and W functionals, their variations and the
//! thermodynamic quantities of the flow.

mod functionals;
mod volume;

pub use functionals::{
    df_dchi_integral, dw_dchi_integral, first_variation_f, functional_f, functional_w, mu_density, mu_mass,
    normalize_potential, thermodynamics, Evaluation, PotentialTerms, ThermoRecord, Variation, WForm,
};
pub use volume::{axis_weights, fractional_volume_integral, VolumeElement};
