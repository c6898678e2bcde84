//! Exact Gaussian-integer arithmetic, lattice distances and Hurwitz continued
//! fractions in extended precision.

pub mod arith;
pub mod hp;
pub mod hurwitz;
pub mod int;
pub mod lattice;

pub use hp::{
    cmp_int_sq, nearest_and_dist, within_disc, ComplexHP, NearestDist, PhaseMap, Preset, Torus,
    DEFAULT_PREC,
};
pub use hurwitz::{
    approximation_quality, hurwitz_expansion, verify_approximant, verify_convergent_denominator,
    Convergent, HurwitzExpansion, HurwitzJson,
};
pub use int::{gaussian_gcd, is_gaussian_prime, GaussInt};
pub use lattice::{count_norm_window, floor_pow, for_each_in_norm_window, norm_floor, norm_window_points};
