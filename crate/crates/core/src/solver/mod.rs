//! The variational solver: the truncated action functional, the linking
//! geometry, the saddle search and the certificates attached to its output.

mod certify;
mod functional;
mod geometry;
mod saddle;
mod scan;

pub use certify::{
    distinctness_check, minimal_period_check, reintegrate, shift_distance, DistinctRoute, DistinctnessVerdict,
    MinimalPeriodVerdict, Shifts,
};
pub use functional::{ActionFunctional, HessianSpectrum, LinearizedPath};
pub use geometry::{
    a1_constant, a2_constant, construct_geometry, epsilon1_surrogate, linking_seed_set, measure_level, select_mu,
    standard_e, GeometryConstants, LevelDiagnostics, LinkingGeometry, LinkingSeed, SeedKind,
};
pub use saddle::{find_saddle, SaddleResult, SaddleSearch, SeedFailure, SolverOptions};
pub use scan::{solve_period, subharmonic_scan, ScanEntry};
