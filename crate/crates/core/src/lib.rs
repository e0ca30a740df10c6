//! Exact invariants of adelic divisors on the Berkovich projective line
//! over a trivially valued field.

pub mod cluster;
pub mod divisor;
pub mod dynamics;
pub mod error;
pub mod finiteness;
pub mod green;
pub mod mu;
pub mod poly;
pub mod profile;
pub mod rational;
pub mod sections;

pub use cluster::{refine_supports, PointCluster, Refinement};
pub use divisor::{solve_principal, FormalRationalFunction, RDivisor};
pub use dynamics::{
    canonical_green, canonical_height_checks, check_eigen, concave_criteria, iterates,
    lambda_function, CanonicalGreenResult, ConcaveReport, EigenData, Endomorphism, HeightReport,
    Horizon, PointSet,
};
pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::{Extended, Rational};
pub use finiteness::{
    finiteness_probe, phi_sequence, FinitenessReport, PhiEntry, PhiSequence, Verdict,
};
pub use green::{AdelicDivisor, GeometricTail, GreenFunction, TreePoint, Violation};
pub use profile::BranchProfile;
pub use mu::{
    decide_dirichlet, decide_pseudoeffective, epsilon_dirichlet, mu_tot, mu_x, verify_witness,
    DirichletCertificate, FailureReason,
};
pub use sections::{
    deg_plus, filtration, h0_dimension, is_big, lambda_max_asy, lambda_max_n, section_norm, volume,
    FiltrationTable,
};
