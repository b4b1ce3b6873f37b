//! Linearized electrical impedance tomography on the unit disk.
//!
//! Fields are angular Fourier series with polynomial radial profiles. The
//! forward map turns a field into the four blocks of a linearized
//! Dirichlet-to-Neumann matrix; the inverse map recovers the field from those
//! blocks through explicit Müntz–Legendre moment inversion.

pub mod cli;
pub mod error;
pub mod exact;
pub mod field;
pub mod forward;
pub mod inverse;
pub mod muntz;
pub mod partial;
pub mod quadrature;

pub use error::{EitError, Result};
pub use exact::{exact_forward, exact_reconstruct, ExactField};
pub use field::{FieldKind, FourierRadialField, RadialProfile};
pub use forward::{
    conductivity_dtn, energy_oracle, forward, oracle_dtn, schroedinger_dtn, Block, BoundaryMode,
    DtnKind, DtnMatrixSet, Parity,
};
pub use inverse::{
    admissibility, reconstruct, solve_moment_problem, validate, MomentData, ReconstructOptions,
    Reconstruction, ValidationReport,
};
pub use partial::{
    arc_forward_oracle, arc_invert, half_disk_forward_oracle, half_disk_invert, ArcSpec,
    ConformalMap, HalfDiskData,
};
pub use quadrature::QuadratureSpec;
