//! Scripted studies built on the solver.

pub mod cavity;
pub mod convergence;
pub mod decay;
pub mod fit;
pub mod probe;
pub mod sampling;
pub mod stability;
pub mod stokes;

pub use cavity::{lid_driven_cavity, CavityResult};
pub use convergence::{convergence_study, ConvergenceResult};
pub use decay::{divergence_decay, DecayResult};
pub use probe::{probe_neumann_to_dirichlet, ProbeResult};
pub use sampling::{SampleFamily, SampleSpec};
pub use stability::{stability_sweep, StabilityRow, StabilityTable};
pub use stokes::{verify_stokes_estimate, FitResult, StokesStudy};
