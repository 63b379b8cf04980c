//! Exact linear propagators, the Strang split-step integrator and conserved quantities.

pub mod params;
pub mod stepper;
pub mod trajectory;

pub use params::{admissible, EvolutionParams};
pub use stepper::{linear_propagate, nonlinear_phase_step, Propagate, SplitStepper, BLOWUP_THRESHOLD};
pub use trajectory::{
    conserved, conserved_with, continuum_reference, continuum_reference_with, dispersive_norm, evolve,
    uniform_times, BoundaryPolicy, ConservedQuantities, Trajectory,
};
