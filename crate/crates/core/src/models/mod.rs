//! Semifree models: presentations, Koszul/loop/Cartan models and stabilizers.

pub mod loops;
pub mod presentation;
pub mod semifree;
pub mod stabilizers;

pub use loops::{cartan_model, cartan_topological, koszul_model, loop_model, BuiltModel, GroupCoeffs};
pub use presentation::{fixed_points, AlgebraPresentation, PresentationError, TorusData, TorusPoint};
pub use semifree::{Gen, MPoly, SemifreeModel};
