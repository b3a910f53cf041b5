//! Invariant-sector simulator for the constrained Hamiltonian flow on frame and
//! momentum data `(E, S)` over a 3-dimensional Lie group, together with the
//! exterior calculus needed to check that its orbits generate torsion-free
//! G₂-structures on `P × I`.
//!
//! Layout, bottom up:
//!
//! * [`mat3`]: 3×3 kernel, Levi-Civita symbol, `so(3)` action.
//! * [`liealg`]: structure constants and presets.
//! * [`frame`]: Levi-Civita connection, torsion, Einstein tensor, covariant derivatives.
//! * [`forms`]: exterior algebra on `{e¹,e²,e³,a¹,a²,a³,dt}`, the structural differential, metric recovery, Hodge star.
//! * [`flow`]: Hamiltonian densities, the flow field, RK4 and monitors.
//! * [`g2`]: SU(3)/G₂ assembly and half-flat / torsion residuals.
//! * [`reduced`]: the isotropic two-variable reduction.
//! * [`adm`]: conversion to metric/momentum variables.

pub mod adm;
pub mod error;
pub mod flow;
pub mod forms;
pub mod frame;
pub mod g2;
pub mod liealg;
pub mod mat3;
pub mod reduced;

pub use error::{Error, Result};
pub use flow::{FlowState, HamiltonianCoeffs, IntegrationConfig, Trajectory};
pub use forms::InvariantForm;
pub use frame::{Connection, Frame};
pub use liealg::{Preset, StructureConstants};
pub use mat3::{Definiteness, Mat3};
