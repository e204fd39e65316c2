//! Numerical toolkit for the fourth-order operator
//! y⁗ − (p y′)′ + q y on [0,1] with p, q ∈ L²(0,1):
//!
//! * Galerkin assembly of the energy form (y″,z″) + (py′,z′) + (qy,z) in the
//!   sine bases attached to the Dirichlet and Dirichlet–Neumann boundary
//!   conditions ([`assembly`]);
//! * spectra, normalized eigenfunctions, degeneracy detection, eigenvalue
//!   asymptotics and Fréchet derivatives ([`spectra`]);
//! * the perturbed product families built from eigenfunctions of two nearby
//!   coefficient pairs, their distance to the reference cosine system, and
//!   Gram-matrix frame bounds ([`riesz`]);
//! * reconstruction of one coefficient (p or q) from the two spectra near a
//!   constant pair by damped, regularized Newton iteration ([`inverse`]);
//! * desk-scale verification of the uniform eigenfunction estimates and the
//!   spectral localization that back the reconstruction ([`estimates`]);
//! * a batch CLI over all of the above ([`cli`]).

pub mod assembly;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod estimates;
pub mod inverse;
pub mod quad;
pub mod report;
pub mod riesz;
pub mod spectra;

pub use coeff::{basis_function, BoundaryKind, CoefficientFunction, CoefficientPair, Slot};
pub use error::{Error, Result};
