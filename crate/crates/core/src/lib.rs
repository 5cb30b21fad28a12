//! Train tracks, cocyclic coordinates, flag invariants and the obstruction
//! class for surface-group representations into PGL_d(C).

pub mod algebra;
pub mod traintrack;
pub mod cocyclic;
pub mod homology;
pub mod flags;
pub mod obstruction;
pub mod slither;
