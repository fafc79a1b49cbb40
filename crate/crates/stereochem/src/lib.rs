//! Stereochemistry perception for SMILES strings.
//!
//! The crate parses a Daylight-style SMILES subset into a molecular graph,
//! canonicalizes it with a Morgan-style ranking, and classifies explicit
//! stereocenters: tetrahedral atoms as R/S and double bonds as E/Z.
//!
//! The classification machinery is split into focused modules:
//!
//! * [`molgraph`] — atoms, bonds, and the immutable [`Molecule`] graph
//! * [`smiles`] — parser and stereo-preserving writer
//! * [`canon`] — Morgan-style canonical ranks and canonical SMILES
//! * [`cip`] — CIP-style branch profiles, priority ordering, permutation parity
//! * [`chirality`] — tetrahedral R/S assignment
//! * [`ezgeom`] — planar layout, rotation, and E/Z assignment

pub mod canon;
pub mod chirality;
pub mod cip;
mod elements;
pub mod ezgeom;
pub mod molgraph;
pub mod smiles;

pub use molgraph::{Atom, Bond, BondDirection, BondOrder, Molecule, TetraMark};
