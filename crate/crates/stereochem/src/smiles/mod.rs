//! SMILES input and output.
//!
//! [`parse`] accepts a Daylight-style subset: organic-subset atoms, bracket
//! atoms (isotope, element, `@`/`@@`, hydrogen count, charge), the bond
//! symbols `- = # : / \`, branches, and ring closures (digits and `%nn`).
//! Reaction arrows, wildcards, quadruple bonds, and dot-disconnected
//! components are rejected with a positioned error.
//!
//! [`write`] serializes a molecule under a caller-chosen atom ranking and
//! re-expresses stereo so the text still denotes the same stereoisomer:
//! tetrahedral marks are flipped when the neighbor order changes by an odd
//! permutation, and direction symbols are re-oriented to the new text order.

mod parse;
mod write;

pub use parse::{parse, ParseDiagnostics, SmilesError, SmilesErrorKind};
pub use write::{rewrite_random, write, write_mapped, WriteError};
