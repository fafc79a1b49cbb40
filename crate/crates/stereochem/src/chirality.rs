//! Tetrahedral R/S assignment.
//!
//! A marked atom is classified directly on its written neighbor order: the
//! mark gives a sense (+1 for `@@`, -1 for `@`), CIP priorities over the four
//! neighbor slots give a permutation, and the product of the sense with the
//! permutation's parity decides the label (+1 is R, -1 is S). Rewriting the
//! molecule under any atom order flips the re-expressed mark exactly when the
//! slot permutation is odd, so the product — and the label — is independent
//! of how the molecule was written.

use thiserror::Error;

use crate::cip::{self, BranchProfile, CipOptions};
use crate::molgraph::{Molecule, TetraMark};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsLabel {
    R,
    S,
}

impl std::fmt::Display for RsLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RsLabel::R => "R",
            RsLabel::S => "S",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StereoAssignment {
    /// Canonical id of the center (its Morgan rank).
    pub atom: usize,
    /// Index of the center in the parsed molecule.
    pub input_atom: usize,
    /// +1 for `@@`, -1 for `@`.
    pub sense: i8,
    /// `perm[i]` is the neighbor slot holding CIP priority `i`.
    pub perm: Vec<usize>,
    /// Parity of `perm`: +1 even, -1 odd.
    pub parity: i8,
    /// `sense * parity`.
    pub value: i8,
    /// R when `value` is +1, S when -1.
    pub label: RsLabel,
}

/// Marked atoms partitioned into classifiable centers and centers whose
/// branch profiles tie (identified by input atom index).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TetraScan {
    pub resolvable: Vec<usize>,
    pub unresolvable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiralityReport {
    /// Ordered by canonical atom id.
    pub assignments: Vec<StereoAssignment>,
    /// Canonical ids of marked atoms with tied branch profiles.
    pub unresolvable: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChiralityError {
    #[error("tetrahedral mark on atom {atom} with {count} neighbors (need 4)")]
    BadNeighborCount { atom: usize, count: usize },
    #[error("branch priorities around atom {atom} are tied")]
    AmbiguousPriorities { atom: usize },
}

fn slot_profiles(mol: &Molecule, center: usize, opts: CipOptions) -> Vec<BranchProfile> {
    mol.ordered_neighbors(center)
        .iter()
        .map(|&(n, _)| cip::branch_profile(mol, center, n, opts))
        .collect()
}

/// Scans a hydrogen-materialized molecule for classifiable marked atoms.
///
/// A marked atom with a neighbor count other than four is a structural error;
/// one whose four branch profiles tie is reported as unresolvable.
pub fn find_tetra_centers(
    mol: &Molecule,
    opts: CipOptions,
) -> Result<TetraScan, ChiralityError> {
    let mut scan = TetraScan::default();
    for (i, atom) in mol.atoms().iter().enumerate() {
        if atom.tetra_mark == TetraMark::None {
            continue;
        }
        let count = mol.degree(i);
        if count != 4 {
            return Err(ChiralityError::BadNeighborCount { atom: i, count });
        }
        if cip::priority_order(&slot_profiles(mol, i, opts)).ambiguous {
            scan.unresolvable.push(i);
        } else {
            scan.resolvable.push(i);
        }
    }
    Ok(scan)
}

/// Classifies one marked center of a hydrogen-materialized molecule.
///
/// `ranks[i]` must give the canonical id of parsed atom `i`; the center's id
/// is reported through it.
pub fn classify_center(
    mol: &Molecule,
    ranks: &[usize],
    center: usize,
    opts: CipOptions,
) -> Result<StereoAssignment, ChiralityError> {
    let sense = mol.atom(center).tetra_mark.sense();
    assert!(sense != 0, "atom {center} carries no tetrahedral mark");
    let count = mol.degree(center);
    if count != 4 {
        return Err(ChiralityError::BadNeighborCount {
            atom: center,
            count,
        });
    }
    let order = cip::priority_order(&slot_profiles(mol, center, opts));
    if order.ambiguous {
        return Err(ChiralityError::AmbiguousPriorities { atom: center });
    }
    let parity = cip::permutation_parity(&order.perm).expect("priority_order yields a permutation");
    let value = sense * parity;
    Ok(StereoAssignment {
        atom: ranks.get(center).copied().unwrap_or(center),
        input_atom: center,
        sense,
        perm: order.perm,
        parity,
        value,
        label: if value > 0 { RsLabel::R } else { RsLabel::S },
    })
}

/// Classifies every resolvable marked center, ordered by canonical id.
pub fn classify_all_centers(
    mol: &Molecule,
    ranks: &[usize],
    opts: CipOptions,
) -> Result<ChiralityReport, ChiralityError> {
    let scan = find_tetra_centers(mol, opts)?;
    let mut report = ChiralityReport {
        assignments: Vec::new(),
        unresolvable: Vec::new(),
        warnings: Vec::new(),
    };
    for &center in &scan.resolvable {
        if mol.atom(center).atomic_number != 6 {
            report.warnings.push(format!(
                "tetrahedral mark on non-carbon atom {} ({})",
                center,
                mol.atom(center).symbol()
            ));
        }
        report
            .assignments
            .push(classify_center(mol, ranks, center, opts)?);
    }
    report.assignments.sort_by_key(|a| a.atom);
    report.unresolvable = scan
        .unresolvable
        .iter()
        .map(|&i| ranks.get(i).copied().unwrap_or(i))
        .collect();
    report.unresolvable.sort_unstable();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles;

    fn classify(s: &str) -> StereoAssignment {
        let m = smiles::parse(s).expect(s).0.materialize_hydrogens();
        let identity: Vec<usize> = (0..m.atom_count()).collect();
        let scan = find_tetra_centers(&m, CipOptions::default()).unwrap();
        assert_eq!(scan.resolvable.len(), 1, "{s}");
        classify_center(&m, &identity, scan.resolvable[0], CipOptions::default()).unwrap()
    }

    #[test]
    fn bromo_amino_ethanol_is_s() {
        let a = classify("C[C@@](Br)(O)N");
        assert_eq!(a.sense, 1);
        assert_eq!(a.perm, vec![1, 2, 3, 0]);
        assert_eq!(a.parity, -1);
        assert_eq!(a.value, -1);
        assert_eq!(a.label, RsLabel::S);
    }

    #[test]
    fn cysteine_is_r() {
        let a = classify("N[C@H](C(=O)O)CS");
        assert_eq!(a.sense, -1);
        assert_eq!(a.perm, vec![0, 3, 2, 1]);
        assert_eq!(a.parity, -1);
        assert_eq!(a.value, 1);
        assert_eq!(a.label, RsLabel::R);
    }

    #[test]
    fn amino_fluoro_propanoic_acid_is_r() {
        let a = classify("N[C@](C)(F)C(=O)O");
        assert_eq!(a.label, RsLabel::R);
    }

    #[test]
    fn unmarked_molecules_have_no_centers() {
        let m = smiles::parse("CCO").unwrap().0.materialize_hydrogens();
        let scan = find_tetra_centers(&m, CipOptions::default()).unwrap();
        assert!(scan.resolvable.is_empty() && scan.unresolvable.is_empty());
    }

    #[test]
    fn tied_branches_are_unresolvable_not_fatal() {
        let m = smiles::parse("C[C@@](C)(O)N")
            .unwrap()
            .0
            .materialize_hydrogens();
        let scan = find_tetra_centers(&m, CipOptions::default()).unwrap();
        assert!(scan.resolvable.is_empty());
        assert_eq!(scan.unresolvable, vec![1]);
    }

    #[test]
    fn wrong_neighbor_count_is_a_structural_error() {
        let m = smiles::parse("[C@](C)(C)C")
            .unwrap()
            .0
            .materialize_hydrogens();
        let err = find_tetra_centers(&m, CipOptions::default()).unwrap_err();
        assert_eq!(
            err,
            ChiralityError::BadNeighborCount { atom: 0, count: 3 }
        );
    }

    #[test]
    fn non_carbon_center_classifies_with_warning() {
        let m = smiles::parse("[Si@](N)(O)(F)Cl")
            .unwrap()
            .0
            .materialize_hydrogens();
        let identity: Vec<usize> = (0..m.atom_count()).collect();
        let report = classify_all_centers(&m, &identity, CipOptions::default()).unwrap();
        assert_eq!(report.assignments.len(), 1);
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].contains("Si"));
    }

    #[test]
    fn threonine_centers_take_opposite_values() {
        let m = smiles::parse("C[C@H]([C@@H](C(=O)O)N)O")
            .unwrap()
            .0
            .materialize_hydrogens();
        let identity: Vec<usize> = (0..m.atom_count()).collect();
        let report = classify_all_centers(&m, &identity, CipOptions::default()).unwrap();
        assert_eq!(report.assignments.len(), 2);
        let by_input = |i: usize| {
            report
                .assignments
                .iter()
                .find(|a| a.input_atom == i)
                .unwrap()
        };
        // C1 carries the hydroxyl: R. C2 carries the amine: S.
        assert_eq!(by_input(1).label, RsLabel::R);
        assert_eq!(by_input(2).label, RsLabel::S);
        assert_eq!(by_input(1).value * by_input(2).value, -1);
    }

    #[test]
    fn mirror_image_flips_every_label() {
        for s in [
            "C[C@@](Br)(O)N",
            "N[C@H](C(=O)O)CS",
            "N[C@](C)(F)C(=O)O",
            "C[C@H]([C@@H](C(=O)O)N)O",
        ] {
            let m = smiles::parse(s).expect(s).0.materialize_hydrogens();
            let identity: Vec<usize> = (0..m.atom_count()).collect();
            let normal =
                classify_all_centers(&m, &identity, CipOptions::default()).unwrap();
            let mirrored = classify_all_centers(
                &m.with_flipped_marks(),
                &identity,
                CipOptions::default(),
            )
            .unwrap();
            for (a, b) in normal.assignments.iter().zip(&mirrored.assignments) {
                assert_eq!(a.input_atom, b.input_atom);
                assert_eq!(a.value, -b.value, "{s}");
                assert_ne!(a.label, b.label, "{s}");
            }
        }
    }

    #[test]
    fn swapping_two_written_neighbors_flips_the_label() {
        let m = smiles::parse("C[C@@](Br)(O)N")
            .unwrap()
            .0
            .materialize_hydrogens();
        let identity: Vec<usize> = (0..m.atom_count()).collect();
        let base = classify_center(&m, &identity, 1, CipOptions::default()).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                let swapped = m.with_swapped_slots(1, i, j);
                let a = classify_center(&swapped, &identity, 1, CipOptions::default()).unwrap();
                assert_ne!(a.label, base.label, "swap {i} {j}");
            }
        }
    }

    /// Geometric oracle: place the four neighbors at tetrahedral positions
    /// consistent with the written mark, then read the sign of the triple
    /// product of the top three CIP priorities (R exactly when negative,
    /// i.e. when priorities 1-2-3 run clockwise seen with the lowest
    /// priority pointing away). Shares no code with the parity path.
    mod geometric_oracle {
        use super::*;

        fn oracle_label(mark: TetraMark, priority_of_slot: [usize; 4]) -> RsLabel {
            let third = -1.0 / 3.0;
            let spread: [f64; 3] = match mark {
                TetraMark::AntiClockwise => [90.0, 210.0, 330.0],
                TetraMark::Clockwise => [90.0, -30.0, -150.0],
                TetraMark::None => unreachable!(),
            };
            let mut slot_pos = [[0.0f64; 3]; 4];
            slot_pos[0] = [0.0, 0.0, 1.0];
            for (k, angle) in spread.iter().enumerate() {
                let a = angle.to_radians();
                slot_pos[k + 1] = [a.cos(), a.sin(), third];
            }
            let mut pri_pos = [[0.0f64; 3]; 4];
            for slot in 0..4 {
                pri_pos[priority_of_slot[slot]] = slot_pos[slot];
            }
            let [a, b, c] = [pri_pos[0], pri_pos[1], pri_pos[2]];
            let det = a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
            if det < 0.0 {
                RsLabel::R
            } else {
                RsLabel::S
            }
        }

        #[test]
        fn oracle_reproduces_worked_labels() {
            // C[C@@](Br)(O)N: slots [C, Br, O, N], priorities Br O N C.
            assert_eq!(
                oracle_label(TetraMark::Clockwise, [3, 0, 1, 2]),
                RsLabel::S
            );
            // N[C@H](C(=O)O)CS: slots [N, H, COOH, CH2S], priorities N CH2S COOH H.
            assert_eq!(
                oracle_label(TetraMark::AntiClockwise, [0, 3, 2, 1]),
                RsLabel::R
            );
        }

        #[test]
        fn all_ligand_orders_and_marks_match_the_embedding() {
            let ligands = ["N", "O", "F", "Cl"];
            // CIP priority of each ligand, highest first: Cl F O N.
            let priority = |l: &str| match l {
                "Cl" => 0,
                "F" => 1,
                "O" => 2,
                _ => 3,
            };
            let mut orders = Vec::new();
            permute(&mut [0, 1, 2, 3], 0, &mut orders);
            assert_eq!(orders.len(), 24);
            let mut checked = 0;
            for order in &orders {
                for (mark, mark_str) in
                    [(TetraMark::AntiClockwise, "@"), (TetraMark::Clockwise, "@@")]
                {
                    let slots: Vec<&str> = order.iter().map(|&i| ligands[i]).collect();
                    let s = format!(
                        "[C{mark_str}]({})({})({}){}",
                        slots[0], slots[1], slots[2], slots[3]
                    );
                    let a = classify(&s);
                    let priority_of_slot = [
                        priority(slots[0]),
                        priority(slots[1]),
                        priority(slots[2]),
                        priority(slots[3]),
                    ];
                    assert_eq!(
                        a.label,
                        oracle_label(mark, priority_of_slot),
                        "{s}"
                    );
                    checked += 1;
                }
            }
            assert_eq!(checked, 48);
        }

        fn permute(perm: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
            if k == 4 {
                out.push(*perm);
                return;
            }
            for i in k..4 {
                perm.swap(k, i);
                permute(perm, k + 1, out);
                perm.swap(k, i);
            }
        }
    }
}
