//! The molecular graph: atoms, bonds, and written-order adjacency.
//!
//! A [`Molecule`] is immutable after construction. The neighbor list of each
//! atom preserves the order in which neighbors were written in the source
//! SMILES (ring-closure partners sit at the slot where their digit appeared);
//! tetrahedral marks are meaningless without that order.

use crate::elements;

/// Tetrahedral mark written on an atom: `@` (anti-clockwise) or `@@` (clockwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TetraMark {
    None,
    AntiClockwise,
    Clockwise,
}

impl TetraMark {
    /// +1 for `@@`, -1 for `@`, 0 for unmarked.
    pub fn sense(self) -> i8 {
        match self {
            TetraMark::None => 0,
            TetraMark::AntiClockwise => -1,
            TetraMark::Clockwise => 1,
        }
    }

    pub fn flipped(self) -> TetraMark {
        match self {
            TetraMark::None => TetraMark::None,
            TetraMark::AntiClockwise => TetraMark::Clockwise,
            TetraMark::Clockwise => TetraMark::AntiClockwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Twice the valence contribution (aromatic counts 1.5, so 3 here).
    pub(crate) fn twice_valence(self) -> u16 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }
}

/// Direction written on a single bond adjacent to a double bond.
///
/// Interpreted relative to the stored endpoint order `a -> b`: `Up` means the
/// bond rises from `a` to `b` (so `a` sits below `b` in the depiction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondDirection {
    None,
    Up,
    Down,
}

impl BondDirection {
    pub fn flipped(self) -> BondDirection {
        match self {
            BondDirection::None => BondDirection::None,
            BondDirection::Up => BondDirection::Down,
            BondDirection::Down => BondDirection::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub atomic_number: u8,
    pub isotope: Option<u16>,
    pub charge: i8,
    /// Hydrogen count written inside brackets (`[CH3-]` has 3).
    pub explicit_h: u8,
    /// Hydrogens implied by the default valence of a bare organic-subset atom.
    pub implicit_h: u8,
    pub aromatic: bool,
    pub tetra_mark: TetraMark,
    /// True when the atom was written in brackets.
    pub bracket: bool,
    /// Position in the parsed input (stable across hydrogen materialization).
    pub input_index: usize,
}

impl Atom {
    pub fn symbol(&self) -> &'static str {
        elements::symbol(self.atomic_number)
    }

    pub fn is_hydrogen(&self) -> bool {
        self.atomic_number == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub direction: BondDirection,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// +1 when the far end of a directional bond sits above `from`, -1 when
    /// below, 0 for undirected bonds. `F/C=C` puts F below the first carbon:
    /// the bond rises from F to C, so seen from the carbon F is down.
    pub fn side_seen_from(&self, from: usize) -> i8 {
        debug_assert!(from == self.a || from == self.b);
        let sign = match self.direction {
            BondDirection::None => return 0,
            BondDirection::Up => 1,
            BondDirection::Down => -1,
        };
        if self.a == from {
            sign
        } else {
            -sign
        }
    }
}

/// An immutable molecular graph with written-order neighbor lists and
/// optional per-atom 2D coordinates.
#[derive(Debug, Clone)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// `adjacency[i]` lists `(neighbor, bond index)` in written order.
    adjacency: Vec<Vec<(usize, usize)>>,
    coords: Vec<Option<(f64, f64)>>,
}

impl Molecule {
    /// Builds a molecule whose neighbor lists follow bond insertion order.
    /// The parser uses [`Molecule::from_raw`] instead to control ring slots.
    pub fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Molecule {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, bond) in bonds.iter().enumerate() {
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        Molecule::from_raw(atoms, bonds, adjacency)
    }

    pub(crate) fn from_raw(
        atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        adjacency: Vec<Vec<(usize, usize)>>,
    ) -> Molecule {
        debug_assert_eq!(atoms.len(), adjacency.len());
        debug_assert_eq!(
            adjacency.iter().map(Vec::len).sum::<usize>(),
            2 * bonds.len(),
            "neighbor slots must count every bond twice"
        );
        let coords = vec![None; atoms.len()];
        Molecule {
            atoms,
            bonds,
            adjacency,
            coords,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    /// `(neighbor, bond index)` pairs of `atom` in written order.
    pub fn ordered_neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    /// The bond joining `a` and `b`, if one exists.
    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.bond_index_between(a, b).map(|bi| &self.bonds[bi])
    }

    pub fn bond_index_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bi)| bi)
    }

    /// Implicit plus bracket plus materialized hydrogens on `atom`.
    pub fn total_h(&self, atom: usize) -> u8 {
        let attached = self.adjacency[atom]
            .iter()
            .filter(|&&(n, _)| self.atoms[n].is_hydrogen())
            .count() as u8;
        self.atoms[atom].implicit_h + self.atoms[atom].explicit_h + attached
    }

    pub fn coord(&self, atom: usize) -> Option<(f64, f64)> {
        self.coords.get(atom).copied().flatten()
    }

    pub fn has_coords(&self) -> bool {
        self.coords.iter().any(Option::is_some)
    }

    /// Returns a copy carrying per-atom coordinates (length must match).
    pub fn with_coords(&self, coords: Vec<Option<(f64, f64)>>) -> Molecule {
        assert_eq!(coords.len(), self.atoms.len(), "one coordinate slot per atom");
        Molecule {
            coords,
            ..self.clone()
        }
    }

    /// Returns a copy with every tetrahedral mark inverted (the mirror image).
    pub fn with_flipped_marks(&self) -> Molecule {
        let mut m = self.clone();
        for atom in &mut m.atoms {
            atom.tetra_mark = atom.tetra_mark.flipped();
        }
        m
    }

    /// Returns a copy with two written neighbor slots of `atom` exchanged.
    /// Swapping slots of a marked atom while keeping its mark flips the
    /// stereoisomer the graph denotes.
    pub fn with_swapped_slots(&self, atom: usize, i: usize, j: usize) -> Molecule {
        let mut m = self.clone();
        m.adjacency[atom].swap(i, j);
        m
    }

    /// Twice the sum of bond-order valence contributions at `atom`
    /// (aromatic bonds count 1.5 each, hence the doubling).
    pub(crate) fn twice_bond_valence(&self, atom: usize) -> u16 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, bi)| self.bonds[bi].order.twice_valence())
            .sum()
    }

    /// Converts implicit and bracket hydrogens into real atoms.
    ///
    /// Heavy atoms keep their indices; hydrogens are appended at the end.
    /// For a tetrahedral-marked atom the first added hydrogen occupies the
    /// neighbor slot where it was written: the leading slot when the atom
    /// opens the SMILES, otherwise the slot right after the incoming atom.
    /// Hydrogens on unmarked atoms are appended to the neighbor list.
    pub fn materialize_hydrogens(&self) -> Molecule {
        let mut atoms = self.atoms.clone();
        let mut bonds = self.bonds.clone();
        let mut adjacency = self.adjacency.clone();
        let mut coords = self.coords.clone();

        for i in 0..self.atoms.len() {
            let count = self.atoms[i].implicit_h + self.atoms[i].explicit_h;
            for k in 0..count {
                let h = atoms.len();
                atoms.push(Atom {
                    atomic_number: 1,
                    isotope: None,
                    charge: 0,
                    explicit_h: 0,
                    implicit_h: 0,
                    aromatic: false,
                    tetra_mark: TetraMark::None,
                    bracket: false,
                    input_index: h,
                });
                let bi = bonds.len();
                bonds.push(Bond {
                    a: i,
                    b: h,
                    order: BondOrder::Single,
                    direction: BondDirection::None,
                });
                let marked = self.atoms[i].tetra_mark != TetraMark::None;
                if marked && k == 0 {
                    let slot = if i == 0 { 0 } else { 1 };
                    let slot = slot.min(adjacency[i].len());
                    adjacency[i].insert(slot, (h, bi));
                } else {
                    adjacency[i].push((h, bi));
                }
                adjacency.push(vec![(i, bi)]);
                coords.push(None);
            }
            atoms[i].implicit_h = 0;
            atoms[i].explicit_h = 0;
        }

        Molecule {
            atoms,
            bonds,
            adjacency,
            coords,
        }
    }
}

/// A soft structural complaint, e.g. a written valence that disagrees with
/// the element's default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceIssue {
    pub atom: usize,
    pub message: String,
}

/// Checks neutral organic-subset atoms against the default valence table.
/// Violations are reported, never fatal.
pub fn check_valences(mol: &Molecule) -> Vec<ValenceIssue> {
    let mut issues = Vec::new();
    for (i, atom) in mol.atoms().iter().enumerate() {
        if atom.charge != 0 || !elements::is_organic_subset(atom.atomic_number) {
            continue;
        }
        let Some(valence) = elements::default_valence(atom.atomic_number) else {
            continue;
        };
        // Round the aromatic 1.5-per-bond contribution up to whole bonds.
        let used = (mol.twice_bond_valence(i) + 1) / 2;
        let total = used + u16::from(mol.total_h(i));
        if total != u16::from(valence) {
            issues.push(ValenceIssue {
                atom: i,
                message: format!(
                    "atom {} ({}) has valence {} (default for the element is {})",
                    i,
                    atom.symbol(),
                    total,
                    valence
                ),
            });
        }
    }
    issues
}
