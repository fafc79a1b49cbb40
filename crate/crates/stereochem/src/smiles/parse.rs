use std::collections::HashMap;

use thiserror::Error;

use crate::elements;
use crate::molgraph::{Atom, Bond, BondDirection, BondOrder, Molecule, TetraMark};

/// A parse failure, carrying the byte offset of the offending character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct SmilesError {
    pub position: usize,
    pub kind: SmilesErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesErrorKind {
    #[error("empty SMILES")]
    Empty,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("`{0}` is not supported")]
    Unsupported(&'static str),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unclosed bracket atom")]
    UnclosedBracket,
    #[error("bond symbol has no preceding atom")]
    BondBeforeAtom,
    #[error("two bond symbols in a row")]
    RepeatedBondSymbol,
    #[error("bond symbol not followed by an atom")]
    DanglingBond,
    #[error("branch has no preceding atom")]
    BranchBeforeAtom,
    #[error("empty branch")]
    EmptyBranch,
    #[error("unmatched `(`")]
    UnclosedBranch,
    #[error("unmatched `)`")]
    UnopenedBranch,
    #[error("ring closure digit has no preceding atom")]
    RingBeforeAtom,
    #[error("`%` must be followed by two digits")]
    BadPercentDigit,
    #[error("ring bond {0} was never closed")]
    UnclosedRing(u16),
    #[error("ring bond {0} closes on its opening atom")]
    SelfRing(u16),
    #[error("duplicate bond between the same atoms")]
    DuplicateBond,
    #[error("ring bond {0} written with conflicting bond symbols")]
    RingBondMismatch(u16),
    #[error("conflicting directional bonds on a double-bond substituent pair")]
    DirectionConflict,
}

/// Non-fatal findings from a parse: `(byte offset, message)` pairs.
#[derive(Debug, Clone, Default)]
pub struct ParseDiagnostics {
    pub warnings: Vec<(usize, String)>,
}

fn err(position: usize, kind: SmilesErrorKind) -> SmilesError {
    SmilesError { position, kind }
}

/// A bond symbol waiting for the atom or ring digit it applies to.
#[derive(Clone, Copy)]
struct PendingBond {
    order: Option<BondOrder>,
    direction: BondDirection,
    position: usize,
}

struct RingOpen {
    atom: usize,
    /// Index of the placeholder pushed into `adjacency[atom]`.
    slot: usize,
    bond: Option<PendingBond>,
    position: usize,
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    atom_pos: Vec<usize>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    prev: Option<usize>,
    pending: Option<PendingBond>,
    /// `(parent atom, atom count at open, position of the open paren)`.
    branch_stack: Vec<(usize, usize, usize)>,
    rings: HashMap<u16, RingOpen>,
}

/// Parses a single SMILES string into a molecule plus non-fatal diagnostics.
pub fn parse(text: &str) -> Result<(Molecule, ParseDiagnostics), SmilesError> {
    let mut p = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        atom_pos: Vec::new(),
        bonds: Vec::new(),
        adjacency: Vec::new(),
        prev: None,
        pending: None,
        branch_stack: Vec::new(),
        rings: HashMap::new(),
    };
    p.run()?;
    p.finish()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        if self.bytes.is_empty() {
            return Err(err(0, SmilesErrorKind::Empty));
        }
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'[' => {
                    self.pos += 1;
                    let atom = self.bracket_atom(start)?;
                    self.add_atom(atom, start)?;
                }
                b'A'..=b'Z' | b'a'..=b'z' => {
                    let atom = self.organic_atom(start)?;
                    self.add_atom(atom, start)?;
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_digit((c - b'0') as u16, start)?;
                }
                b'%' => {
                    self.pos += 1;
                    let d1 = self.bump().filter(u8::is_ascii_digit);
                    let d2 = self.bump().filter(u8::is_ascii_digit);
                    match (d1, d2) {
                        (Some(a), Some(b)) => {
                            self.ring_digit(((a - b'0') * 10 + (b - b'0')) as u16, start)?
                        }
                        _ => return Err(err(start, SmilesErrorKind::BadPercentDigit)),
                    }
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    self.pos += 1;
                    self.bond_symbol(c, start)?;
                }
                b'(' => {
                    self.pos += 1;
                    let Some(prev) = self.prev else {
                        return Err(err(start, SmilesErrorKind::BranchBeforeAtom));
                    };
                    if self.pending.is_some() {
                        // "C=(" — the pending bond belongs inside the branch.
                        return Err(err(start, SmilesErrorKind::DanglingBond));
                    }
                    self.branch_stack.push((prev, self.atoms.len(), start));
                }
                b')' => {
                    self.pos += 1;
                    if let Some(p) = self.pending {
                        return Err(err(p.position, SmilesErrorKind::DanglingBond));
                    }
                    let Some((parent, count, _)) = self.branch_stack.pop() else {
                        return Err(err(start, SmilesErrorKind::UnopenedBranch));
                    };
                    if self.atoms.len() == count {
                        return Err(err(start, SmilesErrorKind::EmptyBranch));
                    }
                    self.prev = Some(parent);
                }
                b'.' => return Err(err(start, SmilesErrorKind::Unsupported("disconnected components ('.')"))),
                b'*' => return Err(err(start, SmilesErrorKind::Unsupported("wildcard atoms ('*')"))),
                b'$' => return Err(err(start, SmilesErrorKind::Unsupported("quadruple bonds ('$')"))),
                b'>' => return Err(err(start, SmilesErrorKind::Unsupported("reaction SMILES ('>')"))),
                other => return Err(err(start, SmilesErrorKind::UnexpectedChar(other as char))),
            }
        }

        if let Some(p) = self.pending {
            return Err(err(p.position, SmilesErrorKind::DanglingBond));
        }
        if let Some(&(_, _, pos)) = self.branch_stack.last() {
            return Err(err(pos, SmilesErrorKind::UnclosedBranch));
        }
        if let Some((&digit, open)) = self.rings.iter().min_by_key(|(_, o)| o.position) {
            return Err(err(open.position, SmilesErrorKind::UnclosedRing(digit)));
        }
        Ok(())
    }

    fn organic_atom(&mut self, start: usize) -> Result<Atom, SmilesError> {
        let c = self.bump().unwrap();
        let (z, aromatic) = match c {
            b'C' if self.peek() == Some(b'l') => {
                self.pos += 1;
                (17, false)
            }
            b'B' if self.peek() == Some(b'r') => {
                self.pos += 1;
                (35, false)
            }
            b'B' => (5, false),
            b'C' => (6, false),
            b'N' => (7, false),
            b'O' => (8, false),
            b'P' => (15, false),
            b'S' => (16, false),
            b'F' => (9, false),
            b'I' => (53, false),
            b'b' => (5, true),
            b'c' => (6, true),
            b'n' => (7, true),
            b'o' => (8, true),
            b'p' => (15, true),
            b's' => (16, true),
            other => {
                return Err(err(start, SmilesErrorKind::UnexpectedChar(other as char)));
            }
        };
        Ok(Atom {
            atomic_number: z,
            isotope: None,
            charge: 0,
            explicit_h: 0,
            implicit_h: 0, // filled in after all bonds are known
            aromatic,
            tetra_mark: TetraMark::None,
            bracket: false,
            input_index: self.atoms.len(),
        })
    }

    fn bracket_atom(&mut self, start: usize) -> Result<Atom, SmilesError> {
        let isotope = self.read_number();

        let sym_start = self.pos;
        let first = self
            .bump()
            .ok_or_else(|| err(start, SmilesErrorKind::UnclosedBracket))?;
        let (z, aromatic) = if first.is_ascii_uppercase() {
            let two = self
                .peek()
                .filter(u8::is_ascii_lowercase)
                .and_then(|second| {
                    let sym = &self.text[sym_start..sym_start + 2];
                    elements::atomic_number(sym).map(|z| (z, second))
                });
            match two {
                Some((z, _)) => {
                    self.pos += 1;
                    (z, false)
                }
                None => {
                    let sym = &self.text[sym_start..sym_start + 1];
                    let z = elements::atomic_number(sym).ok_or_else(|| {
                        err(sym_start, SmilesErrorKind::UnknownElement(sym.to_string()))
                    })?;
                    (z, false)
                }
            }
        } else if first.is_ascii_lowercase() {
            let z = match first {
                b'b' => 5,
                b'c' => 6,
                b'n' => 7,
                b'o' => 8,
                b'p' => 15,
                b's' => 16,
                other => {
                    return Err(err(
                        sym_start,
                        SmilesErrorKind::UnknownElement((other as char).to_string()),
                    ))
                }
            };
            (z, true)
        } else {
            return Err(err(sym_start, SmilesErrorKind::UnexpectedChar(first as char)));
        };

        let mut mark = TetraMark::None;
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                mark = TetraMark::Clockwise;
            } else {
                mark = TetraMark::AntiClockwise;
            }
        }

        let mut explicit_h = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            explicit_h = self.read_number().unwrap_or(1).min(u16::from(u8::MAX)) as u8;
        }

        let mut charge = 0i8;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let unit: i8 = if sign == b'+' { 1 } else { -1 };
            if let Some(n) = self.read_number() {
                charge = unit.saturating_mul(n.min(15) as i8);
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge = charge.saturating_add(unit);
                }
            }
        }

        match self.bump() {
            Some(b']') => Ok(Atom {
                atomic_number: z,
                isotope,
                charge,
                explicit_h,
                implicit_h: 0,
                aromatic,
                tetra_mark: mark,
                bracket: true,
                input_index: self.atoms.len(),
            }),
            Some(other) => Err(err(
                self.pos - 1,
                SmilesErrorKind::UnexpectedChar(other as char),
            )),
            None => Err(err(start, SmilesErrorKind::UnclosedBracket)),
        }
    }

    fn read_number(&mut self) -> Option<u16> {
        let mut n: Option<u16> = None;
        while let Some(d) = self.peek().filter(u8::is_ascii_digit) {
            self.pos += 1;
            n = Some(n.unwrap_or(0).saturating_mul(10) + u16::from(d - b'0'));
        }
        n
    }

    fn bond_symbol(&mut self, c: u8, start: usize) -> Result<(), SmilesError> {
        if self.prev.is_none() {
            return Err(err(start, SmilesErrorKind::BondBeforeAtom));
        }
        if self.pending.is_some() {
            return Err(err(start, SmilesErrorKind::RepeatedBondSymbol));
        }
        let (order, direction) = match c {
            b'-' => (Some(BondOrder::Single), BondDirection::None),
            b'=' => (Some(BondOrder::Double), BondDirection::None),
            b'#' => (Some(BondOrder::Triple), BondDirection::None),
            b':' => (Some(BondOrder::Aromatic), BondDirection::None),
            b'/' => (Some(BondOrder::Single), BondDirection::Up),
            b'\\' => (Some(BondOrder::Single), BondDirection::Down),
            _ => unreachable!(),
        };
        self.pending = Some(PendingBond {
            order,
            direction,
            position: start,
        });
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, start: usize) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        self.atom_pos.push(start);
        self.adjacency.push(Vec::new());

        if let Some(prev) = self.prev {
            let pending = self.pending.take();
            let order = pending.and_then(|p| p.order).unwrap_or_else(|| {
                if self.atoms[prev].aromatic && self.atoms[idx].aromatic {
                    BondOrder::Aromatic
                } else {
                    BondOrder::Single
                }
            });
            let direction = pending.map_or(BondDirection::None, |p| p.direction);
            self.push_bond(prev, idx, order, direction, start)?;
        } else if let Some(p) = self.pending.take() {
            return Err(err(p.position, SmilesErrorKind::BondBeforeAtom));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn push_bond(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        direction: BondDirection,
        position: usize,
    ) -> Result<(), SmilesError> {
        if self.adjacency[a].iter().any(|&(n, _)| n == b) {
            return Err(err(position, SmilesErrorKind::DuplicateBond));
        }
        let bi = self.bonds.len();
        self.bonds.push(Bond {
            a,
            b,
            order,
            direction,
        });
        self.adjacency[a].push((b, bi));
        self.adjacency[b].push((a, bi));
        Ok(())
    }

    fn ring_digit(&mut self, digit: u16, start: usize) -> Result<(), SmilesError> {
        let Some(prev) = self.prev else {
            return Err(err(start, SmilesErrorKind::RingBeforeAtom));
        };
        let pending = self.pending.take();

        if let Some(open) = self.rings.remove(&digit) {
            if open.atom == prev {
                return Err(err(start, SmilesErrorKind::SelfRing(digit)));
            }
            // Merge the bond symbols written at the two ends. A direction
            // read at the closing end describes closing-atom -> opening-atom,
            // so it flips when stored on the (opening, closing) bond.
            let close_order = pending.and_then(|p| p.order);
            let open_order = open.bond.and_then(|p| p.order);
            let order = match (open_order, close_order) {
                (Some(x), Some(y)) if x != y => {
                    return Err(err(start, SmilesErrorKind::RingBondMismatch(digit)))
                }
                (Some(x), _) | (_, Some(x)) => x,
                (None, None) => {
                    if self.atoms[open.atom].aromatic && self.atoms[prev].aromatic {
                        BondOrder::Aromatic
                    } else {
                        BondOrder::Single
                    }
                }
            };
            let open_dir = open.bond.map_or(BondDirection::None, |p| p.direction);
            let close_dir = pending
                .map_or(BondDirection::None, |p| p.direction)
                .flipped();
            let direction = match (open_dir, close_dir) {
                (BondDirection::None, d) | (d, BondDirection::None) => d,
                (x, y) if x == y => x,
                _ => return Err(err(start, SmilesErrorKind::RingBondMismatch(digit))),
            };
            if self.adjacency[open.atom].iter().any(|&(n, _)| n == prev) {
                return Err(err(start, SmilesErrorKind::DuplicateBond));
            }
            let bi = self.bonds.len();
            self.bonds.push(Bond {
                a: open.atom,
                b: prev,
                order,
                direction,
            });
            self.adjacency[prev].push((open.atom, bi));
            self.adjacency[open.atom][open.slot] = (prev, bi);
        } else {
            // Reserve the neighbor slot where the digit was written; it is
            // patched when the partner turns up.
            let slot = self.adjacency[prev].len();
            self.adjacency[prev].push((usize::MAX, usize::MAX));
            self.rings.insert(
                digit,
                RingOpen {
                    atom: prev,
                    slot,
                    bond: pending,
                    position: start,
                },
            );
        }
        Ok(())
    }

    fn finish(mut self) -> Result<(Molecule, ParseDiagnostics), SmilesError> {
        // Fill implicit hydrogens on bare atoms from the default valence,
        // counting aromatic bonds as 1.5 rounded up.
        for i in 0..self.atoms.len() {
            if self.atoms[i].bracket {
                continue;
            }
            let used: u16 = self.adjacency[i]
                .iter()
                .map(|&(_, bi)| self.bonds[bi].order.twice_valence())
                .sum();
            let used = (used + 1) / 2;
            let valence = elements::default_valence(self.atoms[i].atomic_number)
                .expect("organic-subset atoms have a default valence");
            self.atoms[i].implicit_h = u16::from(valence).saturating_sub(used) as u8;
        }

        let atom_pos = std::mem::take(&mut self.atom_pos);
        let mol = Molecule::from_raw(self.atoms, self.bonds, self.adjacency);

        check_direction_conflicts(&mol, &atom_pos)?;

        let mut diagnostics = ParseDiagnostics::default();
        for issue in crate::molgraph::check_valences(&mol) {
            diagnostics
                .warnings
                .push((atom_pos[issue.atom], issue.message));
        }
        Ok((mol, diagnostics))
    }
}

/// Rejects inputs where two substituents on the same double-bond end are
/// written on the same side, e.g. `F/C(\Cl)=C/Br` (both below the carbon).
fn check_direction_conflicts(mol: &Molecule, atom_pos: &[usize]) -> Result<(), SmilesError> {
    for bond in mol.bonds() {
        if bond.order != BondOrder::Double {
            continue;
        }
        for (end, other) in [(bond.a, bond.b), (bond.b, bond.a)] {
            let mut seen: Option<i8> = None;
            for &(n, bi) in mol.ordered_neighbors(end) {
                if n == other {
                    continue;
                }
                let sub = mol.bond(bi);
                if sub.order != BondOrder::Single || sub.direction == BondDirection::None {
                    continue;
                }
                let side = sub.side_seen_from(end);
                if seen == Some(side) {
                    return Err(err(atom_pos[end], SmilesErrorKind::DirectionConflict));
                }
                seen = Some(side);
            }
        }
    }
    Ok(())
}
