//! SMILES serialization under an arbitrary atom ordering.
//!
//! The writer walks the graph depth-first from the lowest-ranked atom,
//! taking neighbors in ascending rank order, and re-expresses every
//! tetrahedral mark for the new written order: the mark flips exactly when
//! the permutation from the old neighbor slots to the new ones is odd, so
//! the parity the parser will recover stays the same. Directional single
//! bonds are re-emitted with the symbol flipped whenever the bond's textual
//! orientation reverses.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cip::permutation_parity;
use crate::molgraph::{Atom, BondDirection, BondOrder, Molecule, TetraMark};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WriteError {
    #[error("ranks must be a permutation of 0..{expected}")]
    NotAPermutation { expected: usize },
    #[error("molecule is disconnected; every atom must be reachable")]
    Disconnected,
    #[error("more than 99 ring bonds open at once")]
    TooManyOpenRings,
}

/// Stands in for the implicit hydrogen when comparing neighbor slot lists.
const IMPLICIT_H: usize = usize::MAX;

/// Serializes `mol` visiting atoms in ascending `ranks` order.
pub fn write(mol: &Molecule, ranks: &[usize]) -> Result<String, WriteError> {
    write_mapped(mol, ranks).map(|(text, _)| text)
}

/// Like [`write`], also returning `map` where `map[i]` is the position the
/// atom `i` takes in the output text (its index after a re-parse).
pub fn write_mapped(mol: &Molecule, ranks: &[usize]) -> Result<(String, Vec<usize>), WriteError> {
    let n = mol.atom_count();
    if !is_permutation(ranks, n) {
        return Err(WriteError::NotAPermutation { expected: n });
    }
    if n == 0 {
        return Ok((String::new(), Vec::new()));
    }

    let tree = SpanningTree::grow(mol, ranks)?;
    let digit_of = assign_ring_digits(mol, &tree)?;
    let flip = direction_gauge_flips(mol, &tree);

    let mut out = String::new();
    // Frame: (atom, next child cursor, whether a ')' closes this branch).
    let mut stack: Vec<(usize, usize, bool)> = Vec::new();
    emit_atom(mol, &tree, &digit_of, &flip, tree.root, &mut out);
    stack.push((tree.root, 0, false));
    while let Some(&mut (x, ref mut cursor, closes)) = stack.last_mut() {
        if *cursor == tree.children[x].len() {
            if closes {
                out.push(')');
            }
            stack.pop();
            continue;
        }
        let child = tree.children[x][*cursor];
        let last = *cursor + 1 == tree.children[x].len();
        *cursor += 1;
        if !last {
            out.push('(');
        }
        let bi = tree.parent_bond[child].unwrap();
        out.push_str(&bond_token(mol, bi, x, flip[bi]));
        emit_atom(mol, &tree, &digit_of, &flip, child, &mut out);
        stack.push((child, 0, !last));
    }
    Ok((out, tree.position))
}

/// Serializes `mol` under a seeded random atom ordering. Deterministic per
/// seed. Panics if the molecule is disconnected.
pub fn rewrite_random(mol: &Molecule, seed: u64) -> String {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<usize> = (0..mol.atom_count()).collect();
    ranks.shuffle(&mut rng);
    write(mol, &ranks).expect("connected molecule")
}

fn is_permutation(ranks: &[usize], n: usize) -> bool {
    if ranks.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &r in ranks {
        if r >= n || seen[r] {
            return false;
        }
        seen[r] = true;
    }
    true
}

struct SpanningTree {
    root: usize,
    /// Output position of each atom (also its index after a re-parse).
    position: Vec<usize>,
    parent: Vec<Option<usize>>,
    parent_bond: Vec<Option<usize>>,
    /// Tree children in emission order (ascending rank).
    children: Vec<Vec<usize>>,
    /// Ring-closure bond indices opening at / closing at each atom, in
    /// discovery order.
    opens_at: Vec<Vec<usize>>,
    closes_at: Vec<Vec<usize>>,
}

impl SpanningTree {
    fn grow(mol: &Molecule, ranks: &[usize]) -> Result<SpanningTree, WriteError> {
        let n = mol.atom_count();
        let sorted_nbrs: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|i| {
                let mut nbrs = mol.ordered_neighbors(i).to_vec();
                nbrs.sort_by_key(|&(m, _)| ranks[m]);
                nbrs
            })
            .collect();
        let root = ranks.iter().position(|&r| r == 0).expect("dense ranks");

        let mut tree = SpanningTree {
            root,
            position: vec![usize::MAX; n],
            parent: vec![None; n],
            parent_bond: vec![None; n],
            children: vec![Vec::new(); n],
            opens_at: vec![Vec::new(); n],
            closes_at: vec![Vec::new(); n],
        };
        let mut used_bond = vec![false; mol.bonds().len()];
        let mut counter = 0;
        tree.position[root] = counter;
        counter += 1;

        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (x, ref mut cursor)) = stack.last_mut() {
            if *cursor == sorted_nbrs[x].len() {
                stack.pop();
                continue;
            }
            let (m, bi) = sorted_nbrs[x][*cursor];
            *cursor += 1;
            if used_bond[bi] {
                continue;
            }
            used_bond[bi] = true;
            if tree.position[m] == usize::MAX {
                tree.parent[m] = Some(x);
                tree.parent_bond[m] = Some(bi);
                tree.children[x].push(m);
                tree.position[m] = counter;
                counter += 1;
                stack.push((m, 0));
            } else {
                // In an undirected depth-first walk every non-tree edge
                // reaches an ancestor, so `m` was written earlier.
                tree.opens_at[m].push(bi);
                tree.closes_at[x].push(bi);
            }
        }
        if counter != n {
            return Err(WriteError::Disconnected);
        }
        Ok(tree)
    }
}

/// Assigns the smallest free digit to each ring bond; digits free up for
/// reuse once their closing atom has been written.
fn assign_ring_digits(mol: &Molecule, tree: &SpanningTree) -> Result<Vec<u16>, WriteError> {
    let mut digit_of = vec![0u16; mol.bonds().len()];
    let mut free: BinaryHeap<Reverse<u16>> = (1..=99).map(Reverse).collect();
    let mut atoms_by_position: Vec<usize> = (0..mol.atom_count()).collect();
    atoms_by_position.sort_by_key(|&i| tree.position[i]);
    for &x in &atoms_by_position {
        for &bi in &tree.opens_at[x] {
            let Reverse(d) = free.pop().ok_or(WriteError::TooManyOpenRings)?;
            digit_of[bi] = d;
        }
        for &bi in &tree.closes_at[x] {
            free.push(Reverse(digit_of[bi]));
        }
    }
    Ok(digit_of)
}

/// Direction symbols come in equivalent spellings: flipping every mark
/// around a double bond (its coupled component) leaves the geometry alone.
/// Normalize so the earliest-emitted directional bond of each component
/// shows `/`; returns the per-bond flip decisions.
fn direction_gauge_flips(mol: &Molecule, tree: &SpanningTree) -> Vec<bool> {
    let nb = mol.bonds().len();
    let mut parent: Vec<usize> = (0..nb).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let directional = |bi: usize| {
        let b = mol.bond(bi);
        b.order == BondOrder::Single && b.direction != BondDirection::None
    };
    for (di, d) in mol.bonds().iter().enumerate() {
        if d.order != BondOrder::Double {
            continue;
        }
        let mut first: Option<usize> = None;
        for end in [d.a, d.b] {
            for &(_, bi) in mol.ordered_neighbors(end) {
                if bi == di || !directional(bi) {
                    continue;
                }
                match first {
                    None => first = Some(bi),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, bi));
                        parent[ra] = rb;
                    }
                }
            }
        }
    }

    // Where each directional bond's symbol appears in the output: tree
    // bonds just before the child, ring bonds at the opening atom.
    let emission = |bi: usize| -> (usize, u8, usize) {
        for (x, &pb) in tree.parent_bond.iter().enumerate() {
            if pb == Some(bi) {
                return (tree.position[x], 1, 0);
            }
        }
        for (x, opens) in tree.opens_at.iter().enumerate() {
            if let Some(k) = opens.iter().position(|&o| o == bi) {
                return (tree.position[x], 0, k);
            }
        }
        unreachable!("bond {bi} is neither a tree nor a ring bond")
    };
    let textual = |bi: usize| -> BondDirection {
        let bond = mol.bond(bi);
        let from = match tree.parent_bond.iter().position(|&pb| pb == Some(bi)) {
            Some(child) => tree.parent[child].unwrap(),
            None => {
                if tree.position[bond.a] < tree.position[bond.b] {
                    bond.a
                } else {
                    bond.b
                }
            }
        };
        if bond.a == from {
            bond.direction
        } else {
            bond.direction.flipped()
        }
    };

    let mut lead: Vec<Option<(usize, (usize, u8, usize))>> = vec![None; nb];
    for bi in 0..nb {
        if !directional(bi) {
            continue;
        }
        let root = find(&mut parent, bi);
        let key = emission(bi);
        if lead[root].map_or(true, |(_, best)| key < best) {
            lead[root] = Some((bi, key));
        }
    }
    let mut flip = vec![false; nb];
    for bi in 0..nb {
        if !directional(bi) {
            continue;
        }
        let root = find(&mut parent, bi);
        if let Some((leader, _)) = lead[root] {
            flip[bi] = textual(leader) == BondDirection::Down;
        }
    }
    flip
}

fn emit_atom(
    mol: &Molecule,
    tree: &SpanningTree,
    digit_of: &[u16],
    flip: &[bool],
    x: usize,
    out: &mut String,
) {
    let atom = mol.atom(x);
    let mark = re_expressed_mark(mol, tree, digit_of, x);
    out.push_str(&atom_token(atom, mark));

    let mut closes: Vec<usize> = tree.closes_at[x].clone();
    closes.sort_by_key(|&bi| digit_of[bi]);
    for bi in closes {
        push_digit(out, digit_of[bi]);
    }
    for &bi in &tree.opens_at[x] {
        out.push_str(&bond_token(mol, bi, x, flip[bi]));
        push_digit(out, digit_of[bi]);
    }
}

fn push_digit(out: &mut String, d: u16) {
    if d < 10 {
        out.push_str(&d.to_string());
    } else {
        out.push('%');
        out.push_str(&format!("{d:02}"));
    }
}

/// The token written before the far end of `bond` when the near end is
/// `from`: nothing for plain single/aromatic bonds in matching contexts,
/// `-` for a single bond between two aromatic atoms, `:` for an aromatic
/// bond written between non-aromatic symbols, and a direction symbol
/// re-oriented to the new textual order (then gauge-flipped when asked).
fn bond_token(mol: &Molecule, bi: usize, from: usize, flip: bool) -> String {
    let bond = mol.bond(bi);
    let both_aromatic = mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic;
    match bond.order {
        BondOrder::Double => "=".to_string(),
        BondOrder::Triple => "#".to_string(),
        BondOrder::Aromatic => if both_aromatic { "" } else { ":" }.to_string(),
        BondOrder::Single => {
            let mut dir = if bond.a == from {
                bond.direction
            } else {
                bond.direction.flipped()
            };
            if flip {
                dir = dir.flipped();
            }
            match dir {
                BondDirection::Up => "/".to_string(),
                BondDirection::Down => "\\".to_string(),
                BondDirection::None => if both_aromatic { "-" } else { "" }.to_string(),
            }
        }
    }
}

/// The tetrahedral mark to write for atom `x` in the new neighbor order:
/// unchanged when the slot permutation is even, flipped when odd.
fn re_expressed_mark(
    mol: &Molecule,
    tree: &SpanningTree,
    digit_of: &[u16],
    x: usize,
) -> TetraMark {
    let atom = mol.atom(x);
    if atom.tetra_mark == TetraMark::None {
        return TetraMark::None;
    }

    let mut old_slots: Vec<usize> = mol.ordered_neighbors(x).iter().map(|&(m, _)| m).collect();
    if atom.explicit_h > 0 {
        let h_slot = if x == 0 { 0 } else { 1 };
        old_slots.insert(h_slot.min(old_slots.len()), IMPLICIT_H);
    }

    let mut new_slots: Vec<usize> = Vec::with_capacity(4);
    if let Some(p) = tree.parent[x] {
        new_slots.push(p);
    }
    if atom.explicit_h > 0 {
        new_slots.push(IMPLICIT_H);
    }
    let mut closes: Vec<usize> = tree.closes_at[x].clone();
    closes.sort_by_key(|&bi| digit_of[bi]);
    for bi in closes {
        new_slots.push(mol.bond(bi).other(x));
    }
    for &bi in &tree.opens_at[x] {
        new_slots.push(mol.bond(bi).other(x));
    }
    new_slots.extend(tree.children[x].iter().copied());

    if old_slots.len() != 4 || new_slots.len() != 4 {
        return atom.tetra_mark;
    }
    let perm: Option<Vec<usize>> = new_slots
        .iter()
        .map(|s| old_slots.iter().position(|o| o == s))
        .collect();
    let Some(perm) = perm else {
        return atom.tetra_mark;
    };
    match permutation_parity(&perm) {
        Ok(1) => atom.tetra_mark,
        Ok(_) => atom.tetra_mark.flipped(),
        Err(_) => atom.tetra_mark,
    }
}

fn atom_token(atom: &Atom, mark: TetraMark) -> String {
    let symbol = if atom.aromatic {
        atom.symbol().to_ascii_lowercase()
    } else {
        atom.symbol().to_string()
    };
    if !atom.bracket {
        return symbol;
    }
    let mut t = String::from("[");
    if let Some(iso) = atom.isotope {
        t.push_str(&iso.to_string());
    }
    t.push_str(&symbol);
    match mark {
        TetraMark::None => {}
        TetraMark::AntiClockwise => t.push('@'),
        TetraMark::Clockwise => t.push_str("@@"),
    }
    match atom.explicit_h {
        0 => {}
        1 => t.push('H'),
        h => t.push_str(&format!("H{h}")),
    }
    match atom.charge {
        0 => {}
        1 => t.push('+'),
        -1 => t.push('-'),
        c if c > 0 => t.push_str(&format!("+{c}")),
        c => t.push_str(&c.to_string()),
    }
    t.push(']');
    t
}
