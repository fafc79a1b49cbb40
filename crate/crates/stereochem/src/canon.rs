//! Morgan-style canonical atom ranks and the canonical SMILES form.
//!
//! Heavy atoms start in classes given by the invariant tuple (atomic number
//! descending, charge, isotope, degree, total hydrogen count) and are refined
//! by iterated extended-connectivity: each round re-keys an atom by its class
//! plus the sorted `(bond, class)` multiset of its neighbors, until the class
//! count stabilizes. Residual ties fall back to the lowest input index, which
//! is safe because stereo marks are re-derived from permutation parity rather
//! than from rank values. Hydrogens rank directly after their heavy neighbor.

use crate::molgraph::{BondOrder, Molecule};
use crate::smiles;

/// Canonical rank per atom: a dense permutation of `0..atom_count`.
pub type CanonicalRanks = Vec<usize>;

fn bond_key(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

/// The tie-breaking invariant tuple; lower sorts first.
fn invariant_tuple(mol: &Molecule, i: usize) -> (i16, i16, u16, usize, u8) {
    let a = mol.atom(i);
    let heavy_degree = mol
        .ordered_neighbors(i)
        .iter()
        .filter(|&&(n, _)| !mol.atom(n).is_hydrogen())
        .count();
    (
        -(i16::from(a.atomic_number)),
        i16::from(a.charge),
        a.isotope.unwrap_or(0),
        heavy_degree,
        mol.total_h(i),
    )
}

/// Computes canonical ranks for every atom of `mol`.
pub fn morgan_ranks(mol: &Molecule) -> CanonicalRanks {
    let n = mol.atom_count();
    let heavy: Vec<usize> = (0..n).filter(|&i| !mol.atom(i).is_hydrogen()).collect();

    // Initial classes from the invariant tuple.
    let mut keyed: Vec<(usize, _)> = heavy
        .iter()
        .map(|&i| (i, invariant_tuple(mol, i)))
        .collect();
    keyed.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    let mut class = vec![0usize; n];
    let mut distinct = 0;
    for (k, (i, key)) in keyed.iter().enumerate() {
        if k > 0 && keyed[k - 1].1 != *key {
            distinct += 1;
        }
        class[*i] = distinct;
    }
    distinct += 1;

    // Extended-connectivity refinement until the class count stabilizes.
    loop {
        let mut rekeyed: Vec<(usize, (usize, Vec<(u8, usize)>))> = heavy
            .iter()
            .map(|&i| {
                let mut nbrs: Vec<(u8, usize)> = mol
                    .ordered_neighbors(i)
                    .iter()
                    .filter(|&&(m, _)| !mol.atom(m).is_hydrogen())
                    .map(|&(m, bi)| (bond_key(mol.bond(bi).order), class[m]))
                    .collect();
                nbrs.sort_unstable();
                (i, (class[i], nbrs))
            })
            .collect();
        rekeyed.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
        let mut next_class = vec![0usize; n];
        let mut next_distinct = 0;
        for (k, (i, key)) in rekeyed.iter().enumerate() {
            if k > 0 && rekeyed[k - 1].1 != *key {
                next_distinct += 1;
            }
            next_class[*i] = next_distinct;
        }
        next_distinct += 1;
        let stable = next_distinct <= distinct;
        class = next_class;
        distinct = next_distinct;
        if stable {
            break;
        }
    }

    // Order heavy atoms by (class, input index); hydrogens follow their
    // heavy neighbor, any stray hydrogens go last by input index.
    let mut heavy_sorted = heavy.clone();
    heavy_sorted.sort_by_key(|&i| (class[i], i));

    let mut ranks = vec![usize::MAX; n];
    let mut next = 0;
    for &i in &heavy_sorted {
        ranks[i] = next;
        next += 1;
        for &(h, _) in mol.ordered_neighbors(i) {
            if mol.atom(h).is_hydrogen() && ranks[h] == usize::MAX {
                ranks[h] = next;
                next += 1;
            }
        }
    }
    for i in 0..n {
        if ranks[i] == usize::MAX {
            ranks[i] = next;
            next += 1;
        }
    }
    ranks
}

/// The canonical SMILES of `mol`: its serialization under [`morgan_ranks`].
pub fn canonical_smiles(mol: &Molecule) -> String {
    smiles::write(mol, &morgan_ranks(mol)).expect("canonical ranks form a permutation")
}
