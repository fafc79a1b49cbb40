//! CIP-style branch priorities and permutation parity.
//!
//! Substituent branches are compared by flat per-level profiles: level `k`
//! holds the atoms at distance `k + 1` from the origin atom, sorted by
//! descending atomic number (and mass, when isotope comparison is enabled).
//! Multiple bonds are not duplicated into phantom atoms; a carboxyl branch
//! reads `[[6], [8, 8], [1]]`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::molgraph::Molecule;

#[derive(Debug, Clone, Copy, Default)]
pub struct CipOptions {
    /// Compare isotope masses after atomic numbers (off by default; plain
    /// atoms count as mass 0, so `[2H]` outranks `H` only when enabled).
    pub use_isotopes: bool,
}

/// The per-level profile of one substituent branch.
///
/// Ordering is lexicographic across levels and entries, so a branch that
/// runs out while the other continues compares lower.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BranchProfile {
    /// Levels of `(atomic number, mass)` entries, each sorted descending.
    pub levels: Vec<Vec<(u8, u16)>>,
}

impl fmt::Display for BranchProfile {
    /// Prints atomic numbers only, e.g. `[[6], [8, 8], [1]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, (z, _)) in level.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{z}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Walks the branch entered through `first`, breadth-first, never re-entering
/// `origin` and never revisiting an atom.
///
/// # Panics
///
/// Panics when `first` is not a neighbor of `origin`.
pub fn branch_profile(
    mol: &Molecule,
    origin: usize,
    first: usize,
    opts: CipOptions,
) -> BranchProfile {
    assert!(
        mol.ordered_neighbors(origin).iter().any(|&(n, _)| n == first),
        "atom {first} is not a neighbor of atom {origin}"
    );
    let entry = |atom: usize| -> (u8, u16) {
        let a = mol.atom(atom);
        let mass = if opts.use_isotopes {
            a.isotope.unwrap_or(0)
        } else {
            0
        };
        (a.atomic_number, mass)
    };

    let mut visited = vec![false; mol.atom_count()];
    visited[origin] = true;
    visited[first] = true;
    let mut frontier = vec![first];
    let mut levels = vec![vec![entry(first)]];

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &atom in &frontier {
            for &(n, _) in mol.ordered_neighbors(atom) {
                if !visited[n] {
                    visited[n] = true;
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        let mut level: Vec<(u8, u16)> = next.iter().map(|&n| entry(n)).collect();
        level.sort_unstable_by(|x, y| y.cmp(x));
        levels.push(level);
        frontier = next;
    }

    BranchProfile { levels }
}

/// Lexicographic comparison: atomic number first, then mass (which is zero
/// everywhere unless the profiles were built with isotopes enabled).
pub fn compare_profiles(a: &BranchProfile, b: &BranchProfile) -> Ordering {
    a.levels.cmp(&b.levels)
}

/// The CIP priority ranking of a set of branch profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    /// `perm[i]` is the input slot holding the `i`-th highest priority.
    pub perm: Vec<usize>,
    /// True when two branches tied, leaving the ranking unusable.
    pub ambiguous: bool,
}

/// Ranks branch profiles from highest to lowest priority.
pub fn priority_order(profiles: &[BranchProfile]) -> PriorityOrder {
    let mut perm: Vec<usize> = (0..profiles.len()).collect();
    perm.sort_by(|&x, &y| compare_profiles(&profiles[y], &profiles[x]));
    let ambiguous = perm
        .windows(2)
        .any(|w| profiles[w[0]] == profiles[w[1]]);
    PriorityOrder { perm, ambiguous }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0:?} is not a permutation of 0..{}", .0.len())]
pub struct NotAPermutation(pub Vec<usize>);

/// Parity of a permutation via its disjoint cycles: odd exactly when the
/// factorization contains an odd number of even-length cycles. Returns +1
/// for even permutations, -1 for odd ones.
pub fn permutation_parity(perm: &[usize]) -> Result<i8, NotAPermutation> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(NotAPermutation(perm.to_vec()));
        }
        seen[v] = true;
    }

    let mut visited = vec![false; n];
    let mut even_cycles = 0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !visited[at] {
            visited[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            even_cycles += 1;
        }
    }
    Ok(if even_cycles % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles;

    fn profiles_of(s: &str, center: usize, opts: CipOptions) -> Vec<BranchProfile> {
        let m = smiles::parse(s).expect(s).0.materialize_hydrogens();
        m.ordered_neighbors(center)
            .iter()
            .map(|&(n, _)| branch_profile(&m, center, n, opts))
            .collect()
    }

    /// Independent parity oracle: count inversions.
    fn inversion_parity(perm: &[usize]) -> i8 {
        let mut inversions = 0;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn cysteine_profiles_match_worked_values() {
        let profiles = profiles_of("N[C@H](C(=O)O)CS", 1, CipOptions::default());
        let shown: Vec<String> = profiles.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            shown,
            vec![
                "[[7], [1, 1]]",
                "[[1]]",
                "[[6], [8, 8], [1]]",
                "[[6], [16, 1, 1], [1]]",
            ]
        );
    }

    #[test]
    fn cysteine_priority_permutation() {
        let profiles = profiles_of("N[C@H](C(=O)O)CS", 1, CipOptions::default());
        let order = priority_order(&profiles);
        assert_eq!(order.perm, vec![0, 3, 2, 1]);
        assert!(!order.ambiguous);
    }

    #[test]
    fn bromo_amino_ethanol_priority_permutation() {
        let profiles = profiles_of("C[C@@](Br)(O)N", 1, CipOptions::default());
        let order = priority_order(&profiles);
        assert_eq!(order.perm, vec![1, 2, 3, 0]);
        assert!(!order.ambiguous);
    }

    #[test]
    fn comparison_cases() {
        let profiles = profiles_of("N[C@H](C(=O)O)CS", 1, CipOptions::default());
        let (n, h, carboxyl, thiol) = (&profiles[0], &profiles[1], &profiles[2], &profiles[3]);
        assert_eq!(compare_profiles(n, carboxyl), Ordering::Greater);
        assert_eq!(compare_profiles(thiol, carboxyl), Ordering::Greater);
        assert_eq!(compare_profiles(h, carboxyl), Ordering::Less);
        assert_eq!(compare_profiles(n, n), Ordering::Equal);

        // A branch that ends while the other continues compares lower.
        let long = BranchProfile {
            levels: vec![vec![(7, 0)], vec![(1, 0)]],
        };
        let short = BranchProfile {
            levels: vec![vec![(7, 0)]],
        };
        assert_eq!(compare_profiles(&short, &long), Ordering::Less);

        // Within a level the same rule applies entry-wise.
        let pair = BranchProfile {
            levels: vec![vec![(6, 0)], vec![(8, 0), (8, 0)]],
        };
        let single = BranchProfile {
            levels: vec![vec![(6, 0)], vec![(8, 0)]],
        };
        assert_eq!(compare_profiles(&single, &pair), Ordering::Less);
    }

    #[test]
    fn comparison_is_antisymmetric() {
        let profiles = profiles_of("N[C@H](C(=O)O)CS", 1, CipOptions::default());
        for a in &profiles {
            for b in &profiles {
                assert_eq!(compare_profiles(a, b), compare_profiles(b, a).reverse());
            }
        }
    }

    #[test]
    fn ties_are_flagged_ambiguous() {
        let profiles = profiles_of("C[C@@](C)(O)N", 1, CipOptions::default());
        assert!(priority_order(&profiles).ambiguous);
    }

    #[test]
    fn deuterium_outranks_hydrogen_only_with_isotopes_enabled() {
        let with = profiles_of("[C@H]([2H])(O)N", 0, CipOptions { use_isotopes: true });
        // Slots: materialized H, then the written deuterium, O, N.
        assert_eq!(compare_profiles(&with[1], &with[0]), Ordering::Greater);
        assert!(!priority_order(&with).ambiguous);

        let without = profiles_of("[C@H]([2H])(O)N", 0, CipOptions::default());
        assert_eq!(compare_profiles(&without[1], &without[0]), Ordering::Equal);
        assert!(priority_order(&without).ambiguous);
    }

    #[test]
    fn ring_branches_profile_both_ways_around() {
        let m = smiles::parse("C1CCO1").unwrap().0.materialize_hydrogens();
        let via_c = branch_profile(&m, 0, 1, CipOptions::default());
        let via_o = branch_profile(&m, 0, 3, CipOptions::default());
        assert_eq!(via_c.to_string(), "[[6], [6, 1, 1], [8, 1, 1]]");
        assert_eq!(via_o.to_string(), "[[8], [6], [6, 1, 1], [1, 1]]");
    }

    #[test]
    fn parity_worked_values() {
        assert_eq!(permutation_parity(&[0, 3, 2, 1]).unwrap(), -1);
        assert_eq!(permutation_parity(&[1, 2, 3, 0]).unwrap(), -1);
        assert_eq!(permutation_parity(&[0, 1, 2, 3]).unwrap(), 1);
        assert_eq!(permutation_parity(&[1, 0, 3, 2]).unwrap(), 1);
        assert_eq!(permutation_parity(&[]).unwrap(), 1);
        assert_eq!(permutation_parity(&[0]).unwrap(), 1);
    }

    #[test]
    fn parity_rejects_non_permutations() {
        assert!(permutation_parity(&[0, 0, 1, 2]).is_err());
        assert!(permutation_parity(&[5, 1, 2, 3]).is_err());
    }

    #[test]
    fn parity_matches_inversion_oracle_for_all_length_four_permutations() {
        let mut perm = [0usize, 1, 2, 3];
        let mut checked = 0;
        permute_all(&mut perm, 0, &mut |p| {
            assert_eq!(permutation_parity(p).unwrap(), inversion_parity(p), "{p:?}");
            checked += 1;
        });
        assert_eq!(checked, 24);
    }

    fn permute_all(perm: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute_all(perm, k + 1, f);
            perm.swap(k, i);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_perm(max: usize) -> impl Strategy<Value = Vec<usize>> {
            (1..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        }

        fn arb_profile() -> impl Strategy<Value = BranchProfile> {
            proptest::collection::vec(
                proptest::collection::vec((1u8..=20, 0u16..3), 1..4),
                1..4,
            )
            .prop_map(|mut levels| {
                for level in &mut levels {
                    level.sort_unstable_by(|x, y| y.cmp(x));
                }
                BranchProfile { levels }
            })
        }

        proptest! {
            #[test]
            fn cycle_parity_equals_inversion_parity(perm in arb_perm(8)) {
                prop_assert_eq!(
                    permutation_parity(&perm).unwrap(),
                    inversion_parity(&perm)
                );
            }

            #[test]
            fn profile_comparison_is_transitive(
                a in arb_profile(),
                b in arb_profile(),
                c in arb_profile()
            ) {
                if compare_profiles(&a, &b) != Ordering::Less
                    && compare_profiles(&b, &c) != Ordering::Less
                {
                    prop_assert_ne!(compare_profiles(&a, &c), Ordering::Less);
                }
            }

            #[test]
            fn priority_order_is_slot_stable(profiles in proptest::collection::vec(arb_profile(), 2..6)) {
                let order = priority_order(&profiles);
                prop_assert!(permutation_parity(&order.perm).is_ok());
                for w in order.perm.windows(2) {
                    prop_assert_ne!(
                        compare_profiles(&profiles[w[0]], &profiles[w[1]]),
                        Ordering::Less
                    );
                }
            }
        }
    }
}
