//! Element symbol table and the valence model used for implicit hydrogens.

/// Symbols indexed by atomic number (index 0 unused).
const SYMBOLS: [&str; 119] = [
    "?", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
    "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg",
    "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

pub fn symbol(atomic_number: u8) -> &'static str {
    SYMBOLS.get(atomic_number as usize).copied().unwrap_or("?")
}

/// Looks up an element symbol (case-sensitive, e.g. `"Cl"`, `"C"`).
pub fn atomic_number(sym: &str) -> Option<u8> {
    SYMBOLS[1..]
        .iter()
        .position(|&s| s == sym)
        .map(|i| (i + 1) as u8)
}

/// Elements writable without brackets: B, C, N, O, P, S, F, Cl, Br, I.
pub fn is_organic_subset(z: u8) -> bool {
    matches!(z, 5 | 6 | 7 | 8 | 15 | 16 | 9 | 17 | 35 | 53)
}

/// Default valence used to fill implicit hydrogens on bare (unbracketed)
/// atoms and to check written valences. One value per supported element.
pub fn default_valence(z: u8) -> Option<u8> {
    match z {
        5 => Some(3),            // B
        6 => Some(4),            // C
        7 => Some(3),            // N
        8 => Some(2),            // O
        15 => Some(3),           // P
        16 => Some(2),           // S
        9 | 17 | 35 | 53 => Some(1), // halogens
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_symbols() {
        for z in 1..=118u8 {
            assert_eq!(atomic_number(symbol(z)), Some(z));
        }
    }

    #[test]
    fn lookup_is_case_sensitive() {
        assert_eq!(atomic_number("Cl"), Some(17));
        assert_eq!(atomic_number("cl"), None);
        assert_eq!(atomic_number("Zz"), None);
    }

    #[test]
    fn organic_subset_members() {
        for sym in ["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"] {
            assert!(is_organic_subset(atomic_number(sym).unwrap()));
        }
        assert!(!is_organic_subset(atomic_number("Si").unwrap()));
        assert!(!is_organic_subset(1)); // hydrogen needs brackets
    }
}
