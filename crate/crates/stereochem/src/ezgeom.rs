//! E/Z classification of stereogenic double bonds from 2D geometry.
//!
//! Every candidate bond is judged in a planar frame: either an internal
//! layout built from the `/` and `\` marks (the two carbons on a horizontal
//! unit bond, substituents at ±120°) or externally supplied coordinates.
//! The frame is rotated so the double bond leaves the skewed region — by the
//! negated magnitude of the slope angle, or not at all for vertical bonds,
//! where the comparison switches to the x axis — and each end contributes
//! the side of its high-priority substituent relative to its other
//! substituent (an implicit hydrogen counts as the mirror position across
//! the bond line). The product of the two sides is +1 for Z, -1 for E. The
//! classification runs on the molecule as parsed; hydrogens may stay
//! implicit.

use thiserror::Error;

use crate::cip::{self, BranchProfile, CipOptions};
use crate::molgraph::{BondOrder, Molecule};

const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EzLabel {
    E,
    Z,
}

impl std::fmt::Display for EzLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EzLabel::E => "E",
            EzLabel::Z => "Z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSource {
    /// Positions synthesized from the `/` and `\` bond marks.
    InternalLayout,
    /// Positions taken from coordinates attached to the molecule.
    ExternalCoords,
}

/// Slope of the double bond in the working frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Value(f64),
    /// The bond runs within `1e-9` of vertically; sides compare x instead.
    Vertical,
}

/// The numeric steps behind one assignment, for inspection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryTrace {
    pub source: FrameSource,
    pub slope: Slope,
    /// Rotation applied to the frame, in radians (0 for vertical bonds).
    pub theta: f64,
    /// Rotated offset of each real substituent: its y, or its x when the
    /// bond is vertical. Keyed by input atom index.
    pub offsets: Vec<(usize, f64)>,
}

impl GeometryTrace {
    pub fn offset_of(&self, input_atom: usize) -> Option<f64> {
        self.offsets
            .iter()
            .find(|&&(i, _)| i == input_atom)
            .map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleBondAssignment {
    /// Canonical ids of the two carbons, lower id first.
    pub atoms: (usize, usize),
    /// Input indices of the two carbons, aligned with `atoms`.
    pub input_atoms: (usize, usize),
    /// Side sign contributed by each end, aligned with `atoms`.
    pub sides: (i8, i8),
    /// Product of the two sides: +1 for Z, -1 for E.
    pub value: i8,
    pub label: EzLabel,
    pub trace: GeometryTrace,
}

/// Double bonds partitioned by bond index: classifiable now versus
/// stereogenic but lacking usable geometry.
#[derive(Debug, Clone, Default)]
pub struct EzScan {
    pub resolvable: Vec<usize>,
    pub unresolvable: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct EzReport {
    /// Ordered by canonical id pair.
    pub assignments: Vec<DoubleBondAssignment>,
    /// Canonical id pairs of stereogenic bonds without geometry.
    pub unresolvable: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EzError {
    #[error("bond {0} is not a classifiable double bond")]
    NotACandidate(usize),
    #[error("substituents on atom {atom} are marked on the same side")]
    ConflictingDirections { atom: usize },
    #[error("double bond atoms {a}-{b} has no usable geometry")]
    MissingGeometry { a: usize, b: usize },
    #[error("substituent positions at atom {atom} coincide after rotation")]
    DegenerateGeometry { atom: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EzOptions {
    pub cip: CipOptions,
    /// Extra anticlockwise rotation of the frame, in degrees. Labels must
    /// not depend on it; it exists to exercise the angle handling.
    pub rotation_deg: f64,
}

/// One end of a candidate double bond: the carbon, its real substituents
/// (1 or 2), and which of the two slots holds the higher CIP priority.
struct BondEnd {
    carbon: usize,
    subs: Vec<usize>,
    /// Index into `subs` of the high-priority substituent, or `None` when
    /// the implied hydrogen outranks it (unreachable for real elements but
    /// kept total).
    high: Option<usize>,
}

fn implied_h_profile() -> BranchProfile {
    BranchProfile {
        levels: vec![vec![(1, 0)]],
    }
}

/// Collects the candidate structure of `bond_index`, or explains why the
/// bond is not a candidate. `Ok(None)` means "not stereogenic" (tied or
/// hydrogen-only ends) — structurally fine, nothing to classify.
fn candidate_ends(
    mol: &Molecule,
    bond_index: usize,
    opts: CipOptions,
) -> Result<Option<(BondEnd, BondEnd)>, EzError> {
    let bond = mol.bond(bond_index);
    if bond.order != BondOrder::Double {
        return Err(EzError::NotACandidate(bond_index));
    }
    let (a, b) = (bond.a, bond.b);
    for end in [a, b] {
        let atom = mol.atom(end);
        if atom.atomic_number != 6 || atom.aromatic {
            return Err(EzError::NotACandidate(bond_index));
        }
    }
    let mut ends = Vec::with_capacity(2);
    for (end, partner) in [(a, b), (b, a)] {
        let subs: Vec<usize> = mol
            .ordered_neighbors(end)
            .iter()
            .map(|&(n, _)| n)
            .filter(|&n| n != partner)
            .collect();
        if subs.is_empty() || subs.len() > 2 {
            return Err(EzError::NotACandidate(bond_index));
        }
        if subs.len() == 1 && mol.total_h(end) == 0 {
            // One substituent and no hydrogen to imply: a carbene-like end
            // we cannot orient.
            return Err(EzError::NotACandidate(bond_index));
        }
        let profiles: Vec<BranchProfile> = subs
            .iter()
            .map(|&s| cip::branch_profile(mol, end, s, opts))
            .collect();
        let high = if subs.len() == 2 {
            match cip::compare_profiles(&profiles[0], &profiles[1]) {
                std::cmp::Ordering::Greater => Some(0),
                std::cmp::Ordering::Less => Some(1),
                std::cmp::Ordering::Equal => return Ok(None),
            }
        } else {
            match cip::compare_profiles(&profiles[0], &implied_h_profile()) {
                std::cmp::Ordering::Greater => Some(0),
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => return Ok(None),
            }
        };
        ends.push(BondEnd {
            carbon: end,
            subs,
            high,
        });
    }
    let second = ends.pop().expect("two ends");
    let first = ends.pop().expect("two ends");
    Ok(Some((first, second)))
}

/// A working frame: positions for the two carbons, each real substituent,
/// and the implied-hydrogen slot of single-substituent ends.
struct Frame {
    source: FrameSource,
    carbon_a: (f64, f64),
    carbon_b: (f64, f64),
    /// Per end: `(position of subs[i])` aligned with `BondEnd::subs`, plus
    /// the implied position when there is only one substituent.
    subs: [Vec<(f64, f64)>; 2],
    implied: [Option<(f64, f64)>; 2],
}

/// Reflects `p` across the line through `a` and `b`.
fn reflect_across(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 < EPSILON * EPSILON {
        return p;
    }
    let t = ((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2;
    let foot = (a.0 + t * dx, a.1 + t * dy);
    (2.0 * foot.0 - p.0, 2.0 * foot.1 - p.1)
}

fn external_frame(mol: &Molecule, ends: &(BondEnd, BondEnd)) -> Option<Frame> {
    let ca = mol.coord(ends.0.carbon)?;
    let cb = mol.coord(ends.1.carbon)?;
    let mut subs: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let mut implied = [None, None];
    for (k, end) in [&ends.0, &ends.1].into_iter().enumerate() {
        for &s in &end.subs {
            subs[k].push(mol.coord(s)?);
        }
        if end.subs.len() == 1 {
            implied[k] = Some(reflect_across(subs[k][0], ca, cb));
        }
    }
    Some(Frame {
        source: FrameSource::ExternalCoords,
        carbon_a: ca,
        carbon_b: cb,
        subs,
        implied,
    })
}

fn internal_frame(mol: &Molecule, ends: &(BondEnd, BondEnd)) -> Result<Option<Frame>, EzError> {
    let mut subs: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let mut implied = [None, None];
    for (k, end) in [&ends.0, &ends.1].into_iter().enumerate() {
        let x = if k == 0 { -0.5 } else { 1.5 };
        let mut sides: Vec<i8> = Vec::new();
        for &s in &end.subs {
            let bond = mol
                .bond_between(end.carbon, s)
                .expect("substituent is adjacent");
            sides.push(bond.side_seen_from(end.carbon));
        }
        match sides.iter().filter(|&&s| s != 0).count() {
            0 => return Ok(None),
            2 if sides[0] == sides[1] => {
                return Err(EzError::ConflictingDirections { atom: end.carbon })
            }
            _ => {}
        }
        // Place directed substituents by their mark; an undirected sibling
        // takes the remaining slot.
        let known = sides.iter().find(|&&s| s != 0).copied().unwrap();
        for (i, &side) in sides.iter().enumerate() {
            let side = if side != 0 {
                side
            } else if i == 0 {
                -sides[1]
            } else {
                -sides[0]
            };
            debug_assert!(side != 0);
            subs[k].push((x, f64::from(side) * 0.866));
        }
        if end.subs.len() == 1 {
            implied[k] = Some((x, f64::from(-known) * 0.866));
        }
    }
    Ok(Some(Frame {
        source: FrameSource::InternalLayout,
        carbon_a: (0.0, 0.0),
        carbon_b: (1.0, 0.0),
        subs,
        implied,
    }))
}

fn rotate(p: (f64, f64), theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (p.0 * c - p.1 * s, p.0 * s + p.1 * c)
}

fn apply_to_frame(frame: &mut Frame, f: impl Fn((f64, f64)) -> (f64, f64)) {
    frame.carbon_a = f(frame.carbon_a);
    frame.carbon_b = f(frame.carbon_b);
    for list in &mut frame.subs {
        for p in list.iter_mut() {
            *p = f(*p);
        }
    }
    for p in frame.implied.iter_mut().flatten() {
        *p = f(*p);
    }
}

/// The slope of the bond and the rotation to apply: the signed angle for
/// falling bonds, its negation for rising ones — always a clockwise turn of
/// the same magnitude — and none at all for vertical bonds.
fn rotation_for(ca: (f64, f64), cb: (f64, f64)) -> (Slope, f64) {
    let dx = cb.0 - ca.0;
    let dy = cb.1 - ca.1;
    if dx.abs() < EPSILON {
        return (Slope::Vertical, 0.0);
    }
    let slope = dy / dx;
    let theta = slope.atan();
    let applied = if slope < 0.0 { theta } else { -theta };
    (Slope::Value(slope), applied)
}

/// Classifies the double bond at `bond_index`. `ranks[i]` must give the
/// canonical id of atom `i`.
pub fn classify_double_bond(
    mol: &Molecule,
    ranks: &[usize],
    bond_index: usize,
    opts: &EzOptions,
) -> Result<DoubleBondAssignment, EzError> {
    let ends = candidate_ends(mol, bond_index, opts.cip)?
        .ok_or(EzError::NotACandidate(bond_index))?;
    let mut frame = match external_frame(mol, &ends) {
        Some(f) => f,
        None => internal_frame(mol, &ends)?.ok_or(EzError::MissingGeometry {
            a: ends.0.carbon,
            b: ends.1.carbon,
        })?,
    };
    if opts.rotation_deg != 0.0 {
        let phi = opts.rotation_deg.to_radians();
        apply_to_frame(&mut frame, |p| rotate(p, phi));
    }

    let (slope, theta) = rotation_for(frame.carbon_a, frame.carbon_b);
    let vertical = slope == Slope::Vertical;
    if !vertical && theta != 0.0 {
        apply_to_frame(&mut frame, |p| rotate(p, theta));
    }
    // Vertical frames compare x; everything else compares y.
    let offset = |p: (f64, f64)| if vertical { p.0 } else { p.1 };

    let mut sides = [0i8; 2];
    let mut offsets = Vec::new();
    for (k, end) in [&ends.0, &ends.1].into_iter().enumerate() {
        for (i, &s) in end.subs.iter().enumerate() {
            offsets.push((mol.atom(s).input_index, offset(frame.subs[k][i])));
        }
        let (high_pos, other_pos) = match (end.high, end.subs.len()) {
            (Some(h), 2) => (frame.subs[k][h], frame.subs[k][1 - h]),
            (Some(h), _) => (frame.subs[k][h], frame.implied[k].expect("implied slot")),
            (None, _) => (frame.implied[k].expect("implied slot"), frame.subs[k][0]),
        };
        let delta = offset(high_pos) - offset(other_pos);
        if delta.abs() <= EPSILON {
            return Err(EzError::DegenerateGeometry { atom: end.carbon });
        }
        sides[k] = if delta > 0.0 { 1 } else { -1 };
    }

    let value = sides[0] * sides[1];
    let label = if value > 0 { EzLabel::Z } else { EzLabel::E };
    let id = |i: usize| ranks.get(i).copied().unwrap_or(i);
    let (mut pair, mut input_pair, mut side_pair) = (
        (id(ends.0.carbon), id(ends.1.carbon)),
        (ends.0.carbon, ends.1.carbon),
        (sides[0], sides[1]),
    );
    if pair.0 > pair.1 {
        pair = (pair.1, pair.0);
        input_pair = (input_pair.1, input_pair.0);
        side_pair = (side_pair.1, side_pair.0);
    }
    Ok(DoubleBondAssignment {
        atoms: pair,
        input_atoms: input_pair,
        sides: side_pair,
        value,
        label,
        trace: GeometryTrace {
            source: frame.source,
            slope,
            theta: if vertical { 0.0 } else { theta },
            offsets,
        },
    })
}

/// Scans for stereogenic double bonds, splitting them by whether geometry
/// is available (marks on both ends, or complete external coordinates).
pub fn find_stereo_double_bonds(mol: &Molecule, opts: &EzOptions) -> EzScan {
    let mut scan = EzScan::default();
    for bi in 0..mol.bonds().len() {
        let Ok(ends) = candidate_ends(mol, bi, opts.cip) else {
            continue;
        };
        let (a, b) = (mol.bond(bi).a, mol.bond(bi).b);
        let any_direction = [a, b].iter().any(|&end| {
            mol.ordered_neighbors(end)
                .iter()
                .any(|&(n, sub)| n != mol.bond(bi).other(end) && mol.bond(sub).side_seen_from(end) != 0)
        });
        let Some(ends) = ends else {
            if any_direction {
                scan.warnings.push(format!(
                    "double bond atoms {a}-{b} carries direction marks but is not stereogenic"
                ));
            }
            continue;
        };
        let external = external_frame(mol, &ends).is_some();
        let internal = matches!(internal_frame(mol, &ends), Ok(Some(_)) | Err(_));
        if external || internal {
            scan.resolvable.push(bi);
        } else {
            scan.unresolvable.push(bi);
            let detail = if any_direction {
                "direction marks on only one end"
            } else {
                "no direction marks or coordinates"
            };
            scan.warnings.push(format!(
                "stereogenic double bond atoms {a}-{b} skipped: {detail}"
            ));
        }
    }
    scan
}

/// Classifies every resolvable stereogenic double bond.
pub fn classify_all_double_bonds(
    mol: &Molecule,
    ranks: &[usize],
    opts: &EzOptions,
) -> Result<EzReport, EzError> {
    let scan = find_stereo_double_bonds(mol, opts);
    let mut report = EzReport {
        warnings: scan.warnings,
        ..EzReport::default()
    };
    for bi in scan.resolvable {
        report
            .assignments
            .push(classify_double_bond(mol, ranks, bi, opts)?);
    }
    report.assignments.sort_by_key(|a| a.atoms);
    let id = |i: usize| ranks.get(i).copied().unwrap_or(i);
    report.unresolvable = scan
        .unresolvable
        .iter()
        .map(|&bi| {
            let bond = mol.bond(bi);
            let (x, y) = (id(bond.a), id(bond.b));
            (x.min(y), x.max(y))
        })
        .collect();
    report.unresolvable.sort_unstable();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("coordinate line {line}: {message}")]
pub struct CoordError {
    pub line: usize,
    pub message: String,
}

/// Parses a coordinate listing: one `index x y` triple per line, `#` for
/// comments, indices referring to atoms in input order.
pub fn parse_coord_file(text: &str) -> Result<Vec<(usize, f64, f64)>, CoordError> {
    let mut entries = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CoordError {
                line,
                message: format!("expected `index x y`, got {} fields", fields.len()),
            });
        }
        let index: usize = fields[0].parse().map_err(|_| CoordError {
            line,
            message: format!("bad atom index {:?}", fields[0]),
        })?;
        let x: f64 = fields[1].parse().map_err(|_| CoordError {
            line,
            message: format!("bad x value {:?}", fields[1]),
        })?;
        let y: f64 = fields[2].parse().map_err(|_| CoordError {
            line,
            message: format!("bad y value {:?}", fields[2]),
        })?;
        if entries.iter().any(|&(i, _, _)| i == index) {
            return Err(CoordError {
                line,
                message: format!("duplicate atom index {index}"),
            });
        }
        entries.push((index, x, y));
    }
    Ok(entries)
}

/// Attaches parsed coordinate entries to a molecule.
pub fn apply_coords(mol: &Molecule, entries: &[(usize, f64, f64)]) -> Result<Molecule, CoordError> {
    let mut coords = vec![None; mol.atom_count()];
    for (pos, &(index, x, y)) in entries.iter().enumerate() {
        if index >= mol.atom_count() {
            return Err(CoordError {
                line: pos + 1,
                message: format!(
                    "atom index {index} out of range for a {}-atom molecule",
                    mol.atom_count()
                ),
            });
        }
        coords[index] = Some((x, y));
    }
    Ok(mol.with_coords(coords))
}
