//! Batch stereochemistry classification: line-oriented processing, output
//! formatting, and optional name resolution for the `stereochem` binary.
//!
//! Every input line becomes one output row; a line that fails never aborts
//! the batch. Atom ids in the output are canonical (Morgan) ranks — stable
//! for a given structure, meaningful only relative to the same program's
//! canonical SMILES, not to the input text order.

use rayon::prelude::*;
use serde::Serialize;

use stereochem::canon;
use stereochem::chirality;
use stereochem::cip::CipOptions;
use stereochem::ezgeom::{self, EzOptions};
use stereochem::smiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub format: OutputFormat,
    pub resolve_names: bool,
    /// Structure-resolver base URL; `{base}/{name}/smiles` must return a
    /// SMILES body.
    pub resolver_base: String,
    /// Coordinates applied to every parsed molecule, `(input index, x, y)`.
    pub coords: Vec<(usize, f64, f64)>,
    pub rotation_deg: f64,
    pub use_isotopes: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            format: OutputFormat::Tsv,
            resolve_names: false,
            resolver_base: DEFAULT_RESOLVER.to_string(),
            coords: Vec::new(),
            rotation_deg: 0.0,
            use_isotopes: false,
        }
    }
}

pub const DEFAULT_RESOLVER: &str = "http://cactus.nci.nih.gov/chemical/structure";
pub const RESOLVER_ENV: &str = "STEREO_RESOLVER_URL";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RecordRow {
    /// 1-based line number in the input.
    pub line: usize,
    pub input: String,
    /// SMILES obtained from the resolver, when name resolution was used.
    pub resolved_smiles: Option<String>,
    pub canonical_smiles: Option<String>,
    /// `atom <id>: <value> (<label>)` per classified center.
    pub chirality: Vec<String>,
    /// `atoms <a>-<b>: <value> (<label>)` per classified double bond.
    pub double_bonds: Vec<String>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl RecordRow {
    fn failed(line: usize, input: &str, error: String) -> RecordRow {
        RecordRow {
            line,
            input: input.to_string(),
            resolved_smiles: None,
            canonical_smiles: None,
            chirality: Vec::new(),
            double_bonds: Vec::new(),
            warnings: Vec::new(),
            error: Some(error),
        }
    }
}

/// Fetches the SMILES for a chemical name from a structure-resolver service.
pub fn resolve_name(base: &str, name: &str) -> Result<String, String> {
    let mut url = url::Url::parse(base).map_err(|e| format!("bad resolver URL {base:?}: {e}"))?;
    url.path_segments_mut()
        .map_err(|_| format!("resolver URL {base:?} cannot carry path segments"))?
        .push(name)
        .push("smiles");
    let client = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(15))
        .build()
        .map_err(|e| format!("resolver client: {e}"))?;
    let response = client
        .get(url.clone())
        .send()
        .map_err(|e| format!("resolver request failed: {e}"))?;
    if !response.status().is_success() {
        return Err(format!(
            "resolver returned {} for {name:?}",
            response.status()
        ));
    }
    let body = response
        .text()
        .map_err(|e| format!("resolver response unreadable: {e}"))?;
    let smiles = body.lines().next().unwrap_or("").trim().to_string();
    if smiles.is_empty() {
        return Err(format!("resolver returned an empty body for {name:?}"));
    }
    Ok(smiles)
}

/// Processes the whole input text. `resolve` is consulted sequentially for
/// lines that fail to parse when name resolution is enabled; classification
/// itself runs in parallel, preserving input order.
pub fn process_text(
    input: &str,
    opts: &Options,
    resolve: &dyn Fn(&str) -> Result<String, String>,
) -> Vec<RecordRow> {
    struct Task {
        line: usize,
        text: String,
        resolved: Option<Result<String, String>>,
    }

    let mut tasks: Vec<Task> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        tasks.push(Task {
            line: i + 1,
            text: text.to_string(),
            resolved: None,
        });
    }

    if opts.resolve_names {
        for task in &mut tasks {
            if smiles::parse(&task.text).is_err() {
                task.resolved = Some(resolve(&task.text));
            }
        }
    }

    tasks
        .par_iter()
        .map(|task| classify_line(task.line, &task.text, task.resolved.as_ref(), opts))
        .collect()
}

fn classify_line(
    line: usize,
    text: &str,
    resolved: Option<&Result<String, String>>,
    opts: &Options,
) -> RecordRow {
    let (smiles_text, resolved_smiles) = match resolved {
        None => (text.to_string(), None),
        Some(Ok(s)) => (s.clone(), Some(s.clone())),
        Some(Err(e)) => return RecordRow::failed(line, text, e.clone()),
    };

    let (mol, diagnostics) = match smiles::parse(&smiles_text) {
        Ok(parsed) => parsed,
        Err(e) => return RecordRow::failed(line, text, e.to_string()),
    };
    let mol = if opts.coords.is_empty() {
        mol
    } else {
        match ezgeom::apply_coords(&mol, &opts.coords) {
            Ok(m) => m,
            Err(e) => return RecordRow::failed(line, text, format!("coordinates: {e}")),
        }
    };

    let mut warnings: Vec<String> = diagnostics
        .warnings
        .iter()
        .map(|(pos, w)| format!("byte {pos}: {w}"))
        .collect();

    let cip = CipOptions {
        use_isotopes: opts.use_isotopes,
    };
    let ranks = canon::morgan_ranks(&mol);
    let canonical = canon::canonical_smiles(&mol);

    // Hydrogen materialization appends atoms, so the parsed indices — and
    // with them the reported ids — stay valid.
    let materialized = mol.materialize_hydrogens();
    let mut extended_ranks = ranks.clone();
    extended_ranks.extend(mol.atom_count()..materialized.atom_count());

    let mut chirality_cells = Vec::new();
    match chirality::classify_all_centers(&materialized, &extended_ranks, cip) {
        Ok(report) => {
            for a in &report.assignments {
                chirality_cells.push(format!("atom {}: {} ({})", a.atom, a.value, a.label));
            }
            for &id in &report.unresolvable {
                chirality_cells.push(format!("atom {id}: unresolvable (priorities tied)"));
            }
            warnings.extend(report.warnings);
        }
        Err(e) => return RecordRow::failed(line, text, e.to_string()),
    }

    let ez_opts = EzOptions {
        cip,
        rotation_deg: opts.rotation_deg,
    };
    let mut double_bond_cells = Vec::new();
    match ezgeom::classify_all_double_bonds(&mol, &ranks, &ez_opts) {
        Ok(report) => {
            for a in &report.assignments {
                double_bond_cells.push(format!(
                    "atoms {}-{}: {} ({})",
                    a.atoms.0, a.atoms.1, a.value, a.label
                ));
            }
            for &(a, b) in &report.unresolvable {
                double_bond_cells.push(format!("atoms {a}-{b}: unresolvable (no geometry)"));
            }
            warnings.extend(report.warnings);
        }
        Err(e) => return RecordRow::failed(line, text, e.to_string()),
    }

    RecordRow {
        line,
        input: text.to_string(),
        resolved_smiles,
        canonical_smiles: Some(canonical),
        chirality: chirality_cells,
        double_bonds: double_bond_cells,
        warnings,
        error: None,
    }
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

fn cell(values: &[String]) -> String {
    if values.is_empty() {
        "None".to_string()
    } else {
        values.join("; ")
    }
}

/// Renders rows as tab-separated values with a header line.
pub fn format_tsv(rows: &[RecordRow]) -> String {
    let mut out = String::from("line\tinput\tcanonical_smiles\tchirality\tdouble_bonds\terror\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            row.line,
            tsv_field(&row.input),
            row.canonical_smiles.as_deref().unwrap_or("None"),
            tsv_field(&cell(&row.chirality)),
            tsv_field(&cell(&row.double_bonds)),
            tsv_field(row.error.as_deref().unwrap_or("None")),
        ));
    }
    out
}

/// Renders rows as a pretty-printed JSON array.
pub fn format_json(rows: &[RecordRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
    out.push('\n');
    out
}

pub fn format_output(rows: &[RecordRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Tsv => format_tsv(rows),
        OutputFormat::Json => format_json(rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_resolver(_: &str) -> Result<String, String> {
        panic!("resolver must not be consulted")
    }

    fn run(input: &str) -> Vec<RecordRow> {
        process_text(input, &Options::default(), &no_resolver)
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let rows = run("# header comment\n\nCCO\n   \nC\n");
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].line, 3);
        assert_eq!(rows[1].line, 5);
    }

    #[test]
    fn classified_rows_carry_cells_and_no_error() {
        let rows = run("N[C@H](C(=O)O)CS\nF/C=C/Br\n");
        assert_eq!(rows.len(), 2);
        let cysteine = &rows[0];
        assert!(cysteine.error.is_none());
        assert_eq!(cysteine.chirality.len(), 1);
        assert!(cysteine.chirality[0].starts_with("atom "));
        assert!(cysteine.chirality[0].ends_with("1 (R)"));
        assert!(cysteine.double_bonds.is_empty());
        let ethene = &rows[1];
        assert_eq!(ethene.double_bonds.len(), 1);
        assert!(ethene.double_bonds[0].contains("-1 (E)"), "{:?}", ethene.double_bonds);
    }

    #[test]
    fn a_bad_line_fails_alone() {
        let rows = run("CCO\nC(\nCC\n");
        assert_eq!(rows.len(), 3);
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.is_some());
        assert!(rows[2].error.is_none());
    }

    #[test]
    fn tsv_uses_none_for_empty_cells() {
        let rows = run("CC\n");
        let tsv = format_tsv(&rows);
        let mut lines = tsv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "line\tinput\tcanonical_smiles\tchirality\tdouble_bonds\terror"
        );
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split('\t').collect();
        assert_eq!(fields[0], "1");
        assert_eq!(fields[1], "CC");
        assert_eq!(fields[3], "None");
        assert_eq!(fields[4], "None");
        assert_eq!(fields[5], "None");
    }

    #[test]
    fn json_round_trips_the_field_names() {
        let rows = run("C[C@@](Br)(O)N\n");
        let json = format_json(&rows);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let row = &value.as_array().unwrap()[0];
        for key in [
            "line",
            "input",
            "resolved_smiles",
            "canonical_smiles",
            "chirality",
            "double_bonds",
            "warnings",
            "error",
        ] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
        assert_eq!(row["chirality"].as_array().unwrap().len(), 1);
        assert!(row["chirality"][0].as_str().unwrap().contains("(S)"));
    }

    #[test]
    fn resolver_is_used_only_for_unparseable_lines() {
        let calls = std::cell::RefCell::new(Vec::new());
        let resolver = |name: &str| {
            calls.borrow_mut().push(name.to_string());
            Ok("CCO".to_string())
        };
        let opts = Options {
            resolve_names: true,
            ..Options::default()
        };
        let rows = process_text("CC\nethanol\n", &opts, &resolver);
        assert_eq!(calls.borrow().as_slice(), ["ethanol"]);
        assert_eq!(rows[1].resolved_smiles.as_deref(), Some("CCO"));
        assert!(rows[1].error.is_none());
        let (ethanol, _) = smiles::parse("CCO").unwrap();
        assert_eq!(
            rows[1].canonical_smiles.as_deref(),
            Some(canon::canonical_smiles(&ethanol).as_str())
        );
    }

    #[test]
    fn resolver_failure_becomes_a_row_error() {
        let resolver = |_: &str| Err("resolver unreachable".to_string());
        let opts = Options {
            resolve_names: true,
            ..Options::default()
        };
        let rows = process_text("not-a-molecule\n", &opts, &resolver);
        assert_eq!(rows[0].error.as_deref(), Some("resolver unreachable"));
    }

    #[test]
    fn unresolvable_centers_are_reported_in_the_cell() {
        let rows = run("C[C@@](C)(O)N\n");
        assert!(rows[0].error.is_none());
        assert_eq!(rows[0].chirality.len(), 1);
        assert!(rows[0].chirality[0].contains("unresolvable"));
    }

    #[test]
    fn structural_errors_fail_the_row() {
        let rows = run("[C@](C)(C)C\n");
        assert!(rows[0].error.as_deref().unwrap().contains("neighbors"));
    }

    #[test]
    fn coordinates_flow_through_to_classification() {
        let opts = Options {
            coords: vec![
                (2, -4.0, -1.732),
                (3, -3.0, -1.732),
                (4, -2.5, -2.598),
                (5, -3.0, -3.464),
                (8, -1.5, -2.598),
                (10, -2.5, -0.866),
            ],
            ..Options::default()
        };
        let rows = process_text("CCCC(=C(CCBr)CCl)CC(C)C\n", &opts, &no_resolver);
        assert!(rows[0].error.is_none(), "{:?}", rows[0].error);
        assert_eq!(rows[0].double_bonds.len(), 1);
        assert!(rows[0].double_bonds[0].contains("1 (Z)"));
    }

    #[test]
    fn output_is_byte_stable_across_runs() {
        let input = "CCO\nN[C@H](C(=O)O)CS\nF/C=C/Br\nbadline(\n";
        let first = format_output(&run(input), OutputFormat::Tsv);
        let second = format_output(&run(input), OutputFormat::Tsv);
        assert_eq!(first, second);
        let json_first = format_output(&run(input), OutputFormat::Json);
        let json_second = format_output(&run(input), OutputFormat::Json);
        assert_eq!(json_first, json_second);
    }
}
