use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::Parser;

use stereochem_cli::{
    format_output, process_text, resolve_name, Options, OutputFormat, DEFAULT_RESOLVER,
    RESOLVER_ENV,
};

/// Classifies tetrahedral centers (R/S) and stereogenic double bonds (E/Z)
/// for each SMILES line of the input.
///
/// Lines are processed independently: blank lines and `#` comments are
/// skipped, and a failing line produces an error row without stopping the
/// batch. Exit code 0 means every row classified, 1 means at least one row
/// failed, 2 means the input or the flags themselves were unusable.
#[derive(Parser)]
#[command(name = "stereochem", version)]
struct Cli {
    /// Input file with one SMILES (or name, with --resolve-names) per line;
    /// `-` reads standard input.
    #[arg(long, default_value = "-")]
    input: String,

    /// Output file; `-` writes standard output.
    #[arg(long, default_value = "-")]
    output: String,

    /// Output format.
    #[arg(long, value_enum, default_value = "tsv")]
    format: OutputFormat,

    /// Send lines that fail to parse to a structure-resolver service
    /// (override the base URL with the STEREO_RESOLVER_URL variable).
    #[arg(long)]
    resolve_names: bool,

    /// File of `index x y` lines giving 2D coordinates, applied to every
    /// molecule by input atom order.
    #[arg(long)]
    coords: Option<String>,

    /// Extra rotation (degrees) applied to every geometry frame; labels
    /// must not depend on it.
    #[arg(long, default_value_t = 0.0)]
    rotation: f64,

    /// Break CIP ties by isotope mass.
    #[arg(long)]
    isotopes: bool,
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();

    let input = if cli.input == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| format!("reading stdin: {e}"))?;
        buffer
    } else {
        fs::read_to_string(&cli.input).map_err(|e| format!("reading {}: {e}", cli.input))?
    };

    let coords = match &cli.coords {
        None => Vec::new(),
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
            stereochem::ezgeom::parse_coord_file(&text)
                .map_err(|e| format!("{path}: {e}"))?
        }
    };

    let resolver_base =
        std::env::var(RESOLVER_ENV).unwrap_or_else(|_| DEFAULT_RESOLVER.to_string());
    let opts = Options {
        format: cli.format,
        resolve_names: cli.resolve_names,
        resolver_base: resolver_base.clone(),
        coords,
        rotation_deg: cli.rotation,
        use_isotopes: cli.isotopes,
    };

    let resolver = move |name: &str| resolve_name(&resolver_base, name);
    let rows = process_text(&input, &opts, &resolver);
    let rendered = format_output(&rows, opts.format);

    if cli.output == "-" {
        use std::io::Write;
        std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(|e| format!("writing stdout: {e}"))?;
    } else {
        fs::write(&cli.output, rendered).map_err(|e| format!("writing {}: {e}", cli.output))?;
    }

    Ok(rows.iter().any(|r| r.error.is_some()))
}

fn main() -> ExitCode {
    match run() {
        Ok(false) => ExitCode::from(0),
        Ok(true) => ExitCode::from(1),
        Err(message) => {
            eprintln!("stereochem: {message}");
            ExitCode::from(2)
        }
    }
}
