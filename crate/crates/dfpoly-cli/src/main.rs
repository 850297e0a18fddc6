//! `dfpoly` — exact Donaldson-Futaki invariants from JSON instance files.
//!
//! Every subcommand reads one instance file (`--input PATH`) describing a
//! root system, a polytope, and optionally a piecewise-linear function, and
//! prints a deterministic report as text or JSON.  Exit status: 0 on
//! success, 1 when the input fails validation, 2 when the computation on a
//! valid instance cannot proceed.

mod instance;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfpoly::futaki::{df_report, dh_barycenter, dh_volume, mc_cross_check};
use dfpoly::poly::verify_density_identities;
use dfpoly::polytope::check_fano;
use instance::{
    classify, instance_positive_part, load, normalized, parse_instance, CliError, LoadedInstance,
};
use output::{
    render, BarycenterJson, DfJson, FanoJson, IdentitiesJson, ValidateReport, VolumeJson,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "dfpoly",
    version,
    about = "Exact Donaldson-Futaki invariants of polarized group compactifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an instance file, echoing its canonical form
    Validate(RunArgs),
    /// Check the anti-canonical facet rule on the instance polytope
    Fano(RunArgs),
    /// Verify the closed-form density identities for the root system
    Identities(RunArgs),
    /// Duistermaat-Heckman volume of the positive part
    Volume(RunArgs),
    /// Duistermaat-Heckman barycenter of the positive part
    Barycenter(RunArgs),
    /// Donaldson-Futaki invariant of the instance function
    Df(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Validate(a)
            | Command::Fano(a)
            | Command::Identities(a)
            | Command::Volume(a)
            | Command::Barycenter(a)
            | Command::Df(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON instance file
    #[arg(long)]
    input: PathBuf,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Append a Monte-Carlo corroboration of the exact integrals (df only)
    #[arg(long)]
    mc_check: bool,

    /// Override the random seed from the instance options
    #[arg(long)]
    seed: Option<u64>,

    /// Admit a function that is not Weyl-invariant
    #[arg(long)]
    allow_non_invariant_f: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((out, err)) => {
            print!("{out}");
            eprint!("{err}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(command: &Command) -> Result<(String, String), CliError> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.input).map_err(|e| {
        CliError::Parse(format!("cannot read {}: {e}", args.input.display()))
    })?;
    let file = parse_instance(&text)?;
    let mut loaded = load(&file)?;
    if let Some(seed) = args.seed {
        loaded.options.seed = seed;
    }
    if args.allow_non_invariant_f {
        loaded.options.allow_non_invariant_f = true;
    }

    let json = args.format == Format::Json;
    match command {
        Command::Validate(_) => {
            let report = ValidateReport {
                status: "valid".to_string(),
                root_system: loaded.root_label.clone(),
                n: loaded.rs.n(),
                r: loaded.rs.r(),
                constraints: loaded.polytope.constraints().len(),
                vertices: loaded.polytope.vertices().len(),
                function_pieces: loaded.f.as_ref().map(|f| f.pieces().len()),
                instance: normalized(&file, &loaded),
            };
            Ok(render(&report, &loaded.warnings, json))
        }
        Command::Fano(_) => {
            let report = check_fano(&loaded.polytope, &loaded.rs)
                .map_err(|e| classify(e, "polytope"))?;
            Ok(render(&FanoJson::from_report(&report), &loaded.warnings, json))
        }
        Command::Identities(_) => {
            let report = verify_density_identities(&loaded.rs);
            Ok(render(&IdentitiesJson::from_report(&report), &loaded.warnings, json))
        }
        Command::Volume(_) => {
            let pplus = instance_positive_part(&loaded)?;
            let vol = dh_volume(&pplus, &loaded.rs).map_err(|e| classify(e, "polytope"))?;
            Ok(render(
                &VolumeJson { vol_dh: instance::RatSpec(vol) },
                &loaded.warnings,
                json,
            ))
        }
        Command::Barycenter(_) => {
            let pplus = instance_positive_part(&loaded)?;
            let bar = dh_barycenter(&pplus, &loaded.rs).map_err(|e| classify(e, "polytope"))?;
            Ok(render(
                &BarycenterJson { bar_dh: bar.into_iter().map(instance::RatSpec).collect() },
                &loaded.warnings,
                json,
            ))
        }
        Command::Df(_) => {
            let report = run_df(&loaded, args.mc_check)?;
            Ok(render(&report, &loaded.warnings, json))
        }
    }
}

fn run_df(loaded: &LoadedInstance, mc_check: bool) -> Result<DfJson, CliError> {
    let f = loaded.f.as_ref().ok_or_else(|| {
        CliError::validation("function", "the df operation requires a `function` entry")
    })?;
    let report = df_report(
        &loaded.polytope,
        &loaded.rs,
        f,
        loaded.options.allow_non_invariant_f,
    )
    .map_err(|e| classify(e, "instance"))?;
    let mc = if mc_check {
        Some(
            mc_cross_check(
                &loaded.polytope,
                &loaded.rs,
                f,
                loaded.options.mc_samples,
                loaded.options.seed,
            )
            .map_err(|e| classify(e, "instance"))?,
        )
    } else {
        None
    };
    Ok(DfJson::from_report(&report, mc.as_deref()))
}
