//! `hpk`: exact-arithmetic checks and constructions for derived Poisson
//! algebras of Lie pairs. Ingests structure-constant JSON files, runs the
//! requested checkers, and emits deterministic machine-readable reports.
//!
//! Exit codes: 0 every requested check passed, 1 usage or parse error,
//! 2 check failure (including structural defects in the input data),
//! 3 internal error.

mod commands;
mod examples;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hpk", version, about = "Derived Poisson algebras of Lie pairs, exactly")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the L-infinity and Leibniz axiom suite on a structure file.
    CheckLinf {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        arity_cap: usize,
        #[arg(long, default_value_t = 4)]
        word_budget: usize,
    },
    /// Lie pair constructions.
    #[command(subcommand)]
    Liepair(LiepairCommand),
    /// Build the strict differential Gerstenhaber algebra of a matched pair.
    MatchedPair { file: PathBuf },
    /// Fedosov-type resolution commands.
    #[command(subcommand)]
    Fedosov(FedosovCommand),
    /// Shifted polyvector field commands.
    #[command(subcommand)]
    Polyvec(PolyvecCommand),
    /// Homotopy transfer along a contraction file.
    Transfer {
        #[arg(long)]
        contraction: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 4)]
        arity_cap: usize,
        #[arg(long, default_value_t = 6)]
        weight_budget: i64,
    },
    /// Write a ready-to-run example input file.
    EmitExample {
        /// One of: sl2-cartan, sl3-cartan, sl2-matched, abelian.
        name: String,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LiepairCommand {
    /// Build the degree (+1) derived Poisson algebra and run the axiom suite.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        arity_cap: usize,
        #[arg(long, default_value_t = 4)]
        word_budget: usize,
    },
    /// Cohomology with its Gerstenhaber structure.
    Cohomology { file: PathBuf },
    /// Verify the exp(delta_pi) isomorphism between two splittings.
    CompareSplittings {
        pair: PathBuf,
        phi: PathBuf,
        #[arg(long, default_value_t = 4)]
        arity_cap: usize,
    },
}

#[derive(Subcommand)]
enum FedosovCommand {
    /// Compare the homotopy-transferred brackets with the direct ones.
    Compare {
        pair: PathBuf,
        #[arg(long, default_value_t = 4)]
        weight: i64,
        #[arg(long, default_value_t = 4)]
        arity_cap: usize,
        /// Optional Delta^B connection table (JSON action entries).
        #[arg(long = "deltaB")]
        delta_b: Option<PathBuf>,
        /// Skip the stabilization recomputation at N + 1.
        #[arg(long, default_value_t = false)]
        no_stability: bool,
    },
}

#[derive(Subcommand)]
enum PolyvecCommand {
    /// Maurer–Cartan defect of the structure built from algebroid data,
    /// cross-checked against the generalized Jacobi identities.
    McCheck { file: PathBuf },
    /// Lie–Poisson extension of algebroid data at the given shift.
    Extend {
        #[arg(long, default_value_t = 0)]
        k: i64,
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("HPK_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let json = cli.format == "json";
    let outcome = match cli.command {
        Command::CheckLinf {
            file,
            arity_cap,
            word_budget,
        } => commands::check_linf(&file, arity_cap, word_budget),
        Command::Liepair(sub) => match sub {
            LiepairCommand::Check {
                file,
                arity_cap,
                word_budget,
            } => commands::liepair_check(&file, arity_cap, word_budget),
            LiepairCommand::Cohomology { file } => commands::liepair_cohomology(&file),
            LiepairCommand::CompareSplittings {
                pair,
                phi,
                arity_cap,
            } => commands::compare_splittings(&pair, &phi, arity_cap),
        },
        Command::MatchedPair { file } => commands::matched_pair(&file),
        Command::Fedosov(FedosovCommand::Compare {
            pair,
            weight,
            arity_cap,
            delta_b,
            no_stability,
        }) => commands::fedosov_compare(&pair, weight, arity_cap, delta_b.as_deref(), !no_stability),
        Command::Polyvec(sub) => match sub {
            PolyvecCommand::McCheck { file } => commands::polyvec_mc_check(&file),
            PolyvecCommand::Extend { k, file } => commands::polyvec_extend(&file, k),
        },
        Command::Transfer {
            contraction,
            structure,
            arity_cap,
            weight_budget,
        } => commands::transfer(&contraction, &structure, arity_cap, weight_budget),
        Command::EmitExample { name, output } => {
            return match examples::emit(&name, output.as_deref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let (document, code) = report::finalize(outcome);
    if json {
        println!("{}", serde_json::to_string_pretty(&document).expect("serializable report"));
    } else {
        print!("{}", report::render_text(&document));
    }
    ExitCode::from(code)
}
