//! Command-line runner for the operator identification experiments.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a scenario's
//! scientific assertion fails (identity deviation, sweep violation, or a
//! broken non-identifiability pattern).

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use opident_core::lattice::Lattice4;
use opident_core::scenario::{
    run_density_sweep, run_gaussian_example, run_notident, run_thm51, ExperimentConfig,
    SweepConfig, SweepFormat,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "opident",
    version,
    about = "Finite-dimensional time-frequency operator identification lab"
)]
struct Cli {
    /// Identifiability tolerance on sigma_min/sigma_max.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,

    /// Truncation half-width N for generators that do not close on the grid.
    #[arg(long = "trunc-N", global = true, default_value_t = 4)]
    trunc_n: i64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-dimensional Beurling density of a 4x2 generator and the sqrt(2)
    /// necessary condition.
    Density {
        /// Generator entries a1,b1,c1,d1,a2,b2,c2,d2 (column 1 then column 2).
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_hyphen_values = true)]
        gen: Vec<f64>,
    },
    /// Box operator class on [0,a)x[0,L/a): the identification matrix must be
    /// the identity.
    Thm51 {
        #[arg(long = "L")]
        len: usize,
        #[arg(long)]
        a: usize,
    },
    /// Gaussian base operator over the worked example lattices; records
    /// bounds and region predicates, asserts nothing.
    Gauss {
        /// 1: columns (a,0,0,0),(0,b,a,0);  2: columns (a,0,0,0),(0,0,a,b).
        #[arg(long)]
        variant: u8,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "L")]
        len: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Non-identifiable family (|alpha*beta| < 1): every catalog identifier
    /// must stay below tolerance while the spreading family stays Riesz.
    Notident {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "L")]
        len: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Randomized falsification sweep over grid-exact generators.
    Sweep {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long = "L", default_value_t = 64)]
        len: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output path; rows are also summarized on stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn config(len: usize, seed: u64, cli_tol: f64, cli_trunc: i64) -> ExperimentConfig {
    ExperimentConfig {
        len,
        tol: cli_tol,
        trunc_n: cli_trunc,
        seed,
        trials: 8,
    }
}

fn run(cli: Cli) -> opident_core::Result<ExitCode> {
    match cli.command {
        Command::Density { gen } => {
            if gen.len() != 8 {
                return Err(opident_core::Error::InvalidParams(format!(
                    "--gen needs exactly 8 comma-separated entries, got {}",
                    gen.len()
                )));
            }
            let lat = Lattice4::from_flat([
                gen[0], gen[1], gen[2], gen[3], gen[4], gen[5], gen[6], gen[7],
            ]);
            let d2 = lat.two_beurling_density()?;
            let tilde = lat.tilde_lattice();
            println!("rank            : {}", lat.rank());
            println!("D2              : {d2:.12e}");
            match tilde.beurling_density() {
                Ok(dt) => println!("D(tilde)        : {dt:.12e}"),
                Err(_) => println!("D(tilde)        : undefined (degenerate tilde lattice)"),
            }
            println!("|det tilde|     : {:.12e}", tilde.det().abs());
            let ok = lat.necessary_condition_holds()?;
            println!(
                "D2 <= sqrt(2)   : {} (necessary condition for identifiability)",
                if ok { "yes" } else { "no" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Thm51 { len, a } => {
            let cfg = config(len, 7, cli.tol, cli.trunc_n);
            let out = run_thm51(len, a, &cfg)?;
            let rep = &out.report;
            println!("L = {len}, a = {a}, b = {}", len / a);
            println!("max |A - I|           : {:.3e}", out.max_dev_from_identity);
            println!(
                "spreading riesz bounds: ({:.6}, {:.6})",
                rep.riesz_spreading_lo, rep.riesz_spreading_hi
            );
            println!(
                "response riesz bounds : ({:.6}, {:.6})",
                rep.riesz_response_lo, rep.riesz_response_hi
            );
            println!("cond(A)               : {:.6}", rep.cond_a);
            let recovery = rep.recovery_rel_error.unwrap_or(f64::NAN);
            println!("recovery rel. error   : {recovery:.3e}");
            println!("elapsed               : {:.1} ms", rep.elapsed_ms);
            let pass = out.max_dev_from_identity < 1e-10 && recovery < 1e-10;
            println!("verdict               : {}", if pass { "PASS" } else { "FAIL" });
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Gauss {
            variant,
            alpha,
            beta,
            len,
            seed,
        } => {
            let cfg = config(len, seed, cli.tol, cli.trunc_n);
            let out = run_gaussian_example(variant, alpha, beta, &cfg)?;
            let r = &out.record;
            println!(
                "variant {variant}, alpha = {alpha}, beta = {beta}, L = {len}, {} points ({})",
                r.n_points,
                if r.closed { "closed subgroup" } else { "truncated box" }
            );
            println!("D2                 : {:.6e}", r.record.density_2d);
            println!("spreading lower    : {:.6e}", r.record.riesz_spreading_lo);
            for ident in &out.per_identifier {
                println!(
                    "  {:<18} response bounds ({:.3e}, {:.3e})  sigma ratio {:.3e}",
                    ident.name, ident.response_lo, ident.response_hi, ident.sigma_ratio
                );
            }
            println!("best identifier    : {}", r.record.identifier);
            println!("identifiable       : {}", r.record.identifiable);
            println!("notes              : {}", r.notes);
            Ok(ExitCode::SUCCESS)
        }
        Command::Notident {
            alpha,
            beta,
            len,
            seed,
        } => {
            let cfg = config(len, seed, cli.tol, cli.trunc_n);
            let out = run_notident(alpha, beta, &cfg)?;
            let r = &out.record;
            println!(
                "alpha = {alpha}, beta = {beta}, L = {len}, {} points ({})",
                r.n_points,
                if r.closed { "closed subgroup" } else { "truncated box" }
            );
            println!("D2                 : {:.6e}", r.record.density_2d);
            println!("spreading lower    : {:.6e}", out.spreading_lo);
            for ident in &out.per_identifier {
                println!(
                    "  {:<18} response lower {:.3e}",
                    ident.name, ident.response_lo
                );
            }
            println!(
                "doubled-box best   : {:.3e}",
                out.doubled_best_response_lo
            );
            println!("pattern holds      : {}", out.pattern_holds);
            Ok(if out.pattern_holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Sweep {
            samples,
            len,
            seed,
            out,
            format,
        } => {
            let cfg = SweepConfig {
                base: config(len, seed, cli.tol, cli.trunc_n),
                samples,
                out: out.clone(),
                format: match format {
                    FormatArg::Csv => SweepFormat::Csv,
                    FormatArg::Json => SweepFormat::Json,
                },
            };
            let outcome = run_density_sweep(&cfg)?;
            println!(
                "{} records ({} identifiable), {} violations of D2 <= sqrt(2)*1.05, arithmetic check {}",
                outcome.records.len(),
                outcome.identifiable_count,
                outcome.violations,
                if outcome.arithmetic_ok { "ok" } else { "FAILED" }
            );
            if let Some(path) = &out {
                println!("wrote {}", path.display());
            }
            println!("elapsed: {:.1} ms", outcome.elapsed_ms);
            let pass = outcome.violations == 0 && outcome.arithmetic_ok;
            println!("verdict: {}", if pass { "PASS" } else { "FAIL" });
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}
