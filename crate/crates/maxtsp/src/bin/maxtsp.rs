use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use maxtsp::error::Error;
use maxtsp::gadgets::{find_bad_cycles, random_bad_cycle, square_gadget_weights, triangle_gadget_weights, verify_gadget};
use maxtsp::instance::Instance;
use maxtsp::oracle::exact_tsp_dp;
use maxtsp::pipeline::{run_pipeline, Options};
use maxtsp::weight::{format_exact, zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser)]
#[command(name = "maxtsp", about = "7/9-approximation solver for symmetric maximum TSP", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and optionally emit a JSON certificate.
    Solve {
        file: PathBuf,
        /// Write the certificate to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also compute the exact optimum and audit the inequality chain.
        #[arg(long)]
        oracle: bool,
    },
    /// Exact maximum tour by subset DP (small instances only).
    Oracle { file: PathBuf },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long = "max-w")]
        max_w: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit the bad-cycle gadget contract on random triangles and squares.
    VerifyGadget {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve every instance file in a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn default_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed.or_else(|| std::env::var("MAXTSP_SEED").ok()?.parse().ok()).unwrap_or(0)
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn load_instance(path: &PathBuf) -> Result<Instance, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    Instance::parse(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })
}

fn cmd_solve(file: PathBuf, report: Option<PathBuf>, oracle: bool) -> u8 {
    let inst = match load_instance(&file) {
        Ok(i) => i,
        Err(code) => return code,
    };
    match run_pipeline(&inst, &Options { oracle }) {
        Ok((tour, cert)) => {
            println!("tour: {:?}", tour.order);
            println!("weight: {}", format_exact(&tour.weight));
            if let Some(opt) = &cert.oracle_opt {
                println!("optimum: {opt}");
            }
            if !cert.safety_events.is_empty() {
                eprintln!("safety events: {}", cert.safety_events.len());
            }
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, cert.to_json()) {
                    eprintln!("error: cannot write report: {e}");
                    return EXIT_VALIDATION;
                }
            }
            if cert.all_ok() {
                EXIT_OK
            } else {
                eprintln!("error: certificate inequality check failed");
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_oracle(file: PathBuf) -> u8 {
    let inst = match load_instance(&file) {
        Ok(i) => i,
        Err(code) => return code,
    };
    match exact_tsp_dp(&inst) {
        Ok((w, tour)) => {
            println!("tour: {tour:?}");
            println!("weight: {}", format_exact(&w));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_gen(n: usize, max_w: u32, seed: Option<u64>, out: Option<PathBuf>) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(default_seed(seed));
    match Instance::random(n, max_w, &mut rng) {
        Ok(inst) => {
            let text = inst.to_text();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_VALIDATION;
                    }
                }
                None => print!("{text}"),
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_verify_gadget(trials: usize, seed: Option<u64>) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(default_seed(seed));
    let started = Instant::now();
    let mut violations = 0usize;
    let mut max_err = zero();
    for t in 0..trials {
        let (inst, cover) = random_bad_cycle(&mut rng, t % 2 == 0);
        let bads = find_bad_cycles(&inst, &cover);
        assert_eq!(bads.len(), 1, "generated cycle must be bad");
        let spec = if bads[0].len() == 4 {
            match square_gadget_weights(&bads[0]) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("trial {t}: {e}");
                    violations += 1;
                    continue;
                }
            }
        } else {
            triangle_gadget_weights(&bads[0])
        };
        match verify_gadget(&inst, &spec) {
            Ok(rep) => {
                if rep.max_abs_error > max_err {
                    max_err = rep.max_abs_error;
                }
            }
            Err(e) => {
                eprintln!("trial {t}: {e}");
                violations += 1;
            }
        }
    }
    println!(
        "{} trials, {} violations, max fragment gap {}, {:.2}s",
        trials,
        violations,
        format_exact(&max_err),
        started.elapsed().as_secs_f64()
    );
    if violations == 0 {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

#[derive(Serialize)]
struct BenchRow {
    file: String,
    n: usize,
    tour_weight: String,
    w_h: String,
    safety_events: usize,
    elapsed_ms: u128,
}

fn cmd_bench(dir: PathBuf, report: Option<PathBuf>) -> u8 {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return EXIT_PARSE;
        }
    };
    files.sort();
    let mut rows = Vec::new();
    let mut failed = false;
    for path in files {
        let inst = match load_instance(&path) {
            Ok(i) => i,
            Err(_) => {
                eprintln!("skipping {}", path.display());
                continue;
            }
        };
        let started = Instant::now();
        match run_pipeline(&inst, &Options::default()) {
            Ok((tour, cert)) => {
                let row = BenchRow {
                    file: path.display().to_string(),
                    n: inst.n(),
                    tour_weight: format_exact(&tour.weight),
                    w_h: cert.w_h.clone(),
                    safety_events: cert.safety_events.len(),
                    elapsed_ms: started.elapsed().as_millis(),
                };
                println!(
                    "{}: n={} tour={} ({} ms)",
                    row.file, row.n, row.tour_weight, row.elapsed_ms
                );
                if !cert.all_ok() {
                    eprintln!("{}: certificate check failed", path.display());
                    failed = true;
                }
                rows.push(row);
            }
            Err(e) => {
                eprintln!("{}: error: {e}", path.display());
                failed = true;
            }
        }
    }
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&rows).expect("report serialization");
        if let Err(e) = std::fs::write(&path, json) {
            eprintln!("error: cannot write report: {e}");
            return EXIT_VALIDATION;
        }
    }
    if failed {
        EXIT_VALIDATION
    } else {
        EXIT_OK
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.cmd {
        Cmd::Solve { file, report, oracle } => cmd_solve(file, report, oracle),
        Cmd::Oracle { file } => cmd_oracle(file),
        Cmd::Gen { n, max_w, seed, out } => cmd_gen(n, max_w, seed, out),
        Cmd::VerifyGadget { trials, seed } => cmd_verify_gadget(trials, seed),
        Cmd::Bench { dir, report } => cmd_bench(dir, report),
    };
    ExitCode::from(code)
}
