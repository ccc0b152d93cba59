//! `devron`: run width verifications, oracle cross-checks, and
//! conjecture experiments from the command line, emitting machine-
//! readable reports. Every run is fully determined by its flags; the
//! only non-reproducible report field is the timestamp.

use clap::{Parser, Subcommand, ValueEnum};
use devron_core::devron::{verify_pair, DevronReport, PairConfig};
use devron_core::field::Rat;
use devron_core::octahedron::OctSystem;
use devron_core::pentagram::{LowerSystem, PentagramSystem};
use devron_core::recutting::RecutSystem;
use devron_core::report::Report;
use devron_core::sixvar::SixVarMap;
use devron_core::toda::TodaSystem;
use devron_core::ysystem::YSystem;
use devron_core::{conjectures, Lattice2D};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "devron",
    version,
    about = "Exact experiments on maps with the Devron property"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Octahedron recurrence: rank-1 pair width verification.
    Oct {
        /// Periodicity lattice, as "a,b;c,d".
        #[arg(long, default_value = "3,0;1,1")]
        lattice: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Y-system: admissible-class width verification (bound, not exact).
    Ysys {
        /// Periodicity lattice, as "a,b;c,d".
        #[arg(long, default_value = "1,0;0,3")]
        lattice: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Pentagram map on corrugated twisted polygons (or the lower map).
    Pentagram {
        /// Ambient projective dimension d >= 2.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of vertices per period.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Run the lower (projective-line) map instead.
        #[arg(long)]
        lower: bool,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Bipartite polygon recutting.
    Recut {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Bipartite Toda variant on 2 x 2n matrices.
    Toda {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Exact conjecture experiments (verdicts observed, never asserted).
    Conj {
        #[command(subcommand)]
        which: ConjCmd,
    },
    /// Quick battery over all systems.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ConjCmd {
    /// Bipartite circle intersection on 2n-gons.
    Circle {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Three-dimensional pentagram analogue on closed 2n-gons.
    Ks3d {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Bipartite Schubert flips on 2n-line configurations.
    Schubert {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn width_report(
    system: &str,
    parameters: BTreeMap<String, String>,
    seed: u64,
    dr: &DevronReport,
) -> Report {
    let verdict = if dr.pass() { "pass" } else { "fail" };
    Report::new(system, parameters, seed, dr.records(), verdict)
}

fn emit(report: &Report, format: Format, out: &Option<PathBuf>) -> Result<(), String> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write report: {e}")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: &Cmd) -> Result<Report, String> {
    match cmd {
        Cmd::Oct { lattice, trials, seed, max_steps } => {
            let lat = Lattice2D::parse(lattice).map_err(|e| e.to_string())?;
            let sys = OctSystem::<Rat>::new(lat);
            let mut cfg = PairConfig::new(sys.expected_width(), true);
            if let Some(m) = max_steps {
                cfg = cfg.with_max_steps(*m);
            }
            let dr = verify_pair(&sys, cfg, *trials, *seed);
            Ok(width_report(
                "oct",
                params(&[
                    ("lattice", lattice.clone()),
                    ("trials", trials.to_string()),
                    ("expected_width", sys.expected_width().to_string()),
                ]),
                *seed,
                &dr,
            ))
        }
        Cmd::Ysys { lattice, trials, seed, max_steps } => {
            let lat = Lattice2D::parse(lattice).map_err(|e| e.to_string())?;
            let sys = YSystem::new(lat);
            // The width is a bound here, not asserted exact.
            let mut cfg = PairConfig::new(sys.width_bound(), false);
            if let Some(m) = max_steps {
                cfg = cfg.with_max_steps(*m);
            }
            let dr = verify_pair(&sys, cfg, *trials, *seed);
            Ok(width_report(
                "ysys",
                params(&[
                    ("lattice", lattice.clone()),
                    ("trials", trials.to_string()),
                    ("width_bound", sys.width_bound().to_string()),
                ]),
                *seed,
                &dr,
            ))
        }
        Cmd::Pentagram { dim, n, lower, trials, seed, max_steps } => {
            if *lower {
                if *n < 2 {
                    return Err("the lower map needs n >= 2".into());
                }
                let sys = LowerSystem::new(*n);
                let mut cfg = PairConfig::new(sys.width_bound(), false);
                if let Some(m) = max_steps {
                    cfg = cfg.with_max_steps(*m);
                }
                let dr = verify_pair(&sys, cfg, *trials, *seed);
                return Ok(width_report(
                    "pentagram-lower",
                    params(&[
                        ("n", n.to_string()),
                        ("trials", trials.to_string()),
                        ("width_bound", sys.width_bound().to_string()),
                    ]),
                    *seed,
                    &dr,
                ));
            }
            if *dim < 2 {
                return Err("the pentagram map needs --dim >= 2".into());
            }
            if *n < 4 {
                return Err("the pentagram map needs --n >= 4".into());
            }
            let sys = PentagramSystem::new(*dim, *n);
            let mut cfg = PairConfig::new(sys.width_bound(), false);
            if let Some(m) = max_steps {
                cfg = cfg.with_max_steps(*m);
            }
            let dr = verify_pair(&sys, cfg, *trials, *seed);
            Ok(width_report(
                "pentagram",
                params(&[
                    ("dim", dim.to_string()),
                    ("n", n.to_string()),
                    ("trials", trials.to_string()),
                    ("width_bound", sys.width_bound().to_string()),
                ]),
                *seed,
                &dr,
            ))
        }
        Cmd::Recut { n, trials, seed, max_steps } => {
            if *n < 3 {
                return Err("recutting needs --n >= 3".into());
            }
            let sys = RecutSystem::new(*n);
            let mut cfg = PairConfig::new(sys.expected_width(), true);
            if let Some(m) = max_steps {
                cfg = cfg.with_max_steps(*m);
            }
            let dr = verify_pair(&sys, cfg, *trials, *seed);
            Ok(width_report(
                "recut",
                params(&[
                    ("n", n.to_string()),
                    ("trials", trials.to_string()),
                    ("expected_width", sys.expected_width().to_string()),
                ]),
                *seed,
                &dr,
            ))
        }
        Cmd::Toda { n, trials, seed, max_steps } => {
            if *n < 2 {
                return Err("the Toda variant needs --n >= 2".into());
            }
            let sys = TodaSystem::<Rat>::new(*n);
            let mut cfg = PairConfig::new(sys.expected_width(), true);
            if let Some(m) = max_steps {
                cfg = cfg.with_max_steps(*m);
            }
            let dr = verify_pair(&sys, cfg, *trials, *seed);
            Ok(width_report(
                "toda",
                params(&[
                    ("n", n.to_string()),
                    ("trials", trials.to_string()),
                    ("expected_width", sys.expected_width().to_string()),
                ]),
                *seed,
                &dr,
            ))
        }
        Cmd::Conj { which } => match which {
            ConjCmd::Circle { n, trials, seed } => {
                if *n < 3 {
                    return Err("circle intersection needs --n >= 3".into());
                }
                Ok(conjectures::conj_circle_experiment(*n, *trials, *seed))
            }
            ConjCmd::Ks3d { n, trials, seed } => {
                if *n < 4 {
                    return Err("the space map needs --n >= 4".into());
                }
                Ok(conjectures::conj_ks3d_experiment(*n, *trials, *seed))
            }
            ConjCmd::Schubert { n, trials, seed } => {
                if *n < 6 {
                    return Err("Schubert flips need --n >= 6".into());
                }
                Ok(conjectures::conj_schubert_experiment(*n, *trials, *seed))
            }
        },
        Cmd::Selftest { .. } => unreachable!("selftest handled separately"),
    }
}

fn selftest(seed: u64) -> ExitCode {
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("selftest {name}: {}", if pass { "pass" } else { "FAIL" });
        ok &= pass;
    };
    check(
        "sixvar",
        verify_pair(&SixVarMap, PairConfig::new(2, true), 3, seed).pass(),
    );
    let lat = Lattice2D::from_generators((3, 0), (1, 1)).unwrap();
    let oct = OctSystem::<Rat>::new(lat);
    check(
        "oct",
        verify_pair(&oct, PairConfig::new(oct.expected_width(), true), 3, seed).pass(),
    );
    let ysys = YSystem::new(Lattice2D::from_generators((1, 0), (0, 3)).unwrap());
    check(
        "ysys",
        verify_pair(&ysys, PairConfig::new(ysys.width_bound(), false), 3, seed).pass(),
    );
    let pent = PentagramSystem::new(2, 5);
    check(
        "pentagram",
        verify_pair(&pent, PairConfig::new(pent.width_bound(), false), 2, seed).pass(),
    );
    let lower = LowerSystem::new(4);
    check(
        "pentagram-lower",
        verify_pair(&lower, PairConfig::new(lower.width_bound(), false), 2, seed).pass(),
    );
    let recut = RecutSystem::new(4);
    check(
        "recut",
        verify_pair(&recut, PairConfig::new(recut.expected_width(), true), 3, seed).pass(),
    );
    let toda = TodaSystem::<Rat>::new(3);
    check(
        "toda",
        verify_pair(&toda, PairConfig::new(toda.expected_width(), true), 3, seed).pass(),
    );
    check(
        "conj-circle",
        conjectures::conj_circle_experiment(3, 5, seed)
            .trials
            .iter()
            .filter(|t| !t.discarded)
            .count()
            >= 5,
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::Selftest { seed } = cli.cmd {
        return selftest(seed);
    }
    match run(&cli.cmd) {
        Ok(report) => {
            if let Err(msg) = emit(&report, cli.format, &cli.out) {
                return usage_error(&msg);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => usage_error(&msg),
    }
}
