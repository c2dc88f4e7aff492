//! Command-line front end.

pub mod cache;
pub mod instance;

use crate::harness::{
    check_derived_fixed_fiber, check_hc_variants, check_hh_localization, check_hp_completion, check_stabilizers,
    check_unipotent_formal_tate, LocalizationInstance, Report, Truncation, UnipotentSetup, Verdict,
};
use crate::sparse::KernelError;
use cache::{Cache, Lookup};
use clap::{Parser, Subcommand};
use instance::{canonical, override_truncation, parse_instance, InstanceError};
use std::path::PathBuf;

pub const REPORT_VERSION: &str = "loopcoh report v1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "loopcoh", version, about = "Localization checks for Hochschild and cyclic homology of torus quotients")]
pub struct Cli {
    /// Cache directory for reports.
    #[arg(long, env = "LOOPCOH_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Truncation override, e.g. `--window aux_max=6`; repeatable.
    #[arg(long = "window", value_name = "KEY=VALUE", global = true)]
    pub window: Vec<String>,
    /// Also write the report to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Weight-0 Hochschild towers at z, compared with the fixed locus.
    Hh { file: PathBuf },
    /// Tate towers at z against the Cartan model of the fixed locus.
    Hp { file: PathBuf },
    /// Negative cyclic towers (invariants flavor unless --flavor).
    Hn {
        file: PathBuf,
        #[arg(long)]
        flavor: Option<String>,
    },
    /// Cyclic towers (coinvariants flavor unless --flavor).
    Hc {
        file: PathBuf,
        #[arg(long)]
        flavor: Option<String>,
    },
    /// Every localization comparison: hh, hn, hc, tate flavors and hp.
    Localize { file: PathBuf },
    /// Derived fiber at z against loops on the fixed locus.
    FixedFiber { file: PathBuf },
    /// Built-in polynomial vs completed presets with a unipotent circle action.
    UnipotentCheck {
        /// x^D = 0 on the completed side.
        #[arg(long, default_value_t = 4)]
        truncate: u32,
    },
    /// Stabilizer subgroups, the deleted set and sampled fixed-locus containment.
    Stabilizers {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        sample: usize,
    },
}

enum RunError {
    Instance(InstanceError),
    Kernel(KernelError),
    Io(String),
}

impl From<InstanceError> for RunError {
    fn from(e: InstanceError) -> Self {
        RunError::Instance(e)
    }
}

impl From<KernelError> for RunError {
    fn from(e: KernelError) -> Self {
        RunError::Kernel(e)
    }
}

fn load(file: &PathBuf, window: &[String]) -> Result<(LocalizationInstance, String), RunError> {
    let text = std::fs::read_to_string(file).map_err(|e| RunError::Io(format!("{}: {e}", file.display())))?;
    let (_, canon) = canonical(&text)?;
    let mut inst = parse_instance(&text)?;
    for kv in window {
        override_truncation(&mut inst.trunc, kv)?;
    }
    Ok((inst, canon))
}

fn verb_name(v: &Verb) -> String {
    match v {
        Verb::Hh { .. } => "hh".into(),
        Verb::Hp { .. } => "hp".into(),
        Verb::Hn { flavor, .. } => format!("hn {}", flavor.as_deref().unwrap_or("invariants")),
        Verb::Hc { flavor, .. } => format!("hc {}", flavor.as_deref().unwrap_or("coinvariants")),
        Verb::Localize { .. } => "localize".into(),
        Verb::FixedFiber { .. } => "fixed-fiber".into(),
        Verb::UnipotentCheck { truncate } => format!("unipotent-check {truncate}"),
        Verb::Stabilizers { sample, .. } => format!("stabilizers {sample}"),
    }
}

fn unipotent_setup(truncate: u32, window: &[String]) -> Result<UnipotentSetup, RunError> {
    let d = UnipotentSetup::default();
    let mut t = Truncation { aux_max: d.aux_max, u_window: d.u_window, cohdeg: d.cohdeg, ..Truncation::default() };
    for kv in window {
        override_truncation(&mut t, kv)?;
    }
    Ok(UnipotentSetup { truncate, aux_max: t.aux_max, u_window: t.u_window, cohdeg: t.cohdeg })
}

fn compute(verb: &Verb, inst: Option<&LocalizationInstance>, window: &[String]) -> Result<Vec<Report>, RunError> {
    let i = || inst.expect("verb reads an instance");
    Ok(match verb {
        Verb::Hh { .. } => vec![check_hh_localization(i())?],
        Verb::Hp { .. } => vec![check_hp_completion(i())?],
        Verb::Hn { flavor, .. } => vec![check_hc_variants(i(), &[flavor.as_deref().unwrap_or("invariants")])?],
        Verb::Hc { flavor, .. } => vec![check_hc_variants(i(), &[flavor.as_deref().unwrap_or("coinvariants")])?],
        Verb::Localize { .. } => vec![
            check_hh_localization(i())?,
            check_hc_variants(i(), &["invariants", "coinvariants", "tate"])?,
            check_hp_completion(i())?,
        ],
        Verb::FixedFiber { .. } => vec![check_derived_fixed_fiber(i())?],
        Verb::UnipotentCheck { truncate } => vec![check_unipotent_formal_tate(&unipotent_setup(*truncate, window)?)?],
        Verb::Stabilizers { sample, .. } => vec![check_stabilizers(&i().p, &i().z, *sample)],
    })
}

fn render(verb: &str, reports: &[Report]) -> (String, Verdict) {
    let overall = reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict));
    let mut s = format!("{REPORT_VERSION}\nengine {ENGINE_VERSION}\nverb {verb}\n");
    for r in reports {
        s.push('\n');
        s.push_str(&r.render());
    }
    s.push_str(&format!("\noverall {overall}\n"));
    (s, overall)
}

fn verdict_of(report: &str) -> Option<Verdict> {
    match report.lines().last()?.strip_prefix("overall ")? {
        "PASS" => Some(Verdict::Pass),
        "FAIL" => Some(Verdict::Fail),
        "INCONCLUSIVE" => Some(Verdict::Inconclusive),
        _ => None,
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn run_inner(cli: &Cli) -> Result<(String, Verdict), RunError> {
    let file = match &cli.verb {
        Verb::Hh { file }
        | Verb::Hp { file }
        | Verb::Hn { file, .. }
        | Verb::Hc { file, .. }
        | Verb::Localize { file }
        | Verb::FixedFiber { file }
        | Verb::Stabilizers { file, .. } => Some(file),
        Verb::UnipotentCheck { .. } => None,
    };
    let loaded = file.map(|f| load(f, &cli.window)).transpose()?;
    let name = verb_name(&cli.verb);
    let cache = match &cli.cache_dir {
        Some(d) => Some(Cache::new(d).map_err(|e| RunError::Io(format!("cache dir {}: {e}", d.display())))?),
        None => None,
    };
    let canon = loaded.as_ref().map(|(_, c)| c.as_str()).unwrap_or("");
    let windows = cli.window.join("\n");
    let key = Cache::key(&[REPORT_VERSION, ENGINE_VERSION, &name, canon, &windows]);
    if let Some(c) = &cache {
        match c.load(&key) {
            Lookup::Hit(body) => {
                if let Some(v) = verdict_of(&body) {
                    eprintln!("cache hit {key}");
                    return Ok((body, v));
                }
                eprintln!("warning: cache entry {key} has no verdict, recomputing");
            }
            Lookup::Corrupt(why) => eprintln!("warning: corrupt cache entry {key} ({why}), recomputing"),
            Lookup::Miss => eprintln!("cache miss {key}"),
        }
    }
    let reports = compute(&cli.verb, loaded.as_ref().map(|(i, _)| i), &cli.window)?;
    let (text, v) = render(&name, &reports);
    if let Some(c) = &cache {
        if let Err(e) = c.store(&key, &text) {
            eprintln!("warning: could not write cache entry {key}: {e}");
        }
    }
    Ok((text, v))
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok((text, v)) => {
            print!("{text}");
            if let Some(p) = &cli.report {
                if let Err(e) = std::fs::write(p, &text) {
                    eprintln!("error: writing report {}: {e}", p.display());
                    return EXIT_FAIL;
                }
            }
            exit_code(v)
        }
        Err(RunError::Instance(e)) => {
            eprintln!("error: {e}");
            if e.is_backend() {
                EXIT_BACKEND
            } else {
                EXIT_PARSE
            }
        }
        Err(RunError::Kernel(e @ KernelError::BackendMismatch(..))) => {
            eprintln!("error: {e}");
            EXIT_BACKEND
        }
        Err(RunError::Kernel(e)) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
        Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_PARSE
        }
    }
}
