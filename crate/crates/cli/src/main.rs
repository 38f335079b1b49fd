//! Scenario runner.
//!
//! Every subcommand loads a TOML scenario (except `verify`, which draws its
//! machines from a seeded generator), computes, and writes a deterministic
//! report: `#`-prefixed header lines carrying the scenario content hash and
//! the aggregate quantities, followed by CSV data rows.  Identical inputs
//! produce byte-identical outputs, so runs can be diffed and cached.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 regime or
//! numerical failure surfacing at run time (no coupled channel, tabulated
//! range miss, undersampled drive), 4 no unique stationary state, 1 failed
//! verification or anything else.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use neqheat::bath::{BathError, PassivityVerdict};
use neqheat::floquet::{stationary_state, thermo_report, FloquetError};
use neqheat::modulation::ModulationError;
use neqheat::scenario::{GridSpec, LoadedScenario, ScenarioError};
use neqheat::verify::{run_all, Fault};
use neqheat::EngineError;

#[derive(Parser)]
#[command(
    name = "neqheat",
    version,
    about = "Heat machines driven by periodic modulation against stationary non-equilibrium baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate one bath's rates, exponent and local temperature over the
    /// scenario grid.
    Spectrum {
        /// Scenario file with a `[spectrum]` section.
        #[arg(long)]
        scenario: PathBuf,
        /// Output file (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario grid, as `start:stop:count`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
    },
    /// Solve a modulated two-level machine in closed form.
    Tls {
        /// Scenario file with a `[tls]` section.
        #[arg(long)]
        scenario: PathBuf,
        /// Output file (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the general pipeline: propagation, channel extraction, stationary
    /// state and thermodynamic report.
    Floquet {
        /// Scenario file with a `[floquet]` section.
        #[arg(long)]
        scenario: PathBuf,
        /// Output file (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's samples per period.
        #[arg(long)]
        samples: Option<usize>,
        /// Override the scenario's harmonic window half-width.
        #[arg(long = "qmax")]
        q_max: Option<u32>,
    },
    /// Run the randomised self-verification suites.
    Verify {
        /// Seed for the machine generators.
        #[arg(long, default_value_t = 20260823)]
        seed: u64,
        /// Machines drawn per suite.
        #[arg(long, default_value_t = 32)]
        count: usize,
        /// Inject a deliberate fault to confirm the suites detect it.
        #[arg(long, value_enum)]
        inject: Option<Inject>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Inject {
    /// Swap emission and absorption in one generator block.
    RateSign,
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(format!("expected start:stop:count, got {text:?}"));
    };
    Ok(GridSpec {
        start: start.parse().map_err(|e| format!("start: {e}"))?,
        stop: stop.parse().map_err(|e| format!("stop: {e}"))?,
        count: count.parse().map_err(|e| format!("count: {e}"))?,
    })
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn classify_bath(error: &BathError) -> u8 {
    match error {
        BathError::InvalidModel(_) | BathError::InvalidArgument(_) | BathError::TableLoad(_) => 2,
        _ => 3,
    }
}

fn classify_modulation(error: &ModulationError) -> u8 {
    match error {
        ModulationError::TruncationDeficit { .. } => 3,
        _ => 2,
    }
}

fn classify_floquet(error: &FloquetError) -> u8 {
    match error {
        FloquetError::InvalidArgument(_)
        | FloquetError::NonHermitianTerm { .. }
        | FloquetError::NonHermitianCoupling { .. }
        | FloquetError::SampleCount(_)
        | FloquetError::DimensionMismatch(_) => 2,
        // No dissipative fixed point: covers scenarios whose couplings all
        // vanish or commute with everything.
        FloquetError::NonErgodic { .. } => 4,
        FloquetError::Bath(inner) => classify_bath(inner),
        FloquetError::UnitarityLoss { .. }
        | FloquetError::DecompositionResidual { .. }
        | FloquetError::InsufficientSampling { .. }
        | FloquetError::CorruptedGenerator { .. }
        | FloquetError::NumericalIntegrity(_) => 3,
    }
}

fn classify_engine(error: &EngineError) -> u8 {
    match error {
        EngineError::NoCoupling => 3,
        EngineError::Bath(inner) => classify_bath(inner),
        EngineError::Modulation(inner) => classify_modulation(inner),
        _ => 2,
    }
}

impl From<ScenarioError> for Failure {
    fn from(error: ScenarioError) -> Self {
        let code = match &error {
            ScenarioError::Bath(inner) => classify_bath(inner),
            ScenarioError::Modulation(inner) => classify_modulation(inner),
            ScenarioError::Engine(inner) => classify_engine(inner),
            ScenarioError::Floquet(inner) => classify_floquet(inner),
            _ => 2,
        };
        Failure {
            code,
            message: error.to_string(),
        }
    }
}

impl From<FloquetError> for Failure {
    fn from(error: FloquetError) -> Self {
        Failure {
            code: classify_floquet(&error),
            message: error.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(error: EngineError) -> Self {
        Failure {
            code: classify_engine(&error),
            message: error.to_string(),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), num)
}

fn opt_bool(x: Option<bool>) -> String {
    x.map_or_else(|| "undefined".to_string(), |b| b.to_string())
}

fn header(report: &mut String, loaded: &LoadedScenario, command: &str) {
    let _ = writeln!(report, "# neqheat {command}");
    if let Some(title) = &loaded.scenario().title {
        let _ = writeln!(report, "# title: {title}");
    }
    let _ = writeln!(report, "# scenario-sha256: {}", loaded.hash());
}

fn run_spectrum(path: &PathBuf, grid: Option<&GridSpec>) -> Result<String, Failure> {
    let loaded = LoadedScenario::load(path)?;
    let mut task = loaded.spectrum_task()?;
    if let Some(grid) = grid {
        task.grid = grid.points()?;
    }
    let mut report = String::new();
    header(&mut report, &loaded, "spectrum");
    let _ = writeln!(report, "# bath: {}", task.label);
    let verdict = match task.bath.classify_passivity(&task.grid) {
        PassivityVerdict::Passive => "passive".to_string(),
        PassivityVerdict::NonPassive {
            omega_low,
            omega_high,
        } => format!(
            "non-passive (work window omega_lo = {}, omega_hi = {})",
            num(omega_low),
            num(omega_high)
        ),
        PassivityVerdict::Indeterminate { reason } => format!("indeterminate: {reason}"),
    };
    let _ = writeln!(report, "# passivity: {verdict}");
    let mut rows = String::new();
    let mut undefined = 0usize;
    for &omega in &task.grid {
        let emission = task.bath.coupling_spectrum(omega).map_err(bath_failure)?;
        let absorption = task.bath.coupling_spectrum(-omega).map_err(bath_failure)?;
        // A frequency where the bath is completely dark has no exponent or
        // temperature; report it as NaN rather than aborting the sweep.
        let (exponent, temperature) = match task.bath.boltzmann_exponent(omega) {
            Ok(exponent) => (
                exponent,
                task.bath.local_temperature(omega).map_err(bath_failure)?,
            ),
            Err(BathError::UndefinedChannel { .. }) => {
                undefined += 1;
                (f64::NAN, f64::NAN)
            }
            Err(error) => return Err(bath_failure(error)),
        };
        let _ = writeln!(
            rows,
            "{},{},{},{},{}",
            num(omega),
            num(emission),
            num(absorption),
            num(exponent),
            num(temperature)
        );
    }
    let _ = writeln!(report, "# warnings: {undefined} undefined channels");
    let _ = writeln!(
        report,
        "# columns: omega,emission,absorption,exponent,local_temperature"
    );
    report.push_str(&rows);
    Ok(report)
}

fn bath_failure(error: BathError) -> Failure {
    Failure {
        code: classify_bath(&error),
        message: error.to_string(),
    }
}

fn run_tls(path: &PathBuf) -> Result<String, Failure> {
    let loaded = LoadedScenario::load(path)?;
    let machine = loaded.tls_machine()?;
    let engine = machine.report()?;
    let condition = machine.work_condition()?;

    let mut report = String::new();
    header(&mut report, &loaded, "tls");
    let _ = writeln!(report, "# omega0: {}", num(machine.omega0()));
    let _ = writeln!(
        report,
        "# drive-frequency: {}",
        num(machine.modulation().omega())
    );
    let _ = writeln!(report, "# steady-ratio: {}", num(machine.steady_ratio()?));
    let _ = writeln!(report, "# power: {}", num(engine.power));
    let _ = writeln!(report, "# intake: {}", num(engine.intake));
    let _ = writeln!(report, "# outflow: {}", num(engine.outflow));
    let _ = writeln!(report, "# inv-t-plus: {}", num(engine.inv_t_plus));
    let _ = writeln!(report, "# inv-t-minus: {}", num(engine.inv_t_minus));
    let _ = writeln!(report, "# efficiency: {}", opt_num(engine.efficiency));
    let _ = writeln!(report, "# carnot-bound: {}", opt_num(engine.carnot_bound));
    let _ = writeln!(report, "# within-bound: {}", opt_bool(engine.within_bound));
    let _ = writeln!(report, "# mixed-sign: {}", engine.mixed_sign);
    let _ = writeln!(
        report,
        "# work-condition: {}",
        if condition.satisfied {
            "satisfied"
        } else {
            "not satisfied"
        }
    );
    let _ = writeln!(
        report,
        "# columns: bath,harmonic,frequency,current,inv_temperature"
    );
    for channel in &engine.currents {
        let _ = writeln!(
            report,
            "{},{},{},{},{}",
            channel.bath,
            channel.harmonic,
            num(channel.frequency),
            num(channel.current),
            num(channel.inv_temperature.unwrap_or(f64::NAN))
        );
    }
    Ok(report)
}

fn run_floquet(
    path: &PathBuf,
    samples: Option<usize>,
    q_max: Option<u32>,
) -> Result<String, Failure> {
    let loaded = LoadedScenario::load(path)?;
    let (machine, run) = loaded.floquet_machine()?;
    let samples = samples.unwrap_or(run.samples);
    let q_max = q_max.unwrap_or(run.q_max);

    let decomposition = machine.decompose(samples)?;
    let generator = machine.generator(&decomposition, q_max)?;
    let rho = stationary_state(&generator)?;
    let thermo = thermo_report(&generator, &rho)?;

    let mut report = String::new();
    header(&mut report, &loaded, "floquet");
    let _ = writeln!(report, "# samples: {samples}");
    let _ = writeln!(report, "# qmax: {q_max}");
    let quasi: Vec<String> = generator.quasi_energies.iter().map(|&e| num(e)).collect();
    let _ = writeln!(report, "# quasi-energies: {}", quasi.join(","));
    for warning in &generator.warnings {
        let _ = writeln!(report, "# warning: {warning}");
    }
    let _ = writeln!(report, "# power: {}", num(thermo.power));
    let _ = writeln!(report, "# intake: {}", num(thermo.intake));
    let _ = writeln!(report, "# outflow: {}", num(thermo.outflow));
    let _ = writeln!(report, "# inv-t-plus: {}", num(thermo.inv_t_plus));
    let _ = writeln!(report, "# inv-t-minus: {}", num(thermo.inv_t_minus));
    let _ = writeln!(report, "# efficiency: {}", opt_num(thermo.efficiency));
    let _ = writeln!(report, "# carnot-bound: {}", opt_num(thermo.carnot_bound));
    let _ = writeln!(report, "# within-bound: {}", opt_bool(thermo.within_bound));
    let _ = writeln!(report, "# entropy-flow: {}", num(thermo.entropy_flow));
    let _ = writeln!(
        report,
        "# entropy-production: {}",
        num(thermo.entropy_production)
    );
    let _ = writeln!(report, "# mixed-sign: {}", thermo.mixed_sign);
    let _ = writeln!(
        report,
        "# columns: coupling,frequency,bohr,offset,emission,absorption,current,\
         inv_temperature,entropy_production"
    );
    for channel in &thermo.channels {
        let _ = writeln!(
            report,
            "{},{},{},{},{},{},{},{},{}",
            channel.label,
            num(channel.frequency),
            num(channel.bohr),
            channel.offset,
            num(channel.emission),
            num(channel.absorption),
            num(channel.current),
            num(channel.inv_temperature),
            num(channel.entropy_production)
        );
    }
    Ok(report)
}

fn run_verify(seed: u64, count: usize, inject: Option<Inject>) -> Result<String, Failure> {
    if count == 0 {
        return Err(Failure::config("verify needs at least one trial"));
    }
    let fault = match inject {
        None => Fault::None,
        Some(Inject::RateSign) => Fault::RateSign,
    };
    let mut report = String::new();
    let _ = writeln!(
        report,
        "seed = {seed}, trials = {count}, fault = {}",
        match fault {
            Fault::None => "none",
            Fault::RateSign => "rate-sign",
        }
    );
    let mut all_passed = true;
    for suite in run_all(seed, count, fault) {
        let _ = writeln!(report, "{suite}");
        for failure in &suite.failures {
            let _ = writeln!(report, "    {failure}");
        }
        all_passed &= suite.passed();
    }
    let _ = writeln!(
        report,
        "verdict: {}",
        if all_passed { "ok" } else { "FAILED" }
    );
    if all_passed {
        Ok(report)
    } else {
        // The report itself is the diagnostic; print it before failing.
        print!("{report}");
        Err(Failure::other("verification failed"))
    }
}

fn deliver(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::other(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum { scenario, out, grid } => {
            deliver(&run_spectrum(&scenario, grid.as_ref())?, out.as_ref())
        }
        Command::Tls { scenario, out } => deliver(&run_tls(&scenario)?, out.as_ref()),
        Command::Floquet {
            scenario,
            out,
            samples,
            q_max,
        } => deliver(&run_floquet(&scenario, samples, q_max)?, out.as_ref()),
        Command::Verify {
            seed,
            count,
            inject,
        } => {
            let report = run_verify(seed, count, inject)?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
