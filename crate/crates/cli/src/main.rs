use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dyncode::distance::{self, DistanceOptions};
use dyncode::{library, run_dynamics, Classification, Dynamics, Pauli, Schedule, Sector, SpacetimeError};

/// Exit status used when stdout is closed early, as by `| head`.
const EXIT_BROKEN_PIPE: i32 = 141;

// Stdout writers that stop quietly on a closed pipe instead of panicking.
macro_rules! print {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(EXIT_BROKEN_PIPE);
        }
    }};
}

macro_rules! println {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(EXIT_BROKEN_PIPE);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "dyncode",
    version,
    about = "Analyze Floquet and dynamical measurement schedules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Initialization time, period, logical qubits and inference window.
    Analyze(Common),
    /// Windowed detector probes for a range of rounds.
    Detectors {
        #[command(flatten)]
        common: Common,
        /// Rounds `a:b` (default: one period after the steady start).
        #[arg(long, value_parser = parse_range)]
        rounds: Option<(usize, usize)>,
    },
    /// Detectable, benign or logical failure.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Error file (`at <slot>: <pauli>` lines).
        #[arg(long)]
        error: PathBuf,
    },
    /// Push an undetectable error onto a single slot.
    Push {
        #[command(flatten)]
        common: Common,
        /// Error file (`at <slot>: <pauli>` lines).
        #[arg(long)]
        error: PathBuf,
        /// Target slot, at or after the last slot of the error.
        #[arg(long)]
        to: usize,
    },
    /// Spacetime distance by exhaustive search.
    Distance {
        #[command(flatten)]
        common: Common,
        /// Largest weight searched (default: the instantaneous distance).
        #[arg(long)]
        max_weight: Option<usize>,
        /// Slot window `a:b`.
        #[arg(long, value_parser = parse_range)]
        window: Option<(usize, usize)>,
        /// Worker threads for the search.
        #[arg(long)]
        threads: Option<usize>,
        /// Restrict errors to X-type or Z-type Paulis.
        #[arg(long, value_enum, default_value_t = SectorArg::All)]
        sector: SectorArg,
    },
    /// Minimum-weight error explaining a set of unhappy detectors.
    Correct {
        #[command(flatten)]
        common: Common,
        /// Fine steps of the unhappy detectors, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        unhappy: Vec<usize>,
        /// Largest correction weight tried.
        #[arg(long, default_value_t = 2)]
        max_weight: usize,
        /// Restrict corrections to X-type or Z-type Paulis.
        #[arg(long, value_enum, default_value_t = SectorArg::All)]
        sector: SectorArg,
    },
    /// Built-in schedules.
    Library {
        #[command(subcommand)]
        action: LibraryAction,
    },
}

#[derive(Subcommand)]
enum LibraryAction {
    /// List the built-in schedules.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a built-in schedule in file format.
    Show {
        name: String,
        #[command(flatten)]
        params: LibParams,
    },
}

#[derive(Args, Clone, Copy)]
struct LibParams {
    /// Ladder size (4m qubits).
    #[arg(long)]
    m: Option<usize>,
    /// Qubit count (worstcase-init, static-rep).
    #[arg(long)]
    n: Option<usize>,
    /// Patch size (vuillot, fbs).
    #[arg(long)]
    d: Option<usize>,
    /// Torus side (honeycomb).
    #[arg(long)]
    l: Option<usize>,
}

impl From<LibParams> for library::Params {
    fn from(p: LibParams) -> Self {
        library::Params {
            m: p.m,
            n: p.n,
            d: p.d,
            l: p.l,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Schedule file.
    #[arg(long, conflicts_with = "library", required_unless_present = "library")]
    schedule: Option<PathBuf>,
    /// Built-in schedule name (see `library list`).
    #[arg(long)]
    library: Option<String>,
    #[command(flatten)]
    params: LibParams,
    /// Number of rounds simulated by the dynamics.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    All,
    X,
    Z,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::All => Sector::All,
            SectorArg::X => Sector::XOnly,
            SectorArg::Z => Sector::ZOnly,
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

const EXIT_DETECTABLE: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;

impl Common {
    fn schedule(&self) -> anyhow::Result<Schedule> {
        match (&self.schedule, &self.library) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Schedule::parse(&text)?)
            }
            (None, Some(name)) => Ok(library::build(name, self.params.into())?),
            _ => bail!("give exactly one of --schedule and --library"),
        }
    }

    fn load(&self) -> anyhow::Result<(Schedule, Dynamics)> {
        let s = self.schedule()?;
        let d = run_dynamics(&s, self.horizon)?;
        Ok((s, d))
    }

    fn machine(&self) -> bool {
        self.format == Format::Machine
    }
}

fn read_error(schedule: &Schedule, path: &PathBuf) -> anyhow::Result<SpacetimeError> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SpacetimeError::parse(schedule, &text)?)
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn analyze(c: &Common) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    let r = d.report();
    if c.machine() {
        println!("n={}", r.n);
        println!("P={}", r.period);
        println!("prelude={}", r.prelude_len);
        println!("k={}", r.k);
        println!("T={}", r.init_time);
        println!("T_fine={}", r.init_time_fine);
        println!("steady_start={}", r.steady_start);
        println!("mu={}", r.mu);
        println!("mu_by_position={}", join(&r.mu_by_position));
        println!("ranks={}", join(&r.ranks));
    } else {
        println!("qubits: {}", r.n);
        if s.is_periodic() {
            println!("period: {} (prelude of {} rounds)", r.period, r.prelude_len);
        } else {
            println!("finite schedule of {} rounds", s.finite_len());
        }
        println!("logical qubits in steady stage: {}", r.k);
        println!(
            "initialization time: T={} (fine step {})",
            r.init_time, r.init_time_fine
        );
        println!(
            "inference window: mu={} (by cycle position: {})",
            r.mu,
            join(&r.mu_by_position)
        );
        println!("ISG ranks: {}", join(&r.ranks));
    }
    Ok(0)
}

fn detectors(c: &Common, rounds: Option<(usize, usize)>) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    let (a, b) = rounds.unwrap_or((d.steady_start() + 1, d.steady_start() + d.period()));
    let set = dyncode::enumerate_detectors(&d, a, b);
    if c.machine() {
        println!("detectors={}", set.len());
    }
    for p in &set.probes {
        if c.machine() {
            println!(
                "probe={} round={} index={} measurement={}",
                p.fine_step,
                p.round,
                p.index,
                s.format_pauli(&p.measurement)
            );
            print!("{}", p.probe.render(&s));
        } else {
            println!(
                "detector {} (round {}, {}): probe on slots {}",
                p.fine_step,
                p.round,
                s.format_pauli(&p.measurement),
                join(&p.probe.slots())
            );
        }
    }
    if !c.machine() {
        println!("{} detectors in rounds {a}..={b}", set.len());
    }
    Ok(0)
}

/// The logical as seen on the latest error slot when possible.
fn reported_logical(d: &Dynamics, e: &SpacetimeError, logical: &Pauli, slot: usize) -> (Pauli, usize) {
    let Some(b) = e.max_slot() else {
        return (logical.clone(), slot);
    };
    if let Ok(p) = dyncode::push(d, e, b) {
        let l = p.error.at(b);
        let isg = d.isg(b);
        if p.error.slots() == [b] && isg.commutes_with_all(&l) && !isg.contains(&l) {
            return (isg_reduce(d.schedule(), isg, l), b);
        }
    }
    (logical.clone(), slot)
}

/// Greedy reduction by stabilizer basis elements toward low weight, then low labels.
fn isg_reduce(schedule: &Schedule, isg: &dyncode::IsgState, mut l: Pauli) -> Pauli {
    let key = |p: &Pauli| {
        let mut labels: Vec<usize> = p.support().iter().map(|&q| schedule.labels()[q]).collect();
        labels.sort_unstable();
        (p.weight(), labels)
    };
    loop {
        let k = key(&l);
        let better = isg
            .basis()
            .iter()
            .map(|s| l.multiply(s).expect("same size").sign_free())
            .filter(|c| key(c) < k)
            .min_by_key(|c| key(c));
        match better {
            Some(c) => l = c,
            None => return l,
        }
    }
}

fn classify(c: &Common, path: &PathBuf) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    let e = read_error(&s, path)?;
    let cls = dyncode::classify(&d, &e)?;
    let m = c.machine();
    let print_cert = |cert: &[dyncode::BenignGenerator]| {
        for g in cert {
            if m {
                println!("generator={}", g.render(&s));
            } else {
                println!("  {}", g.render(&s));
            }
        }
    };
    match cls {
        Classification::Detectable { fine_step, round } => {
            if m {
                println!("verdict=detectable");
                println!("probe={fine_step}");
                println!("round={round}");
            } else {
                println!("DETECTABLE probe={fine_step} (round {round})");
            }
            Ok(EXIT_DETECTABLE)
        }
        Classification::Benign { certificate } => {
            if m {
                println!("verdict=benign");
                println!("generators={}", certificate.len());
            } else {
                println!("BENIGN ({} generators)", certificate.len());
            }
            print_cert(&certificate);
            Ok(0)
        }
        Classification::LogicalFailure {
            logical,
            slot,
            certificate,
        } => {
            let (l, t) = reported_logical(&d, &e, &logical, slot);
            if m {
                println!("verdict=logical-failure");
                println!("logical={}", s.format_pauli(&l));
                println!("slot={t}");
                println!("generators={}", certificate.len());
            } else {
                println!("LOGICAL-FAILURE L={} @{t}", s.format_pauli(&l));
            }
            print_cert(&certificate);
            Ok(0)
        }
    }
}

fn push(c: &Common, path: &PathBuf, to: usize) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    let e = read_error(&s, path)?;
    let pushed = match dyncode::push(&d, &e, to) {
        Ok(p) => p,
        Err(dyncode::Error::Detectable { probe, .. }) => {
            if c.machine() {
                println!("verdict=detectable");
                println!("probe={probe}");
            } else {
                println!("DETECTABLE probe={probe}");
            }
            return Ok(EXIT_DETECTABLE);
        }
        Err(e) => return Err(e.into()),
    };
    let op = pushed.error.at(to);
    if c.machine() {
        println!("slot={to}");
        println!("operator={}", s.format_pauli(&op));
        for g in &pushed.certificate {
            println!("generator={}", g.render(&s));
        }
    } else {
        println!("equivalent to [{}]_{to}", s.format_pauli(&op));
        println!("certificate ({} generators):", pushed.certificate.len());
        for g in &pushed.certificate {
            println!("  {}", g.render(&s));
        }
    }
    Ok(0)
}

fn distance(
    c: &Common,
    max_weight: Option<usize>,
    window: Option<(usize, usize)>,
    threads: Option<usize>,
    sector: SectorArg,
) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    let opts = DistanceOptions {
        max_weight,
        window,
        threads,
        sector: sector.into(),
        ..Default::default()
    };
    let r = distance::spacetime_distance(&d, &opts)?;
    let (lo, hi) = r.search_window;
    if c.machine() {
        match r.distance {
            Some(x) => println!("distance={x}"),
            None => println!("distance=none"),
        }
        println!("d0={}", r.d0);
        println!("max_weight={}", r.max_weight);
        println!("window={lo}:{hi}");
        println!("candidates={}", r.stats.candidates);
        println!("undetectable={}", r.stats.undetectable);
        println!("benign={}", r.stats.benign);
        if let Some((l, t)) = &r.logical {
            println!("logical={}", s.format_pauli(l));
            println!("logical_slot={t}");
        }
        if let Some(w) = &r.witness {
            print!("{}", w.render(&s));
        }
    } else {
        match r.distance {
            Some(x) => println!("spacetime distance: {x}"),
            None => println!("no nonbenign undetectable error up to weight {}", r.max_weight),
        }
        println!("instantaneous distance: {}", r.d0);
        println!("search window: slots {lo}..={hi}");
        if let Some(w) = &r.witness {
            println!("witness:");
            for line in w.render(&s).lines() {
                println!("  {line}");
            }
        }
        if let Some((l, t)) = &r.logical {
            println!("equivalent logical: [{}]_{t}", s.format_pauli(l));
        }
    }
    Ok(if r.distance.is_some() { 0 } else { EXIT_NOT_FOUND })
}

fn correct(c: &Common, unhappy: &[usize], max_weight: usize, sector: SectorArg) -> anyhow::Result<u8> {
    let (s, d) = c.load()?;
    match distance::correct(&d, unhappy, max_weight, sector.into())? {
        Some(fix) => {
            if c.machine() {
                println!("weight={}", fix.weight());
            } else {
                println!("correction of weight {}:", fix.weight());
            }
            print!("{}", fix.render(&s));
            Ok(0)
        }
        None => {
            if c.machine() {
                println!("correction=none");
            } else {
                println!("no correction up to weight {max_weight}");
            }
            Ok(EXIT_NOT_FOUND)
        }
    }
}

fn library_cmd(action: &LibraryAction) -> anyhow::Result<u8> {
    match action {
        LibraryAction::List { format } => {
            for (name, params, about) in library::ENTRIES {
                if *format == Format::Machine {
                    println!("name={name} params={params:?} about={about:?}");
                } else if params.is_empty() {
                    println!("{name:<16} {about}");
                } else {
                    println!("{name:<16} {about} [{params}]");
                }
            }
        }
        LibraryAction::Show { name, params } => {
            print!("{}", library::build(name, (*params).into())?.render());
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Analyze(c) => analyze(c),
        Command::Detectors { common, rounds } => detectors(common, *rounds),
        Command::Classify { common, error } => classify(common, error),
        Command::Push { common, error, to } => push(common, error, *to),
        Command::Distance {
            common,
            max_weight,
            window,
            threads,
            sector,
        } => distance(common, *max_weight, *window, *threads, *sector),
        Command::Correct {
            common,
            unhappy,
            max_weight,
            sector,
        } => correct(common, unhappy, *max_weight, *sector),
        Command::Library { action } => library_cmd(action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
