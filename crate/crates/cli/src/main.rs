//! Command-line surface: check single families or matrices, convert
//! lattices, find minimal exponents, enumerate small ground sets, and run
//! search campaigns.
//!
//! Exit codes: 0 all checks hold, 1 parse/precondition/IO error, 2 a
//! checked conjecture fails on the input, 3 a search campaign found a
//! strong-form counterexample (and dumped it).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use frankl_core::conjectures::{
    self, check_frankl, check_prop14, check_strong, minimal_r, rational_string, symdiff_identity,
    ConjectureReport, FranklVariant, LimitDiagnosis, Witness,
};
use frankl_core::enumeration::{
    canonical_key, enumerate_reduced_uc, search, CheckerSet, GeneratorBounds, SearchConfig,
    SearchMode,
};
use frankl_core::lattice::{family_to_lattice, FiniteLattice};
use frankl_core::matrix::BitMatrix;
use frankl_core::{Error, SetFamily};

#[derive(Parser)]
#[command(
    name = "frankl",
    version,
    about = "Exact checkers and counterexample search for union-closed set families, \
             their 0/1 characteristic matrices, and the corresponding finite lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    /// Irreducible-ideal embedding (reduced union-closed family).
    Union,
    /// Irreducible-filter embedding (reduced intersection-closed family).
    Intersection,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Check closure/reduced predicates and the applicable base conjecture
    /// on a .fam family or .bm matrix file
    Check {
        path: PathBuf,
        /// Append per-conjecture CSV rows to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Find the least power-weight exponent r with 2*sum_i s_i^{r+1} >= m*sum_i s_i^r
    MinR {
        path: PathBuf,
        #[arg(long, default_value_t = conjectures::DEFAULT_R_MAX)]
        r_max: u32,
    },
    /// Run the pairwise strong-form checks (intersections vs differences vs unions)
    Strong { path: PathBuf },
    /// Verify the symmetric-difference identity and report its strictness
    Identity { path: PathBuf },
    /// Convert a .lat lattice to its irreducible filter/ideal family and
    /// check the lattice-form conjectures
    FromLattice {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Direction::Union)]
        direction: Direction,
        /// Write the family here as .fam (printed to stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the inclusion lattice of a reduced closed family
    ToLattice {
        path: PathBuf,
        /// Write a DOT Hasse diagram here
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate reduced union-closed families (one per isomorphism class)
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Write each family as a numbered .fam file into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the conjecture checkers over enumerated or sampled families
    Search {
        /// Single ground-set size (shorthand for --n-min N --n-max N)
        #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
        n: Option<usize>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Random)]
        mode: Mode,
        /// Total generator samples (random mode), split over the n range
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        gen_min: usize,
        #[arg(long, default_value_t = 8)]
        gen_max: usize,
        /// Directory for summary.json, summary.csv and failure dumps
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write records.csv with one row per (family, conjecture)
        #[arg(long)]
        records: bool,
        /// Worker threads (default: FRANKL_WORKERS env var, then 1)
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = conjectures::DEFAULT_R_MAX)]
        r_max: u32,
        /// Comma list from: frankl, min-r, strong, prop14, identity
        #[arg(long, default_value = "all")]
        checkers: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // keep exit code 1 for usage errors; 2 is reserved for a
            // failing conjecture
            let _ = err.print();
            return ExitCode::from(u8::from(!matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            )));
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn witness_text(report: &ConjectureReport, labels: &[String]) -> String {
    match &report.witness {
        Some(Witness::Element(k)) => format!(" witness={}", labels[*k]),
        Some(Witness::Exponent(r)) => format!(" witness=r={r}"),
        None => String::new(),
    }
}

fn report_line(report: &ConjectureReport, labels: &[String]) -> String {
    let reinforcement = match report.reinforcement_ok {
        Some(true) => " reinforcement=ok",
        Some(false) => " reinforcement=violated",
        None => "",
    };
    format!(
        "{}: {} {} {} {}{}{}",
        report.id,
        rational_string(&report.lhs),
        report.relation,
        rational_string(&report.rhs),
        report.verdict,
        witness_text(report, labels),
        reinforcement
    )
}

fn family_key_hex(family: &SetFamily) -> String {
    canonical_key(family)
        .map(|k| k.hex())
        .unwrap_or_else(|_| "-".to_string())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Check { path, csv } => cmd_check(&path, csv.as_deref()),
        Command::MinR { path, r_max } => cmd_min_r(&path, r_max),
        Command::Strong { path } => cmd_strong(&path),
        Command::Identity { path } => cmd_identity(&path),
        Command::FromLattice {
            path,
            direction,
            out,
        } => cmd_from_lattice(&path, direction, out.as_deref()),
        Command::ToLattice { path, dot } => cmd_to_lattice(&path, dot.as_deref()),
        Command::Enumerate { n, out } => cmd_enumerate(n, out.as_deref()),
        Command::Search {
            n,
            n_min,
            n_max,
            mode,
            samples,
            seed,
            gen_min,
            gen_max,
            out,
            records,
            workers,
            r_max,
            checkers,
        } => {
            let (low, high) = match (n, n_min, n_max) {
                (Some(n), _, _) => (n, n),
                (None, Some(lo), Some(hi)) => (lo, hi),
                (None, Some(lo), None) => (lo, lo),
                (None, None, Some(hi)) => (hi, hi),
                (None, None, None) => {
                    return Err(Error::Precondition(
                        "search needs --n or --n-min/--n-max".to_string(),
                    ))
                }
            };
            let mode = match mode {
                Mode::Exhaustive => SearchMode::Exhaustive,
                Mode::Random => SearchMode::Random,
            };
            let workers = workers
                .or_else(|| {
                    std::env::var("FRANKL_WORKERS")
                        .ok()
                        .and_then(|v| v.parse().ok())
                })
                .unwrap_or(1);
            let mut config = SearchConfig::new(low, high, mode);
            config.samples = samples;
            config.seed = seed;
            config.generators = GeneratorBounds {
                min: gen_min,
                max: gen_max,
            };
            config.output = out;
            config.records = records;
            config.workers = workers;
            config.r_max = r_max;
            config.checkers = parse_checkers(&checkers)?;
            cmd_search(&config)
        }
    }
}

fn parse_checkers(list: &str) -> Result<CheckerSet, Error> {
    if list == "all" {
        return Ok(CheckerSet::default());
    }
    let mut set = CheckerSet {
        frankl: false,
        minimal_r: false,
        strong: false,
        prop14: false,
        identity: false,
    };
    for name in list.split(',') {
        match name.trim() {
            "frankl" => set.frankl = true,
            "min-r" => set.minimal_r = true,
            "strong" => set.strong = true,
            "prop14" => set.prop14 = true,
            "identity" => set.identity = true,
            other => {
                return Err(Error::Precondition(format!(
                    "unknown checker {other:?} (expected frankl, min-r, strong, prop14, identity)"
                )))
            }
        }
    }
    Ok(set)
}

fn cmd_check(path: &Path, csv: Option<&Path>) -> Result<u8, Error> {
    let text = read_file(path)?;
    let is_matrix = path.extension().is_some_and(|e| e == "bm");
    if is_matrix {
        return check_matrix(&BitMatrix::parse_bm(&text)?, csv);
    }
    let family = SetFamily::parse_fam(&text)?;
    let union_closed = family.is_union_closed();
    let intersection_closed = family.is_intersection_closed();
    let diagnostic = family.reduced_diagnostic();
    println!("members: {}  elements: {}", family.m(), family.n());
    println!("union-closed: {}", yes_no(union_closed));
    println!("intersection-closed: {}", yes_no(intersection_closed));
    println!("reduced: {}", diagnostic);

    let mut reports = Vec::new();
    if diagnostic.is_reduced() && union_closed {
        reports.push(check_frankl(&family, FranklVariant::MaxUnion)?);
    }
    if diagnostic.is_reduced() && intersection_closed {
        reports.push(check_frankl(&family, FranklVariant::MinIntersection)?);
    }
    let mut failed = false;
    if reports.is_empty() {
        // exploration on inputs outside the preconditions
        let stats = family.element_stats();
        let max = stats.count_in.iter().max().copied().unwrap_or(0);
        let min = stats.count_in.iter().min().copied().unwrap_or(0);
        println!(
            "preconditions unmet; exploratory column extremes: 2*max = {} vs m = {}, 2*min = {} vs m = {}",
            2 * max,
            family.m(),
            2 * min,
            family.m()
        );
    } else {
        for report in &reports {
            println!("{}", report_line(report, family.labels()));
            failed |= !report.holds();
        }
        if let Some(csv_path) = csv {
            append_csv(csv_path, &family, &reports)?;
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn check_matrix(matrix: &BitMatrix, csv: Option<&Path>) -> Result<u8, Error> {
    let union_closed = matrix.is_union_closed_matrix();
    let intersection_closed = matrix.is_intersection_closed_matrix();
    let reduced = matrix.is_reduced_matrix();
    println!("rows: {}  columns: {}", matrix.m(), matrix.n());
    println!("union-closed: {}", yes_no(union_closed));
    println!("intersection-closed: {}", yes_no(intersection_closed));
    println!("reduced: {}", yes_no(reduced));
    let labels: Vec<String> = frankl_core::family::default_labels(matrix.n());
    let mut reports = Vec::new();
    if reduced && union_closed {
        reports.push(conjectures::check_frankl_matrix(
            matrix,
            FranklVariant::MaxUnion,
        )?);
    }
    if reduced && intersection_closed {
        reports.push(conjectures::check_frankl_matrix(
            matrix,
            FranklVariant::MinIntersection,
        )?);
    }
    let mut failed = false;
    if reports.is_empty() {
        let sums = matrix.column_sums();
        let max = sums.iter().max().copied().unwrap_or(0);
        let min = sums.iter().min().copied().unwrap_or(0);
        println!(
            "preconditions unmet; exploratory column extremes: 2*max = {} vs m = {}, 2*min = {} vs m = {}",
            2 * max,
            matrix.m(),
            2 * min,
            matrix.m()
        );
    } else {
        for report in &reports {
            println!("{}", report_line(report, &labels));
            failed |= !report.holds();
        }
        if let Some(csv_path) = csv {
            if let Ok(family) = matrix.to_family() {
                append_csv(csv_path, &family, &reports)?;
            }
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn append_csv(path: &Path, family: &SetFamily, reports: &[ConjectureReport]) -> Result<(), Error> {
    let key = family_key_hex(family);
    let mut out = String::new();
    if !path.exists() {
        out.push_str(conjectures::csv_header());
        out.push('\n');
    }
    for report in reports {
        out.push_str(&conjectures::csv_row(&key, family, report));
        out.push('\n');
    }
    use std::io::Write as _;
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    file.write_all(out.as_bytes()).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn cmd_min_r(path: &Path, r_max: u32) -> Result<u8, Error> {
    let family = SetFamily::parse_fam(&read_file(path)?)?;
    let outcome = minimal_r(&family, r_max)?;
    for row in &outcome.table {
        let cmp = match row.lhs.cmp(&row.rhs) {
            std::cmp::Ordering::Less => "<",
            std::cmp::Ordering::Equal => "=",
            std::cmp::Ordering::Greater => ">",
        };
        println!("r={}: {} {} {}", row.r, row.lhs, cmp, row.rhs);
    }
    match (outcome.r, outcome.limit) {
        (Some(r), LimitDiagnosis::EqualityAtInfinity { .. }) => {
            println!("minimal r = {r} (equality for every r: all column sums coincide)");
            Ok(0)
        }
        (Some(r), _) => {
            println!("minimal r = {r}");
            Ok(0)
        }
        (None, LimitDiagnosis::Violation) => {
            println!(
                "no exponent exists: twice the best column sum is below the family size \
                 (base-conjecture violation)"
            );
            Ok(2)
        }
        (None, LimitDiagnosis::EqualityAtInfinity { .. }) => {
            println!("equality holds only in the limit; no finite exponent reaches it");
            Ok(2)
        }
        (None, LimitDiagnosis::StrictlyAbove) => {
            println!("not found <= {r_max}, exists by limit");
            Ok(0)
        }
    }
}

fn cmd_strong(path: &Path) -> Result<u8, Error> {
    let family = SetFamily::parse_fam(&read_file(path)?)?;
    let bundle = check_strong(&family);
    println!(
        "preconditions: union-closed={} reduced={}",
        yes_no(bundle.preconditions.union_closed),
        yes_no(bundle.preconditions.reduced)
    );
    let labels = family.labels();
    println!("{}", report_line(&bundle.c11, labels));
    println!("{}", report_line(&bundle.c12_diff, labels));
    println!("{}", report_line(&bundle.c12_rev, labels));
    println!("{}", report_line(&bundle.c13, labels));
    println!("{}", report_line(&bundle.c14, labels));
    Ok(if bundle.all_hold() { 0 } else { 2 })
}

fn cmd_identity(path: &Path) -> Result<u8, Error> {
    let family = SetFamily::parse_fam(&read_file(path)?)?;
    let identity = symdiff_identity(&family)?;
    println!(
        "sum|A xnor B| = {}  sum|A xor B| = {}  sum delta^2 = {}",
        identity.xnor_total, identity.xor_total, identity.delta_sq_total
    );
    println!(
        "identity: {} = {} + {}",
        identity.xnor_total, identity.xor_total, identity.delta_sq_total
    );
    println!(
        "strict: {} (every element in exactly half the members: {})",
        yes_no(identity.strict),
        yes_no(identity.balanced)
    );
    let outcome = check_prop14(&family);
    if let Ok(outcome) = outcome {
        println!("{}", report_line(&outcome.hypothesis, family.labels()));
    }
    Ok(0)
}

fn cmd_from_lattice(path: &Path, direction: Direction, out: Option<&Path>) -> Result<u8, Error> {
    let lattice = FiniteLattice::parse_lat(&read_file(path)?)?;
    println!(
        "lattice: {} elements, boolean: {}",
        lattice.size(),
        yes_no(lattice.is_boolean())
    );
    let c1 = lattice.check_conjecture_1();
    let c2 = lattice.check_conjecture_2();
    println!("{}", report_line(&c1, lattice.labels()));
    println!("{}", report_line(&c2, lattice.labels()));
    let family = match direction {
        Direction::Union => lattice.to_union_family()?,
        Direction::Intersection => lattice.to_intersection_family()?,
    };
    let text = family.to_fam_string();
    match out {
        Some(out_path) => {
            write_file(out_path, &text)?;
            println!(
                "family with {} members written to {}",
                family.m(),
                out_path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(if c1.holds() && c2.holds() { 0 } else { 2 })
}

fn cmd_to_lattice(path: &Path, dot: Option<&Path>) -> Result<u8, Error> {
    let family = SetFamily::parse_fam(&read_file(path)?)?;
    let lattice = family_to_lattice(&family)?;
    println!(
        "lattice: {} elements, bottom {}, top {}, boolean: {}",
        lattice.size(),
        lattice.label(lattice.bottom()),
        lattice.label(lattice.top()),
        yes_no(lattice.is_boolean())
    );
    println!("join-irreducibles: {}", lattice.join_irreducibles().len());
    println!(
        "{}",
        report_line(&lattice.check_conjecture_1(), lattice.labels())
    );
    println!(
        "{}",
        report_line(&lattice.check_conjecture_2(), lattice.labels())
    );
    if let Some(dot_path) = dot {
        write_file(dot_path, &lattice.to_dot())?;
        println!("DOT diagram written to {}", dot_path.display());
    }
    Ok(0)
}

fn cmd_enumerate(n: usize, out: Option<&Path>) -> Result<u8, Error> {
    let families = enumerate_reduced_uc(n)?;
    println!(
        "n={}: {} reduced union-closed families up to relabeling",
        n,
        families.len()
    );
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        for (i, family) in families.iter().enumerate() {
            let path = dir.join(format!("family_{n}_{i:04}.fam"));
            write_file(&path, &family.to_fam_string())?;
        }
        println!("families written to {}", dir.display());
    } else {
        for family in &families {
            let rows: Vec<String> = family
                .sorted_rows()
                .iter()
                .map(|r| format!("{r:0width$b}", width = n))
                .collect();
            println!("m={:2}  {}", family.m(), rows.join(" "));
        }
    }
    Ok(0)
}

fn cmd_search(config: &SearchConfig) -> Result<u8, Error> {
    let summary = search(config)?;
    println!(
        "families checked: {} (samples {}, duplicates {}, not reduced {})",
        summary.families, summary.samples_drawn, summary.duplicates, summary.discarded_not_reduced
    );
    for (id, counts) in &summary.counts {
        println!(
            "{}: strict {}  equality {}  fails {}",
            id, counts.holds_strict, counts.holds_equality, counts.fails
        );
    }
    match &summary.min_c12_slack {
        Some(slack) => println!("min conj12 slack: {slack}"),
        None => println!("min conj12 slack: n/a"),
    }
    let dist: Vec<String> = summary
        .minimal_r_distribution
        .iter()
        .map(|(r, c)| format!("{r}:{c}"))
        .collect();
    println!("minimal r distribution: {{{}}}", dist.join(", "));
    println!(
        "reinforcement violations: {}",
        summary.reinforcement_violations
    );
    println!("failures: {}", summary.failures.len());
    for failure in &summary.failures {
        println!(
            "  [{}] {} lhs={} rhs={}{}",
            failure.index,
            failure.conjecture,
            failure.lhs,
            failure.rhs,
            failure
                .dump_path
                .as_deref()
                .map(|p| format!(" dumped to {p}"))
                .unwrap_or_default()
        );
    }
    Ok(if summary.strong_failures() > 0 { 3 } else { 0 })
}
