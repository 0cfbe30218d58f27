use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use opfib::dendroidal::{l_local_check, nerve_comparison, w_forest, Simplex};
use opfib::grothendieck::{straighten, strong_transfer_check, unstraighten, OperadicLeftFibration};
use opfib::instance::{Instance, InstanceFile, LoadError};
use opfib::operad::{library, Algebra, ColoredOperad};
use opfib::operators::OperatorCategory;
use opfib::pointed::PointedMap;
use opfib::sweep::{self, Bounds, Record, SweepReport};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "opfib", version, about = "Checks finite operads, their algebras and fibrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest color list (and pointed set) materialized.
    #[arg(long, global = true, default_value_t = 3)]
    horizon: usize,
    /// Largest carrier size in enumerations.
    #[arg(long, global = true, default_value_t = 2)]
    size_bound: usize,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Check the laws of any instance file.
    Validate { path: PathBuf },
    /// Straighten a fibration into an algebra.
    Straighten { path: PathBuf },
    /// Unstraighten an algebra into its Grothendieck construction.
    Unstraighten { path: PathBuf },
    /// Operadic left fibration and locality checks.
    CheckFibration { path: PathBuf },
    /// Strong sm-left fibration check on envelopes (horizon at most 2).
    CheckStrong { path: PathBuf },
    /// Compare the dendroidal nerve of an operad with its category of operators.
    NerveCompare {
        path: PathBuf,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// The forest of a simplex of pointed maps.
    WForest { path: PathBuf },
    /// Run every acceptance check over the bounded sweep.
    Sweep {
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 2)]
        op_bound: usize,
    },
    /// Print a sample instance file: a library operad name, `max-monoid`,
    /// `max-monoid-fibration`, `chaotic-fibration`, `corrupt-z2`, `figure1`,
    /// `figure2` or `tree`.
    Example { name: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("{path}: expected a {expected} instance, found {found}")]
    Kind { path: PathBuf, expected: &'static str, found: &'static str },
    #[error("unknown example {0}")]
    Example(String),
    #[error("bounds must be at least 1")]
    Bounds,
}

/// Checks run on one instance, plus a free-form dump for human output.
struct Outcome {
    hash: String,
    label: String,
    dump: String,
    checks: Vec<(String, Result<(), String>)>,
}

impl Outcome {
    fn new(file: &InstanceFile, label: String) -> Self {
        Outcome { hash: file.hash(), label, dump: String::new(), checks: Vec::new() }
    }

    fn check(&mut self, name: &str, result: Result<(), String>) {
        self.checks.push((name.to_string(), result));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, r)| r.is_ok())
    }

    fn records(&self) -> Vec<Record> {
        self.checks
            .iter()
            .map(|(check, r)| Record {
                hash: self.hash.clone(),
                instance: self.label.clone(),
                criterion: 0,
                check: check.clone(),
                passed: r.is_ok(),
                witness: r.clone().err(),
            })
            .collect()
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Records => {
                let report = SweepReport { bounds: Bounds::default(), records: self.records() };
                report.to_records()
            }
            Format::Human => {
                let mut out = self.dump.clone();
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                for (check, r) in &self.checks {
                    match r {
                        Ok(()) => out.push_str(&format!("{check}: PASS\n")),
                        Err(w) => out.push_str(&format!("{check}: FAIL\n  {}\n", w.replace('\n', "\n  "))),
                    }
                }
                out
            }
        }
    }
}

fn read(path: &Path) -> Result<(InstanceFile, Instance), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let load = |source| CliError::Load { path: path.into(), source };
    let file = InstanceFile::parse(&text).map_err(load)?;
    let instance = file.load().map_err(load)?;
    Ok((file, instance))
}

fn read_fibration(path: &Path) -> Result<(InstanceFile, OperadicLeftFibration), CliError> {
    match read(path)? {
        (file, Instance::Fibration(f)) => Ok((file, f)),
        (file, _) => Err(CliError::Kind { path: path.into(), expected: "fibration", found: file.kind() }),
    }
}

fn operad_laws(out: &mut Outcome, p: &ColoredOperad) {
    let report = p.validate();
    out.check(
        "operad.validate",
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(format!(
                "{v}\n{} violations; composition entry implicated most often: {:?}",
                report.violations.len(),
                report.prime_suspect()
            )),
        },
    );
}

fn validate(path: &Path, horizon: usize) -> Result<Outcome, CliError> {
    let (file, instance) = read(path)?;
    let mut out = Outcome::new(&file, path.display().to_string());
    match instance {
        Instance::Operad(p) => {
            out.dump = p.describe();
            operad_laws(&mut out, &p);
            if out.passed() {
                let h = horizon.min(p.arity_cap());
                out.check(
                    "operators.invariants",
                    OperatorCategory::build(p, h)
                        .map_err(|e| e.to_string())
                        .and_then(|ops| ops.check_invariants().map_err(|e| e.to_string())),
                );
            }
        }
        Instance::Algebra(a) => {
            out.dump = a.describe();
            operad_laws(&mut out, a.operad());
            out.check("algebra.validate", a.validate().map_err(|e| e.to_string()));
        }
        Instance::Fibration(f) => {
            operad_laws(&mut out, f.base());
            operad_laws(&mut out, f.total());
            out.check("fibration.operadic", f.check(horizon.min(f.base().arity_cap())).map_err(|e| e.to_string()));
        }
        Instance::Tree(t) => {
            out.dump = format!("{}\ncanonical: {}", t.forest(), t.canonical());
            out.check("tree.parse", Ok(()));
        }
        Instance::Forest(f) => {
            out.dump = format!("{f}\ncanonical: {}", f.canonical());
            out.check("forest.parse", Ok(()));
        }
        Instance::Simplex(s) => {
            out.dump = format!("{s:?}");
            out.check("simplex.composable", Ok(()));
        }
    }
    Ok(out)
}

fn straighten_cmd(path: &Path) -> Result<Outcome, CliError> {
    let (file, fib) = read_fibration(path)?;
    let mut out = Outcome::new(&file, path.display().to_string());
    match straighten(&fib) {
        Ok(st) => {
            out.dump = st.algebra.describe();
            for w in &st.witnesses {
                out.dump.push_str(&format!(
                    "comma category at {}: {} objects, {} arrows, {} components\n",
                    fib.base().color_name(w.color),
                    w.objects,
                    w.arrows,
                    w.components
                ));
            }
            out.dump.push_str(&InstanceFile::from(&st.algebra).to_json());
            out.check("straighten", Ok(()));
        }
        Err(e) => out.check("straighten", Err(e.to_string())),
    }
    Ok(out)
}

fn unstraighten_cmd(path: &Path, horizon: usize) -> Result<Outcome, CliError> {
    let (file, alg): (InstanceFile, Algebra) = match read(path)? {
        (file, Instance::Algebra(a)) => (file, a),
        (file, _) => return Err(CliError::Kind { path: path.into(), expected: "algebra", found: file.kind() }),
    };
    let mut out = Outcome::new(&file, path.display().to_string());
    match unstraighten(&alg, horizon.min(alg.operad().arity_cap())) {
        Ok(fib) => {
            out.dump = format!("{}{}", fib.total().describe(), InstanceFile::from(&fib).to_json());
            out.check("unstraighten", Ok(()));
        }
        Err(e) => out.check("unstraighten", Err(e.to_string())),
    }
    Ok(out)
}

fn check_fibration(path: &Path, horizon: usize) -> Result<Outcome, CliError> {
    let (file, fib) = read_fibration(path)?;
    let mut out = Outcome::new(&file, path.display().to_string());
    let operadic = fib.check(horizon.min(fib.base().arity_cap()));
    let local = l_local_check(&fib, &sweep::locality_forests(), false);
    out.dump = format!(
        "operadic left fibration: {}\nleaf-local: {}",
        operadic.is_ok(),
        match &local {
            Ok(n) => format!("true ({n} forests)"),
            Err(f) => format!("false ({f:?})"),
        }
    );
    let agree = if operadic.is_ok() == local.is_ok() {
        Ok(())
    } else {
        Err("the operadic and leaf-local checks disagree".to_string())
    };
    out.check("fibration.operadic", operadic.map_err(|e| e.to_string()));
    out.check("fibration.locality-agreement", agree);
    Ok(out)
}

fn check_strong(path: &Path, horizon: usize) -> Result<Outcome, CliError> {
    let (file, fib) = read_fibration(path)?;
    let mut out = Outcome::new(&file, path.display().to_string());
    out.check("envelope.strong", strong_transfer_check(&fib, horizon.min(2)).map_err(|e| e.to_string()));
    Ok(out)
}

fn nerve_compare(path: &Path, horizon: usize, dim: usize) -> Result<Outcome, CliError> {
    let (file, p) = match read(path)? {
        (file, Instance::Operad(p)) => (file, p),
        (file, _) => return Err(CliError::Kind { path: path.into(), expected: "operad", found: file.kind() }),
    };
    let mut out = Outcome::new(&file, path.display().to_string());
    match nerve_comparison(&p, horizon.min(p.arity_cap()), dim, 10) {
        Ok(r) => {
            out.dump = format!("simplices by dimension: {:?}\nelements by dimension: {:?}", r.simplices, r.elements);
            let result = if r.passed() {
                Ok(())
            } else {
                Err(r.failures.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>().join("\n"))
            };
            out.check("nerve.comparison", result);
        }
        Err(e) => out.check("nerve.comparison", Err(e.to_string())),
    }
    Ok(out)
}

fn w_forest_cmd(path: &Path) -> Result<Outcome, CliError> {
    let (file, sigma) = match read(path)? {
        (file, Instance::Simplex(s)) => (file, s),
        (file, _) => return Err(CliError::Kind { path: path.into(), expected: "simplex", found: file.kind() }),
    };
    let mut out = Outcome::new(&file, path.display().to_string());
    let f = w_forest(&sigma);
    out.dump = format!("{sigma:?}\n{f}\ncanonical: {}", f.canonical());
    out.check("w.forest", Ok(()));
    Ok(out)
}

/// Swaps the composite of one composition entry for another operation of the
/// same profile.
fn corrupt_z2() -> InstanceFile {
    let p = library::z2_sets(3);
    let mut spec = p.to_spec();
    for entry in spec.composition.iter_mut() {
        let composite = opfib::operad::OpId(*entry.last().expect("nonempty entry"));
        let (inputs, output) = (p.inputs(composite), p.output(composite));
        if p.is_unit(opfib::operad::OpId(entry[0])) {
            continue;
        }
        if let Some(other) = p.hom(inputs, output).iter().find(|&&o| o != composite) {
            *entry.last_mut().expect("nonempty entry") = other.0;
            break;
        }
    }
    InstanceFile::Operad(spec)
}

fn example(name: &str) -> Result<InstanceFile, CliError> {
    let cap = sweep::ARITY_CAP;
    let max_monoid = || {
        Algebra::from_fn(Arc::new(library::comm(cap)), vec![2], |_, a| a.iter().copied().max().unwrap_or(0))
            .expect("max monoid")
    };
    let pm = |target: usize, image: &[usize]| PointedMap::new(target, image.to_vec()).expect("pointed map");
    Ok(match name {
        "max-monoid" => InstanceFile::from(&max_monoid()),
        "max-monoid-fibration" => {
            InstanceFile::from(&unstraighten(&max_monoid(), cap).expect("max monoid unstraightens"))
        }
        "chaotic-fibration" => {
            let comm = Arc::new(library::comm(cap));
            let (total, proj) = opfib::grothendieck::chaotic_operad(&comm, &[2]).expect("chaotic operad");
            let fib = OperadicLeftFibration::from_parts(comm, Arc::new(total), proj).expect("operad map");
            InstanceFile::from(&fib)
        }
        "corrupt-z2" => corrupt_z2(),
        "figure1" => InstanceFile::from(&Simplex::from_maps(vec![pm(3, &[2, 2, 2, 3, 0, 0])]).expect("chain")),
        "figure2" => InstanceFile::from(
            &Simplex::from_maps(vec![pm(3, &[1, 1, 3, 3]), pm(1, &[1, 1, 0])]).expect("chain"),
        ),
        "tree" => InstanceFile::Tree { text: "r(a(x, y), b(), c)".into() },
        other => match library::by_name(other, cap) {
            Some(p) => InstanceFile::from(&p),
            None => return Err(CliError::Example(other.to_string())),
        },
    })
}

fn emit(text: &str, report: &Option<PathBuf>) -> Result<(), CliError> {
    match report {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let h = cli.horizon;
    let outcome = match &cli.command {
        Command::Validate { path } => validate(path, h)?,
        Command::Straighten { path } => straighten_cmd(path)?,
        Command::Unstraighten { path } => unstraighten_cmd(path, h)?,
        Command::CheckFibration { path } => check_fibration(path, h)?,
        Command::CheckStrong { path } => check_strong(path, h)?,
        Command::NerveCompare { path, dim } => nerve_compare(path, h, *dim)?,
        Command::WForest { path } => w_forest_cmd(path)?,
        Command::Sweep { colors, op_bound } => {
            if [*colors, *op_bound, cli.size_bound, h].contains(&0) {
                return Err(CliError::Bounds);
            }
            let bounds = Bounds { colors: *colors, op_bound: *op_bound, size_bound: cli.size_bound, horizon: h };
            let report = sweep::run(&bounds);
            let text = match cli.format {
                Format::Human => report.to_human(),
                Format::Records => report.to_records(),
            };
            emit(&text, &cli.report)?;
            return Ok(report.passed());
        }
        Command::Example { name } => {
            emit(&format!("{}\n", example(name)?.to_json()), &cli.report)?;
            return Ok(true);
        }
    };
    emit(&outcome.render(cli.format), &cli.report)?;
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
