use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boolalg::algebra::Family;
use boolalg::amalgam::{
    assemble, commutatively_reflects, embed_as_system, pushout, OverlapSystem,
};
use boolalg::commute::{
    commutes_counterexample, commutes_well, weakly_commutes_counterexample, well_counterexample,
    commutes,
};
use boolalg::fixtures::{regenerate_oracles, verify_paper};
use boolalg::functors::{search_algebra_counterexample, search_cube_counterexample, FunctorId};
use boolalg::logic::{format_model, interpolate, parse, LogicError};
use boolalg::{Error, Subalgebra};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "boolalg", version, about = "Commuting subalgebras, pushouts and interpolation of finite Boolean algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Print machine-readable JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every built-in example against its known truth pattern.
    VerifyPaper {
        #[command(flatten)]
        out: Output,
        /// Rerun the brute-force oracles and write the recorded values.
        #[arg(long)]
        regenerate_oracles: bool,
        /// Destination of the regenerated values (stdout if absent).
        #[arg(long = "out", requires = "regenerate_oracles")]
        out_file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Does the family commute?
    Commutes(FileArgs),
    /// Does the family weakly commute?
    WeaklyCommutes(FileArgs),
    /// Does every subfamily of bounded size commute?
    CommutesWell {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Do the algebras of a system (or family) embed into a common one?
    Amalgamates(FileArgs),
    /// The pushout of an overlap system (or family).
    Pushout {
        #[command(flatten)]
        file: FileArgs,
        /// Include each coprojection as lists of pushout atoms.
        #[arg(long)]
        emit_coprojections: bool,
    },
    /// Amalgamate the algebras of a system one at a time.
    Assemble(FileArgs),
    /// Do the given traces satisfy the reflection conditions?
    Reflects(FileArgs),
    /// Interpolants of a jointly unsatisfiable tuple of formulas.
    Interpolate {
        #[command(flatten)]
        out: Output,
        #[arg(required = true, num_args = 2..)]
        formulas: Vec<String>,
    },
    /// Search for functors destroying ternary commutativity.
    Search {
        kind: SearchKind,
        #[command(flatten)]
        out: Output,
        /// exp, sp2, sp3, ...
        #[arg(long, value_parser = parse_functor)]
        functor: FunctorId,
        /// Ground of the algebra search.
        #[arg(long, default_value_t = 4)]
        ground: usize,
        /// Universe bound of the cube search.
        #[arg(long, default_value_t = 6)]
        universe: usize,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Args)]
struct FileArgs {
    /// JSON input file, `-` for stdin.
    input: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Algebra,
    Cube,
}

fn parse_functor(s: &str) -> Result<FunctorId, String> {
    s.parse()
}

/// Failure of a command with its exit status.
struct Fail {
    code: u8,
    message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = if e.is_internal() { 3 } else { 2 };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Fail {
    Fail {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<bool, Fail>;

fn read_input(path: &Path) -> Result<String, Fail> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| invalid(format!("stdin: {e}")))
    } else {
        fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }
}

fn read_family(path: &Path) -> Result<Vec<Subalgebra>, Fail> {
    let text = read_input(path)?;
    let fam: Family = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{}: not a family: {e}", path.display())))?;
    Ok(fam.subalgebras)
}

/// A system JSON, or a family JSON embedded as a system.
fn read_system(path: &Path) -> Result<OverlapSystem, Fail> {
    let text = read_input(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{}: invalid JSON: {e}", path.display())))?;
    if value.get("subalgebras").is_some() {
        let fam: Family = serde_json::from_value(value)
            .map_err(|e| invalid(format!("{}: not a family: {e}", path.display())))?;
        return Ok(embed_as_system(&fam.subalgebras)?);
    }
    serde_json::from_value(value)
        .map_err(|e| invalid(format!("{}: not an overlap system: {e}", path.display())))
}

fn emit(json: bool, value: &Value, human: impl FnOnce() -> String) {
    if json {
        println!("{value}");
    } else {
        println!("{}", human());
    }
}

fn predicate_report(out: &Output, name: &str, result: bool, counterexample: Option<Value>) {
    let value = json!({ "result": result, "counterexample": counterexample });
    emit(out.json, &value, || match &counterexample {
        Some(c) => format!("{name}: {result}\ncounterexample: {c}"),
        None => format!("{name}: {result}"),
    });
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::VerifyPaper {
            out,
            regenerate_oracles: regen,
            out_file,
            workers,
        } => {
            if regen {
                let oracles = regenerate_oracles(workers)?;
                let text = serde_json::to_string_pretty(&oracles).expect("oracles serialize");
                match out_file {
                    Some(p) => fs::write(&p, text + "\n")
                        .map_err(|e| invalid(format!("{}: {e}", p.display())))?,
                    None => println!("{text}"),
                }
                return Ok(true);
            }
            let reports = verify_paper()?;
            let pass = reports.iter().all(|r| r.pass);
            emit(out.json, &json!(reports), || {
                let mut lines = Vec::new();
                for r in &reports {
                    lines.push(format!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.fixture));
                    for c in &r.claims {
                        let mark = if c.expected == c.observed { "ok " } else { "BAD" };
                        lines.push(format!(
                            "  {mark} {}: expected {}, observed {}",
                            c.name, c.expected, c.observed
                        ));
                    }
                }
                lines.join("\n")
            });
            Ok(pass)
        }
        Command::Commutes(f) => {
            let fam = read_family(&f.input)?;
            let cx = commutes_counterexample(&fam)?;
            // run the full predicate too so its internal cross-check applies
            let result = commutes(&fam)?;
            if result != cx.is_none() {
                return Err(Error::CrossCheck("atom search and predicate disagree".into()).into());
            }
            predicate_report(&f.out, "commutes", result, cx.map(|c| json!(c)));
            Ok(result)
        }
        Command::WeaklyCommutes(f) => {
            let fam = read_family(&f.input)?;
            let cx = weakly_commutes_counterexample(&fam)?;
            let result = cx.is_none();
            predicate_report(&f.out, "weakly commutes", result, cx.map(|c| json!(c)));
            Ok(result)
        }
        Command::CommutesWell { file, max_arity } => {
            let fam = read_family(&file.input)?;
            let cx = well_counterexample(&fam, max_arity, commutes)?;
            let result = commutes_well(&fam, max_arity)?;
            predicate_report(&file.out, "commutes well", result, cx.map(|c| json!(c)));
            Ok(result)
        }
        Command::Amalgamates(f) => {
            let system = read_system(&f.input)?;
            let po = pushout(&system)?;
            let cx = po
                .injectivity
                .iter()
                .enumerate()
                .find_map(|(i, inj)| inj.offending_atom.map(|a| json!([i, a])));
            let result = po.all_injective();
            predicate_report(&f.out, "amalgamates", result, cx);
            Ok(result)
        }
        Command::Pushout {
            file,
            emit_coprojections,
        } => {
            let system = read_system(&file.input)?;
            let po = pushout(&system)?;
            let mut value = json!({
                "atoms": po.atom_count(),
                "tuples": po.tuples,
                "injectivity": po.injectivity,
            });
            if emit_coprojections {
                value["coprojections"] = json!(po.coprojections);
            }
            emit(file.out.json, &value, || {
                let mut lines = vec![format!("pushout atoms: {}", po.atom_count())];
                for t in &po.tuples {
                    lines.push(format!("  {t:?}"));
                }
                for (i, inj) in po.injectivity.iter().enumerate() {
                    match inj.offending_atom {
                        None => lines.push(format!("coprojection {i}: injective")),
                        Some(a) => lines.push(format!(
                            "coprojection {i}: not injective (atom {a} collapses to 0)"
                        )),
                    }
                }
                if emit_coprojections {
                    for (i, c) in po.coprojections.iter().enumerate() {
                        lines.push(format!("coprojection {i}: {c:?}"));
                    }
                }
                lines.join("\n")
            });
            Ok(true)
        }
        Command::Assemble(f) => {
            let system = read_system(&f.input)?;
            match assemble(&system) {
                Ok(chain) => {
                    emit(f.out.json, &json!({ "result": true, "chain": chain }), || {
                        let mut lines: Vec<String> = chain
                            .log
                            .iter()
                            .map(|r| format!("stage {}: {} ok", r.stage, r.check))
                            .collect();
                        lines.push(format!("assembled: {} atoms", chain.last().tuples.len()));
                        lines.join("\n")
                    });
                    Ok(true)
                }
                Err(Error::HypothesisFailed { stage, which }) => {
                    let value = json!({ "result": false, "stage": stage, "hypothesis": which });
                    emit(f.out.json, &value, || {
                        format!("assembly failed at stage {stage}: {which}")
                    });
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Reflects(f) => {
            #[derive(serde::Deserialize)]
            struct Input {
                system: OverlapSystem,
                traces: Vec<Subalgebra>,
            }
            let text = read_input(&f.input)?;
            let input: Input = serde_json::from_str(&text).map_err(|e| {
                invalid(format!("{}: expected {{system, traces}}: {e}", f.input.display()))
            })?;
            let report = commutatively_reflects(&input.system, &input.traces)?;
            let cx = report.failure.as_ref().map(|x| json!(x));
            predicate_report(&f.out, "reflects", report.reflects, cx);
            Ok(report.reflects)
        }
        Command::Interpolate { out, formulas } => {
            let phis = formulas
                .iter()
                .map(|t| parse(t).map_err(|e| invalid(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match interpolate(&phis) {
                Ok(res) => {
                    emit(out.json, &json!(res), || {
                        res.interpolants
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join("\n")
                    });
                    Ok(true)
                }
                Err(Error::Logic(LogicError::SatisfiableInput { model })) => {
                    let value = json!({ "satisfiable": true, "model": format_model(&model) });
                    emit(out.json, &value, || {
                        format!("jointly satisfiable: {}", format_model(&model))
                    });
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Search {
            kind,
            out,
            functor,
            ground,
            universe,
            workers,
        } => match kind {
            SearchKind::Algebra => {
                let w = search_algebra_counterexample(functor, ground, workers)?;
                emit(out.json, &json!({ "witness": w }), || match &w {
                    None => "none".into(),
                    Some(w) => {
                        let mut lines = vec![format!(
                            "{} witness in P({}): {}",
                            w.functor,
                            w.ground,
                            w.triple.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
                        )];
                        lines.push(format!(
                            "image atoms {:?} of {} points",
                            w.failing_atoms, w.image_ground
                        ));
                        lines.extend(w.transcript.iter().map(|l| format!("  {l}")));
                        lines.join("\n")
                    }
                });
                Ok(w.is_some())
            }
            SearchKind::Cube => {
                let w = search_cube_counterexample(functor, universe, workers)?;
                emit(out.json, &json!({ "witness": w }), || match &w {
                    None => "none".into(),
                    Some(w) => {
                        let mut lines = vec![format!("{} witness: sets {:?}", w.functor, w.sets)];
                        lines.push(format!("compatible tuple that does not lift: {:?}", w.failing_tuple));
                        lines.extend(w.transcript.iter().map(|l| format!("  {l}")));
                        lines.join("\n")
                    }
                });
                Ok(w.is_some())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
