//! Command line around the `opetri` library: validate and print documents,
//! glue nets together, explore reachability, tabulate boundary relations,
//! and run the law suites.
//!
//! Exit codes: 0 on success, 1 on any validation or law failure (with a
//! diagnostic on stderr), 2 on usage errors. All output is deterministic
//! for fixed inputs, flags, and seeds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opetri::gen::GenParams;
use opetri::io::{self, NetDocument};
use opetri::laws::{self, LawReport};
use opetri::open::{
    canonical_iso, compose_open, tensor_open, CoherenceWitness, OpenError, OpenPetriNet,
};
use opetri::reach::{self, ExplorationCaps, Reachable};

#[derive(Parser)]
#[command(
    name = "opetri",
    version,
    about = "Open Petri nets: build, glue, and analyze"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapsArgs {
    /// Most tokens allowed in any explored marking
    #[arg(long, default_value_t = 8)]
    max_tokens: u64,
    /// Most firings along any explored path
    #[arg(long, default_value_t = 64)]
    max_depth: u32,
    /// Most distinct markings to visit
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,
}

impl CapsArgs {
    fn build(&self) -> Result<ExplorationCaps, String> {
        ExplorationCaps::new(self.max_tokens, self.max_depth, self.max_states)
            .map_err(|e| e.to_string())
    }
}

/// Caps sized for tabulating whole relations rather than single queries.
#[derive(Args)]
struct SuiteCapsArgs {
    /// Largest boundary marking total to tabulate
    #[arg(long, default_value_t = 4)]
    max_tokens: u64,
    /// Most firings along any explored path
    #[arg(long, default_value_t = 10)]
    max_depth: u32,
    /// Most distinct markings to visit per exploration
    #[arg(long, default_value_t = 10_000)]
    max_states: usize,
}

impl SuiteCapsArgs {
    fn build(&self) -> Result<ExplorationCaps, String> {
        ExplorationCaps::new(self.max_tokens, self.max_depth, self.max_states)
            .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and summarize its nets
    Validate { file: PathBuf },
    /// Glue the first net's outputs to the second net's inputs
    Compose {
        file: PathBuf,
        first: String,
        second: String,
        /// Name for the result in the emitted document
        #[arg(long, default_value = "composite")]
        name: String,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Put two nets side by side, keeping both boundaries
    Tensor {
        file: PathBuf,
        first: String,
        second: String,
        /// Name for the result in the emitted document
        #[arg(long, default_value = "tensor")]
        name: String,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for a firing sequence between two markings of a net
    Reach {
        file: PathBuf,
        net: String,
        /// Start marking over the net's places, e.g. `A:2,B:1`
        #[arg(long)]
        from: String,
        /// Target marking; omit it to list the reachable set instead
        #[arg(long)]
        to: Option<String>,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Tabulate the boundary reachability relation of a net
    Relation {
        file: PathBuf,
        net: String,
        /// Largest boundary marking total to tabulate
        #[arg(long, default_value_t = 3)]
        bound: u64,
        /// Most firings along any explored path
        #[arg(long, default_value_t = 64)]
        max_depth: u32,
        /// Most distinct markings to visit per exploration
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
    },
    /// Run the law suites on the document's nets and on seeded random nets
    CheckLaws {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seeded instances per law
        #[arg(long, default_value_t = 25)]
        instances: usize,
        #[command(flatten)]
        caps: SuiteCapsArgs,
    },
    /// Compare composed relations against composite relations on generated
    /// one-way pairs, reporting (never asserting) equality
    OneWayExperiment {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[command(flatten)]
        caps: SuiteCapsArgs,
    },
    /// Render a net as a dot graph on stdout
    ExportDot { file: PathBuf, net: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version surface as "errors" but should exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Result<NetDocument, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    io::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn pick<'a>(doc: &'a NetDocument, path: &Path, name: &str) -> Result<&'a OpenPetriNet, String> {
    doc.net(name)
        .ok_or_else(|| format!("{}: no net named `{name}`", path.display()))
}

fn emit_net(name: &str, open: OpenPetriNet, out: Option<&Path>) -> Result<ExitCode, String> {
    let mut doc = NetDocument::new();
    doc.add_net(name, open).map_err(|e| e.to_string())?;
    let text = io::serialize(&doc);
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            let mut nets = 0;
            for (name, open) in doc.nets() {
                nets += 1;
                println!(
                    "net {name}: {} places, {} transitions, {} inputs, {} outputs",
                    open.net().places().len(),
                    open.net().transition_count(),
                    open.inputs().count(),
                    open.outputs().count(),
                );
            }
            println!("ok: {nets} nets");
            Ok(ExitCode::SUCCESS)
        }
        Command::Compose {
            file,
            first,
            second,
            name,
            out,
        } => {
            let doc = load(&file)?;
            let result = compose_open(pick(&doc, &file, &first)?, pick(&doc, &file, &second)?)
                .map_err(|e| format!("cannot glue `{first}` to `{second}`: {e}"))?;
            emit_net(&name, result, out.as_deref())
        }
        Command::Tensor {
            file,
            first,
            second,
            name,
            out,
        } => {
            let doc = load(&file)?;
            let result = tensor_open(pick(&doc, &file, &first)?, pick(&doc, &file, &second)?);
            emit_net(&name, result, out.as_deref())
        }
        Command::Reach {
            file,
            net,
            from,
            to,
            caps,
        } => {
            let doc = load(&file)?;
            let open = pick(&doc, &file, &net)?;
            let places = open.net().places();
            let from = io::marking_from_flag(&from, places).map_err(|e| e.to_string())?;
            let caps = caps.build()?;
            match to {
                Some(to) => {
                    let to = io::marking_from_flag(&to, places).map_err(|e| e.to_string())?;
                    match reach::is_reachable(open.net(), &from, &to, &caps) {
                        Reachable::Yes(w) if w.is_empty() => {
                            println!("reachable: (already there)");
                            Ok(ExitCode::SUCCESS)
                        }
                        Reachable::Yes(w) => {
                            println!("reachable: {}", w.join(", "));
                            Ok(ExitCode::SUCCESS)
                        }
                        Reachable::No => {
                            println!("unreachable");
                            Ok(ExitCode::SUCCESS)
                        }
                        Reachable::Unknown => Err(
                            "undecided: exploration hit its caps before settling the query"
                                .to_owned(),
                        ),
                    }
                }
                None => {
                    let (set, exact) = reach::reachable_set(open.net(), &from, &caps);
                    let mut rendered: Vec<String> =
                        set.iter().map(|marking| marking.to_string()).collect();
                    rendered.sort();
                    for line in rendered {
                        println!("{line}");
                    }
                    println!(
                        "{} markings{}",
                        set.len(),
                        if exact { "" } else { " (truncated)" }
                    );
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Relation {
            file,
            net,
            bound,
            max_depth,
            max_states,
        } => {
            let doc = load(&file)?;
            let open = pick(&doc, &file, &net)?;
            let caps =
                ExplorationCaps::new(bound, max_depth, max_states).map_err(|e| e.to_string())?;
            let relation = reach::reach_relation(open, &caps);
            let mut rows = 0;
            let mut complete_rows = 0;
            for (x, complete, cols) in relation.rows() {
                rows += 1;
                complete_rows += usize::from(complete);
                let ys: Vec<String> = cols.iter().map(|y| y.to_string()).collect();
                println!(
                    "{x} -> {{{}}}{}",
                    ys.join(", "),
                    if complete { "" } else { " (incomplete)" }
                );
            }
            println!(
                "pairs: {}; rows: {rows}; complete rows: {complete_rows}",
                relation.pair_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLaws {
            file,
            seed,
            instances,
            caps,
        } => {
            let doc = load(&file)?;
            let caps = caps.build()?;
            let params = GenParams::default();
            let mut reports = Vec::new();
            if doc.nets().next().is_some() {
                reports.push(file_unitors(&doc));
            }
            if let Some(report) = file_lax_pairs(&doc, &caps)? {
                reports.push(report);
            }
            reports.extend(laws::run_all(seed, instances, &params, &caps));
            let mut all_hold = true;
            for report in &reports {
                println!(
                    "{}",
                    serde_json::to_string(report).expect("reports serialize")
                );
                all_hold &= report.holds();
            }
            if all_hold {
                println!("all laws hold");
                Ok(ExitCode::SUCCESS)
            } else {
                Err("law failures reported above".to_owned())
            }
        }
        Command::OneWayExperiment {
            seed,
            instances,
            caps,
        } => {
            let caps = caps.build()?;
            let params = GenParams::default();
            let report = reach::one_way_experiment(seed, instances, &params, &caps);
            for inst in &report.instances {
                let classification = if inst.report.eligible_rows == 0 {
                    "inconclusive"
                } else if inst.report.equality_holds() {
                    "equal"
                } else {
                    "unequal"
                };
                println!(
                    "{}",
                    serde_json::json!({
                        "instance": inst.index,
                        "one_way_first": reach::is_one_way(&inst.first),
                        "one_way_second": reach::is_one_way(&inst.second),
                        "inclusion": inst.report.inclusion_holds(),
                        "classification": classification,
                        "eligible_rows": inst.report.eligible_rows,
                    })
                );
            }
            println!(
                "{}",
                serde_json::json!({
                    "seed": report.seed,
                    "instances": report.instances.len(),
                    "equal": report.equal,
                    "unequal": report.unequal,
                    "inconclusive": report.inconclusive,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportDot { file, net } => {
            let doc = load(&file)?;
            print!("{}", io::export_dot(pick(&doc, &file, &net)?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Checks the unitor isomorphisms on every net in the document.
fn file_unitors(doc: &NetDocument) -> LawReport {
    let mut report = LawReport {
        law: "file-unitors".to_owned(),
        instances: 0,
        passed: 0,
        failed: 0,
        failures: Vec::new(),
        details: BTreeMap::new(),
    };
    for (name, p) in doc.nets() {
        report.instances += 1;
        let outcome = (|| -> Result<(), String> {
            let after =
                compose_open(p, &OpenPetriNet::identity(p.outputs())).map_err(|e| e.to_string())?;
            let before =
                compose_open(&OpenPetriNet::identity(p.inputs()), p).map_err(|e| e.to_string())?;
            let left = canonical_iso(&after, p, &CoherenceWitness::LeftUnitor { p: p.clone() })
                .map_err(|e| e.to_string())?;
            let right = canonical_iso(&before, p, &CoherenceWitness::RightUnitor { p: p.clone() })
                .map_err(|e| e.to_string())?;
            if left.inverse().is_none() || right.inverse().is_none() {
                return Err("unitor square is not invertible".to_owned());
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => report.passed += 1,
            Err(e) => {
                report.failed += 1;
                if report.failures.len() < 5 {
                    report.failures.push(format!("net `{name}`: {e}"));
                }
            }
        }
    }
    report
}

/// Checks the lax composition inclusion on every composable ordered pair of
/// document nets; `None` when the document has no composable pairs.
fn file_lax_pairs(doc: &NetDocument, caps: &ExplorationCaps) -> Result<Option<LawReport>, String> {
    let mut report = LawReport {
        law: "file-lax-inclusion".to_owned(),
        instances: 0,
        passed: 0,
        failed: 0,
        failures: Vec::new(),
        details: BTreeMap::new(),
    };
    for (first_name, first) in doc.nets() {
        for (second_name, second) in doc.nets() {
            match reach::check_lax_composition(first, second, caps) {
                Err(OpenError::BoundaryMismatch) => continue,
                Err(e) => return Err(format!("checking `{first_name}` then `{second_name}`: {e}")),
                Ok(lax) => {
                    report.instances += 1;
                    if lax.inclusion_holds() {
                        report.passed += 1;
                        *report
                            .details
                            .entry("strict_instances".to_owned())
                            .or_default() += u64::from(lax.strict());
                    } else {
                        report.failed += 1;
                        if report.failures.len() < 5 {
                            report.failures.push(format!(
                                "`{first_name}` then `{second_name}`: composed relations \
                                 claim pairs the composite's relation lacks"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok((report.instances > 0).then_some(report))
}
