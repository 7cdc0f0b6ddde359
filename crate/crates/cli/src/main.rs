//! Command-line surface: one subcommand per library operation, JSON files
//! in, reports out. Reports go to stdout, diagnostics to stderr; exit 0
//! means pass/found, 1 means fail/not-found, 2 means bad input or usage.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use relred::formats::{
    read_algebra, read_partial_group, read_representation, to_canonical_json, RepresentationFile,
};
use relred::report::{Report, Verdict};
use relred_core::algebra::FiniteAlgebra;
use relred_core::partial_group::{embed_search, EmbedConfig, EmbedStatus};
use relred_core::relations::Complementation;
use relred_core::representation::{
    PipelineOptions, PipelineRoute, Representation, VerificationReport,
};
use relred_core::repsearch::{search_representation, SearchConfig, SearchStatus};
use relred_core::signature::Signature;
use relred_core::{IRoute, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "relred",
    version,
    about = "Workbench for representability of relation-algebra reducts and partial-group embedding"
)]
struct Cli {
    /// Emit the machine JSON report on stdout instead of the human text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArg {
    /// Write the command's primary artifact (representation, embedding,
    /// or report) to this path as canonical JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural laws of an algebra file against a signature.
    Validate {
        file: PathBuf,
        /// Comma-separated symbols overriding the file's signature.
        #[arg(long)]
        signature: Option<String>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Derived notions: div, i-elements, idempotents, normality, ⊟/⊡ classes.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        signature: Option<String>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Verify a representation file symbol by symbol.
    CheckRep {
        file: PathBuf,
        /// Override the file's complementation semantics.
        #[arg(long)]
        complement: Option<Complementation>,
        /// Demand that ⊤ be represented as an equivalence relation.
        #[arg(long)]
        require_top_equiv: bool,
        /// Also check that every i-element maps to an injective partial function.
        #[arg(long)]
        check_i: bool,
        /// Also check that ⊟/⊡ agree with concrete domain/range equality.
        #[arg(long)]
        check_domran: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Search for a representation over base sizes 1..=max-base.
    SearchRep {
        file: PathBuf,
        #[arg(long)]
        signature: Option<String>,
        #[arg(long, default_value = "universal")]
        complement: Complementation,
        #[arg(long)]
        require_top_equiv: bool,
        #[arg(long, default_value_t = 4)]
        max_base: usize,
        #[arg(long, default_value_t = 5_000_000)]
        node_limit: u64,
        #[arg(long, default_value_t = true)]
        symmetry_breaking: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Collapse base points wherever e acts as the universal relation.
    Quotient {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Intersect every image with the symmetric interior of h(⊤).
    Interior {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Interior + quotient with checked hypotheses: the i-relation and
    /// ⊟/⊡ become concrete on the result.
    Pipeline {
        file: PathBuf,
        /// Do not apply the interior; require h(⊤) to already be an
        /// equivalence relation.
        #[arg(long)]
        require_top_equiv: bool,
        /// Force the lattice-ordered or ordered-complemented route.
        #[arg(long, value_parser = parse_route)]
        route: Option<PipelineRoute>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Check the partial-group axioms.
    PgValidate {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Search for an embedding into a finite group of permutations.
    PgEmbed {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        #[arg(long, default_value_t = 5_000_000)]
        node_limit: u64,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn parse_route(s: &str) -> Result<PipelineRoute, String> {
    match s {
        "lattice" | "lattice-ordered" => Ok(PipelineRoute::LatticeOrdered),
        "ordered" | "ordered-complemented" => Ok(PipelineRoute::OrderedComplemented),
        other => Err(format!(
            "unknown route `{other}` (expected `lattice` or `ordered`)"
        )),
    }
}

/// Input and usage problems end the process with exit 2.
fn input_error(message: impl std::fmt::Display) -> ! {
    eprintln!("relred: error: {message}");
    std::process::exit(2);
}

fn names(alg: &FiniteAlgebra, elements: &[usize]) -> Vec<String> {
    elements.iter().map(|&a| alg.name(a).to_string()).collect()
}

fn class_names(alg: &FiniteAlgebra, classes: &[Vec<usize>]) -> Vec<Vec<String>> {
    classes.iter().map(|c| names(alg, c)).collect()
}

fn signature_override(file_sig: Signature, flag: &Option<String>) -> Signature {
    match flag {
        None => file_sig,
        Some(tokens) => match Signature::parse_tokens(tokens) {
            Ok(sig) => sig,
            Err(e) => input_error(e),
        },
    }
}

fn verification_details(rep: &Representation, report: &VerificationReport) -> Value {
    json!({
        "failures": report.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "faithful": report.faithful(),
        "top_is_equivalence": report.top_is_equivalence,
        "i_preserved": report.i_preserved,
        "domran_preserved": report.domran_preserved,
        "representation": serde_json::to_value(RepresentationFile::from_representation(rep)).unwrap(),
    })
}

fn write_artifact(out: &OutputArg, text: &str) {
    if let Some(path) = &out.output {
        if let Err(e) = std::fs::write(path, text) {
            input_error(format!("cannot write {}: {e}", path.display()));
        }
    }
}

fn rep_artifact(rep: &Representation) -> String {
    to_canonical_json(&RepresentationFile::from_representation(rep))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli.command);
    print!("{}", report.render(cli.json));
    ExitCode::from(report.verdict.exit_code() as u8)
}

fn run(command: &Command) -> Report {
    match command {
        Command::Validate {
            file,
            signature,
            out,
        } => {
            let (alg, file_sig) =
                read_algebra(file).unwrap_or_else(|e| input_error(e));
            let sig = signature_override(file_sig, signature);
            let violations = alg.validate(&sig).unwrap_or_else(|e| input_error(e));
            let warnings = alg.validation_warnings(&sig);
            let mut human = format!(
                "algebra: {} elements, signature {}\nviolations: {}\n",
                alg.n(),
                sig,
                violations.len()
            );
            for v in &violations {
                human.push_str(&format!("  violation: {v}\n"));
            }
            for w in &warnings {
                human.push_str(&format!("  warning: {w}\n"));
            }
            let report = Report {
                command: "validate",
                verdict: Verdict::from_bool(violations.is_empty()),
                config: json!({ "file": file.display().to_string(), "signature": sig.to_string() }),
                details: json!({
                    "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "warnings": warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                }),
                human,
            };
            write_artifact(out, &to_canonical_json(&report.machine_json()));
            report
        }

        Command::Analyze {
            file,
            signature,
            out,
        } => {
            let (alg, file_sig) = read_algebra(file).unwrap_or_else(|e| input_error(e));
            let sig = signature_override(file_sig, signature);
            let analysis = alg.analyze(&sig).unwrap_or_else(|e| input_error(e));
            let mut human = format!("algebra: {} elements, signature {}\n", alg.n(), sig);
            if let Some(div) = analysis.div {
                human.push_str(&format!("div: {}\n", alg.name(div)));
            }
            if let Some(i) = &analysis.i_elements_via_meet {
                human.push_str(&format!("i-elements (meet route): {:?}\n", names(&alg, i)));
            }
            if let Some(i) = &analysis.i_elements_via_complement {
                human.push_str(&format!(
                    "i-elements (complement route): {:?}\n",
                    names(&alg, i)
                ));
            }
            human.push_str(&format!(
                "idempotents: {:?}\n",
                names(&alg, &analysis.idempotents)
            ));
            if let Some(normal) = analysis.normal {
                human.push_str(&format!("normal: {normal}\n"));
            }
            if let Some(classes) = &analysis.dom_classes {
                human.push_str(&format!("⊟ classes: {:?}\n", class_names(&alg, classes)));
            }
            if let Some(classes) = &analysis.ran_classes {
                human.push_str(&format!("⊡ classes: {:?}\n", class_names(&alg, classes)));
            }
            for v in &analysis.violations {
                human.push_str(&format!("  violation: {v}\n"));
            }
            let report = Report {
                command: "analyze",
                verdict: Verdict::from_bool(analysis.violations.is_empty()),
                config: json!({ "file": file.display().to_string(), "signature": sig.to_string() }),
                details: json!({
                    "div": analysis.div.map(|d| alg.name(d).to_string()),
                    "i_elements_via_meet": analysis.i_elements_via_meet.as_deref().map(|i| names(&alg, i)),
                    "i_elements_via_complement": analysis.i_elements_via_complement.as_deref().map(|i| names(&alg, i)),
                    "idempotents": names(&alg, &analysis.idempotents),
                    "normal": analysis.normal,
                    "dom_classes": analysis.dom_classes.as_deref().map(|c| class_names(&alg, c)),
                    "ran_classes": analysis.ran_classes.as_deref().map(|c| class_names(&alg, c)),
                    "violations": analysis.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "warnings": analysis.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                }),
                human,
            };
            write_artifact(out, &to_canonical_json(&report.machine_json()));
            report
        }

        Command::CheckRep {
            file,
            complement,
            require_top_equiv,
            check_i,
            check_domran,
            out,
        } => {
            let mut rep = read_representation(file).unwrap_or_else(|e| input_error(e));
            if let Some(semantics) = complement {
                rep = Representation::new(
                    rep.algebra().clone(),
                    rep.base_size(),
                    rep.images().to_vec(),
                    rep.claimed_signature().clone(),
                    *semantics,
                )
                .unwrap_or_else(|e| input_error(e));
            }
            let options = VerifyOptions {
                require_top_equiv: *require_top_equiv,
                check_i_preservation: *check_i,
                i_route: IRoute::Auto,
                check_domran_preservation: *check_domran,
            };
            let result = rep.verify(&options);
            let mut human = format!(
                "representation: {} elements over base {}\nchecked signature: {}\nsemantics: {}\n",
                rep.algebra().n(),
                rep.base_size(),
                rep.claimed_signature(),
                rep.semantics()
            );
            for f in &result.failures {
                human.push_str(&format!("  failure: {f}\n"));
            }
            human.push_str(&format!("faithful: {}\n", result.faithful()));
            if let Some(teq) = result.top_is_equivalence {
                human.push_str(&format!("top is an equivalence on its field: {teq}\n"));
            }
            let report = Report {
                command: "check-rep",
                verdict: Verdict::from_bool(result.passed()),
                config: json!({
                    "file": file.display().to_string(),
                    "complement": rep.semantics().to_string(),
                    "require_top_equiv": require_top_equiv,
                    "check_i": check_i,
                    "check_domran": check_domran,
                }),
                details: verification_details(&rep, &result),
                human,
            };
            write_artifact(out, &to_canonical_json(&report.machine_json()));
            report
        }

        Command::SearchRep {
            file,
            signature,
            complement,
            require_top_equiv,
            max_base,
            node_limit,
            symmetry_breaking,
            out,
        } => {
            let (alg, file_sig) = read_algebra(file).unwrap_or_else(|e| input_error(e));
            let sig = signature_override(file_sig, signature);
            // invalid inputs are a usage error, not a search failure
            match alg.validate(&sig) {
                Err(e) => input_error(e),
                Ok(violations) if !violations.is_empty() => input_error(format!(
                    "algebra fails validation ({} violations; first: {})",
                    violations.len(),
                    violations[0]
                )),
                Ok(_) => {}
            }
            let cfg = SearchConfig {
                max_base: *max_base,
                semantics: *complement,
                require_top_equiv: *require_top_equiv,
                node_limit: *node_limit,
                symmetry_breaking: *symmetry_breaking,
            };
            let outcome =
                search_representation(&alg, &sig, &cfg).unwrap_or_else(|e| input_error(e));
            let config = json!({
                "file": file.display().to_string(),
                "signature": sig.to_string(),
                "complement": complement.to_string(),
                "require_top_equiv": require_top_equiv,
                "max_base": max_base,
                "node_limit": node_limit,
                "symmetry_breaking": symmetry_breaking,
            });
            let stats = json!({
                "nodes": outcome.stats.nodes,
                "time_ms": outcome.stats.elapsed.as_millis() as u64,
            });
            match outcome.status {
                SearchStatus::Found(rep) => {
                    let human = format!(
                        "found a representation over base {} ({} nodes)\n",
                        rep.base_size(),
                        outcome.stats.nodes
                    );
                    write_artifact(out, &rep_artifact(&rep));
                    Report {
                        command: "search-rep",
                        verdict: Verdict::Pass,
                        config,
                        details: json!({
                            "status": "found",
                            "base_size": rep.base_size(),
                            "stats": stats,
                            "representation": serde_json::to_value(RepresentationFile::from_representation(&rep)).unwrap(),
                        }),
                        human,
                    }
                }
                SearchStatus::NotFoundUpTo(bound) => Report {
                    command: "search-rep",
                    verdict: Verdict::Fail,
                    config,
                    details: json!({ "status": "not_found_up_to", "bound": bound, "stats": stats }),
                    human: format!(
                        "no representation over any base up to {bound} (exhaustive; {} nodes)\n",
                        outcome.stats.nodes
                    ),
                },
                SearchStatus::ResourceExhausted { nodes } => Report {
                    command: "search-rep",
                    verdict: Verdict::Fail,
                    config,
                    details: json!({ "status": "resource_exhausted", "stats": stats }),
                    human: format!("node limit reached after {nodes} nodes; result unknown\n"),
                },
            }
        }

        Command::Quotient { file, out } => {
            let rep = read_representation(file).unwrap_or_else(|e| input_error(e));
            match rep.quotient_with_classes() {
                Err(e) => Report {
                    command: "quotient",
                    verdict: Verdict::Fail,
                    config: json!({ "file": file.display().to_string() }),
                    details: json!({ "error": e.to_string() }),
                    human: format!("quotient not applicable: {e}\n"),
                },
                Ok((quotient, classes)) => {
                    let human = format!(
                        "quotient: base {} → {} ({} classes)\n",
                        rep.base_size(),
                        quotient.base_size(),
                        classes.len()
                    );
                    write_artifact(out, &rep_artifact(&quotient));
                    Report {
                        command: "quotient",
                        verdict: Verdict::Pass,
                        config: json!({ "file": file.display().to_string() }),
                        details: json!({
                            "classes": classes,
                            "representation": serde_json::to_value(RepresentationFile::from_representation(&quotient)).unwrap(),
                        }),
                        human,
                    }
                }
            }
        }

        Command::Interior { file, out } => {
            let rep = read_representation(file).unwrap_or_else(|e| input_error(e));
            match rep.symmetric_interior() {
                Err(e) => Report {
                    command: "interior",
                    verdict: Verdict::Fail,
                    config: json!({ "file": file.display().to_string() }),
                    details: json!({ "error": e.to_string() }),
                    human: format!("interior not applicable: {e}\n"),
                },
                Ok(interior) => {
                    let top = rep.algebra().const_top().unwrap();
                    let human = format!(
                        "symmetric interior applied; ⊤ now has {} pairs (was {})\n",
                        interior.image(top).pair_count(),
                        rep.image(top).pair_count()
                    );
                    write_artifact(out, &rep_artifact(&interior));
                    Report {
                        command: "interior",
                        verdict: Verdict::Pass,
                        config: json!({ "file": file.display().to_string() }),
                        details: json!({
                            "representation": serde_json::to_value(RepresentationFile::from_representation(&interior)).unwrap(),
                        }),
                        human,
                    }
                }
            }
        }

        Command::Pipeline {
            file,
            require_top_equiv,
            route,
            out,
        } => {
            let rep = read_representation(file).unwrap_or_else(|e| input_error(e));
            let options = PipelineOptions {
                finite_base: !require_top_equiv,
                route: *route,
            };
            let config = json!({
                "file": file.display().to_string(),
                "require_top_equiv": require_top_equiv,
                "route": route.map(|r| r.to_string()),
            });
            match rep.injectivize(&options) {
                Err(e) => Report {
                    command: "pipeline",
                    verdict: Verdict::Fail,
                    config,
                    details: json!({ "error": e.to_string() }),
                    human: format!("pipeline rejected the input: {e}\n"),
                },
                Ok(result) => {
                    let alg = result.result.algebra().clone();
                    let mut human = format!("route: {}\n", result.route);
                    for stage in &result.stages {
                        human.push_str(&format!(
                            "stage {}: {} ({} failures)\n",
                            stage.name,
                            if stage.report.passed() { "ok" } else { "FAILED" },
                            stage.report.failures.len()
                        ));
                    }
                    human.push_str(&format!(
                        "i-elements: {:?}\nfinal base: {}\n",
                        names(&alg, &result.i_elements),
                        result.result.base_size()
                    ));
                    let verdict = Verdict::from_bool(result.passed());
                    write_artifact(out, &rep_artifact(&result.result));
                    Report {
                        command: "pipeline",
                        verdict,
                        config,
                        details: json!({
                            "route": result.route.to_string(),
                            "i_elements": names(&alg, &result.i_elements),
                            "stages": result.stages.iter().map(|s| json!({
                                "name": s.name,
                                "passed": s.report.passed(),
                                "failures": s.report.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                            })).collect::<Vec<_>>(),
                            "representation": serde_json::to_value(RepresentationFile::from_representation(&result.result)).unwrap(),
                        }),
                        human,
                    }
                }
            }
        }

        Command::PgValidate { file, out } => {
            let pg = read_partial_group(file).unwrap_or_else(|e| input_error(e));
            let validation = pg.validate();
            let mut human = format!("partial group: {} elements\n", pg.carrier_size());
            for v in &validation.violations {
                human.push_str(&format!("  violation: {v}\n"));
            }
            if let Some(sqrt) = &validation.sqrt {
                human.push_str(&format!("square-root subset: {sqrt:?}\n"));
            }
            let report = Report {
                command: "pg-validate",
                verdict: Verdict::from_bool(validation.passed()),
                config: json!({ "file": file.display().to_string() }),
                details: json!({
                    "violations": validation.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "sqrt": validation.sqrt.as_ref().map(|s| s.iter().copied().collect::<Vec<_>>()),
                }),
                human,
            };
            write_artifact(out, &to_canonical_json(&report.machine_json()));
            report
        }

        Command::PgEmbed {
            file,
            max_degree,
            node_limit,
            out,
        } => {
            let pg = read_partial_group(file).unwrap_or_else(|e| input_error(e));
            let validation = pg.validate();
            if !validation.passed() {
                input_error(format!(
                    "partial group fails validation ({} violations; first: {})",
                    validation.violations.len(),
                    validation.violations[0]
                ));
            }
            let cfg = EmbedConfig {
                max_degree: *max_degree,
                node_limit: *node_limit,
            };
            let outcome = embed_search(&pg, &cfg).unwrap_or_else(|e| input_error(e));
            let config = json!({
                "file": file.display().to_string(),
                "max_degree": max_degree,
                "node_limit": node_limit,
            });
            match outcome.status {
                EmbedStatus::Found(embedding) => {
                    let images: BTreeMap<String, Vec<usize>> = (0..pg.carrier_size())
                        .map(|a| (format!("{a}"), embedding.images[a].one_line().to_vec()))
                        .collect();
                    let ambient = embedding.ambient_group();
                    let human = format!(
                        "embedded at degree {} into a group of order {} ({} nodes)\n",
                        embedding.degree,
                        ambient.order(),
                        outcome.nodes
                    );
                    let details = json!({
                        "status": "found",
                        "degree": embedding.degree,
                        "images_one_line": images,
                        "ambient_group_order": ambient.order(),
                        "nodes": outcome.nodes,
                    });
                    write_artifact(out, &to_canonical_json(&details));
                    Report {
                        command: "pg-embed",
                        verdict: Verdict::Pass,
                        config,
                        details,
                        human,
                    }
                }
                EmbedStatus::NotFoundUpTo(bound) => Report {
                    command: "pg-embed",
                    verdict: Verdict::Fail,
                    config,
                    details: json!({ "status": "not_found_up_to", "bound": bound, "nodes": outcome.nodes }),
                    human: format!(
                        "no embedding at any degree up to {bound} (exhaustive; {} nodes)\n",
                        outcome.nodes
                    ),
                },
                EmbedStatus::ResourceExhausted { nodes } => Report {
                    command: "pg-embed",
                    verdict: Verdict::Fail,
                    config,
                    details: json!({ "status": "resource_exhausted", "nodes": nodes }),
                    human: format!("node limit reached after {nodes} nodes; result unknown\n"),
                },
            }
        }
    }
}
