//! Command-line front end for `fairrisk-core`.
//!
//! [`run_cli`] parses arguments, runs one subcommand, and returns the exit
//! code with everything that would be printed. Exit codes: 0 on success, 1
//! when the computed answer is negative (not fair, nothing found, a
//! counterexample), 2 on usage, input, or construction errors.

pub mod doc;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fairrisk_core::audit::{audit_approx, audit_exact, f_epsilon, Slack};
use fairrisk_core::construct::{
    fairness_difference, find_fair_nontrivial, identity_assignment, interpolate, loss,
    target_lambda, Favors,
};
use fairrisk_core::integral::{
    solve_integral, Objective, Partition, SolveOptions, SolveResult, SolveStatus,
};
use fairrisk_core::model::{derived_stats, ingest_records};
use fairrisk_core::reduction::{
    check_reduction_equation, decode_partition, encode_solution, reduce_subset_sum, reduction_lhs,
    search_reduction, ReducedInstance, SubsetSumInstance,
};
use fairrisk_core::sample::{candidate_rng, equal_p_classes, random_calibrated_assignment};
use fairrisk_core::scalar::{parse_rational, Scalar};
use fairrisk_core::sweep::{theorem_sweep, Candidate, SweepBudget, Witness};
use fairrisk_core::{Error as CoreError, Instance, Rational, RiskAssignment};
use num::traits::Zero;

use crate::doc::{DocError, InstanceDocument};
use crate::report::Node;

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Document { path: PathBuf, source: DocError },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    AnyFair,
    MinLoss,
}

#[derive(Debug, Parser)]
#[command(
    name = "fairrisk",
    version,
    about = "Audit and construct fair risk assignments"
)]
struct Cli {
    /// Seed for randomized commands; recorded in their reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of partitions to examine.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Absolute tolerance for floating-point instances.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an instance from a CSV of feature_id,group,outcome rows.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        /// Write the instance here and print a summary instead.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check calibration and balance, exactly or within --eps.
    Audit {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(short, long)]
        assignment: PathBuf,
        #[arg(long)]
        eps: Option<String>,
    },
    /// Per-group and total loss of an assignment.
    Loss {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(short, long)]
        assignment: PathBuf,
    },
    /// Mix two calibrated assignments; without --lambda, aim for zero fairness difference.
    Interpolate {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(short = 'a', long)]
        first: PathBuf,
        #[arg(short = 'b', long)]
        second: PathBuf,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a fair non-trivial assignment on an equal-base-rate instance.
    FindFair {
        #[arg(short, long)]
        instance: PathBuf,
        /// Extra calibrated candidates.
        #[arg(short, long = "candidate")]
        candidates: Vec<PathBuf>,
        /// Seeded random calibrated candidates to add.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive search over integral assignments.
    SolveIntegral {
        /// An instance or reduced-instance document.
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::AnyFair)]
        objective: ObjectiveArg,
    },
    /// Build the fair-assignment instance for a Subset Sum instance.
    Reduce {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        target: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a subset, a partition, or every partition against the reduction equation.
    VerifyReduction {
        /// A reduced-instance document; alternatively give --weights and --target.
        #[arg(short, long, conflicts_with_all = ["weights", "target"])]
        instance: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        #[arg(long, requires = "weights")]
        target: Option<u64>,
        /// 1-based item indices.
        #[arg(long, value_delimiter = ',', conflicts_with = "partition")]
        subset: Option<Vec<usize>>,
        /// Blocks of 1-based feature indices, e.g. "{1,2}{3}{4}".
        #[arg(long)]
        partition: Option<String>,
    },
    /// Search an instance for counterexamples to the impossibility results.
    TheoremSweep {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, default_value = "1/100")]
        eps: String,
        /// Seeded fractional candidates.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

struct Ctx {
    seed: u64,
    cap: Option<usize>,
    tolerance: f64,
    format: Format,
}

struct Done {
    code: i32,
    stdout: String,
}

impl Ctx {
    fn render(&self, node: &Node) -> String {
        match self.format {
            Format::Text => node.to_text(),
            Format::Json => node.to_json(),
        }
    }
}

pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let ctx = Ctx {
        seed: cli.seed,
        cap: cli.cap,
        tolerance: cli.tolerance,
        format: cli.format,
    };
    match dispatch(&ctx, cli.command) {
        Ok(done) => Outcome {
            code: done.code,
            stdout: done.stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<Done, CliError> {
    match command {
        Command::Ingest { csv, output } => ingest(ctx, &csv, output.as_deref()),
        Command::Audit {
            instance,
            assignment,
            eps,
        } => audit(ctx, &instance, &assignment, eps.as_deref()),
        Command::Loss {
            instance,
            assignment,
        } => loss_cmd(ctx, &instance, &assignment),
        Command::Interpolate {
            instance,
            first,
            second,
            lambda,
            output,
        } => interpolate_cmd(
            ctx,
            &instance,
            &first,
            &second,
            lambda.as_deref(),
            output.as_deref(),
        ),
        Command::FindFair {
            instance,
            candidates,
            samples,
            output,
        } => find_fair(ctx, &instance, &candidates, samples, output.as_deref()),
        Command::SolveIntegral {
            instance,
            objective,
        } => solve(ctx, &instance, objective),
        Command::Reduce {
            weights,
            target,
            output,
        } => reduce(ctx, weights, target, output.as_deref()),
        Command::VerifyReduction {
            instance,
            weights,
            target,
            subset,
            partition,
        } => verify(
            ctx,
            instance.as_deref(),
            weights,
            target,
            subset,
            partition.as_deref(),
        ),
        Command::TheoremSweep {
            instance,
            eps,
            samples,
        } => sweep(ctx, &instance, &eps, samples),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn doc_err(path: &Path) -> impl FnOnce(DocError) -> CliError + '_ {
    move |source| CliError::Document {
        path: path.to_path_buf(),
        source,
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Ok(doc::parse_instance(&read(path)?)
        .map_err(doc_err(path))?
        .instance)
}

fn load_assignment(path: &Path, inst: &Instance) -> Result<RiskAssignment, CliError> {
    doc::parse_assignment(&read(path)?, inst).map_err(doc_err(path))
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

/// Writes `document` to `output` and prints `report`, or prints the document.
fn emit(
    ctx: &Ctx,
    code: i32,
    document: String,
    output: Option<&Path>,
    report: Node,
) -> Result<Done, CliError> {
    let stdout = match output {
        Some(path) => {
            write(path, &document)?;
            ctx.render(&report.with("written", path.display().to_string()))
        }
        None => document,
    };
    Ok(Done { code, stdout })
}

fn rates_node(inst: &Instance) -> Result<Node, CliError> {
    let stats = derived_stats(inst)?;
    Ok(Node::map()
        .with("features", inst.len())
        .with("population", stats.population)
        .with("positive", stats.positive)
        .with("base_rate", stats.base_rate))
}

fn ingest(ctx: &Ctx, csv: &Path, output: Option<&Path>) -> Result<Done, CliError> {
    let table = doc::parse_records(&read(csv)?).map_err(doc_err(csv))?;
    let (instance, divergence) = ingest_records(&table)?;
    let features: Vec<Node> = divergence
        .features
        .iter()
        .map(|f| {
            Node::map()
                .with("id", f.id.as_str())
                .with("p", &f.pooled)
                .with("group_rate", f.group_rate.clone())
                .with("deviation", f.deviation.clone())
        })
        .collect();
    let report = Node::map()
        .with("rows", table.rows.len())
        .with("instance", rates_node(&instance)?)
        .with("max_deviation", divergence.max_deviation())
        .with("divergence", features);
    let document = doc::serialize_instance(&InstanceDocument {
        instance,
        metadata: None,
    });
    emit(ctx, 0, document, output, report)
}

fn balance_node(b: fairrisk_core::Balance) -> Node {
    Node::map().with("ok", b.ok).with("vacuous", b.vacuous)
}

fn slack_node(slack: &Slack) -> Node {
    if slack.is_exact() {
        Node::map().with("exact", true).with("value", &slack.upper)
    } else {
        Node::map()
            .with("exact", false)
            .with("approx", format!("{:.17e}", slack.to_f64()))
    }
}

fn audit(
    ctx: &Ctx,
    inst_path: &Path,
    asg_path: &Path,
    eps: Option<&str>,
) -> Result<Done, CliError> {
    let inst = load_instance(inst_path)?;
    let asg = load_assignment(asg_path, &inst)?;
    let r = audit_exact(&inst, &asg)?;
    let exact = Node::map()
        .with("calibration_ok", r.calibration_ok)
        .with(
            "calibration_residuals",
            Node::map()
                .with("group_1", r.calibration_residuals[0].clone())
                .with("group_2", r.calibration_residuals[1].clone()),
        )
        .with("gamma", r.gamma.clone())
        .with("beta", r.beta.clone())
        .with("balance_positive", balance_node(r.balance_positive))
        .with("balance_negative", balance_node(r.balance_negative))
        .with("estimated_positive", r.estimated_positive.clone())
        .with("parity_gap", &r.parity_gap)
        .with("fair", r.fair);
    let mut report = Node::map()
        .with("instance", rates_node(&inst)?)
        .with("exact", exact);
    let mut fair = r.fair;
    if let Some(eps) = eps {
        let eps = rational_arg("eps", eps)?;
        let a = audit_approx(&inst, &asg, &eps)?;
        let violations: Vec<Node> = a
            .calibration_violations
            .iter()
            .map(|(g, b)| {
                Node::map()
                    .with("group", g.number() as usize)
                    .with("bin", b + 1)
            })
            .collect();
        let approx = Node::map()
            .with("epsilon", &a.epsilon)
            .with("calibration_ok", a.calibration_ok)
            .with("calibration_violations", violations)
            .with("balance_positive", balance_node(a.balance_positive))
            .with("balance_negative", balance_node(a.balance_negative))
            .with("fair", a.fair)
            .with("slack", slack_node(&a.consequence.slack))
            .with(
                "consequence",
                Node::map()
                    .with("approx_perfect", a.consequence.approx_perfect)
                    .with("approx_equal_rates", a.consequence.approx_equal_rates),
            );
        report = report.with("approx", approx);
        fair = a.fair;
    }
    Ok(Done {
        code: if fair { 0 } else { 1 },
        stdout: ctx.render(&report),
    })
}

fn loss_cmd(ctx: &Ctx, inst_path: &Path, asg_path: &Path) -> Result<Done, CliError> {
    let inst = load_instance(inst_path)?;
    let asg = load_assignment(asg_path, &inst)?;
    let l = loss(&inst, &asg)?;
    let identity = loss(&inst, &identity_assignment(&inst)?)?;
    let report = Node::map()
        .with("per_group", l.per_group)
        .with("total", l.total)
        .with("identity_total", identity.total);
    Ok(Done {
        code: 0,
        stdout: ctx.render(&report),
    })
}

fn difference_node(inst: &Instance, asg: &RiskAssignment) -> Result<Node, CliError> {
    let d = fairness_difference(inst, asg)?;
    let favors = match d.favors {
        Favors::GroupOne => "group 1",
        Favors::GroupTwo => "group 2",
        Favors::Both => "both",
    };
    Ok(Node::map().with("d", &d.d).with("favors", favors))
}

fn interpolate_cmd(
    ctx: &Ctx,
    inst_path: &Path,
    first: &Path,
    second: &Path,
    lambda: Option<&str>,
    output: Option<&Path>,
) -> Result<Done, CliError> {
    let inst = load_instance(inst_path)?;
    let a1 = load_assignment(first, &inst)?;
    let a2 = load_assignment(second, &inst)?;
    let lambda = match lambda {
        Some(text) => rational_arg("lambda", text)?,
        None => {
            let d1 = fairness_difference(&inst, &a1)?.d;
            let d2 = fairness_difference(&inst, &a2)?.d;
            target_lambda(&d1, &d2, &Rational::zero())?
        }
    };
    let mixed = interpolate(&inst, &a1, &a2, &lambda)?;
    let report = Node::map()
        .with("lambda", &lambda)
        .with("first", difference_node(&inst, &a1)?)
        .with("second", difference_node(&inst, &a2)?)
        .with("result", difference_node(&inst, &mixed)?)
        .with("fair", audit_exact(&inst, &mixed)?.fair);
    emit(
        ctx,
        0,
        doc::serialize_assignment(&mixed, &inst),
        output,
        report,
    )
}

fn find_fair(
    ctx: &Ctx,
    inst_path: &Path,
    candidate_paths: &[PathBuf],
    samples: usize,
    output: Option<&Path>,
) -> Result<Done, CliError> {
    let inst = load_instance(inst_path)?;
    let mut candidates = vec![identity_assignment(&inst)?];
    for path in candidate_paths {
        candidates.push(load_assignment(path, &inst)?);
    }
    let classes = equal_p_classes(&inst);
    candidates.extend(
        (0..samples as u64).map(|i| {
            random_calibrated_assignment(&mut candidate_rng(ctx.seed, i), &inst, &classes)
        }),
    );
    let report = Node::map()
        .with("seed", ctx.seed)
        .with("candidates", candidates.len());
    match find_fair_nontrivial(&inst, &candidates) {
        Ok(Some(asg)) => {
            let bins = asg.nonempty_bins(&inst, 0.0);
            let report = report
                .with("found", true)
                .with("nonempty_bins", bins)
                .with("difference", difference_node(&inst, &asg)?);
            emit(
                ctx,
                0,
                doc::serialize_assignment(&asg, &inst),
                output,
                report,
            )
        }
        Ok(None) => Ok(Done {
            code: 1,
            stdout: ctx.render(&report.with("found", false)),
        }),
        Err(CoreError::UnequalBaseRates(r1, r2)) => Ok(Done {
            code: 1,
            stdout: ctx.render(
                &report
                    .with("found", false)
                    .with("reason", format!("unequal base rates {r1} and {r2}")),
            ),
        }),
        Err(e) => Err(e.into()),
    }
}

fn solve_node<S: Scalar>(result: &SolveResult<S>, show: impl Fn(&S) -> Node) -> Node {
    let status = match result.status {
        SolveStatus::Found => "found",
        SolveStatus::None => "none",
        SolveStatus::BudgetExceeded => "budget-exceeded",
    };
    let best = result.best.as_ref().map(|s| {
        Node::map()
            .with("partition", s.partition.to_string())
            .with(
                "scores",
                Node::list(s.assignment.scores().iter().map(&show)),
            )
            .with("loss", Node::list(s.loss.per_group.iter().map(&show)))
            .with("total_loss", show(&s.loss.total))
    });
    Node::map()
        .with("status", status)
        .with("explored", result.explored)
        .with("best", best.unwrap_or(Node::Null))
}

fn solve(ctx: &Ctx, path: &Path, objective: ObjectiveArg) -> Result<Done, CliError> {
    let text = read(path)?;
    let objective = match objective {
        ObjectiveArg::AnyFair => Objective::AnyFair,
        ObjectiveArg::MinLoss => Objective::MinLoss,
    };
    let kind = doc::document_kind(&text).map_err(doc_err(path))?;
    let (status, report) = if kind == "reduced-instance" {
        let ri = doc::parse_reduced(&text).map_err(doc_err(path))?;
        let opts = SolveOptions::new::<f64>(objective)
            .with_cap(ctx.cap)
            .with_tolerance(ctx.tolerance);
        let result = solve_integral(&ri.instance, opts)?;
        let node = solve_node(&result, |x| Node::Str(format!("{x:.17e}")));
        (
            result.status,
            node.with("mode", "float")
                .with("tolerance", format!("{:e}", ctx.tolerance)),
        )
    } else {
        let inst = doc::parse_instance(&text).map_err(doc_err(path))?.instance;
        let opts = SolveOptions::new::<Rational>(objective).with_cap(ctx.cap);
        let result = solve_integral(&inst, opts)?;
        (
            result.status,
            solve_node(&result, |x: &Rational| Node::from(x)).with("mode", "exact"),
        )
    };
    Ok(Done {
        code: if status == SolveStatus::Found { 0 } else { 1 },
        stdout: ctx.render(&report),
    })
}

fn reduced_node(ri: &ReducedInstance) -> Node {
    Node::map()
        .with("m", ri.m)
        .with("dropped", Node::list(ri.dropped.iter().map(|i| i + 1)))
        .with("w_hat", ri.w_hat.clone())
        .with("gamma", &ri.gamma)
        .with("target_value", ri.target_value())
}

fn reduce(
    ctx: &Ctx,
    weights: Vec<u64>,
    target: u64,
    output: Option<&Path>,
) -> Result<Done, CliError> {
    let ss = SubsetSumInstance::new(weights, target)?;
    let ri = reduce_subset_sum(&ss)?;
    let report = reduced_node(&ri).with("features", ri.feature_count());
    emit(ctx, 0, doc::serialize_reduced(&ri), output, report)
}

/// Parses `{1,2}{3}{4}` with 1-based indices.
fn parse_partition(text: &str) -> Result<Partition, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "--partition: cannot read {text:?}, expected blocks like {{1,2}}{{3}}"
        ))
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(bad)?;
    let mut blocks = Vec::new();
    for block in inner.split("}{") {
        let items = block
            .split(',')
            .map(|s| s.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        blocks.push(items);
    }
    Partition::new(blocks).map_err(|e| CliError::Usage(format!("--partition: {e}")))
}

fn verify(
    ctx: &Ctx,
    instance: Option<&Path>,
    weights: Option<Vec<u64>>,
    target: Option<u64>,
    subset: Option<Vec<usize>>,
    partition: Option<&str>,
) -> Result<Done, CliError> {
    let ri = match (instance, weights, target) {
        (Some(path), None, None) => doc::parse_reduced(&read(path)?).map_err(doc_err(path))?,
        (None, Some(w), Some(t)) => reduce_subset_sum(&SubsetSumInstance::new(w, t)?)?,
        _ => {
            return Err(CliError::Usage(
                "give --instance, or both --weights and --target".into(),
            ))
        }
    };
    let kept = ri.kept_weights();
    let report = reduced_node(&ri);
    let checked = |q: &Partition, report: Node| -> Result<(bool, Node), CliError> {
        let holds = check_reduction_equation(&ri, q)?;
        let decoded = decode_partition(&ri, q).ok();
        let sum = decoded
            .as_ref()
            .map(|s| s.iter().map(|&i| kept[i]).sum::<u64>());
        let report = report
            .with("partition", q.to_string())
            .with("lhs", reduction_lhs(&ri, q)?.to_string())
            .with("equation_holds", holds)
            .with(
                "decoded",
                decoded.map(|s| Node::list(s.iter().map(|i| i + 1))),
            )
            .with("decoded_sum", sum);
        Ok((holds, report))
    };
    let (ok, report) = if let Some(subset) = subset {
        if subset.iter().any(|&i| i == 0) {
            return Err(CliError::Usage("--subset: indices are 1-based".into()));
        }
        let zero_based: Vec<usize> = subset.iter().map(|i| i - 1).collect();
        let q = encode_solution(&ri, &zero_based)?;
        checked(&q, report)?
    } else if let Some(text) = partition {
        checked(&parse_partition(text)?, report)?
    } else {
        let search = search_reduction(&ri, ctx.cap)?;
        let solvable = !ri.source.solutions().is_empty();
        let decoded: Vec<Option<Vec<usize>>> = search
            .passing
            .iter()
            .map(|q| decode_partition(&ri, q).ok())
            .collect();
        let sound = decoded.iter().all(|s| {
            s.as_ref()
                .is_some_and(|s| s.iter().map(|&i| kept[i]).sum::<u64>() == ri.source.target)
        });
        let agrees = !search.exhausted || (!search.passing.is_empty()) == solvable;
        let report = report
            .with("explored", search.explored)
            .with("exhausted", search.exhausted)
            .with(
                "passing",
                Node::list(search.passing.iter().map(|q| q.to_string())),
            )
            .with("subset_sum_solvable", solvable)
            .with("decodes_to_solutions", sound)
            .with("agrees", agrees && search.exhausted);
        (agrees && sound && search.exhausted, report)
    };
    Ok(Done {
        code: if ok { 0 } else { 1 },
        stdout: ctx.render(&report),
    })
}

fn witness_node(inst: &Instance, w: &Option<Witness>) -> Node {
    match w {
        None => Node::Null,
        Some(w) => {
            let candidate = match &w.candidate {
                Candidate::Integral(q) => Node::map().with("integral", q.to_string()),
                Candidate::Fractional(i) => Node::map().with("fractional", *i),
            };
            let bins: Vec<Node> = w
                .assignment
                .scores()
                .iter()
                .enumerate()
                .map(|(b, score)| {
                    let allocation = inst
                        .features()
                        .iter()
                        .zip(w.assignment.allocation())
                        .filter(|(_, row)| !row[b].is_zero())
                        .map(|(f, row)| (f.id.clone(), Node::from(&row[b])))
                        .collect();
                    Node::map()
                        .with("score", score)
                        .with("allocation", Node::Map(allocation))
                })
                .collect();
            candidate.with("bins", bins)
        }
    }
}

fn sweep(ctx: &Ctx, path: &Path, eps: &str, samples: usize) -> Result<Done, CliError> {
    let inst = load_instance(path)?;
    let eps = rational_arg("eps", eps)?;
    let budget = SweepBudget {
        integral_cap: ctx.cap.unwrap_or(SweepBudget::default().integral_cap),
        fractional_samples: samples,
    };
    let r = theorem_sweep(&inst, budget, &eps, ctx.seed)?;
    let report = Node::map()
        .with("seed", r.seed)
        .with("epsilon", &r.epsilon)
        .with("slack", slack_node(&f_epsilon(&eps)?))
        .with("instance", rates_node(&inst)?)
        .with("equal_base_rates", r.equal_base_rates)
        .with("perfect_prediction", r.perfect_prediction)
        .with("integral_explored", r.integral_explored)
        .with("budget_exhausted", r.budget_exhausted)
        .with("fractional_explored", r.fractional_explored)
        .with("exact_fair_found", r.exact_fair_found)
        .with("approx_fair_found", r.approx_fair_found)
        .with("fair_example", witness_node(&inst, &r.fair_example))
        .with(
            "exact_counterexample",
            witness_node(&inst, &r.exact_counterexample),
        )
        .with(
            "approx_counterexample",
            witness_node(&inst, &r.approx_counterexample),
        )
        .with("counterexamples", r.counterexamples());
    Ok(Done {
        code: if r.counterexamples() == 0 { 0 } else { 1 },
        stdout: ctx.render(&report),
    })
}
