//! `n3ex`: parse, normalize, translate, reason and compare existential N3.

mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use n3ex::chase::{
    chase, critical_instance, hom_equivalent, rules_equivalent, ChaseConfig, ChaseReport, Instance, Strategy, Verdict,
};
use n3ex::gen::{deep_taxonomy, deep_taxonomy_split, synthetic_lubm, LubmConfig};
use n3ex::oracle::{n3_equivalent, satisfies, Equivalence, Method, OracleConfig};
use n3ex::parser::{parse_n3_document, parse_rules_document, serialize_n3_with, serialize_rules_with};
use n3ex::pnf::{to_pnf, Piece};
use n3ex::translate::{instance_to_n3, inverse_translate, translate_set, TranslateError};
use n3ex::{serialize_n3, serialize_rules, ExRule, Formula, N3Term, ParseError, RuleError, RuleSet, Statement, Triple};
use serde::Serialize;

use input::{load_formula, load_rules, prepare, read, write_output, Format, PhaseSeconds, Source};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "n3ex",
    version,
    about = "Existential N3 toolkit: normalization, translation to existential rules, and a chase engine"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an N3 or rule document and print it back.
    Parse {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split an N3 document into pieces and remove body blank nodes.
    Pnf {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate N3 to existential rules or back.
    Translate {
        #[arg(long, value_enum)]
        to: Target,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write ground facts to this file instead of the rule output.
        #[arg(long, value_name = "FILE")]
        facts_split: Option<PathBuf>,
    },
    /// Run the chase and print the resulting instance.
    Chase(ChaseArgs),
    /// Compare two N3 documents over every interpretation of a finite universe.
    EqN3 {
        a: PathBuf,
        b: PathBuf,
        /// Constants added beyond those the documents mention.
        #[arg(long, default_value_t = 2)]
        spares: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long)]
        max_clauses: Option<usize>,
    },
    /// Compare two rule sets.
    EqRules(EqRulesArgs),
    /// Generate benchmark inputs.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Time the whole pipeline on a file or generated dataset.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Rules,
    N3,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Enumerate,
    Symbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Restricted,
    Oblivious,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    /// N3 when the rules came from N3, rule syntax otherwise.
    Auto,
    N3,
    Rules,
}

#[derive(Clone, Copy, ValueEnum)]
enum EqMode {
    /// Each side must entail every rule of the other.
    Entailment,
    /// Chase both sides on one database and compare the results.
    Universal,
}

#[derive(Args)]
struct Limits {
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_nulls: u64,
    #[arg(long, value_enum, default_value = "restricted")]
    strategy: StrategyArg,
}

impl Limits {
    fn config(&self) -> ChaseConfig {
        ChaseConfig {
            max_steps: self.max_steps,
            max_nulls: self.max_nulls,
            strategy: match self.strategy {
                StrategyArg::Restricted => Strategy::Restricted,
                StrategyArg::Oblivious => Strategy::Oblivious,
            },
        }
    }
}

#[derive(Args)]
struct ChaseArgs {
    /// Rules as N3 or rule syntax.
    rules: PathBuf,
    /// Database files: .erl, .n3, .csv or .tsv.
    #[arg(long)]
    facts: Vec<PathBuf>,
    /// Keep ground facts of the rule document as body-less rules.
    #[arg(long)]
    facts_as_rules: bool,
    #[command(flatten)]
    limits: Limits,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    format: OutFormat,
    /// Print the triples matching a pattern; `?` or `?name` is a wildcard.
    #[arg(long, num_args = 3, value_names = ["S", "P", "O"], allow_hyphen_values = true)]
    query: Option<Vec<String>>,
    /// Write the report here instead of standard error.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Do not print the report.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Args)]
struct EqRulesArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value = "entailment")]
    mode: EqMode,
    /// Database for universal mode.
    #[arg(long)]
    database: Vec<PathBuf>,
    /// Add the critical instance to the database in universal mode.
    #[arg(long)]
    critical: bool,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Deep Taxonomy: one fact and three subclass rules per level.
    Dt {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        /// Write facts.n3 and rules.n3 here instead of one document to stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// University-shaped facts and rules with existential heads.
    Lubm {
        #[arg(long, default_value_t = 10_000)]
        facts: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        existential_rules: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes rules and facts files here.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "n3")]
        format: GenFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    N3,
    Rules,
}

#[derive(Args)]
struct BenchArgs {
    /// Rule document; omit when using --dataset.
    rules: Option<PathBuf>,
    #[arg(long)]
    facts: Vec<PathBuf>,
    /// Generated dataset: `dt:<depth>` or `lubm:<facts>`.
    #[arg(long, conflicts_with = "rules")]
    dataset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    facts_as_rules: bool,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    dataset: String,
    facts: usize,
    rules: usize,
    seconds: PhaseSeconds,
    derived: usize,
    status: &'static str,
    atoms: usize,
    steps: u64,
    nulls: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let input_error = e.chain().any(|c| {
                c.is::<ParseError>()
                    || c.is::<TranslateError>()
                    || c.is::<RuleError>()
                    || c.is::<n3ex::load::LoadError>()
            });
            ExitCode::from(if input_error { EXIT_PARSE } else { EXIT_USAGE })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Parse { input, output } => cmd_parse(&input, output.as_deref()),
        Cmd::Pnf { input, output } => cmd_pnf(&input, output.as_deref()),
        Cmd::Translate {
            to,
            input,
            output,
            facts_split,
        } => cmd_translate(to, &input, output.as_deref(), facts_split.as_deref()),
        Cmd::Chase(args) => cmd_chase(args),
        Cmd::EqN3 {
            a,
            b,
            spares,
            method,
            max_clauses,
        } => cmd_eq_n3(&a, &b, spares, method, max_clauses),
        Cmd::EqRules(args) => cmd_eq_rules(args),
        Cmd::Gen { what } => cmd_gen(what),
        Cmd::Bench(args) => cmd_bench(args),
    }
}

fn cmd_parse(input: &Path, output: Option<&Path>) -> Result<u8> {
    let text = read(input)?;
    let name = || input.display().to_string();
    let out = match Format::of(input)? {
        Format::N3 => {
            let doc = parse_n3_document(&text).with_context(name)?;
            serialize_n3_with(&doc.formula, &doc.prefixes)
        }
        Format::Rules => {
            let doc = parse_rules_document(&text).with_context(name)?;
            serialize_rules_with(&doc.rules, &doc.prefixes)
        }
        _ => bail!("{}: expected an N3 or rule document", input.display()),
    };
    write_output(output, &out)?;
    Ok(0)
}

fn cmd_pnf(input: &Path, output: Option<&Path>) -> Result<u8> {
    let text = read(input)?;
    let doc = parse_n3_document(&text).with_context(|| input.display().to_string())?;
    let pieces = to_pnf(&doc.formula);
    let rules = pieces.iter().filter(|p| p.is_rule()).count();
    eprintln!(
        "{} pieces: {} atomic, {} rules",
        pieces.len(),
        pieces.len() - rules,
        rules
    );
    let mut out = String::new();
    for (k, p) in pieces.iter().enumerate() {
        out.push_str(&format!(
            "# piece {k}: {}\n",
            match p {
                Piece::Atomic(_) => "atomic",
                Piece::Rule(_) => "rule",
            }
        ));
        out.push_str(&serialize_n3_with(&p.to_formula(), &doc.prefixes));
        out.push('\n');
    }
    write_output(output, &out)?;
    Ok(0)
}

fn cmd_translate(to: Target, input: &Path, output: Option<&Path>, facts_split: Option<&Path>) -> Result<u8> {
    let text = read(input)?;
    let name = || input.display().to_string();
    match to {
        Target::Rules => {
            let doc = parse_n3_document(&text).with_context(name)?;
            let rules = translate_set(&to_pnf(&doc.formula)).with_context(name)?;
            let rules = match facts_split {
                Some(path) => {
                    let (rules, facts) = rules.split_facts();
                    let facts = RuleSet::new(facts.into_iter().map(ExRule::fact).collect::<Result<_, _>>()?)?;
                    write_output(Some(path), &serialize_rules_with(&facts, &doc.prefixes))?;
                    rules
                }
                None => rules,
            };
            write_output(output, &serialize_rules_with(&rules, &doc.prefixes))?;
        }
        Target::N3 => {
            if facts_split.is_some() {
                bail!("--facts-split only applies to --to rules");
            }
            let doc = parse_rules_document(&text).with_context(name)?;
            let f = inverse_translate(&doc.rules).with_context(name)?;
            write_output(output, &serialize_n3_with(&f, &doc.prefixes))?;
        }
    }
    Ok(0)
}

fn status_of(report: &ChaseReport) -> &'static str {
    if report.is_complete() {
        "complete"
    } else {
        "truncated"
    }
}

/// Runs the chase on prepared input and fills in the report.
fn reason(
    dataset: String,
    prepared: input::Prepared,
    cfg: &ChaseConfig,
) -> Result<(Instance, ChaseReport, BenchReport)> {
    let mut seconds = prepared.seconds;
    let t = Instant::now();
    let db = Instance::from_atoms(&prepared.db)?;
    let facts = db.len();
    let (inst, report) = chase(&prepared.rules, db, cfg)?;
    seconds.reason = t.elapsed().as_secs_f64();
    let bench = BenchReport {
        dataset,
        facts,
        rules: prepared.rule_count,
        seconds,
        derived: report.derived,
        status: status_of(&report),
        atoms: report.atoms,
        steps: report.steps,
        nulls: report.nulls,
    };
    Ok((inst, report, bench))
}

fn cmd_chase(args: ChaseArgs) -> Result<u8> {
    let rules_format = Format::of(&args.rules)?;
    let facts: Vec<Source> = args.facts.iter().cloned().map(Source::Path).collect();
    let prepared = prepare(&Source::Path(args.rules.clone()), &facts, args.facts_as_rules)?;
    let (inst, report, bench) = reason(args.rules.display().to_string(), prepared, &args.limits.config())?;

    let out = if let Some(q) = &args.query {
        let pattern = parse_query(q)?;
        let triples = instance_to_n3(&inst)?;
        let hits: Vec<Statement> = triples
            .triples()
            .filter(|t| query_matches(&pattern, t))
            .cloned()
            .map(Statement::Atomic)
            .collect();
        eprintln!("{} matching triples", hits.len());
        serialize_n3(&Formula::new(hits))
    } else {
        let n3 = match args.format {
            OutFormat::Auto => rules_format == Format::N3,
            OutFormat::N3 => true,
            OutFormat::Rules => false,
        };
        if n3 {
            serialize_n3(&instance_to_n3(&inst)?)
        } else {
            inst.to_string()
        }
    };
    write_output(args.output.as_deref(), &out)?;

    let json = serde_json::to_string_pretty(&bench)?;
    match (&args.report, args.quiet) {
        (Some(p), _) => write_output(Some(p), &format!("{json}\n"))?,
        (None, false) => eprintln!("{json}"),
        (None, true) => {}
    }
    if report.is_complete() {
        Ok(0)
    } else {
        eprintln!("chase truncated: {:?} limit reached", report.status);
        Ok(EXIT_INCONCLUSIVE)
    }
}

/// A query pattern: wildcards become blank nodes, repeated names must
/// match the same term.
fn parse_query(q: &[String]) -> Result<Triple> {
    let terms: Vec<String> = q
        .iter()
        .enumerate()
        .map(|(i, t)| match t.strip_prefix('?') {
            Some("") => format!("_:any{i}"),
            Some(name) => format!("_:q_{name}"),
            None => t.clone(),
        })
        .collect();
    let src = format!("{} {} {} .", terms[0], terms[1], terms[2]);
    let f = n3ex::parse_n3(&src).context("invalid query")?;
    let t = f.triples().next().cloned().context("invalid query")?;
    Ok(t)
}

fn query_matches(pattern: &Triple, t: &Triple) -> bool {
    let mut bound: Vec<(&N3Term, &N3Term)> = Vec::new();
    for (p, x) in pattern.terms().into_iter().zip(t.terms()) {
        match p {
            N3Term::Constant(_) => {
                if p != x {
                    return false;
                }
            }
            _ => match bound.iter().find(|(v, _)| *v == p) {
                Some((_, y)) if *y != x => return false,
                Some(_) => {}
                None => bound.push((p, x)),
            },
        }
    }
    true
}

fn cmd_eq_n3(a: &Path, b: &Path, spares: usize, method: MethodArg, max_clauses: Option<usize>) -> Result<u8> {
    let f = load_formula(a)?;
    let g = load_formula(b)?;
    let mut cfg = OracleConfig {
        spares,
        method: match method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Enumerate => Method::Enumerate,
            MethodArg::Symbolic => Method::Symbolic,
        },
        ..OracleConfig::default()
    };
    if let Some(m) = max_clauses {
        cfg.max_clauses = m;
    }
    match n3_equivalent(&f, &g, &cfg) {
        Ok(Equivalence::Equivalent) => {
            println!("equivalent");
            Ok(0)
        }
        Ok(Equivalence::Different(m)) => {
            let side = if satisfies(&m, &f)? { a } else { b };
            println!("not equivalent");
            println!("interpretation satisfying only {}: {m}", side.display());
            Ok(0)
        }
        Err(e) => {
            println!("inconclusive: {e}");
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn cmd_eq_rules(args: EqRulesArgs) -> Result<u8> {
    let a = load_rules(&args.a)?;
    let b = load_rules(&args.b)?;
    let cfg = args.limits.config();
    let verdict = match args.mode {
        EqMode::Entailment => {
            if !args.database.is_empty() || args.critical {
                bail!("--database and --critical only apply to --mode universal");
            }
            rules_equivalent(&a, &b, &cfg)?
        }
        EqMode::Universal => {
            let sources: Vec<Source> = args.database.iter().cloned().map(Source::Path).collect();
            let empty = Source::Text {
                name: "empty".into(),
                format: Format::Rules,
                text: String::new(),
            };
            let mut db = prepare(&empty, &sources, false)?.db;
            if args.critical {
                db.extend(
                    critical_instance(&[&a, &b])?
                        .sorted_atoms()
                        .into_iter()
                        .map(ground_to_atom),
                );
            }
            eprintln!("note: universal mode only compares the chase results on the given database");
            let db = Instance::from_atoms(&db)?;
            let (ia, ra) = chase(&a, db.clone(), &cfg)?;
            let (ib, rb) = chase(&b, db, &cfg)?;
            if !ra.is_complete() || !rb.is_complete() {
                Verdict::Inconclusive
            } else if hom_equivalent(&ia, &ib) {
                Verdict::Equivalent
            } else {
                Verdict::NotEquivalent
            }
        }
    };
    Ok(match verdict {
        Verdict::Equivalent => {
            println!("equivalent");
            0
        }
        Verdict::NotEquivalent => {
            println!("not equivalent");
            0
        }
        Verdict::Inconclusive => {
            println!("inconclusive: a chase hit its limits");
            EXIT_INCONCLUSIVE
        }
    })
}

fn ground_to_atom(g: n3ex::chase::GroundAtom) -> n3ex::Atom {
    n3ex::Atom {
        predicate: g.predicate,
        args: g
            .args
            .into_iter()
            .map(|t| match t {
                n3ex::chase::GroundTerm::Constant(c) => n3ex::RuleTerm::Constant(c),
                n3ex::chase::GroundTerm::Null(_) => unreachable!("critical instances are ground"),
            })
            .collect(),
    }
}

fn facts_formula(facts: &[n3ex::Atom]) -> Result<Formula> {
    let rs = RuleSet::new(facts.iter().cloned().map(ExRule::fact).collect::<Result<_, _>>()?)?;
    Ok(inverse_translate(&rs)?)
}

fn cmd_gen(what: GenCmd) -> Result<u8> {
    match what {
        GenCmd::Dt { depth, out_dir } => {
            let depth = depth as usize;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                    let (facts, rules) = deep_taxonomy_split(depth)?;
                    write_output(Some(&dir.join("facts.n3")), &serialize_n3(&facts))?;
                    write_output(Some(&dir.join("rules.n3")), &serialize_n3(&rules))?;
                }
                None => write_output(None, &serialize_n3(&deep_taxonomy(depth)?))?,
            }
        }
        GenCmd::Lubm {
            facts,
            existential_rules,
            seed,
            out_dir,
            format,
        } => {
            let d = synthetic_lubm(&LubmConfig {
                facts,
                existential_rules: existential_rules as usize,
                seed,
            })?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
            match format {
                GenFormat::N3 => {
                    write_output(
                        Some(&out_dir.join("rules.n3")),
                        &serialize_n3(&inverse_translate(&d.rules)?),
                    )?;
                    write_output(
                        Some(&out_dir.join("facts.n3")),
                        &serialize_n3(&facts_formula(&d.facts)?),
                    )?;
                }
                GenFormat::Rules => {
                    let fs = RuleSet::new(d.facts.into_iter().map(ExRule::fact).collect::<Result<_, _>>()?)?;
                    write_output(Some(&out_dir.join("rules.erl")), &serialize_rules(&d.rules))?;
                    write_output(Some(&out_dir.join("facts.erl")), &serialize_rules(&fs))?;
                }
            }
        }
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8> {
    let (dataset, rules, facts) = match (&args.dataset, &args.rules) {
        (Some(dataset), _) => {
            let (kind, size) = dataset
                .split_once(':')
                .with_context(|| format!("dataset `{dataset}` should look like dt:<depth> or lubm:<facts>"))?;
            let size: usize = size.parse().with_context(|| format!("bad size in `{dataset}`"))?;
            match kind {
                "dt" => {
                    let text = serialize_n3(&deep_taxonomy(size)?);
                    let rules = Source::Text {
                        name: dataset.clone(),
                        format: Format::N3,
                        text,
                    };
                    (dataset.clone(), rules, Vec::new())
                }
                "lubm" => {
                    let d = synthetic_lubm(&LubmConfig {
                        facts: size,
                        seed: args.seed,
                        ..LubmConfig::default()
                    })?;
                    let rules = Source::Text {
                        name: format!("{dataset}/rules"),
                        format: Format::N3,
                        text: serialize_n3(&inverse_translate(&d.rules)?),
                    };
                    let facts = Source::Text {
                        name: format!("{dataset}/facts"),
                        format: Format::N3,
                        text: serialize_n3(&facts_formula(&d.facts)?),
                    };
                    (dataset.clone(), rules, vec![facts])
                }
                _ => bail!("unknown dataset kind `{kind}`, expected dt or lubm"),
            }
        }
        (None, Some(path)) => (
            path.display().to_string(),
            Source::Path(path.clone()),
            args.facts.iter().cloned().map(Source::Path).collect(),
        ),
        (None, None) => bail!("give a rule document or --dataset"),
    };
    let prepared = prepare(&rules, &facts, args.facts_as_rules)?;
    let (_, report, bench) = reason(dataset, prepared, &args.limits.config())?;
    println!("{}", serde_json::to_string_pretty(&bench)?);
    Ok(if report.is_complete() { 0 } else { EXIT_INCONCLUSIVE })
}
