//! Command-line front end. [`run`] does all the work so tests can call it
//! in-process; `main` only wires it to the real streams.

use std::io::Write;
use std::path::Path;

use actualcause::corpus;
use actualcause::dsl::{self, print_model, ModelDocument};
use actualcause::transforms::{
    build_stability_model, check_formula_agreement, is_conservative_extension,
    is_conservative_extension_extended, kill_all_witnesses, respects_equations, Counterexample,
    ExtensionReport,
};
use actualcause::{
    best_witnesses, find_all_causes_with, is_actual_cause_with, witness_world, CandidateCause,
    CausalFormula, CausalModel, Context, Error, ExtendedCausalModel, Intervention, ModelRef,
    RuleVariant, SearchConfig, VariableId, Verdict, Witness,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "actualcause",
    version,
    about = "Actual causality in structural causal models"
)]
struct Cli {
    /// Maximum number of model solves per query.
    #[arg(long, global = true, default_value_t = SearchConfig::default().budget)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file, or the name of a bundled corpus model.
    #[arg(short, long)]
    model: String,
    /// Context name declared in the model file.
    #[arg(short, long)]
    context: String,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// The base model.
    #[arg(long = "m1", alias = "base")]
    m1: String,
    /// The candidate extension.
    #[arg(long = "m2", alias = "extension")]
    m2: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Updated,
    Original,
    Extended,
}

impl From<VariantArg> for RuleVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Updated => RuleVariant::Updated,
            VariantArg::Original => RuleVariant::Original,
            VariantArg::Extended => RuleVariant::Extended,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the actual world, optionally under an intervention.
    Solve {
        #[command(flatten)]
        m: ModelArgs,
        /// Intervention such as "A=1, B=0".
        #[arg(long = "do")]
        intervene: Option<String>,
    },
    /// Evaluate a causal formula such as "[A<-1](D=0)".
    Eval {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(short, long)]
        formula: String,
    },
    /// Decide whether a conjunction is an actual cause of an effect.
    Cause {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long)]
        cause: String,
        #[arg(long)]
        effect: String,
        #[arg(long, value_enum, default_value = "updated")]
        variant: VariantArg,
        /// Stop at the first witness.
        #[arg(long)]
        first: bool,
        #[arg(long)]
        json: bool,
    },
    /// List every actual cause of an effect.
    Causes {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long)]
        effect: String,
        #[arg(long, value_enum, default_value = "updated")]
        variant: VariantArg,
        /// Largest number of conjuncts to try.
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Witnesses whose worlds are most normal, ignoring the normality threshold.
    BestWitnesses {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long)]
        cause: String,
        #[arg(long)]
        effect: String,
    },
    /// Check that one model conservatively extends another.
    Conservative {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        json: bool,
    },
    /// Conservative extension check including the normality condition.
    Ce {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        json: bool,
    },
    /// Compare random causal formulas over the base model's variables.
    Agree {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Add variables until the cause has no witness under the original rule;
    /// prints the resulting model.
    KillWitnesses {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long)]
        cause: String,
        /// A single event such as "D=1".
        #[arg(long)]
        effect: String,
    },
    /// Print model number N of the stability chain.
    Stability {
        #[arg(short, long)]
        n: usize,
    },
    /// Check that the model's normality order penalizes deviations on the
    /// given variables.
    Respects {
        #[command(flatten)]
        m: ModelArgs,
        /// Variables such as "D', D''".
        #[arg(long)]
        vars: String,
    },
    /// Bundled example models.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// Run every bundled case and report pass or fail.
    Run {
        /// Include slow cases.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// List bundled model names.
    List,
    /// Print a bundled model.
    Show { name: String },
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let config = SearchConfig {
        budget: cli.budget,
        ..SearchConfig::default()
    };
    match execute(cli.command, &config, out) {
        Ok(code) => code,
        Err(CliError::Engine(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

enum CliError {
    Engine(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn load(spec: &str) -> std::result::Result<ModelDocument, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(dsl::parse_model(&std::fs::read_to_string(path)?)?);
    }
    let stem = spec.strip_suffix(".cm").unwrap_or(spec);
    if corpus::model_source(stem).is_some() {
        return Ok(corpus::load_model(stem)?);
    }
    Err(CliError::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("{spec}: no such file or bundled model"),
    )))
}

fn verdict_code(yes: bool) -> i32 {
    if yes {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

/// The model as the variant needs it: extended variants use the declared
/// normality order.
fn model_ref<'a>(
    doc: &'a ModelDocument,
    ext: &'a mut Option<ExtendedCausalModel>,
    variant: RuleVariant,
) -> std::result::Result<ModelRef<'a>, CliError> {
    if variant == RuleVariant::Extended {
        Ok((&*ext.insert(doc.extended()?)).into())
    } else {
        Ok((&doc.model).into())
    }
}

fn world_json(model: &CausalModel, values: &[i64]) -> Json {
    let mut map = serde_json::Map::new();
    for (d, v) in model.endogenous().iter().zip(values) {
        map.insert(d.name.to_string(), json!(v));
    }
    Json::Object(map)
}

fn witness_json(model: &CausalModel, ctx: &Context, cause: &CandidateCause, w: &Witness) -> Json {
    let mut j = serde_json::to_value(w).expect("witness serializes");
    if let Ok(s) = witness_world(model, ctx, cause, w) {
        j["world"] = world_json(model, s.values());
    }
    j
}

fn failure_json(v: &Verdict) -> Json {
    match &v.failure {
        None => Json::Null,
        Some(f) => json!({
            "condition": f.condition.to_string(),
            "subset": f.subset.as_ref().map(|s| s.to_string()),
        }),
    }
}

fn describe_failure(v: &Verdict) -> String {
    match &v.failure {
        None => String::new(),
        Some(f) => match &f.subset {
            Some(s) => format!("{} fails: {s} already satisfies AC1 and AC2", f.condition),
            None => format!("{} fails", f.condition),
        },
    }
}

fn report_json(r: &ExtensionReport, m_prime: &CausalModel) -> Json {
    let cx = r.counterexample.as_ref().map(|c| match c {
        Counterexample::Equation {
            context,
            variable,
            setting,
            value_in_m,
            value_in_m_prime,
        } => json!({
            "kind": "equation",
            "context": m_prime.describe_context(context),
            "variable": variable.to_string(),
            "setting": setting.to_string(),
            "value_in_m": value_in_m,
            "value_in_m_prime": value_in_m_prime,
        }),
        Counterexample::Normality {
            context,
            setting,
            normal_in_m,
            normal_in_m_prime,
        } => json!({
            "kind": "normality",
            "context": m_prime.describe_context(context),
            "setting": setting.to_string(),
            "normal_in_m": normal_in_m,
            "normal_in_m_prime": normal_in_m_prime,
        }),
    });
    json!({ "is_conservative": r.is_conservative, "counterexample": cx })
}

fn describe_report(r: &ExtensionReport, m_prime: &CausalModel) -> String {
    match &r.counterexample {
        None => "conservative".into(),
        Some(Counterexample::Equation {
            context,
            variable,
            setting,
            value_in_m,
            value_in_m_prime,
        }) => format!(
            "not conservative: in context {}, under [{setting}] {variable} is {value_in_m} in the base model and {value_in_m_prime} in the extension",
            m_prime.describe_context(context)
        ),
        Some(Counterexample::Normality {
            context,
            setting,
            normal_in_m,
            normal_in_m_prime,
        }) => format!(
            "not conservative: in context {}, the world reached by [{setting}] is {} the actual world in the base model and {} in the extension",
            m_prime.describe_context(context),
            if *normal_in_m { "at least as normal as" } else { "not at least as normal as" },
            if *normal_in_m_prime { "at least as normal as it" } else { "not at least as normal as it" },
        ),
    }
}

fn effect_event(text: &str) -> std::result::Result<(VariableId, i64), CliError> {
    match dsl::parse_formula(text)? {
        CausalFormula::Event(v, x) => Ok((v, x)),
        other => Err(Error::MalformedPhi(format!("expected a single event, got `{other}`")).into()),
    }
}

fn execute(command: Command, config: &SearchConfig, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Solve { m, intervene } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let iv: Intervention = match intervene {
                Some(text) => dsl::parse_assignments(&text)?.into_iter().collect(),
                None => Intervention::new(),
            };
            let w = doc.model.solve_under(ctx, &iv)?;
            writeln!(out, "{}", doc.model.describe(&w))?;
            Ok(EXIT_OK)
        }
        Command::Eval { m, formula } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let f = dsl::parse_formula(&formula)?;
            let v = actualcause::eval_formula(&doc.model, ctx, &f)?;
            writeln!(out, "{v}")?;
            Ok(verdict_code(v))
        }
        Command::Cause {
            m,
            cause,
            effect,
            variant,
            first,
            json,
        } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let cause = dsl::parse_cause(&cause)?;
            let phi = dsl::parse_formula(&effect)?;
            let variant = RuleVariant::from(variant);
            let mut ext = None;
            let model = model_ref(&doc, &mut ext, variant)?;
            let config = SearchConfig {
                collect_all: !first,
                ..*config
            };
            let v = is_actual_cause_with(model, ctx, &cause, &phi, variant, &config)?;
            if json {
                let witnesses: Vec<Json> = v
                    .witnesses
                    .iter()
                    .map(|w| witness_json(&doc.model, ctx, &cause, w))
                    .collect();
                let j = json!({
                    "is_cause": v.is_cause,
                    "witnesses": witnesses,
                    "failure_reason": failure_json(&v),
                    "variant": variant.name(),
                    "model": doc.model.name(),
                    "context": m.context,
                });
                writeln!(out, "{j}")?;
            } else if v.is_cause {
                writeln!(out, "{cause} is a cause of {phi} under the {variant} rule")?;
                for w in &v.witnesses {
                    writeln!(out, "  witness {w}")?;
                }
            } else {
                writeln!(
                    out,
                    "{cause} is not a cause of {phi} under the {variant} rule: {}",
                    describe_failure(&v)
                )?;
            }
            Ok(verdict_code(v.is_cause))
        }
        Command::Causes {
            m,
            effect,
            variant,
            max_size,
            json,
        } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let phi = dsl::parse_formula(&effect)?;
            let variant = RuleVariant::from(variant);
            let mut ext = None;
            let model = model_ref(&doc, &mut ext, variant)?;
            let config = SearchConfig {
                collect_all: false,
                max_cause_size: max_size,
                ..*config
            };
            let causes = find_all_causes_with(model, ctx, &phi, variant, &config)?;
            if json {
                let list: Vec<Json> = causes
                    .iter()
                    .map(|(c, v)| {
                        json!({
                            "cause": c.to_string(),
                            "witnesses": v.witnesses.iter().map(|w| witness_json(&doc.model, ctx, c, w)).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let j = json!({
                    "causes": list,
                    "variant": variant.name(),
                    "model": doc.model.name(),
                    "context": m.context,
                });
                writeln!(out, "{j}")?;
            } else {
                for (c, v) in &causes {
                    match v.witnesses.first() {
                        Some(w) => writeln!(out, "{c}  witness {w}")?,
                        None => writeln!(out, "{c}")?,
                    }
                }
            }
            Ok(verdict_code(!causes.is_empty()))
        }
        Command::BestWitnesses { m, cause, effect } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let ext = doc.extended()?;
            let cause = dsl::parse_cause(&cause)?;
            let phi = dsl::parse_formula(&effect)?;
            for (w, s) in best_witnesses(&ext, ctx, &cause, &phi)? {
                let rank = ext
                    .rank(&s)
                    .map_or_else(|| "unranked".to_string(), |r| format!("rank {r}"));
                writeln!(out, "{w}  {rank}  {}", doc.model.describe(&s))?;
            }
            Ok(EXIT_OK)
        }
        Command::Conservative { pair, json } => {
            let (m1, m2) = (load(&pair.m1)?, load(&pair.m2)?);
            let r = is_conservative_extension(&m2.model, &m1.model)?;
            print_report(out, &r, &m2.model, json)?;
            Ok(verdict_code(r.is_conservative))
        }
        Command::Ce { pair, json } => {
            let (m1, m2) = (load(&pair.m1)?, load(&pair.m2)?);
            let r = is_conservative_extension_extended(&m2.extended()?, &m1.extended()?)?;
            print_report(out, &r, &m2.model, json)?;
            Ok(verdict_code(r.is_conservative))
        }
        Command::Agree {
            pair,
            samples,
            seed,
        } => {
            let (m1, m2) = (load(&pair.m1)?, load(&pair.m2)?);
            match check_formula_agreement(&m2.model, &m1.model, samples, seed)? {
                None => {
                    writeln!(out, "{samples} formulas agree")?;
                    Ok(EXIT_OK)
                }
                Some(d) => {
                    writeln!(
                        out,
                        "{} is {} in the base model and {} in the extension, in context {}",
                        d.formula,
                        d.value_in_m,
                        d.value_in_m_prime,
                        m1.model.describe_context(&d.context)
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::KillWitnesses { m, cause, effect } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let cause = dsl::parse_cause(&cause)?;
            let (y, v) = effect_event(&effect)?;
            let outcome = kill_all_witnesses(&doc.model, ctx, &cause, (&y, v))?;
            let killed = ModelDocument {
                model: outcome.model,
                contexts: doc.contexts.clone(),
                normality: doc.normality.clone(),
            };
            write!(out, "{}", print_model(&killed))?;
            Ok(EXIT_OK)
        }
        Command::Stability { n } => {
            write!(out, "{}", print_model(&build_stability_model(n)?))?;
            Ok(EXIT_OK)
        }
        Command::Respects { m, vars } => {
            let doc = load(&m.model)?;
            let ctx = doc.context(&m.context)?;
            let vars = parse_names(&vars)?;
            let r = respects_equations(&doc.extended()?, ctx, &vars)?;
            writeln!(out, "{}", r.respects)?;
            if let Some(s) = &r.violation {
                writeln!(out, "  violated by {}", doc.model.describe(s))?;
            }
            Ok(verdict_code(r.respects))
        }
        Command::Corpus { command } => match command {
            CorpusCommand::Run { all, json } => {
                let report = corpus::verify_corpus(all)?;
                let failed = report.iter().filter(|r| !r.passed).count();
                if json {
                    let cases: Vec<Json> = report
                        .iter()
                        .map(|r| {
                            json!({
                                "id": r.id,
                                "expected": r.expected,
                                "actual": r.actual,
                                "passed": r.passed,
                                "millis": r.elapsed.as_millis() as u64,
                            })
                        })
                        .collect();
                    writeln!(out, "{}", json!({ "cases": cases, "failed": failed }))?;
                } else {
                    for r in &report {
                        writeln!(
                            out,
                            "{} {:<40} expected {:<16} got {:<16} {:>6} ms",
                            if r.passed { "PASS" } else { "FAIL" },
                            r.id,
                            r.expected,
                            r.actual,
                            r.elapsed.as_millis()
                        )?;
                    }
                    writeln!(out, "{} passed, {failed} failed", report.len() - failed)?;
                }
                Ok(verdict_code(failed == 0))
            }
            CorpusCommand::List => {
                for name in corpus::model_names() {
                    writeln!(out, "{name}")?;
                }
                Ok(EXIT_OK)
            }
            CorpusCommand::Show { name } => {
                let src = corpus::model_source(&name)
                    .ok_or_else(|| Error::Corpus(format!("no bundled model `{name}`")))?;
                write!(out, "{src}")?;
                Ok(EXIT_OK)
            }
        },
    }
}

fn print_report(
    out: &mut dyn Write,
    r: &ExtensionReport,
    m_prime: &CausalModel,
    json: bool,
) -> std::io::Result<()> {
    if json {
        writeln!(out, "{}", report_json(r, m_prime))
    } else {
        writeln!(out, "{}", describe_report(r, m_prime))
    }
}

fn parse_names(text: &str) -> std::result::Result<Vec<VariableId>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| VariableId::new(s).map_err(CliError::from))
        .collect()
}
