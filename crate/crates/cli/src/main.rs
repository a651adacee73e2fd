//! `preproj`: β-tables, module families, datum extraction and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 bad input, 3 invalid
//! module file, 4 infrastructure failure or unknown suite.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use preproj_core::prepmod::{
    extract_datum_traced, m_module, n_module, v_module, AnyModule, ModuleDump, PModule, Route,
};
use preproj_core::rootsys::{beta_sequence, GraphFile};
use preproj_core::veritas::{all_passed, run_suite, write_csv, CheckReport, Suite, SuiteConfig};
use preproj_core::{CartanGraph, Error, Field, FieldDescriptor, PrimeField, Rationals, Weight, WeylWord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "preproj", version, about = "Preprojective modules, Lusztig data and their cross-checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Graph file (JSON, 1-based vertices).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// `rat` or `prime:P` with P a prime above 2^31.
    #[arg(long, global = true, default_value = "prime:2305843009213693951")]
    field: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Words are given as (i_r, ..., i_1) instead of application order.
    #[arg(long, global = true)]
    paper_order: bool,
    /// Omit wall-clock fields so identical runs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
struct WordArg {
    /// Reduced word, 1-based, space or comma separated.
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    word: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Family {
    M,
    V,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RouteArg {
    Cokernel,
    Reflection,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// β-sequence of a reduced word.
    Roots {
        #[command(flatten)]
        word: WordArg,
    },
    /// Serialized M_k, V_k or N for every prefix of a word.
    Modules {
        #[command(flatten)]
        word: WordArg,
        #[arg(long, value_enum)]
        which: Family,
        /// Construction of M_k.
        #[arg(long, value_enum, default_value = "reflection")]
        route: RouteArg,
        /// Dominant weight for `N` (fundamental-weight coordinates); defaults to ρ.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        weight: Option<Vec<i64>>,
    },
    /// Reads the Lusztig datum of a module along a word.
    Extract {
        #[command(flatten)]
        word: WordArg,
        /// Module dump (JSON).
        #[arg(long)]
        module: PathBuf,
    },
    /// Runs a verification suite: roots, lemma32, modules, thm51, transitions or all.
    Verify {
        suite: String,
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long)]
        maxlen: Option<usize>,
    },
}

/// Everything needed to replay a run; embedded in every JSON output.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: String,
    graph_path: Option<PathBuf>,
    graph: Option<GraphFile>,
    field: FieldDescriptor,
    seed: u64,
    out: Option<PathBuf>,
    paper_order: bool,
    params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn math(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn module_file(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
    fn infra(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Clone)]
enum FieldChoice {
    Rational,
    Prime(PrimeField),
}

impl FieldChoice {
    fn parse(s: &str) -> Result<Self, Failure> {
        if s == "rat" {
            return Ok(FieldChoice::Rational);
        }
        let p = s
            .strip_prefix("prime:")
            .ok_or_else(|| Failure::input(format!("field must be `rat` or `prime:P`, got {s:?}")))?;
        let p: u64 = p.parse().map_err(|e| Failure::input(format!("bad prime {p:?}: {e}")))?;
        Ok(FieldChoice::Prime(PrimeField::new(p)?))
    }

    fn descriptor(&self) -> FieldDescriptor {
        match self {
            FieldChoice::Rational => Rationals.descriptor(),
            FieldChoice::Prime(f) => f.descriptor(),
        }
    }
}

struct Ctx {
    common: Common,
    field: FieldChoice,
    graph: Option<CartanGraph>,
}

impl Ctx {
    fn graph(&self) -> Result<&CartanGraph, Failure> {
        self.graph.as_ref().ok_or_else(|| Failure::input("--graph is required"))
    }

    fn word(&self, w: &WordArg) -> Result<WeylWord, Failure> {
        let mut letters = w.word.clone().unwrap_or_default();
        if self.common.paper_order {
            letters.reverse();
        }
        let word = WeylWord::from_one_based(&letters)?;
        beta_sequence(self.graph()?, &word)?;
        Ok(word)
    }

    fn config(&self, command: &str, params: serde_json::Value) -> RunConfig {
        let timestamp = (!self.common.no_timestamp)
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        RunConfig {
            command: command.to_string(),
            graph_path: self.common.graph.clone(),
            graph: self.graph.as_ref().map(GraphFile::from_graph),
            field: self.field.descriptor(),
            seed: self.common.seed,
            out: self.common.out.clone(),
            paper_order: self.common.paper_order,
            params,
            timestamp,
        }
    }

    /// JSON goes to `--out` when given, else to stdout.
    fn emit_json<T: Serialize>(&self, value: &T) -> Outcome {
        let text = serde_json::to_string_pretty(value).map_err(|e| Failure::infra(e.to_string()))?;
        match &self.common.out {
            Some(p) => write_file(p, text.as_bytes()),
            None => print_out(&text),
        }
    }
}

fn write_file(p: &Path, bytes: &[u8]) -> Outcome {
    fs::write(p, bytes).map_err(|e| Failure::infra(format!("writing {}: {e}", p.display())))
}

fn print_out(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::infra(e.to_string()))
}

fn load_graph(p: &Path) -> Result<CartanGraph, Failure> {
    let text = fs::read_to_string(p).map_err(|e| Failure::input(format!("reading {}: {e}", p.display())))?;
    let file: GraphFile =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("parsing {}: {e}", p.display())))?;
    Ok(file.to_graph()?)
}

fn cmd_roots(ctx: &Ctx, w: &WordArg) -> Outcome {
    let g = ctx.graph()?;
    let word = ctx.word(w)?;
    let betas = beta_sequence(g, &word)?;
    let rows: Vec<_> = betas
        .iter()
        .enumerate()
        .map(|(k, b)| serde_json::json!({ "k": k + 1, "vertex": word.letters()[k] + 1, "beta": b.0 }))
        .collect();
    if ctx.common.json {
        let params = serde_json::json!({ "word": word.to_one_based() });
        return ctx.emit_json(&serde_json::json!({ "config": ctx.config("roots", params), "rows": rows }));
    }
    let mut text = String::from("k\tvertex\tbeta");
    for (k, b) in betas.iter().enumerate() {
        text.push_str(&format!("\n{}\t{}\t{}", k + 1, word.letters()[k] + 1, root_string(&b.0)));
    }
    print_out(&text)
}

fn root_string(c: &[i64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| if x == 1 { format!("a{}", i + 1) } else { format!("{x}a{}", i + 1) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn family_modules<F: Field>(
    g: &CartanGraph,
    field: &F,
    word: &WeylWord,
    which: Family,
    route: Route,
    weight: &Weight,
    seed: u64,
) -> Result<Vec<PModule<F>>, Failure> {
    let ga = Arc::new(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(word.len());
    for k in 1..=word.len() {
        let m = match which {
            Family::M => m_module(&ga, field, word, k, route, &mut rng),
            Family::V => v_module(&ga, field, word, k),
            Family::N => n_module(g, field, &WeylWord::new(word.letters()[..k].to_vec()), weight),
        };
        out.push(m.map_err(|e| Failure::math(format!("k = {k}: {e}")))?);
    }
    Ok(out)
}

fn cmd_modules(ctx: &Ctx, w: &WordArg, which: Family, route: RouteArg, weight: &Option<Vec<i64>>) -> Outcome {
    let g = ctx.graph()?;
    let word = ctx.word(w)?;
    let n = g.vertex_count();
    let weight = Weight(weight.clone().unwrap_or_else(|| vec![1; n]));
    if weight.0.len() != n || weight.0.iter().any(|&x| x < 0) {
        return Err(Failure::input(format!("weight needs {n} nonnegative coordinates")));
    }
    let route = match route {
        RouteArg::Cokernel => Route::Cokernel,
        RouteArg::Reflection => Route::Reflection,
    };
    let seed = ctx.common.seed;
    let dumps: Vec<ModuleDump> = match &ctx.field {
        FieldChoice::Rational => family_modules(g, &Rationals, &word, which, route, &weight, seed)?
            .iter()
            .map(ModuleDump::from_module)
            .collect(),
        FieldChoice::Prime(f) => family_modules(g, f, &word, which, route, &weight, seed)?
            .iter()
            .map(ModuleDump::from_module)
            .collect(),
    };
    let listing: Vec<_> = dumps
        .iter()
        .enumerate()
        .map(|(k, d)| serde_json::json!({ "k": k + 1, "dims": d.dims, "module": d }))
        .collect();
    let summary: Vec<String> = dumps.iter().enumerate().map(|(k, d)| format!("{}\t{:?}", k + 1, d.dims)).collect();
    if ctx.common.json || ctx.common.out.is_some() {
        let params = serde_json::json!({
            "word": word.to_one_based(), "which": which, "route": route, "weight": weight.0,
        });
        ctx.emit_json(&serde_json::json!({ "config": ctx.config("modules", params), "modules": listing }))?;
        if ctx.common.out.is_none() {
            return Ok(());
        }
    }
    print_out(&format!("k\tdims{}", summary.iter().map(|s| format!("\n{s}")).collect::<String>()))
}

fn cmd_extract(ctx: &Ctx, w: &WordArg, module: &Path) -> Outcome {
    let text = fs::read_to_string(module)
        .map_err(|e| Failure::module_file(format!("reading {}: {e}", module.display())))?;
    let dump: ModuleDump =
        serde_json::from_str(&text).map_err(|e| Failure::module_file(format!("parsing {}: {e}", module.display())))?;
    let m = AnyModule::from_dump(&dump).map_err(|e| Failure::module_file(format!("{}: {e}", module.display())))?;
    let module_graph = dump.graph().map_err(|e| Failure::module_file(e.to_string()))?;
    let ctx = Ctx {
        common: ctx.common.clone(),
        field: match &dump.field {
            FieldDescriptor::Rational => FieldChoice::Rational,
            FieldDescriptor::Prime { .. } => match &m {
                AnyModule::Prime(p) => FieldChoice::Prime(*p.field()),
                AnyModule::Rational(_) => unreachable!("descriptor matches module"),
            },
        },
        graph: match &ctx.graph {
            Some(g) if *g != module_graph => {
                return Err(Failure::input("module file lives on a different graph than --graph"))
            }
            _ => Some(module_graph.clone()),
        },
    };
    let word = ctx.word(w)?;
    let traced = match &m {
        AnyModule::Rational(x) => extract_datum_traced(&module_graph, &word, x),
        AnyModule::Prime(x) => extract_datum_traced(&module_graph, &word, x),
    };
    let params = serde_json::json!({ "word": word.to_one_based(), "module": module });
    match traced {
        Ok(steps) => {
            let a: Vec<u64> = steps.iter().map(|s| s.socle_dim).collect();
            if ctx.common.json {
                ctx.emit_json(&serde_json::json!({ "config": ctx.config("extract", params), "a": a, "trace": steps }))
            } else {
                print_out(&format!("a = {a:?}"))
            }
        }
        Err(e @ Error::NotInGenericStratum { .. }) => {
            if ctx.common.json {
                ctx.emit_json(&serde_json::json!({ "config": ctx.config("extract", params), "error": e.to_string() }))?;
            }
            Err(Failure::math(format!("NotInGenericStratum: {e}")))
        }
        Err(e) => Err(e.into()),
    }
}

struct VerifyArgs<'a> {
    suite: &'a str,
    word: &'a WordArg,
    bound: Option<u64>,
    samples: Option<usize>,
    corpus: Option<usize>,
    maxlen: Option<usize>,
}

fn cmd_verify(ctx: &Ctx, v: VerifyArgs<'_>) -> Outcome {
    let suite: Suite = v.suite.parse().map_err(|e: Error| Failure::infra(e.to_string()))?;
    let g = ctx.graph()?;
    let word = match &v.word.word {
        Some(_) => Some(ctx.word(v.word)?),
        None => None,
    };
    let cfg = SuiteConfig {
        graph: g.clone(),
        master_seed: ctx.common.seed,
        word,
        bound: v.bound,
        samples: v.samples,
        corpus: v.corpus,
        max_dim: None,
        maxlen: v.maxlen,
        timestamps: !ctx.common.no_timestamp,
    };
    let reports: Vec<CheckReport> = match &ctx.field {
        FieldChoice::Rational => run_suite(&cfg, suite, Rationals)?,
        FieldChoice::Prime(f) => run_suite(&cfg, suite, *f)?,
    };
    let params = serde_json::json!({
        "suite": suite.to_string(), "word": cfg.word().to_one_based(), "bound": v.bound,
        "samples": v.samples, "corpus": v.corpus, "maxlen": v.maxlen,
    });
    let doc = serde_json::json!({ "config": ctx.config("verify", params), "reports": reports });
    let mut csv = Vec::new();
    write_csv(&mut csv, &reports).map_err(|e| Failure::infra(e.to_string()))?;
    match &ctx.common.out {
        Some(p) => {
            ctx.emit_json(&doc)?;
            write_file(&p.with_extension("csv"), &csv)?;
            print_out(String::from_utf8_lossy(&csv).trim_end())?;
        }
        None if ctx.common.json => ctx.emit_json(&doc)?,
        None => print_out(String::from_utf8_lossy(&csv).trim_end())?,
    }
    if all_passed(&reports) {
        Ok(())
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| r.outcome.is_failure()).map(|r| r.id.as_str()).collect();
        Err(Failure::math(format!("failed checks: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Outcome {
    let field = FieldChoice::parse(&cli.common.field)?;
    let graph = cli.common.graph.as_deref().map(load_graph).transpose()?;
    let ctx = Ctx { common: cli.common, field, graph };
    match &cli.command {
        Command::Roots { word } => cmd_roots(&ctx, word),
        Command::Modules { word, which, route, weight } => cmd_modules(&ctx, word, *which, *route, weight),
        Command::Extract { word, module } => cmd_extract(&ctx, word, module),
        Command::Verify { suite, word, bound, samples, corpus, maxlen } => cmd_verify(
            &ctx,
            VerifyArgs { suite, word, bound: *bound, samples: *samples, corpus: *corpus, maxlen: *maxlen },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
