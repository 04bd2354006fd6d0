use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use taut_core::euler::{chi_open, compact_ledger};
use taut_core::families::{
    builtin_fixtures, independence_cases, independence_report, keel_family_rank, keel_index, parse_fixture, TestFamily,
};
use taut_core::graph::enumerate;
use taut_core::pullback::{boundary_restriction_matrix, xi_map, Kernel, MapStep, PullbackMap};
use taut_core::quotient::quotient;
use taut_core::rational::format_q;
use taut_core::taut::{GenKey, Label, MarkingSet, Space, TautClass};
use taut_core::verify::{self, Caps, Check, Suite, DEFAULT_SEED};
use taut_core::Error;

#[derive(Parser, Debug)]
#[command(name = "taut", version, about = "Degree-two tautological classes on moduli of stable pointed curves")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Genus
    #[arg(long, global = true)]
    g: Option<u32>,
    /// Number of markings, labelled 1..n
    #[arg(long, global = true, conflicts_with = "markings")]
    n: Option<usize>,
    /// Comma-separated marking labels
    #[arg(long, global = true)]
    markings: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized property trials
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest n for genus 0, 1, 2, 3
    #[arg(long, global = true, default_value = "8,5,4,2")]
    caps: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Pi,
    Xi,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    Xi,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EulerSpace {
    Open,
    Compact,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of H^2
    Dim,
    /// Generator keys
    Generators,
    /// The relation set
    Relations,
    /// Quotient basis and relation rank
    Quotient,
    /// Reduce a class read from a JSON file
    Reduce {
        #[arg(long)]
        class: String,
    },
    /// Matrix of a pullback on H^2
    Pullback {
        #[arg(long, value_enum)]
        map: MapKind,
        /// Genus of the side carrying the subset (theta)
        #[arg(long)]
        a: Option<u32>,
        /// Comma-separated markings on that side (theta)
        #[arg(long)]
        subset: Option<String>,
        /// New point label
        #[arg(long)]
        q: Option<String>,
        /// Second new point label (xi)
        #[arg(long)]
        r: Option<String>,
    },
    /// Kernel of the xi pullback or of the full boundary restriction
    Kernel {
        #[arg(long, value_enum)]
        map: KernelKind,
    },
    /// Stable graphs up to isomorphism
    Graphs {
        #[arg(long)]
        max_codim: Option<usize>,
    },
    /// Euler characteristic
    Euler {
        #[arg(long, value_enum)]
        space: EulerSpace,
        /// Print the per-stratum ledger as TSV
        #[arg(long)]
        explain: bool,
    },
    /// Test-family ranks and relation checks
    Families {
        /// Degree table to load instead of the shipped ones
        #[arg(long)]
        fixture: Option<String>,
        /// Keys for the independence report of --fixture
        #[arg(long)]
        keys: Option<String>,
    },
    /// Run a verification suite
    Verify {
        #[arg(long)]
        suite: String,
    },
}

struct Output {
    stdout: String,
    stderr: String,
    code: u8,
}

enum Failure {
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn invalid<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Invalid(msg.into()))
}

fn parse_caps(text: &str) -> Res<Caps> {
    let max_n = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Invalid(format!("bad caps {text:?}"))))
        .collect::<Res<Vec<_>>>()?;
    Ok(Caps { max_n })
}

impl Global {
    fn space(&self) -> Res<Space> {
        let Some(g) = self.g else { return invalid("--g is required") };
        let markings = match (&self.n, &self.markings) {
            (_, Some(list)) => MarkingSet::parse_list(list)?,
            (Some(n), None) => MarkingSet::numbered(*n),
            (None, None) => MarkingSet::default(),
        };
        let space = Space::new(g, markings)?;
        parse_caps(&self.caps)?.check(g, space.n())?;
        Ok(space)
    }
}

fn render(value: &Value) -> String {
    format!("{}\n", serde_json::to_string(value).expect("serializable"))
}

fn class_tsv(c: &TautClass) -> String {
    c.terms().iter().map(|(k, v)| format!("{k}\t{}\n", format_q(v))).collect()
}

fn keys_json(keys: &[GenKey]) -> Value {
    json!(keys.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn kernel_out(k: &Kernel, format: Format) -> String {
    match format {
        Format::Json => render(&k.to_json()),
        Format::Tsv => {
            let mut s = format!("dim\t{}\n", k.dim());
            for (i, b) in k.basis.iter().enumerate() {
                for (key, v) in b.terms() {
                    let _ = writeln!(s, "{i}\t{key}\t{}", format_q(v));
                }
            }
            s
        }
    }
}

fn label_arg(text: Option<&String>, fallback: &Label) -> Res<Label> {
    Ok(match text {
        Some(t) => Label::new(t.as_str())?,
        None => fallback.clone(),
    })
}

fn pullback(global: &Global, map: MapKind, a: Option<u32>, subset: Option<&String>, q: Option<&String>, r: Option<&String>) -> Res<String> {
    let space = global.space()?;
    let fresh = space.fresh_labels(2);
    let q = label_arg(q, &fresh[0])?;
    let step = match map {
        MapKind::Pi => MapStep::Pi { q },
        MapKind::Xi => MapStep::Xi { q, r: label_arg(r, &fresh[1])? },
        MapKind::Theta => {
            let (Some(a), Some(subset)) = (a, subset) else { return invalid("theta needs --a and --subset") };
            MapStep::Theta { a, subset: MarkingSet::parse_list(subset)?.labels().clone(), q }
        }
    };
    let m = PullbackMap::build(&space, step)?;
    Ok(match global.format {
        Format::Json => render(&m.to_json()),
        Format::Tsv => m.matrix.iter().map(|row| row.iter().map(format_q).collect::<Vec<_>>().join("\t") + "\n").collect(),
    })
}

fn families(global: &Global, fixture: Option<&String>, keys: Option<&String>) -> Res<String> {
    if let Some(path) = fixture {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{path}: {e}")))?;
        let fams = parse_fixture(&text)?;
        let Some(keys) = keys else { return invalid("--fixture needs --keys") };
        let keys = keys.split(',').map(|k| k.trim().parse::<GenKey>()).collect::<Result<Vec<_>, _>>()?;
        let rep = independence_report(&fams, &keys)?;
        let verdict = if rep.independent() { "independent" } else { "dependent" };
        return Ok(match global.format {
            Format::Json => render(&json!({"rank": rep.rank, "keys": rep.keys, "verdict": verdict, "excluded": rep.excluded})),
            Format::Tsv => format!("rank\t{}\nkeys\t{}\nverdict\t{verdict}\nexcluded\t{}\n", rep.rank, rep.keys, rep.excluded.join(",")),
        });
    }
    let keel: Vec<(usize, usize, usize)> =
        (3..=7).map(|n| Ok((n, keel_index(n).len(), keel_family_rank(n)?))).collect::<Res<_>>()?;
    let mut cases = Vec::new();
    for (fams, keys) in independence_cases() {
        let rep = independence_report(&fams, &keys)?;
        let names: Vec<String> = fams.iter().map(|f| f.name.clone()).collect();
        cases.push((names, keys, rep));
    }
    let all: Vec<TestFamily> = builtin_fixtures().into_iter().flat_map(|(_, f)| f).collect();
    let annihilation: Vec<(String, Option<Vec<String>>)> = all
        .iter()
        .map(|f| (f.name.clone(), f.relation_degrees().map(|ds| ds.iter().map(ToString::to_string).collect())))
        .collect();
    Ok(match global.format {
        Format::Json => render(&json!({
            "keel": keel.iter().map(|(n, size, rank)| json!({"n": n, "size": size, "rank": rank})).collect::<Vec<_>>(),
            "independence": cases.iter().map(|(names, keys, rep)| json!({
                "families": names,
                "keys": keys_json(keys),
                "rank": rep.rank,
                "verdict": if rep.independent() { "independent" } else { "dependent" },
            })).collect::<Vec<_>>(),
            "relation_degrees": annihilation.iter().map(|(name, d)| json!({"family": name, "degrees": d})).collect::<Vec<_>>(),
        })),
        Format::Tsv => {
            let mut s = String::new();
            for (n, size, rank) in &keel {
                let _ = writeln!(s, "keel\t{n}\t{rank}/{size}");
            }
            for (names, keys, rep) in &cases {
                let keys: Vec<String> = keys.iter().map(ToString::to_string).collect();
                let _ = writeln!(s, "independence\t{}\t{}\t{}/{}", names.join(","), keys.join(","), rep.rank, rep.keys);
            }
            for (name, d) in &annihilation {
                let _ = writeln!(s, "relations\t{name}\t{}", d.as_ref().map_or("unknown".into(), |d| d.join(",")));
            }
            s
        }
    })
}

/// Argument lists whose output the `all` suite renders twice.
const REPRODUCIBLE: &[&[&str]] = &[
    &["quotient", "--g", "1", "--n", "3"],
    &["kernel", "--map", "xi", "--g", "1", "--n", "3"],
    &["pullback", "--map", "theta", "--g", "2", "--n", "2", "--a", "1", "--subset", "1"],
    &["graphs", "--g", "1", "--n", "2", "--format", "tsv"],
    &["euler", "--g", "1", "--n", "3", "--space", "compact", "--explain"],
    &["families"],
];

fn verify_suite(global: &Global, suite: &str) -> Res<(String, bool)> {
    let suite: Suite = suite.parse()?;
    let mut report = verify::run(suite, global.seed, &parse_caps(&global.caps)?);
    if suite == Suite::All {
        for argv in REPRODUCIBLE {
            let (first, second) = (execute(argv.iter().copied()), execute(argv.iter().copied()));
            let outcome = if first.code == 0 && first.stdout == second.stdout {
                Ok(())
            } else {
                Err(format!("exit {} and {} or output differs", first.code, second.code))
            };
            report.checks.push(Check {
                suite: Suite::All,
                name: format!("identical output for `{}`", argv.join(" ")),
                outcome,
                repro: format!("taut {}", argv.join(" ")),
            });
        }
    }
    let out = match global.format {
        Format::Json => render(&json!({
            "suite": suite.name(),
            "seed": report.seed,
            "checks": report.checks.iter().map(|c| json!({
                "suite": c.suite.name(),
                "name": c.name,
                "passed": c.passed(),
                "detail": c.outcome.as_ref().err(),
                "repro": c.repro,
            })).collect::<Vec<_>>(),
            "summary": report.summary(),
        })),
        Format::Tsv => {
            let mut s: String = report.checks.iter().map(|c| c.line() + "\n").collect();
            s.push_str(&report.summary());
            s.push('\n');
            s
        }
    };
    Ok((out, report.passed()))
}

fn dispatch(cli: &Cli) -> Res<(String, bool)> {
    let global = &cli.global;
    let fmt = global.format;
    let out = match &cli.command {
        Command::Dim => format!("{}\n", quotient(&global.space()?).dim()),
        Command::Generators => {
            let quo = quotient(&global.space()?);
            match fmt {
                Format::Json => render(&keys_json(quo.generators())),
                Format::Tsv => quo.generators().iter().map(|k| format!("{k}\n")).collect(),
            }
        }
        Command::Relations => {
            let quo = quotient(&global.space()?);
            match fmt {
                Format::Json => render(&json!(quo.relations().iter().map(TautClass::to_json).collect::<Vec<_>>())),
                Format::Tsv => quo
                    .relations()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| r.terms().iter().map(move |(k, v)| format!("{i}\t{k}\t{}\n", format_q(v))))
                    .collect(),
            }
        }
        Command::Quotient => {
            let space = global.space()?;
            let quo = quotient(&space);
            let basis = quo.basis_keys();
            match fmt {
                Format::Json => render(&json!({
                    "g": space.g(),
                    "n": space.n(),
                    "dim": quo.dim(),
                    "basis": keys_json(&basis),
                    "relations_rank": quo.relations_rank(),
                })),
                Format::Tsv => {
                    let keys: Vec<String> = basis.iter().map(ToString::to_string).collect();
                    format!(
                        "g\t{}\nn\t{}\ndim\t{}\nbasis\t{}\nrelations_rank\t{}\n",
                        space.g(),
                        space.n(),
                        quo.dim(),
                        keys.join(" "),
                        quo.relations_rank()
                    )
                }
            }
        }
        Command::Reduce { class } => {
            let text = std::fs::read_to_string(class).map_err(|e| Failure::Invalid(format!("{class}: {e}")))?;
            let x = TautClass::from_json_str(&text)?;
            let space = x.space().clone();
            parse_caps(&global.caps)?.check(space.g(), space.n())?;
            let quo = quotient(&space);
            let coords = quo.reduce(&x)?;
            let reduced = quo.class_from_coords(&coords);
            match fmt {
                Format::Json => render(&json!({
                    "basis": keys_json(&quo.basis_keys()),
                    "coords": coords.iter().map(format_q).collect::<Vec<_>>(),
                    "class": reduced.to_json(),
                })),
                Format::Tsv => class_tsv(&reduced),
            }
        }
        Command::Pullback { map, a, subset, q, r } => pullback(global, *map, *a, subset.as_ref(), q.as_ref(), r.as_ref())?,
        Command::Kernel { map } => {
            let space = global.space()?;
            let stacked = match map {
                KernelKind::Xi => xi_map(&space)?,
                KernelKind::Boundary => boundary_restriction_matrix(&space)?,
            };
            kernel_out(&stacked.kernel(), fmt)
        }
        Command::Graphs { max_codim } => {
            let graphs = enumerate(&global.space()?, *max_codim)?;
            match fmt {
                Format::Json => render(&json!(graphs
                    .iter()
                    .map(|g| {
                        let mut j = g.to_json();
                        j["codim"] = json!(g.codim());
                        j["canonical"] = json!(g.canonical_form().to_string());
                        j
                    })
                    .collect::<Vec<_>>())),
                Format::Tsv => graphs.iter().map(|g| format!("{}\t{}\n", g.codim(), g.canonical_form())).collect(),
            }
        }
        Command::Euler { space: kind, explain } => {
            let space = global.space()?;
            match kind {
                EulerSpace::Open if *explain => return invalid("--explain needs --space compact"),
                EulerSpace::Open => format!("{}\n", chi_open(space.g(), space.n())?),
                EulerSpace::Compact => {
                    let ledger = compact_ledger(&space)?;
                    if *explain {
                        ledger.to_tsv()
                    } else {
                        format!("{}\n", ledger.total())
                    }
                }
            }
        }
        Command::Families { fixture, keys } => families(global, fixture.as_ref(), keys.as_ref())?,
        Command::Verify { suite } => return verify_suite(global, suite),
    };
    Ok((out, true))
}

fn execute<'a>(args: impl IntoIterator<Item = &'a str>) -> Output {
    let argv = std::iter::once("taut").chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { stdout: String::new(), stderr: text, code: 2 }
            } else {
                Output { stdout: text, stderr: String::new(), code: 0 }
            };
        }
    };
    match dispatch(&cli) {
        Ok((stdout, true)) => Output { stdout, stderr: String::new(), code: 0 },
        Ok((stdout, false)) => Output { stdout, stderr: String::new(), code: 1 },
        Err(Failure::Invalid(msg)) => Output { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 2 },
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = execute(args.iter().map(String::as_str));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code)
}
