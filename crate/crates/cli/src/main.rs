//! `vrglue` command-line front end.
//!
//! Every command reads one JSON document (`--input FILE`, or stdin when the
//! flag is absent or `-`) and writes one JSON document. Exit codes: 0 on
//! success, 2 when a checked hypothesis fails (the report is still written),
//! 1 on bad input or usage.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use vrglue::collapse::{greedy_collapse, replay, CollapseCertificate};
use vrglue::families::{build_circular_ladder, build_recipe, ladder_sweep, recipe_experiment, FamilyError, GluingRecipe};
use vrglue::gluing::{cech_condition_r, split_from_graphs, verify_gluing_equivalence, CechSplit, GluingError, Mode, SplitSpace, Verdict};
use vrglue::homology::{betti, persistence, BettiVector, PersistenceDiagram};
use vrglue::metric::{glue_metric, graph_metric, wedge_metric, GluingSpec};
use vrglue::simplicial::{cech_ambient, critical_scales, vietoris_rips, vr_filtration};
use vrglue::{Convention, FiniteMetricSpace, Length, MetricGraph, SimplicialComplex};

const SCHEMAS: &str = "\
input schemas:
  space     {\"labels\": [..], \"matrix\": [[..]]}      distances: int, decimal, or \"p/q\"
  graph     {\"vertices\": [..], \"edges\": [{\"u\", \"v\", \"len\", \"subdivision\"?}], \"subdivision\"?}
  split     {\"glued\": space, \"x_labels\": [..], \"y_labels\": [..]}  or  {\"x_graph\": graph, \"y_graph\": graph}
  complex   {\"simplices\": [[label, ..], ..]}
  glue      {\"x\": space, \"y\": space, \"a_labels_x\": [..], \"a_labels_y\": [..]}
  wedge     {\"x\": space, \"y\": space, \"base_x\": label, \"base_y\": label}
  cech      {\"ambient\": space|graph, \"landmarks\": [..]}  (or x_landmarks and y_landmarks)
  condition-r {\"ambient\": space|graph, \"x_landmarks\": [..], \"y_landmarks\": [..], \"witnesses\"?: [..]}
  recipe    {\"subdivision\", \"convention\", \"steps\": [{\"op\": \"attach_cycle\"|\"attach_dismantlable\"|\"attach_edge\", ..}]}
  ladder    {\"n\", \"circumference\", \"m\", \"width\"}";

#[derive(Parser, Debug)]
#[command(name = "vrglue", version, about = "Vietoris-Rips and Cech complexes of glued metric spaces", after_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file; `-` or absent reads stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// A single scale r.
    #[arg(long, global = true, conflicts_with = "scales", allow_hyphen_values = true)]
    scale: Option<String>,
    /// `all` (every critical scale) or a comma-separated list.
    #[arg(long, global = true)]
    scales: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Conv::Closed)]
    convention: Conv,
    /// Top homology dimension (or top simplex dimension for `vr`/`cech`).
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Certificate)]
    mode: ModeArg,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vietoris-Rips complex of a space or graph.
    Vr {
        /// Emit Betti numbers instead of simplices.
        #[arg(long)]
        betti: bool,
    },
    /// Ambient Cech complex on landmarks.
    Cech {
        #[arg(long)]
        betti: bool,
    },
    /// Glue two spaces along a shared subspace.
    Glue {
        /// Emit the split space (glued metric plus both sides).
        #[arg(long)]
        split: bool,
    },
    /// Wedge of two spaces at base points.
    Wedge,
    /// Betti numbers of a complex, or of VR at each scale.
    Betti,
    /// Persistence diagram of the VR filtration.
    Ph,
    /// Greedy collapse, or replay of a supplied certificate.
    Collapse,
    /// Compare VR of a glued space with the union of its sides.
    VerifyGluing,
    /// Cech Condition-R on a landmark split.
    ConditionR,
    /// Build a gluing recipe, checking every step.
    Family,
    /// Circular ladder under the supremum metric against its circle.
    Ladder,
    /// Predicted diagram of a recipe against the computed one.
    Predict,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Conv {
    Closed,
    Open,
}

impl From<Conv> for Convention {
    fn from(c: Conv) -> Convention {
        match c {
            Conv::Closed => Convention::Closed,
            Conv::Open => Convention::Open,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Certificate,
    Betti,
}

/// Result document and whether a hypothesis failed.
struct Output {
    value: Value,
    hypothesis_failed: bool,
}

impl Output {
    fn ok(value: Value) -> Output {
        Output {
            value,
            hypothesis_failed: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            eprintln!("\n{SCHEMAS}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(out) => match emit(&cli, &out.value) {
            Ok(()) if out.hypothesis_failed => ExitCode::from(2),
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some_and(|n| n != 1) {
        eprintln!("warning: built without parallel support, --threads ignored");
    }
    let input = read_input(cli)?;
    let conv: Convention = cli.convention.into();
    match &cli.command {
        Command::Vr { betti } => cmd_vr(cli, &input, conv, *betti),
        Command::Cech { betti } => cmd_cech(cli, &input, conv, *betti),
        Command::Glue { split } => cmd_glue(&input, *split),
        Command::Wedge => cmd_wedge(&input),
        Command::Betti => cmd_betti(cli, &input, conv),
        Command::Ph => cmd_ph(cli, &input),
        Command::Collapse => cmd_collapse(cli, &input, conv),
        Command::VerifyGluing => cmd_verify(cli, &input, conv),
        Command::ConditionR => cmd_condition_r(cli, &input, conv),
        Command::Family => cmd_family(&input),
        Command::Ladder => cmd_ladder(cli, &input, conv),
        Command::Predict => cmd_predict(cli, &input),
    }
}

fn read_input(cli: &Cli) -> Result<Value> {
    let text = match cli.input.as_deref() {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    serde_json::from_str(&text).context("input is not JSON")
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| anyhow!("bad {what}: {e}\n\n{SCHEMAS}"))
}

/// A space given either as a distance matrix or as a metric graph.
fn space_of(v: &Value) -> Result<FiniteMetricSpace> {
    if v.get("matrix").is_some() {
        parse(v, "space")
    } else if v.get("edges").is_some() {
        let g: MetricGraph = parse(v, "graph")?;
        Ok(graph_metric(&g)?)
    } else if let Some(g) = v.get("glued") {
        space_of(g)
    } else {
        bail!("expected a space or a graph\n\n{SCHEMAS}")
    }
}

fn split_of(v: &Value) -> Result<SplitSpace> {
    if let (Some(x), Some(y)) = (v.get("x_graph"), v.get("y_graph")) {
        return Ok(split_from_graphs(&parse(x, "graph")?, &parse(y, "graph")?)?);
    }
    parse(v, "split space")
}

fn parse_length(s: &str) -> Result<Length> {
    let l: Length = s.trim().parse().map_err(|e| anyhow!("bad scale {s:?}: {e}"))?;
    if l.is_negative() {
        bail!("scale {s} is negative");
    }
    Ok(l)
}

/// Requested scales, defaulting to every critical scale of `m`. The flag
/// says whether a single `--scale` was given.
fn scales(cli: &Cli, m: &FiniteMetricSpace) -> Result<(Vec<Length>, bool)> {
    if let Some(s) = &cli.scale {
        return Ok((vec![parse_length(s)?], true));
    }
    match cli.scales.as_deref() {
        None | Some("all") => Ok((critical_scales(m), false)),
        Some(list) => Ok((list.split(',').map(parse_length).collect::<Result<_>>()?, false)),
    }
}

/// One object for a single scale, otherwise an array of per-scale objects.
fn per_scale(single: bool, items: Vec<Value>) -> Value {
    if single {
        items.into_iter().next().unwrap_or(Value::Null)
    } else {
        Value::Array(items)
    }
}

fn complex_json(k: &SimplicialComplex) -> Value {
    let simplices: Vec<Vec<String>> = k.iter().map(|s| k.simplex_labels(s)).collect();
    let maximal: Vec<Vec<String>> = k.maximal_simplices().iter().map(|s| k.simplex_labels(s)).collect();
    let mut counts = Vec::new();
    for s in k.iter() {
        if counts.len() <= s.dim() {
            counts.resize(s.dim() + 1, 0);
        }
        counts[s.dim()] += 1;
    }
    json!({ "counts": counts, "maximal": maximal, "simplices": simplices })
}

fn betti_entry(single: bool, r: Length, b: BettiVector) -> Value {
    if single {
        json!({ "betti": b })
    } else {
        json!({ "scale": r, "betti": b })
    }
}

fn betti_cap(cli: &Cli) -> usize {
    cli.max_dim.unwrap_or(1)
}

fn cmd_vr(cli: &Cli, input: &Value, conv: Convention, want_betti: bool) -> Result<Output> {
    let m = space_of(input)?;
    let (rs, single) = scales(cli, &m)?;
    let mut out = Vec::new();
    for r in rs {
        if want_betti {
            let cap = betti_cap(cli);
            let b = betti(&vietoris_rips(&m, r, conv, Some(cap + 1)), cap)?;
            out.push(betti_entry(single, r, b));
        } else {
            let k = vietoris_rips(&m, r, conv, cli.max_dim);
            let mut v = json!({ "scale": r, "convention": conv });
            v.as_object_mut().unwrap().extend(complex_json(&k).as_object().unwrap().clone());
            out.push(v);
        }
    }
    Ok(Output::ok(per_scale(single, out)))
}

#[derive(Deserialize)]
struct CechInput {
    ambient: Value,
    #[serde(default)]
    landmarks: Vec<String>,
    #[serde(default)]
    x_landmarks: Vec<String>,
    #[serde(default)]
    y_landmarks: Vec<String>,
}

fn cmd_cech(cli: &Cli, input: &Value, conv: Convention, want_betti: bool) -> Result<Output> {
    let mut c: CechInput = parse(input, "cech input")?;
    if c.landmarks.is_empty() {
        // a landmark split: use both sides
        c.landmarks = c.x_landmarks.clone();
        c.landmarks
            .extend(c.y_landmarks.iter().filter(|l| !c.x_landmarks.contains(l)).cloned());
    }
    if c.landmarks.is_empty() {
        bail!("no landmarks given\n\n{SCHEMAS}");
    }
    let m = space_of(&c.ambient)?;
    let (rs, single) = scales(cli, &m.restrict_labels(&c.landmarks)?)?;
    let mut out = Vec::new();
    for r in rs {
        if want_betti {
            let cap = betti_cap(cli);
            let b = betti(&cech_ambient(&m, &c.landmarks, r, conv, Some(cap + 1))?, cap)?;
            out.push(betti_entry(single, r, b));
        } else {
            let k = cech_ambient(&m, &c.landmarks, r, conv, cli.max_dim)?;
            let mut v = json!({ "scale": r, "convention": conv });
            v.as_object_mut().unwrap().extend(complex_json(&k).as_object().unwrap().clone());
            out.push(v);
        }
    }
    Ok(Output::ok(per_scale(single, out)))
}

#[derive(Deserialize)]
struct GlueInput {
    x: Value,
    y: Value,
    #[serde(flatten)]
    spec: GluingSpec,
}

fn cmd_glue(input: &Value, split: bool) -> Result<Output> {
    let g: GlueInput = parse(input, "glue input")?;
    let (x, y) = (space_of(&g.x)?, space_of(&g.y)?);
    if split {
        let s = SplitSpace::glue(&x, &y, &g.spec)?;
        return Ok(Output::ok(serde_json::to_value(&s)?));
    }
    Ok(Output::ok(serde_json::to_value(glue_metric(&x, &y, &g.spec)?)?))
}

#[derive(Deserialize)]
struct WedgeInput {
    x: Value,
    y: Value,
    base_x: String,
    base_y: String,
}

fn cmd_wedge(input: &Value) -> Result<Output> {
    let w: WedgeInput = parse(input, "wedge input")?;
    let m = wedge_metric(&space_of(&w.x)?, &w.base_x, &space_of(&w.y)?, &w.base_y)?;
    Ok(Output::ok(serde_json::to_value(m)?))
}

fn complex_of(v: &Value) -> Result<Option<SimplicialComplex>> {
    match v.get("simplices") {
        Some(s) => {
            let sets: Vec<Vec<String>> = parse(s, "complex")?;
            Ok(Some(SimplicialComplex::from_label_sets(&sets)?))
        }
        None => Ok(None),
    }
}

fn cmd_betti(cli: &Cli, input: &Value, conv: Convention) -> Result<Output> {
    let cap = betti_cap(cli);
    if let Some(k) = complex_of(input)? {
        return Ok(Output::ok(json!({ "betti": betti(&k, cap)? })));
    }
    let m = space_of(input)?;
    let (rs, single) = scales(cli, &m)?;
    let out = rs
        .into_iter()
        .map(|r| Ok(betti_entry(single, r, betti(&vietoris_rips(&m, r, conv, Some(cap + 1)), cap)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Output::ok(per_scale(single, out)))
}

/// Diagram with an entry for every dimension up to `cap`, empty or not.
fn diagram_json(d: &PersistenceDiagram, cap: usize) -> Value {
    Value::Array((0..=cap).map(|k| json!({ "dim": k, "points": d.points(k) })).collect())
}

fn cmd_ph(cli: &Cli, input: &Value) -> Result<Output> {
    let m = space_of(input)?;
    let cap = betti_cap(cli);
    let d = persistence(&vr_filtration(&m, cap + 1), cap)?;
    Ok(Output::ok(json!({ "max_dim": cap, "diagram": diagram_json(&d, cap) })))
}

fn cmd_collapse(cli: &Cli, input: &Value, conv: Convention) -> Result<Output> {
    let collapse = |k: &SimplicialComplex| -> Result<Value> {
        let (core, cert) = greedy_collapse(k);
        let steps = replay(k, &cert)?.steps;
        Ok(json!({
            "collapsible": core.len() == 1,
            "core": core.label_sets(),
            "replayed_steps": steps,
            "certificate": cert,
        }))
    };
    if let Some(k) = complex_of(input)? {
        if let Some(c) = input.get("certificate") {
            let cert: CollapseCertificate = parse(c, "certificate")?;
            return Ok(match replay(&k, &cert) {
                Ok(o) => Output::ok(json!({ "valid": true, "replayed_steps": o.steps, "final": o.final_sets })),
                Err(e) => Output {
                    value: json!({ "valid": false, "error": e.to_string() }),
                    hypothesis_failed: true,
                },
            });
        }
        return Ok(Output::ok(collapse(&k)?));
    }
    let m = space_of(input)?;
    let (rs, single) = scales(cli, &m)?;
    let out = rs
        .into_iter()
        .map(|r| {
            let mut v = collapse(&vietoris_rips(&m, r, conv, cli.max_dim))?;
            v.as_object_mut().unwrap().insert("scale".into(), serde_json::to_value(r)?);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output::ok(per_scale(single, out)))
}

fn cmd_verify(cli: &Cli, input: &Value, conv: Convention) -> Result<Output> {
    let s = split_of(input)?;
    let (rs, single) = scales(cli, s.glued())?;
    let max_dim = cli.max_dim.unwrap_or(1);
    let mode = match cli.mode {
        ModeArg::Certificate => Mode::Certificate,
        ModeArg::Betti => Mode::Betti,
    };
    let mut failed = false;
    let mut out = Vec::new();
    for r in rs {
        match verify_gluing_equivalence(&s, r, conv, mode, max_dim) {
            Ok(rep) => out.push(serde_json::to_value(rep)?),
            Err(GluingError::HypothesisFailed(report)) => {
                failed = true;
                let fallback = verify_gluing_equivalence(&s, r, conv, Mode::Betti, max_dim)?;
                out.push(json!({ "scale": r, "hypothesis_failed": report, "betti_comparison": fallback }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Output {
        value: per_scale(single, out),
        hypothesis_failed: failed,
    })
}

fn cmd_condition_r(cli: &Cli, input: &Value, conv: Convention) -> Result<Output> {
    let mut v = input.clone();
    if let Some(a) = v.get("ambient") {
        let m = space_of(a)?;
        v["ambient"] = serde_json::to_value(m)?;
    }
    let c: CechSplit = parse(&v, "landmark split")?;
    let mut landmarks = c.x_landmarks.clone();
    landmarks.extend(c.y_landmarks.iter().filter(|l| !c.x_landmarks.contains(l)).cloned());
    let (rs, single) = scales(cli, &c.ambient.restrict_labels(&landmarks)?)?;
    let mut failed = false;
    let mut out = Vec::new();
    for r in rs {
        let rep = cech_condition_r(&c, r, conv, cli.max_dim)?;
        failed |= rep.verdict == Verdict::Fail;
        out.push(serde_json::to_value(rep)?);
    }
    Ok(Output {
        value: per_scale(single, out),
        hypothesis_failed: failed,
    })
}

fn inadmissible(e: FamilyError) -> Result<Output> {
    match e {
        FamilyError::InadmissibleStep { step, report } => Ok(Output {
            value: json!({ "admissible": false, "step": step, "report": report }),
            hypothesis_failed: true,
        }),
        other => Err(other.into()),
    }
}

fn cmd_family(input: &Value) -> Result<Output> {
    let recipe: GluingRecipe = parse(input, "recipe")?;
    match build_recipe(&recipe) {
        Ok(b) => {
            let mut v = serde_json::to_value(&b)?;
            v.as_object_mut().unwrap().insert("admissible".into(), Value::Bool(true));
            Ok(Output::ok(v))
        }
        Err(e) => inadmissible(e),
    }
}

fn cmd_predict(cli: &Cli, input: &Value) -> Result<Output> {
    let recipe: GluingRecipe = parse(input, "recipe")?;
    match recipe_experiment(&recipe, cli.max_dim.unwrap_or(2)) {
        Ok(exp) => Ok(Output::ok(serde_json::to_value(exp)?)),
        Err(e) => inadmissible(e),
    }
}

#[derive(Deserialize)]
struct LadderInput {
    n: usize,
    circumference: Length,
    m: usize,
    width: Length,
}

fn cmd_ladder(cli: &Cli, input: &Value, conv: Convention) -> Result<Output> {
    let p: LadderInput = parse(input, "ladder")?;
    let ladder = build_circular_ladder(p.n, p.circumference, p.m, p.width)?;
    let (rs, single) = scales(cli, &ladder.sup)?;
    let reports = ladder_sweep(&ladder, &rs, conv, cli.max_dim.unwrap_or(1))?;
    let failed = single && reports.iter().any(|r| !r.hypotheses);
    Ok(Output {
        value: json!({
            "points": ladder.sup.len(),
            "x0": ladder.x0,
            "y0": ladder.y0,
            "graph": ladder.graph,
            "reports": reports,
        }),
        hypothesis_failed: failed,
    })
}
