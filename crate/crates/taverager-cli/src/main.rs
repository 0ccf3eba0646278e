//! Command line front end: config ingestion, command dispatch, trace logging
//! and diagram emission.
//!
//! Exit codes: 0 success / criterion holds, 1 invalid input, 2 definite
//! negative verdict (criterion fails, non-aisle, certified non-termination),
//! 3 inconclusive (budget exhausted).

mod config;
mod dot;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Parser, Subcommand};

use config::{parse_obj, parse_tube_obj, Config};
use taverager::action::{average_aisle_over_group, check_preservation, validate_action};
use taverager::action::DEFAULT_ORDER_CAP;
use taverager::aisle::{aisle_closure, classify, TStructure};
use taverager::averaging::{
    average_aisles, default_budget, intersect_aisles, naive_run, refined_run, RunStatus, RunTrace,
};
use taverager::domestic::{criterion_c, load_builtin, Verdict};
use taverager::engine::Engine;
use taverager::id::IndecId;
use taverager::tube::{ext_middle_terms, length_bound_check, tube_ext_nonzero, tube_hom_nonzero, TubeObj};

#[derive(Parser)]
#[command(name = "taverager", version, about = "Truncate and average t-structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the configured t-structures and optional group action.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the truncation iteration on one object, printing the trace.
    Truncate {
        #[arg(long)]
        config: PathBuf,
        /// Object name, or a `+`-joined sum of names; `0` is the zero object.
        object: String,
        /// Indices into the configured t-structures fixing the order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long)]
        budget: Option<usize>,
        /// Use the naive iteration instead of the refined one.
        #[arg(long)]
        naive: bool,
    },
    /// Average the configured aisles; optionally write traces and diagrams.
    Average {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersect the configured aisles.
    Intersect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Evaluate the domestic existence criterion on traces or a builtin.
    Criterion {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Stable tube calculus helpers.
    Tube {
        #[arg(long)]
        rho: usize,
        #[command(subcommand)]
        op: TubeOp,
    },
    /// Average the first configured aisle over the configured group.
    Act {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit DOT (and SVG) window diagrams for the configured t-structures.
    Render {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TubeOp {
    /// Middle terms of the non-split extension of the first object by the second.
    Ext { t: String, tp: String },
    /// Hom/Ext vanishing table against one fixed object.
    Hammock { t: String },
    /// Check the chain length bound for a truncation setup.
    Bound {
        #[arg(long)]
        t: String,
        #[arg(long, value_delimiter = ',')]
        rprime: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        r: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Validate { config } => cmd_validate(&config),
        Cmd::Truncate { config, object, order, budget, naive } => {
            cmd_truncate(&config, &object, order.as_deref(), budget, naive)
        }
        Cmd::Average { config, order, budget, out } => {
            cmd_average(&config, order.as_deref(), budget, out.as_deref())
        }
        Cmd::Intersect { config, order } => cmd_intersect(&config, order.as_deref()),
        Cmd::Criterion { config, builtin } => cmd_criterion(config.as_deref(), builtin.as_deref()),
        Cmd::Tube { rho, op } => cmd_tube(rho, op),
        Cmd::Act { config } => cmd_act(&config),
        Cmd::Render { config, out } => cmd_render(&config, out.as_deref()),
    }
}

fn cmd_validate(path: &std::path::Path) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let mut all_ok = true;
    let mut structures = cfg.t_structures(&eng)?;
    for (ts, tcfg) in structures.iter_mut().zip(&cfg.t_structures) {
        if tcfg.closed {
            let gens: BTreeSet<IndecId> = tcfg
                .generators
                .iter()
                .map(|s| Ok(IndecId::parse(s)?))
                .collect::<anyhow::Result<_>>()?;
            let closure = aisle_closure(&eng, &gens)?;
            if let Some(extra) = closure.difference(&gens).next() {
                println!(
                    "t-structure {}: generator list is not closed, witness {extra}",
                    ts.name
                );
                all_ok = false;
                continue;
            }
        }
        match ts.validate(&eng) {
            Ok(()) => {
                let f = classify(&eng, ts);
                println!(
                    "t-structure {}: Validated (stable={}, bounded={}, nondegenerate={})",
                    ts.name, f.stable, f.bounded, f.nondegenerate_on_window
                );
            }
            Err(e) => {
                println!("t-structure {}: Invalid ({e})", ts.name);
                all_ok = false;
            }
        }
    }
    if let Some(action) = cfg.group(&eng.window)? {
        let report = validate_action(&eng.window, &action, DEFAULT_ORDER_CAP)?;
        println!("group: valid, order {}", report.order);
    }
    Ok(ExitCode::from(if all_ok { 0 } else { 1 }))
}

fn print_trace(trace: &RunTrace) {
    for s in &trace.steps {
        println!("{}; phase={}; x={}; y={}; waste={}", s.n, s.phase, s.x, s.y, s.waste);
    }
}

fn status_exit(status: &RunStatus) -> ExitCode {
    match status {
        RunStatus::Terminated(_) => ExitCode::from(0),
        RunStatus::CertifiedNonTerminating { .. } => ExitCode::from(2),
        RunStatus::BudgetExhausted(_) => ExitCode::from(3),
    }
}

fn cmd_truncate(
    path: &std::path::Path,
    object: &str,
    order: Option<&[usize]>,
    budget: Option<usize>,
    naive: bool,
) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let structures = cfg.t_structures(&eng)?;
    let ordered: Vec<TStructure> =
        cfg.ordered(&structures, order)?.into_iter().cloned().collect();
    if ordered.is_empty() {
        bail!("config declares no t-structures");
    }
    let t = parse_obj(object)?;
    let budget = budget
        .or(cfg.options.budget)
        .unwrap_or_else(|| default_budget(&eng, ordered.len()));
    let trace = if naive {
        naive_run(&eng, &t, &ordered, budget)?
    } else {
        refined_run(&eng, &t, &ordered, budget)?
    };
    print_trace(&trace);
    match &trace.status {
        RunStatus::Terminated(n) => println!("status: terminated at step {n}"),
        RunStatus::CertifiedNonTerminating { at, period, shift } => {
            println!("status: certified non-terminating (at={at}, period={period}, shift={shift})")
        }
        RunStatus::BudgetExhausted(w) => println!("status: budget exhausted ({w})"),
    }
    Ok(status_exit(&trace.status))
}

fn describe_aisle(eng: &Engine, label: &str, ts: &TStructure) -> String {
    let all: BTreeSet<IndecId> = eng.window.indecs().iter().cloned().collect();
    if ts.aisle.closure == all {
        format!("{label} = all")
    } else {
        let names: Vec<String> = ts.aisle.closure.iter().map(|x| x.to_string()).collect();
        format!("{label} = {{{}}}", names.join(", "))
    }
}

fn write_out(dir: &std::path::Path, name: &str, content: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn cmd_average(
    path: &std::path::Path,
    order: Option<&[usize]>,
    budget: Option<usize>,
    out: Option<&std::path::Path>,
) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let structures = cfg.t_structures(&eng)?;
    let ordered: Vec<TStructure> =
        cfg.ordered(&structures, order)?.into_iter().cloned().collect();
    if ordered.is_empty() {
        bail!("config declares no t-structures");
    }
    let (avg, report) = average_aisles(&eng, &ordered)?;
    let verdict = if report.validated {
        "Validated".to_string()
    } else {
        format!("not validated, witness {:?}", report.witness)
    };
    println!("{}; {verdict}", describe_aisle(&eng, "X^I", &avg));
    if let Some(dir) = out {
        let budget = budget
            .or(cfg.options.budget)
            .unwrap_or_else(|| default_budget(&eng, ordered.len()));
        for id in eng.window.indecs() {
            if !eng.window.interior_degrees().contains(&id.degree()) {
                continue;
            }
            let trace =
                refined_run(&eng, &taverager::id::Obj::one(id.clone()), &ordered, budget)?;
            let mut text = String::new();
            for s in &trace.steps {
                text.push_str(&format!(
                    "{}; phase={}; x={}; y={}; waste={}\n",
                    s.n, s.phase, s.x, s.y, s.waste
                ));
            }
            text.push_str(&format!("status: {:?}\n", trace.status));
            write_out(dir, &format!("{}.trace", sanitize(&id.to_string())), &text)?;
        }
        write_out(dir, "average.dot", &dot::to_dot(&eng.window, &avg))?;
        write_out(dir, "average.svg", &dot::to_svg(&eng.window, &avg))?;
    }
    Ok(match (report.validated, &report.witness) {
        (true, _) => ExitCode::from(0),
        (false, Some((_, RunStatus::BudgetExhausted(_)))) => ExitCode::from(3),
        (false, _) => ExitCode::from(2),
    })
}

fn cmd_intersect(path: &std::path::Path, order: Option<&[usize]>) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let structures = cfg.t_structures(&eng)?;
    let ordered: Vec<TStructure> =
        cfg.ordered(&structures, order)?.into_iter().cloned().collect();
    if ordered.is_empty() {
        bail!("config declares no t-structures");
    }
    let (meet, report) = intersect_aisles(&eng, &ordered)?;
    let verdict = if report.validated {
        "Validated".to_string()
    } else {
        format!("not validated, witness {:?}", report.witness)
    };
    println!(
        "{}; {verdict}; coaisle_agrees={}",
        describe_aisle(&eng, "X_I", &meet),
        report.coaisle_agrees
    );
    Ok(ExitCode::from(if report.validated { 0 } else { 2 }))
}

fn cmd_criterion(
    path: Option<&std::path::Path>,
    builtin: Option<&str>,
) -> anyhow::Result<ExitCode> {
    let (quiver, traces) = match (path, builtin) {
        (None, Some(name)) => {
            let (preset, traces) = load_builtin(name)?;
            (preset.quiver()?, traces)
        }
        (Some(p), None) => {
            let cfg = Config::load(p)?;
            (cfg.preset()?.quiver()?, cfg.traces()?)
        }
        _ => bail!("exactly one of --config and --builtin is required"),
    };
    if traces.is_empty() {
        bail!("no t-structure traces given");
    }
    for t in &traces {
        t.validate(&quiver)?;
    }
    match criterion_c(&quiver, &traces)? {
        Verdict::Holds => {
            println!("criterion (c): holds");
            Ok(ExitCode::from(0))
        }
        Verdict::Fails((name, degree)) => {
            println!("criterion (c): fails at component {name}@d{degree}");
            Ok(ExitCode::from(2))
        }
    }
}

fn fmt_opt(o: &Option<TubeObj>) -> String {
    match o {
        Some(t) => t.to_string(),
        None => "0".to_string(),
    }
}

fn cmd_tube(rho: usize, op: TubeOp) -> anyhow::Result<ExitCode> {
    match op {
        TubeOp::Ext { t, tp } => {
            let t = parse_tube_obj(&t, rho)?;
            let tp = parse_tube_obj(&tp, rho)?;
            let (e1, e2) = ext_middle_terms(&t, &tp)?;
            println!("e1 = {}", fmt_opt(&e1));
            println!("e2 = {}", fmt_opt(&e2));
        }
        TubeOp::Hammock { t } => {
            let t = parse_tube_obj(&t, rho)?;
            // Rows are lengths, columns socles; H = Hom(t,-) only,
            // E = Ext^1(t,-) only, B = both, . = neither.
            println!("hammock of {t} (rows: length 1..{}, cols: socle 1..{rho})", 2 * rho);
            for len in 1..=2 * rho {
                let mut row = String::new();
                for socle in 1..=rho {
                    let x = TubeObj::new(rho, socle as i64, len, t.degree);
                    let h = tube_hom_nonzero(&t, &x)?;
                    let e = tube_ext_nonzero(&t, &x)?;
                    row.push(match (h, e) {
                        (true, true) => 'B',
                        (true, false) => 'H',
                        (false, true) => 'E',
                        (false, false) => '.',
                    });
                }
                println!("l={len:2}  {row}");
            }
        }
        TubeOp::Bound { t, rprime, r } => {
            let t = parse_tube_obj(&t, rho)?;
            let parse_list = |v: &[String]| -> anyhow::Result<Vec<TubeObj>> {
                v.iter().filter(|s| !s.trim().is_empty()).map(|s| parse_tube_obj(s, rho)).collect()
            };
            let rp = parse_list(&rprime)?;
            let rr = parse_list(&r)?;
            let bound = rho * t.length.div_ceil(rho);
            let ok = length_bound_check(&t, &rp, &rr)?;
            println!("bound {bound} {}", if ok { "verified" } else { "violated" });
            if !ok {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::from(0))
}

fn cmd_act(path: &std::path::Path) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let structures = cfg.t_structures(&eng)?;
    let ts = structures
        .first()
        .ok_or_else(|| anyhow!("config declares no t-structures"))?;
    let action = cfg
        .group(&eng.window)?
        .ok_or_else(|| anyhow!("config declares no group"))?;
    let report = validate_action(&eng.window, &action, DEFAULT_ORDER_CAP)?;
    println!("group: valid, order {}", report.order);
    let (avg, avg_report) = average_aisle_over_group(&eng, ts, &action)?;
    let verdict = if avg_report.validated {
        "Validated".to_string()
    } else {
        format!("not validated, witness {:?}", avg_report.witness)
    };
    println!("{}; {verdict}; G-invariant", describe_aisle(&eng, "X^G", &avg));
    let pres = check_preservation(&eng, std::slice::from_ref(ts), &avg);
    println!(
        "flags: stable={}, bounded={}, nondegenerate={}",
        pres.averaged.stable, pres.averaged.bounded, pres.averaged.nondegenerate_on_window
    );
    Ok(match (avg_report.validated, &avg_report.witness) {
        (true, _) => ExitCode::from(0),
        (false, Some((_, RunStatus::BudgetExhausted(_)))) => ExitCode::from(3),
        (false, _) => ExitCode::from(2),
    })
}

fn cmd_render(path: &std::path::Path, out: Option<&std::path::Path>) -> anyhow::Result<ExitCode> {
    let cfg = Config::load(path)?;
    let eng = cfg.engine()?;
    let structures = cfg.t_structures(&eng)?;
    if structures.is_empty() {
        bail!("config declares no t-structures");
    }
    match out {
        Some(dir) => {
            for ts in &structures {
                let base = sanitize(&ts.name);
                let text = dot::to_dot(&eng.window, ts);
                // Round-trip guard: the emitted roles must parse back intact.
                let parsed = dot::parse_roles(&text);
                for id in eng.window.indecs() {
                    let want = dot::role_of(ts, id).name();
                    if parsed.get(&id.to_string()).map(String::as_str) != Some(want) {
                        bail!("diagram for `{}` failed the role round-trip at {id}", ts.name);
                    }
                }
                write_out(dir, &format!("{base}.dot"), &text)?;
                write_out(dir, &format!("{base}.svg"), &dot::to_svg(&eng.window, ts))?;
            }
        }
        None => print!("{}", dot::to_dot(&eng.window, &structures[0])),
    }
    Ok(ExitCode::from(0))
}
