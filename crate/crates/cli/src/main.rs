mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use majorana::analysis::{
    dicke_cpp, dicke_entanglement, duality_report, entanglement_bounds, moment_report, MOMENT_TOL,
};
use majorana::classical::{classical_points, thomson_energy, ClassicalConfig, ClassicalProblem};
use majorana::io::{
    fmt_f64, grid_csv, read_points, reference_cell, sidecar_path, to_json, write_atomic, PointsFile, RunManifest,
    StateFile, TableColumn,
};
use majorana::majorana::{amplitude_grid, points_to_state, state_to_points};
use majorana::mbqc::eta_threshold;
use majorana::search::{evaluate_candidate, search_max, search_scan, SearchConfig, SearchMode};
use majorana::solver::{find_cpps, verify_cpp_structure, EntanglementValue, SolverConfig};
use majorana::verify::{run_verify, Suite, VerifyOptions};
use majorana::{BlochPoint, Error, Result};

use input::load_state;

const THREADS_ENV: &str = "MAJ_ENT_THREADS";
const SCAN_ORDERS: [usize; 4] = [2, 3, 4, 5];
/// Table rows from this n on use the support scan for the positive column.
const SCAN_FROM: usize = 9;

/// Geometric entanglement of symmetric multiqubit states via the Majorana representation.
#[derive(Parser, Debug)]
#[command(name = "maj-ent", version, about)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; overrides MAJ_ENT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result to this file (JSON, or CSV plus a manifest sidecar).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in manifests (makes outputs run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 400)]
    n_starts: usize,
    #[arg(long, default_value_t = 1e-12)]
    refine_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    dedup_angle: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Restrict positive states to their allowed meridians.
    #[arg(long)]
    meridian_only: bool,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> Result<SolverConfig> {
        let c = SolverConfig {
            n_starts: self.n_starts,
            refine_tol: self.refine_tol,
            dedup_angle: self.dedup_angle,
            max_iter: self.max_iter,
            meridian_only: self.meridian_only,
            rng_seed: seed,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geometric entanglement of a state.
    Ent {
        /// State file, Platonic solid name, or dicke:N:K / ghz:N / w:N.
        state: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Closest product points and their structure.
    Cpps {
        state: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Majorana points of a state.
    Points { state: String },
    /// State with the given Majorana points.
    State { points: PathBuf },
    /// Closed-form results for Dicke states.
    Dicke {
        #[arg(long)]
        n: usize,
        /// Omit to list every k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Entanglement bounds for a range of n.
    Bounds {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// Spin vector and second moments of the Majorana points.
    Moments {
        state: String,
        /// Treat the argument as a points file.
        #[arg(long)]
        points: bool,
    },
    /// Compare Majorana points and closest product points of two states crosswise.
    Duality {
        a: String,
        b: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Search for the most entangled state.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "positive")]
        mode: SearchMode,
        #[arg(long)]
        rot_order: Option<usize>,
        #[arg(long)]
        rot_offset: Option<usize>,
        /// Also search the supports k = k0 (mod m) for m = 2..=5, then refine the best
        /// state without a mask.
        #[arg(long)]
        scan: bool,
        #[command(flatten)]
        budget: SearchArgs,
    },
    /// Thomson or Tóth point configurations, evaluated as Majorana points.
    Classical {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "thomson")]
        problem: ClassicalProblem,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Reproduce the table of maximal entanglement values.
    Table {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Also search over general complex states.
        #[arg(long)]
        general: bool,
        #[command(flatten)]
        budget: SearchArgs,
    },
    /// Amplitude function sampled on a (theta, phi) grid, as CSV.
    AmplitudeGrid {
        state: String,
        #[arg(long, default_value_t = 91)]
        n_theta: usize,
        #[arg(long, default_value_t = 180)]
        n_phi: usize,
    },
    /// Approximate-MBQC threshold for the Dicke family with k excitations.
    Mbqc {
        #[arg(long)]
        k: usize,
    },
    /// Run the invariant suites.
    Verify {
        /// Suite to run; repeat for several. Defaults to every fast suite.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Perturb computed values to demonstrate that the checks fail.
        #[arg(long)]
        corrupt: bool,
    },
    /// Positivity, reality and rotational symmetry of a state.
    Classify { state: String },
}

/// What a command produced: human-readable text plus a JSON record, or CSV.
struct Output {
    command: &'static str,
    config: Value,
    text: String,
    json: Value,
    csv: Option<String>,
    failed: bool,
}

impl Output {
    fn new(command: &'static str, config: Value, text: String, json: Value) -> Self {
        Self {
            command,
            config,
            text,
            json,
            csv: None,
            failed: false,
        }
    }
}

fn point_json(p: &BlochPoint) -> Value {
    json!([p.theta(), p.phi()])
}

fn point_text(p: &BlochPoint) -> String {
    format!("{} {}", fmt_f64(p.theta()), fmt_f64(p.phi()))
}

fn ent_text(e: &EntanglementValue) -> String {
    format!("Eg = {:.9}\nEG = {:.9}\n", e.eg_log2, e.eg_linear)
}

fn apply_search_budget(mut c: SearchConfig, b: &SearchArgs, seed: u64) -> SearchConfig {
    if let Some(r) = b.restarts {
        c.outer_restarts = r;
    }
    if let Some(e) = b.max_evals {
        c.max_evals = e;
    }
    c.rng_seed = seed;
    c.inner.rng_seed = seed;
    c
}

fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    let out = match &cli.command {
        Command::Ent { state, solver } => {
            let cfg = solver.config(seed)?;
            let s = load_state(state)?;
            let set = find_cpps(&s, &cfg)?;
            let e = EntanglementValue::from_max_amplitude(set.max_value);
            let mut text = ent_text(&e);
            text.push_str(&format!(
                "CPPs: {}{}\n",
                set.cpps.len(),
                if set.is_ring { " (ring)" } else { "" }
            ));
            let json = json!({
                "eg_log2": e.eg_log2,
                "eg_linear": e.eg_linear,
                "cpps": set.cpps.iter().map(point_json).collect::<Vec<_>>(),
                "is_ring": set.is_ring,
                "ring_theta": set.ring_theta,
            });
            Output::new("ent", json!({ "input": state, "solver": cfg }), text, json)
        }
        Command::Cpps { state, solver } => {
            let cfg = solver.config(seed)?;
            let s = load_state(state)?;
            let set = find_cpps(&s, &cfg)?;
            let mut text = format!("max f = {}\n", fmt_f64(set.max_value));
            if let Some(t) = set.ring_theta {
                text.push_str(&format!("ring at theta = {}\n", fmt_f64(t)));
            }
            text.push_str(&format!("{} CPPs (theta phi):\n", set.cpps.len()));
            for p in &set.cpps {
                text.push_str(&point_text(p));
                text.push('\n');
            }
            let cls = s.canonical_phase().classify(majorana::state::DEFAULT_ZERO_TOL);
            let structure = if cls.is_positive {
                let rep = verify_cpp_structure(&s, &set)?;
                if let Some(class) = rep.class {
                    text.push_str(&format!(
                        "class {:?}, bound {}, structure {}\n",
                        class,
                        rep.bound.map_or("-".to_string(), |b| b.to_string()),
                        if rep.passed() { "ok" } else { "VIOLATED" }
                    ));
                }
                serde_json::to_value(&rep)?
            } else {
                Value::Null
            };
            let json = json!({
                "max_value": set.max_value,
                "cpps": set.cpps.iter().map(point_json).collect::<Vec<_>>(),
                "is_ring": set.is_ring,
                "ring_theta": set.ring_theta,
                "structure": structure,
            });
            Output::new("cpps", json!({ "input": state, "solver": cfg }), text, json)
        }
        Command::Points { state } => {
            let s = load_state(state)?;
            let pts = state_to_points(&s)?;
            let text: String = pts.points().iter().map(|p| point_text(p) + "\n").collect();
            let json = serde_json::to_value(PointsFile::from_points(pts.points(), None))?;
            Output::new("points", json!({ "input": state }), text, json)
        }
        Command::State { points } => {
            let pts = read_points(points).map_err(|e| match e {
                Error::Io(io) => Error::Parse(format!("cannot read points file: {io}")),
                other => other,
            })?;
            let s = points_to_state(&pts);
            let text: String = s
                .amps()
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{k} {} {}\n", fmt_f64(a.re), fmt_f64(a.im)))
                .collect();
            let json = serde_json::to_value(StateFile::from_state(&s, None))?;
            Output::new("state", json!({ "input": points }), text, json)
        }
        Command::Dicke { n, k } => {
            let ks: Vec<usize> = match k {
                Some(k) => vec![*k],
                None => (0..=*n).collect(),
            };
            let mut text = format!("{:>4} {:>14} {:>20}\n", "k", "Eg", "cpp_theta");
            let mut rows = Vec::new();
            for &k in &ks {
                let p = dicke_cpp(*n, k)?;
                let e = dicke_entanglement(*n, k);
                text.push_str(&format!("{k:>4} {e:>14.9} {:>20}\n", fmt_f64(p.theta())));
                rows.push(json!({ "k": k, "eg_log2": e, "cpp_theta": p.theta() }));
            }
            Output::new(
                "dicke",
                json!({ "n": n, "k": k }),
                text,
                json!({ "n": n, "rows": rows }),
            )
        }
        Command::Bounds { n_min, n_max } => {
            let mut text = format!(
                "{:>4} {:>14} {:>14} {:>14} {:>10} {:>10}\n",
                "n", "stirling", "dicke", "log2(n+1)", "n/2", "n-1"
            );
            let mut csv = String::from("n,stirling_lower,dicke_lower,upper,general_lower,general_upper\n");
            let mut rows = Vec::new();
            for n in *n_min..=*n_max {
                let b = entanglement_bounds(n)?;
                text.push_str(&format!(
                    "{:>4} {:>14.9} {:>14.9} {:>14.9} {:>10.1} {:>10.1}\n",
                    n, b.stirling_lower, b.dicke_lower, b.upper, b.general_lower, b.general_upper
                ));
                csv.push_str(&format!(
                    "{n},{},{},{},{},{}\n",
                    fmt_f64(b.stirling_lower),
                    fmt_f64(b.dicke_lower),
                    fmt_f64(b.upper),
                    fmt_f64(b.general_lower),
                    fmt_f64(b.general_upper)
                ));
                rows.push(serde_json::to_value(b)?);
            }
            let mut o = Output::new(
                "bounds",
                json!({ "n_min": n_min, "n_max": n_max }),
                text,
                json!({ "rows": rows }),
            );
            o.csv = Some(csv);
            o
        }
        Command::Moments { state, points } => {
            let pts = if *points {
                read_points(std::path::Path::new(state))?
            } else {
                state_to_points(&load_state(state)?)?
            };
            let m = moment_report(&pts);
            let [x, y, z] = m.spin_vector;
            let text = format!(
                "spin vector = ({}, {}, {})\n|spin vector| = {}\nsecond-moment deviation = {}\nanticoherent: {}\n2-design: {}\n",
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(z),
                fmt_f64(m.spin_norm()),
                fmt_f64(m.second_moment_deviation),
                m.is_anticoherent(MOMENT_TOL),
                m.is_design(2, MOMENT_TOL)
            );
            let json = json!({
                "spin_vector": m.spin_vector,
                "spin_norm": m.spin_norm(),
                "second_moment_deviation": m.second_moment_deviation,
                "anticoherent": m.is_anticoherent(MOMENT_TOL),
                "design2": m.is_design(2, MOMENT_TOL),
            });
            Output::new("moments", json!({ "input": state, "points": points }), text, json)
        }
        Command::Duality { a, b, solver } => {
            let cfg = solver.config(seed)?;
            let rep = duality_report(&load_state(a)?, &load_state(b)?, &cfg)?;
            let text = format!(
                "MPs(a) vs CPPs(b): {}\nCPPs(a) vs MPs(b): {}\n{}\n",
                fmt_f64(rep.mp_a_to_cpp_b),
                fmt_f64(rep.cpp_a_to_mp_b),
                if rep.dual_pair { "dual pair" } else { "not dual" }
            );
            let json = json!({
                "mp_a_to_cpp_b": rep.mp_a_to_cpp_b,
                "cpp_a_to_mp_b": rep.cpp_a_to_mp_b,
                "dual_pair": rep.dual_pair,
                "cpps_a": rep.cpps_a.iter().map(point_json).collect::<Vec<_>>(),
                "cpps_b": rep.cpps_b.iter().map(point_json).collect::<Vec<_>>(),
            });
            Output::new("duality", json!({ "a": a, "b": b, "solver": cfg }), text, json)
        }
        Command::Search {
            n,
            mode,
            rot_order,
            rot_offset,
            scan,
            budget,
        } => {
            let mut cfg = apply_search_budget(SearchConfig::new(*n, *mode), budget, seed);
            cfg.rot_order = *rot_order;
            cfg.rot_offset = *rot_offset;
            let res = if *scan {
                search_scan(&cfg, &SCAN_ORDERS)?
            } else {
                search_max(&cfg)?
            };
            let mut text = ent_text(&res.entanglement);
            text.push_str(&format!(
                "restarts agreeing: {}/{}{}\n",
                res.restarts_agreeing,
                res.restarts,
                if res.converged() { "" } else { " (UNCONVERGED)" }
            ));
            for (k, a) in res.state.amps().iter().enumerate() {
                if a.norm() > 1e-10 {
                    text.push_str(&format!("a_{k} = {} {:+.16e}i\n", fmt_f64(a.re), a.im));
                }
            }
            let mut json = serde_json::to_value(StateFile::from_state(&res.state, None))?;
            json["eg_log2"] = json!(res.entanglement.eg_log2);
            json["eg_linear"] = json!(res.entanglement.eg_linear);
            json["restarts_agreeing"] = json!(res.restarts_agreeing);
            json["restarts"] = json!(res.restarts);
            json["points"] = json!(res.points.points().iter().map(point_json).collect::<Vec<_>>());
            json["history"] = json!(res.history);
            let mut config = serde_json::to_value(cfg)?;
            config["scan"] = json!(scan);
            Output::new("search", config, text, json)
        }
        Command::Classical { n, problem, restarts } => {
            let cfg = ClassicalConfig {
                restarts: *restarts,
                rng_seed: seed,
                ..ClassicalConfig::new(*n, *problem)
            };
            let pts = classical_points(&cfg)?;
            let inner = SolverConfig {
                rng_seed: seed,
                ..SolverConfig::default()
            };
            let eval = evaluate_candidate(&pts, &inner)?;
            let mut text = format!(
                "energy = {}\nmin angle = {}\n",
                fmt_f64(thomson_energy(pts.points())),
                fmt_f64(pts.min_separation())
            );
            text.push_str(&ent_text(&eval.entanglement));
            for p in pts.points() {
                text.push_str(&point_text(p));
                text.push('\n');
            }
            let mut json = serde_json::to_value(PointsFile::from_points(pts.points(), None))?;
            json["energy"] = json!(thomson_energy(pts.points()));
            json["min_angle"] = json!(pts.min_separation());
            json["eg_log2"] = json!(eval.entanglement.eg_log2);
            Output::new("classical", serde_json::to_value(cfg)?, text, json)
        }
        Command::Table {
            n_min,
            n_max,
            general,
            budget,
        } => table(*n_min, *n_max, *general, budget, seed)?,
        Command::AmplitudeGrid { state, n_theta, n_phi } => {
            let s = load_state(state)?;
            let rows = amplitude_grid(&s, *n_theta, *n_phi)?;
            let csv = grid_csv(&rows);
            let mut o = Output::new(
                "amplitude-grid",
                json!({ "input": state, "n_theta": n_theta, "n_phi": n_phi }),
                csv.clone(),
                json!({ "rows": rows }),
            );
            o.csv = Some(csv);
            o
        }
        Command::Mbqc { k } => {
            let r = eta_threshold(*k)?;
            let text = format!(
                "k = {}\nE_G asymptotic = {:.9}\neta* = {}\n0.001 k^(-3/2) = {}\nruled out for eta < eta*: {}\n",
                r.k,
                r.eg_linear_asymptotic,
                fmt_f64(r.eta_threshold),
                fmt_f64(r.reference_threshold),
                r.ruled_out
            );
            Output::new("mbqc", json!({ "k": k }), text, serde_json::to_value(r)?)
        }
        Command::Verify { suites, n, corrupt } => {
            let suites = if suites.is_empty() {
                Suite::DEFAULT.to_vec()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?
            };
            let opts = VerifyOptions {
                suites,
                n: *n,
                corrupt: *corrupt,
                seed,
                solver: SolverConfig {
                    rng_seed: seed,
                    ..SolverConfig::default()
                },
            };
            let reports = run_verify(&opts)?;
            let mut text = String::new();
            for rep in &reports {
                text.push_str(&format!(
                    "{} {} ({} checks)\n",
                    if rep.passed { "PASS" } else { "FAIL" },
                    rep.suite,
                    rep.checks.len()
                ));
                for c in &rep.checks {
                    if !c.passed || opts.n.is_some() {
                        text.push_str(&format!(
                            "  {} {}: value {} expected {} tol {:e}\n",
                            if c.passed { "ok  " } else { "FAIL" },
                            c.name,
                            fmt_f64(c.value),
                            c.expected.map_or("-".to_string(), fmt_f64),
                            c.tol
                        ));
                    }
                }
            }
            let failed = reports.iter().any(|r| !r.passed);
            text.push_str(if failed { "FAIL\n" } else { "PASS\n" });
            let mut o = Output::new(
                "verify",
                json!({ "suites": opts.suites, "n": n, "corrupt": corrupt }),
                text,
                json!({ "suites": reports, "passed": !failed }),
            );
            o.failed = failed;
            o
        }
        Command::Classify { state } => {
            let s = load_state(state)?;
            let c = s.classify(majorana::state::DEFAULT_ZERO_TOL);
            let text = format!(
                "n = {}\npositive: {}\nreal: {}\nrotation orders: {:?}\nDicke: {}\n",
                s.n(),
                c.is_positive,
                c.is_real,
                c.rot_orders,
                s.is_dicke(majorana::state::DEFAULT_ZERO_TOL)
            );
            let mut json = serde_json::to_value(&c)?;
            json["n"] = json!(s.n());
            Output::new("classify", json!({ "input": state }), text, json)
        }
    };
    Ok(out)
}

fn cell(value: Option<f64>, converged: bool, column: TableColumn, n: usize) -> (String, String, String, String) {
    let Some(v) = value else {
        return ("".into(), "".into(), "".into(), "".into());
    };
    let reference = reference_cell(n, column);
    let delta = reference.as_ref().map(|c| (v - c.value).abs());
    let status = match (&reference, delta) {
        _ if !converged => "UNCONVERGED",
        (Some(c), Some(d)) if d <= c.tol => "OK",
        (Some(c), _) if v > c.value => "EXCEEDS",
        (Some(_), _) => "MISMATCH",
        (None, _) => "NOREF",
    };
    (
        format!("{v:.9}"),
        reference.map_or(String::new(), |c| format!("{:.9}", c.value)),
        delta.map_or(String::new(), |d| format!("{d:.3e}")),
        status.to_string(),
    )
}

fn table(n_min: usize, n_max: usize, general: bool, budget: &SearchArgs, seed: u64) -> Result<Output> {
    if n_min < 2 || n_max > 12 || n_min > n_max {
        return Err(Error::Domain(
            "table rows must satisfy 2 <= n_min <= n_max <= 12".into(),
        ));
    }
    let mut csv = String::from(
        "n,dicke_max,positive_max,positive_ref,positive_delta,positive_status,general_max,general_ref,general_delta,general_status,upper\n",
    );
    let mut text = String::new();
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let dicke = dicke_entanglement(n, n / 2);
        let pos_cfg = apply_search_budget(SearchConfig::new(n, SearchMode::Positive), budget, seed);
        let pos = if n >= SCAN_FROM {
            search_scan(&pos_cfg, &SCAN_ORDERS)?
        } else {
            search_max(&pos_cfg)?
        };
        let gen = if general {
            let mut cfg = apply_search_budget(SearchConfig::new(n, SearchMode::General), budget, seed);
            if n == 12 {
                // Icosahedral support mask.
                cfg.rot_order = Some(5);
                cfg.rot_offset = Some(1);
                cfg.pin_north = false;
            }
            Some(if cfg.rot_order.is_some() {
                search_max(&cfg)?
            } else {
                search_scan(&cfg, &[])?
            })
        } else {
            None
        };
        let upper = ((n + 1) as f64).log2();
        let p = cell(
            Some(pos.entanglement.eg_log2),
            pos.converged(),
            TableColumn::Positive,
            n,
        );
        let g = cell(
            gen.as_ref().map(|r| r.entanglement.eg_log2),
            gen.as_ref().is_some_and(|r| r.converged()),
            TableColumn::General,
            n,
        );
        csv.push_str(&format!(
            "{n},{dicke:.9},{},{},{},{},{},{},{},{},{upper:.9}\n",
            p.0, p.1, p.2, p.3, g.0, g.1, g.2, g.3
        ));
        text.push_str(&format!(
            "{n:>3} {dicke:>12.9} {:>12} {:>12} {:>12} {:>12} {upper:>12.9}\n",
            p.0, p.3, g.0, g.3
        ));
        rows.push(json!({
            "n": n,
            "dicke_max": dicke,
            "positive_max": pos.entanglement.eg_log2,
            "positive_status": p.3,
            "general_max": gen.as_ref().map(|r| r.entanglement.eg_log2),
            "general_status": g.3,
            "upper": upper,
        }));
    }
    let mut o = Output::new(
        "table",
        json!({ "n_min": n_min, "n_max": n_max, "general": general, "restarts": budget.restarts, "max_evals": budget.max_evals, "seed": seed }),
        format!(
            "{:>3} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n{text}",
            "n", "dicke", "positive", "status", "general", "status", "log2(n+1)"
        ),
        json!({ "rows": rows }),
    );
    o.csv = Some(csv);
    Ok(o)
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let from_env = std::env::var(THREADS_ENV).ok().map(|v| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))
    });
    let threads = match (flag, from_env) {
        (Some(t), _) => Some(t),
        (None, Some(r)) => Some(r?),
        (None, None) => None,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Parse("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

fn emit(cli: &Cli, out: Output, started: Instant) -> Result<()> {
    let mut manifest = RunManifest::new(out.command, out.config.clone(), cli.seed);
    if cli.timing {
        manifest.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    let mut record = out.json.clone();
    if let Value::Object(map) = &mut record {
        map.insert("manifest".into(), serde_json::to_value(&manifest)?);
    }
    if let Some(path) = &cli.out {
        match &out.csv {
            Some(csv) => {
                write_atomic(path, csv.as_bytes())?;
                write_atomic(&sidecar_path(path), to_json(&manifest)?.as_bytes())?;
            }
            None => write_atomic(path, to_json(&record)?.as_bytes())?,
        }
    }
    if cli.json {
        print!("{}", to_json(&record)?);
    } else {
        print!("{}", out.text);
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|_| run(&cli)).and_then(|out| {
        let failed = out.failed;
        emit(&cli, out, started).map(|_| failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
