//! Self-checks over the invariants of every module, grouped into suites.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{dicke_entanglement, duality_report, entanglement_bounds, moment_report};
use crate::error::{Error, Result};
use crate::io::{reference_cell, reference_table, TableColumn};
use crate::majorana::{integrate_amplitude_sq, points_to_state, state_to_points, QuadratureSpec};
use crate::mbqc::{dicke_family_asymptotic, eta_threshold, universality_condition};
use crate::platonic::{platonic_state, PlatonicSolid};
use crate::search::{search_max, SearchConfig, SearchMode};
use crate::solver::{find_cpps, geometric_entanglement, verify_cpp_structure, SolverConfig};
use crate::state::SymmetricState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Integral,
    Roundtrip,
    Dicke,
    Bounds,
    Duality,
    Platonic,
    Mbqc,
    Structure,
    /// Positive-mode search for small `n`; slow, so not in the default set.
    Search,
}

impl Suite {
    pub const DEFAULT: [Suite; 8] = [
        Suite::Integral,
        Suite::Roundtrip,
        Suite::Dicke,
        Suite::Bounds,
        Suite::Duality,
        Suite::Platonic,
        Suite::Mbqc,
        Suite::Structure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Integral => "integral",
            Suite::Roundtrip => "roundtrip",
            Suite::Dicke => "dicke",
            Suite::Bounds => "bounds",
            Suite::Duality => "duality",
            Suite::Platonic => "platonic",
            Suite::Mbqc => "mbqc",
            Suite::Structure => "structure",
            Suite::Search => "search",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::DEFAULT
            .into_iter()
            .chain([Suite::Search])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub suites: Vec<Suite>,
    /// Restrict size-dependent suites to this `n`.
    pub n: Option<usize>,
    /// Perturb every computed value before comparison, to show the checks can fail.
    pub corrupt: bool,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suites: Suite::DEFAULT.to_vec(),
            n: None,
            corrupt: false,
            seed: 42,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Recorder {
    checks: Vec<Check>,
    corrupt: bool,
}

const CORRUPTION: f64 = 1e-5;

impl Recorder {
    fn taint(&self, v: f64) -> f64 {
        if self.corrupt {
            v * (1.0 + CORRUPTION) + CORRUPTION
        } else {
            v
        }
    }

    /// `|value - expected| <= tol`.
    fn close(&mut self, name: impl Into<String>, value: f64, expected: f64, tol: f64) {
        let value = self.taint(value);
        self.checks.push(Check {
            name: name.into(),
            value,
            expected: Some(expected),
            tol,
            passed: (value - expected).abs() <= tol,
        });
    }

    /// `value <= bound`.
    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let value = self.taint(value);
        self.checks.push(Check {
            name: name.into(),
            value,
            expected: Some(bound),
            tol: 0.0,
            passed: value <= bound,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        let ok = ok && !self.corrupt;
        self.checks.push(Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            expected: None,
            tol: 0.0,
            passed: ok,
        });
    }
}

fn sizes(opts: &VerifyOptions, default: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    match opts.n {
        Some(n) => vec![n],
        None => default.collect(),
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut r = Recorder {
        checks: Vec::new(),
        corrupt: opts.corrupt,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cfg = &opts.solver;
    match suite {
        Suite::Integral => {
            for n in sizes(opts, 1..=12) {
                let expected = 4.0 * PI / (n + 1) as f64;
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let s = SymmetricState::random(n, &mut rng);
                    let v = integrate_amplitude_sq(&s, QuadratureSpec::default_for(n))?;
                    worst = worst.max((v - expected).abs() / expected);
                }
                r.at_most(format!("n={n} max relative error vs 4pi/{}", n + 1), worst, 1e-8);
            }
        }
        Suite::Roundtrip => {
            for n in sizes(opts, 2..=12) {
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let s = SymmetricState::random(n, &mut rng);
                    let pts = state_to_points(&s)?;
                    if pts.min_separation() <= 1e-3 {
                        continue;
                    }
                    let back = points_to_state(&pts);
                    worst = worst.max(1.0 - back.fidelity(&s)?);
                }
                r.at_most(format!("n={n} max infidelity"), worst, 1e-8);
            }
        }
        Suite::Dicke => {
            for cell in reference_table().iter().filter(|c| c.column == TableColumn::Dicke) {
                r.close(
                    format!("n={} closed form vs table", cell.n),
                    dicke_entanglement(cell.n, cell.n / 2),
                    cell.value,
                    cell.tol,
                );
            }
            for n in sizes(opts, 2..=12) {
                for k in 1..n {
                    let num = geometric_entanglement(&SymmetricState::dicke(n, k)?, cfg)?.eg_log2;
                    r.close(format!("n={n} k={k} numeric"), num, dicke_entanglement(n, k), 1e-7);
                }
            }
        }
        Suite::Bounds => {
            let mut prev = 0.0;
            for n in 2..=20 {
                let b = entanglement_bounds(n)?;
                r.flag(format!("n={n} Dicke maximum nondecreasing"), b.dicke_lower >= prev);
                r.flag(format!("n={n} Dicke below log2(n+1)"), b.dicke_lower <= b.upper);
                prev = b.dicke_lower;
            }
            for n in 2..=12 {
                let b = entanglement_bounds(n)?;
                let dicke = reference_cell(n, TableColumn::Dicke).map(|c| c.value);
                let pos = reference_cell(n, TableColumn::Positive).map(|c| c.value).or(dicke);
                let gen = reference_cell(n, TableColumn::General).map(|c| c.value).or(pos);
                let (d, p, g) = (dicke.unwrap_or(0.0), pos.unwrap_or(0.0), gen.unwrap_or(0.0));
                r.flag(format!("n={n} table chain"), d <= p && p <= g && g < b.upper);
                r.close(
                    format!("n={n} upper bound"),
                    b.upper,
                    reference_cell(n, TableColumn::Upper).map_or(0.0, |c| c.value),
                    1e-9,
                );
            }
        }
        Suite::Duality => {
            let pairs = [
                (PlatonicSolid::Tetrahedron, PlatonicSolid::Tetrahedron),
                (PlatonicSolid::Octahedron, PlatonicSolid::Cube),
                (PlatonicSolid::Icosahedron, PlatonicSolid::Dodecahedron),
            ];
            for (a, b) in pairs {
                let rep = duality_report(&platonic_state(a), &platonic_state(b), cfg)?;
                r.at_most(format!("{a}/{b} MPs vs CPPs"), rep.mp_a_to_cpp_b, 1e-5);
                r.at_most(format!("{a}/{b} CPPs vs MPs"), rep.cpp_a_to_mp_b, 1e-5);
            }
        }
        Suite::Platonic => {
            let cases = [
                (PlatonicSolid::Tetrahedron, 3f64.log2(), 4),
                (PlatonicSolid::Octahedron, 4.5f64.log2(), 8),
                (PlatonicSolid::Icosahedron, (243.0f64 / 28.0).log2(), 20),
            ];
            for (solid, eg, cpps) in cases {
                let set = find_cpps(&platonic_state(solid), cfg)?;
                r.close(format!("{solid} E_g"), -(set.max_value.powi(2)).log2(), eg, 1e-7);
                r.flag(format!("{solid} has {cpps} CPPs"), set.cpps.len() == cpps);
            }
            for solid in [PlatonicSolid::Octahedron, PlatonicSolid::Icosahedron] {
                let m = moment_report(&state_to_points(&platonic_state(solid))?);
                r.at_most(format!("{solid} spin vector"), m.spin_norm(), 1e-10);
            }
            let pyramid = SymmetricState::from_sparse(5, &[(0, 0.547), (4, 0.837)])?;
            let m = moment_report(&state_to_points(&pyramid)?);
            r.flag("square pyramid spin vector nonzero", m.spin_norm() > 0.01);
        }
        Suite::Mbqc => {
            let rep = eta_threshold(1)?;
            r.flag(
                "k=1 threshold within a factor 3 of 0.001",
                rep.eta_threshold > 0.001 / 3.0 && rep.eta_threshold < 0.003,
            );
            let finite = 1.0 - 2f64.powf(-dicke_entanglement(10_000, 1));
            r.close("n=10^4 W family vs 1 - 1/e", finite, dicke_family_asymptotic(1)?, 1e-3);
            r.flag(
                "W family fails the condition at eta = 0.001",
                !universality_condition(dicke_family_asymptotic(1)?, 0.001),
            );
            let mut prev = f64::INFINITY;
            let mut decreasing = true;
            for k in 1..=100 {
                let t = eta_threshold(k)?.eta_threshold;
                decreasing &= t < prev;
                prev = t;
            }
            r.flag("threshold decreasing in k", decreasing);
        }
        Suite::Structure => {
            for n in sizes(opts, 4..=8) {
                let support: Vec<usize> = (0..=n).collect();
                let mut ok = true;
                for _ in 0..10 {
                    let s = SymmetricState::random_positive(n, &support, &mut rng);
                    let set = find_cpps(&s, cfg)?;
                    ok &= verify_cpp_structure(&s, &set)?.passed();
                }
                r.flag(format!("n={n} CPP structure of random positive states"), ok);
                let mut worst = 0.0f64;
                for _ in 0..10 {
                    let s = SymmetricState::random_real(n, &mut rng);
                    let pts = state_to_points(&s)?;
                    let conj: Vec<_> = pts.points().iter().map(|p| p.conjugate()).collect();
                    worst = worst.max(crate::analysis::hausdorff_angle(pts.points(), &conj));
                }
                r.at_most(format!("n={n} real states have mirror-symmetric MPs"), worst, 1e-8);
            }
        }
        Suite::Search => {
            for n in sizes(opts, 4..=8) {
                let cell = reference_cell(n, TableColumn::Positive)
                    .ok_or_else(|| Error::domain(format!("no positive reference value for n = {n}")))?;
                let res = search_max(&SearchConfig {
                    rng_seed: opts.seed,
                    ..SearchConfig::new(n, SearchMode::Positive)
                })?;
                r.close(
                    format!("n={n} positive maximum"),
                    res.entanglement.eg_log2,
                    cell.value,
                    1e-4,
                );
                r.flag(format!("n={n} at least 3 restarts agree"), res.converged());
            }
        }
    }
    let passed = r.checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        suite,
        checks: r.checks,
        passed,
    })
}

pub fn run_verify(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    opts.suites.iter().map(|s| run_suite(*s, opts)).collect()
}
