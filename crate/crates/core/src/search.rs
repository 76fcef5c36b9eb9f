//! Numerical search for maximally entangled symmetric states.
//!
//! The outer problem minimizes the maximal amplitude over normalized coefficient
//! vectors with a restarted Nelder–Mead simplex; the inner maximum comes from
//! [`max_amplitude`]. The result of each restart is re-evaluated with the full
//! [`find_cpps`] before restarts are compared.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorana::{points_to_state, state_to_points, MajoranaPoints};
use crate::solver::{find_cpps, local_maxima, max_amplitude, EntanglementValue, SolverConfig};
use crate::state::{BlochPoint, SymmetricState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Positive,
    Real,
    General,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(SearchMode::Positive),
            "real" => Ok(SearchMode::Real),
            "general" => Ok(SearchMode::General),
            _ => Err(Error::domain(format!("unknown search mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub mode: SearchMode,
    /// Restrict the support to `k ≡ k0 (mod m)`.
    pub rot_order: Option<usize>,
    /// The residue `k0`; every residue is tried when unset.
    pub rot_offset: Option<usize>,
    pub outer_restarts: usize,
    /// Agreement tolerance on `E_g` between restarts.
    pub outer_tol: f64,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    /// In general mode, pin one Majorana point to the north pole (`a_n = 0`).
    pub pin_north: bool,
    pub inner: SolverConfig,
    pub rng_seed: u64,
}

impl SearchConfig {
    pub fn new(n: usize, mode: SearchMode) -> Self {
        Self {
            n,
            mode,
            rot_order: None,
            rot_offset: None,
            outer_restarts: 48,
            outer_tol: 1e-6,
            max_evals: 2500,
            pin_north: mode == SearchMode::General,
            inner: SolverConfig {
                n_starts: 200,
                meridian_only: mode == SearchMode::Positive,
                ..SolverConfig::default()
            },
            rng_seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain("search needs n >= 2"));
        }
        if self.outer_restarts == 0 {
            return Err(Error::domain("outer_restarts must be at least 1"));
        }
        if !(self.outer_tol > 0.0) {
            return Err(Error::domain("outer_tol must be positive"));
        }
        if let Some(m) = self.rot_order {
            if m < 2 || m > self.n {
                return Err(Error::domain(format!("rot_order {m} outside 2..={}", self.n)));
            }
            if self.rot_offset.is_some_and(|k0| k0 >= m) {
                return Err(Error::domain("rot_offset must be below rot_order"));
            }
        }
        self.inner.validate()
    }

    fn supports(&self) -> Vec<Vec<usize>> {
        let all = |k0: usize, m: usize| (k0..=self.n).step_by(m).collect::<Vec<_>>();
        let mut out = match (self.rot_order, self.rot_offset) {
            (Some(m), Some(k0)) => vec![all(k0, m)],
            (Some(m), None) => (0..m).map(|k0| all(k0, m)).collect(),
            (None, _) => vec![all(0, 1)],
        };
        if self.mode == SearchMode::General && self.pin_north {
            for s in &mut out {
                if s.len() > 2 {
                    s.retain(|&k| k != self.n);
                }
            }
        }
        out.retain(|s| s.len() >= 2);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub state: SymmetricState,
    pub points: MajoranaPoints,
    pub entanglement: EntanglementValue,
    /// Restarts whose final `E_g` lies within `outer_tol` of the best.
    pub restarts_agreeing: usize,
    pub restarts: usize,
    /// Final `E_g` of every restart, in restart order.
    pub restart_values: Vec<f64>,
    /// `(evaluation, best E_g so far)` for the winning restart.
    pub history: Vec<(usize, f64)>,
}

impl SearchResult {
    /// The agreement criterion for a reproduced value.
    pub fn converged(&self) -> bool {
        self.restarts_agreeing >= 3
    }
}

/// Maps simplex coordinates to a state on the given support.
struct Parametrization {
    n: usize,
    mode: SearchMode,
    support: Vec<usize>,
}

impl Parametrization {
    fn dim(&self) -> usize {
        match self.mode {
            // The first coefficient stays real: global phase.
            SearchMode::General => 2 * self.support.len() - 1,
            _ => self.support.len(),
        }
    }

    fn state(&self, x: &[f64]) -> Option<SymmetricState> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.n + 1];
        for (i, &k) in self.support.iter().enumerate() {
            amps[k] = match self.mode {
                SearchMode::Positive => Complex64::new(x[i].abs(), 0.0),
                SearchMode::Real => Complex64::new(x[i], 0.0),
                SearchMode::General if i == 0 => Complex64::new(x[0], 0.0),
                SearchMode::General => Complex64::new(x[2 * i - 1], x[2 * i]),
            };
        }
        SymmetricState::new(amps).ok()?.normalize().ok()
    }
}

fn objective(p: &Parametrization, x: &[f64], inner: &SolverConfig) -> f64 {
    match p.state(x) {
        Some(s) => max_amplitude(&s, inner).map(|(f, _)| f).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    }
}

/// Nelder–Mead minimization with standard coefficients. Returns the best vertex and its value.
fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    max_evals: usize,
    ftol: f64,
    evals: &mut usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let v0 = eval(x0, evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += scale;
        let v = eval(&x, evals);
        simplex.push((x, v));
    }
    let budget = *evals + max_evals;
    while *evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol || size <= 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(0.5);
                let fc = eval(&xc, evals);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc, evals);
                (xc, fc)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let xs: Vec<f64> = vertex.0.iter().zip(&x_best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    let fs = eval(&xs, evals);
                    *vertex = (xs, fs);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

struct RestartOutcome {
    state: SymmetricState,
    eg: f64,
    history: Vec<(usize, f64)>,
}

/// Repeated simplex descents around the incumbent with shrinking size, until one stops improving.
fn simplex_descent(f: &mut dyn FnMut(&[f64]) -> f64, x0: Vec<f64>, budget: usize) -> Vec<f64> {
    let mut evals = 0usize;
    let mut x = x0;
    let mut fx = f64::INFINITY;
    let mut scale = 0.3;
    while evals < budget {
        let (xb, fb) = nelder_mead(f, &x, scale, budget - evals, 1e-15, &mut evals);
        let gain = fx - fb;
        if fb <= fx {
            x = xb;
            fx = fb;
        }
        if gain < 1e-14 && scale < 1e-3 {
            break;
        }
        scale = (scale * 0.3).max(1e-6);
    }
    x
}

/// Near-maximal local maxima of the amplitude function with their values `f²`.
fn peaks(state: &SymmetricState, inner: &SolverConfig, window: f64) -> Option<Vec<(BlochPoint, f64)>> {
    let mut found: Vec<(BlochPoint, f64)> = local_maxima(state, inner)
        .ok()?
        .into_iter()
        .map(|m| (m.point, m.value * m.value))
        .collect();
    found.sort_by(|a, b| b.1.total_cmp(&a.1));
    let top = found.first()?.1;
    // Rings of maxima would otherwise flood the model with near-identical peaks.
    let limit = 6 * state.n();
    let mut kept: Vec<(BlochPoint, f64)> = Vec::new();
    for (p, v) in found {
        if v < top - window || kept.len() >= limit {
            break;
        }
        if kept.iter().all(|(q, _)| q.angle_to(&p) > 1e-3) {
            kept.push((p, v));
        }
    }
    Some(kept)
}

/// Minimizes `λ ↦ |Gᵀλ|²/(2ρ) - fᵀλ` over the probability simplex by accelerated projected gradient.
fn simplex_qp(g: &[Vec<f64>], f: &[f64], rho: f64) -> Vec<f64> {
    let m = g.len();
    let gram: Vec<Vec<f64>> = g
        .iter()
        .map(|a| g.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let lip = gram
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        / rho;
    let step = 1.0 / lip.max(1e-300);
    let mut lam = vec![1.0 / m as f64; m];
    let mut y = lam.clone();
    let mut t = 1.0f64;
    for _ in 0..4000 {
        let grad: Vec<f64> = (0..m)
            .map(|i| (0..m).map(|j| gram[i][j] * y[j]).sum::<f64>() / rho - f[i])
            .collect();
        let trial: Vec<f64> = y.iter().zip(&grad).map(|(v, d)| v - step * d).collect();
        let next = project_simplex(&trial);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let shift = (next.iter().zip(&lam).map(|(a, b)| (a - b).abs()).sum::<f64>()) < 1e-15;
        y = next
            .iter()
            .zip(&lam)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        lam = next;
        t = t_next;
        if shift {
            break;
        }
    }
    lam
}

fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// Real coordinates of the amplitudes on the support.
fn coords(p: &Parametrization, state: &SymmetricState) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * p.support.len());
    for &k in &p.support {
        let a = state.amp(k);
        match p.mode {
            SearchMode::General => x.extend([a.re, a.im]),
            _ => x.push(a.re),
        }
    }
    x
}

fn from_coords(p: &Parametrization, x: &[f64]) -> Option<SymmetricState> {
    let mut amps = vec![Complex64::new(0.0, 0.0); p.n + 1];
    for (i, &k) in p.support.iter().enumerate() {
        amps[k] = match p.mode {
            SearchMode::General => Complex64::new(x[2 * i], x[2 * i + 1]),
            SearchMode::Positive => Complex64::new(x[i].max(0.0), 0.0),
            SearchMode::Real => Complex64::new(x[i], 0.0),
        };
    }
    SymmetricState::new(amps).ok()?.normalize().ok()
}

/// Proximal linearized descent on `max_σ f²`: each near-maximal peak is linearized in the
/// amplitudes (peak locations held fixed) and the regularized piecewise-linear model is
/// minimized through its dual.
fn minimax_polish(p: &Parametrization, state: SymmetricState, inner: &SolverConfig) -> SymmetricState {
    let n = p.n;
    let mut current = state;
    let Some(mut pk) = peaks(&current, inner, 0.05) else {
        return current;
    };
    let mut rho = 1.0;
    for _ in 0..300 {
        let x = coords(p, &current);
        let top = pk[0].1;
        let mut grads = Vec::with_capacity(pk.len());
        let mut vals = Vec::with_capacity(pk.len());
        for (sigma, v) in &pk {
            let coh = SymmetricState::coherent(n, sigma).expect("n >= 1");
            let overlap: Complex64 = p.support.iter().map(|&k| coh.amp(k).conj() * current.amp(k)).sum();
            let mut g = Vec::with_capacity(x.len());
            for &k in &p.support {
                let w = overlap.conj() * coh.amp(k).conj();
                match p.mode {
                    SearchMode::General => g.extend([2.0 * w.re, -2.0 * w.im]),
                    _ => g.push(2.0 * w.re),
                }
            }
            let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(&x).for_each(|(a, b)| *a -= radial * b);
            grads.push(g);
            vals.push(*v);
        }
        let lam = simplex_qp(&grads, &vals, rho);
        let dx: Vec<f64> = (0..x.len())
            .map(|i| -grads.iter().zip(&lam).map(|(g, l)| l * g[i]).sum::<f64>() / rho)
            .collect();
        let model = grads
            .iter()
            .zip(&vals)
            .map(|(g, v)| v + g.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::MIN, f64::max)
            + 0.5 * rho * dx.iter().map(|d| d * d).sum::<f64>();
        let predicted = top - model;
        if predicted < 1e-16 {
            break;
        }
        let trial_x: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let accepted = from_coords(p, &trial_x).and_then(|trial| {
            let tp = peaks(&trial, inner, 0.05)?;
            (top - tp[0].1 >= 0.1 * predicted).then_some((trial, tp))
        });
        match accepted {
            Some((trial, tp)) => {
                current = trial;
                pk = tp;
                rho = (rho * 0.5).max(1e-6);
            }
            None => {
                rho *= 4.0;
                if rho > 1e12 {
                    break;
                }
            }
        }
    }
    current
}

/// Simplex coordinates of `state` in the layout read by [`Parametrization::state`].
fn simplex_coords(p: &Parametrization, state: &SymmetricState) -> Vec<f64> {
    let a0 = state.amp(p.support[0]);
    let phase = if a0.norm() > 0.0 {
        a0.conj() / a0.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut x = Vec::with_capacity(p.dim());
    for (i, &k) in p.support.iter().enumerate() {
        let a = state.amp(k) * phase;
        match p.mode {
            SearchMode::General if i == 0 => x.push(a.re),
            SearchMode::General => x.extend([a.re, a.im]),
            _ => x.push(a.re),
        }
    }
    x
}

/// Start for restart `index`: Gaussian, or a perturbation of the warm-start state.
fn start_point(
    config: &SearchConfig,
    p: &Parametrization,
    index: usize,
    warm: Option<(&SymmetricState, f64)>,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed.wrapping_add(index as u64));
    match warm {
        None => (0..p.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        Some((state, spread)) => {
            let mut x = simplex_coords(p, state);
            if index > 0 {
                for v in &mut x {
                    *v += spread * rng.sample::<f64, _>(StandardNormal);
                }
            }
            x
        }
    }
}

fn run_restart(
    config: &SearchConfig,
    support: &[usize],
    index: usize,
    warm: Option<(&SymmetricState, f64)>,
) -> Option<RestartOutcome> {
    let p = Parametrization {
        n: config.n,
        mode: config.mode,
        support: support.to_vec(),
    };
    let start = start_point(config, &p, index, warm);

    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut calls = 0usize;
    let mut tracked = |y: &[f64]| {
        let v = objective(&p, y, &config.inner);
        calls += 1;
        if v < best {
            best = v;
            history.push((calls, -(v * v).log2()));
        }
        v
    };
    let x = simplex_descent(&mut tracked, start, config.max_evals);
    let coarse = p.state(&x)?;
    let polish_params = Parametrization {
        n: config.n,
        mode: config.mode,
        support: support.to_vec(),
    };
    let state = minimax_polish(&polish_params, coarse, &config.inner);
    let set = find_cpps(&state, &config.inner).ok()?;
    let eg = -(set.max_value * set.max_value).log2();
    history.push((calls, eg));
    Some(RestartOutcome { eg, state, history })
}

/// Searches for the most entangled state in the configured family.
pub fn search_max(config: &SearchConfig) -> Result<SearchResult> {
    run_search(config, None)
}

/// Restarts the search from perturbations of `seed` (Gaussian noise of scale `spread`
/// on the amplitudes; the first restart starts from `seed` itself). Agreement between
/// these restarts measures local stability only.
pub fn search_near(config: &SearchConfig, seed: &SymmetricState, spread: f64) -> Result<SearchResult> {
    if seed.n() != config.n {
        return Err(Error::domain(format!(
            "seed has n = {}, search has n = {}",
            seed.n(),
            config.n
        )));
    }
    if !(spread >= 0.0) {
        return Err(Error::domain("spread must be nonnegative"));
    }
    run_search(config, Some((seed, spread)))
}

/// Runs the configured search and one search per support mask `k ≡ k0 (mod m)` for each
/// `m` in `orders`, then refines the best state without any mask. The returned agreement
/// count is that of the refinement whenever the refinement is kept.
pub fn search_scan(config: &SearchConfig, orders: &[usize]) -> Result<SearchResult> {
    let mut best = search_max(config)?;
    for &m in orders.iter().filter(|&&m| m >= 2 && m <= config.n) {
        let masked = SearchConfig {
            rot_order: Some(m),
            rot_offset: None,
            ..*config
        };
        let r = search_max(&masked)?;
        if r.entanglement.eg_log2 > best.entanglement.eg_log2 + config.outer_tol {
            best = r;
        }
    }
    let open = SearchConfig {
        rot_order: None,
        rot_offset: None,
        ..*config
    };
    let near = search_near(&open, &best.state, 0.02)?;
    if near.entanglement.eg_log2 >= best.entanglement.eg_log2 - config.outer_tol {
        best = near;
    }
    Ok(best)
}

fn run_search(config: &SearchConfig, warm: Option<(&SymmetricState, f64)>) -> Result<SearchResult> {
    config.validate()?;
    let supports = config.supports();
    if supports.is_empty() {
        return Err(Error::domain("support mask leaves fewer than two free amplitudes"));
    }
    let jobs: Vec<(usize, &Vec<usize>)> = supports
        .iter()
        .flat_map(|s| std::iter::repeat_n(s, config.outer_restarts))
        .enumerate()
        .collect();
    let outcomes: Vec<RestartOutcome> = jobs
        .par_iter()
        .filter_map(|(i, s)| run_restart(config, s, *i, warm))
        .collect();
    if outcomes.is_empty() {
        return Err(Error::NonConvergence("no restart produced a valid state".into()));
    }
    let restarts = outcomes.len();
    let best = outcomes
        .iter()
        .max_by(|a, b| {
            a.eg.total_cmp(&b.eg).then_with(|| {
                // Deterministic tie-break on the coefficients.
                let key = |s: &SymmetricState| s.amps().iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>();
                key(&b.state)
                    .partial_cmp(&key(&a.state))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("non-empty");
    let agreeing = outcomes
        .iter()
        .filter(|o| (o.eg - best.eg).abs() <= config.outer_tol)
        .count();
    let state = best.state.canonical_phase();
    let points = state_to_points(&state)?;
    Ok(SearchResult {
        entanglement: EntanglementValue {
            eg_log2: best.eg,
            eg_linear: 1.0 - 2f64.powf(-best.eg),
        },
        state,
        points,
        restarts_agreeing: agreeing,
        restarts,
        restart_values: outcomes.iter().map(|o| o.eg).collect(),
        history: best.history.clone(),
    })
}

/// Lifts a point configuration to its state and evaluates the entanglement.
pub fn evaluate_candidate(points: &MajoranaPoints, inner: &SolverConfig) -> Result<SearchResult> {
    if points.n() < 2 {
        return Err(Error::domain("candidates need n >= 2"));
    }
    let state = points_to_state(points);
    let set = find_cpps(&state, inner)?;
    Ok(SearchResult {
        entanglement: EntanglementValue::from_max_amplitude(set.max_value),
        state,
        points: points.clone(),
        restarts_agreeing: 1,
        restarts: 1,
        restart_values: vec![],
        history: Vec::new(),
    })
}
