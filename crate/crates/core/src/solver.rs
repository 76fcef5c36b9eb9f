//! Global maximization of the amplitude function over the sphere.
//!
//! Each start is refined by Newton ascent on `f²` in a chart centred at the current
//! point: for a unit spinor `σ` and its orthogonal partner `σ⊥`, the product state
//! built from `σ + t σ⊥` has overlap
//!
//! ```text
//! F(s) = |d0 + d1 s + d2 s² + …|² (1 + |s|²)^{-n},   s = conj(t),
//! ```
//!
//! so the gradient and Hessian at `s = 0` follow from three series coefficients and
//! the chart never sees the coordinate singularity at the poles.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::amplitude;
use crate::state::{binomial, BlochPoint, SpinRotation, SymmetricState, DEFAULT_ZERO_TOL};

const NORMALIZED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_starts: usize,
    /// Gradient-norm stopping tolerance on `f²`.
    pub refine_tol: f64,
    pub dedup_angle: f64,
    pub max_iter: usize,
    /// Seed only the meridians allowed for positive states and rebuild the CPP orbit by symmetry.
    pub meridian_only: bool,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_starts: 400,
            refine_tol: 1e-12,
            dedup_angle: 1e-4,
            max_iter: 100,
            meridian_only: false,
            rng_seed: 42,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts < 12 {
            return Err(Error::domain("n_starts must be at least 12"));
        }
        if !(self.dedup_angle > 0.0 && self.dedup_angle < 0.2) {
            return Err(Error::domain("dedup_angle must lie in (0, 0.2)"));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::domain("refine_tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be positive"));
        }
        Ok(())
    }
}

/// The closest product points of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppSet {
    pub cpps: Vec<BlochPoint>,
    /// Maximum of `f`.
    pub max_value: f64,
    pub is_ring: bool,
    pub ring_theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementValue {
    /// `-log2(max f²)`.
    pub eg_log2: f64,
    /// `1 - max f²`.
    pub eg_linear: f64,
}

impl EntanglementValue {
    pub fn from_max_amplitude(f: f64) -> Self {
        let f2 = f * f;
        Self {
            eg_log2: -f2.log2(),
            eg_linear: 1.0 - f2,
        }
    }
}

/// Outcome of one local refinement.
#[derive(Debug, Clone, Copy)]
pub struct LocalMax {
    pub point: BlochPoint,
    /// `f` at the point.
    pub value: f64,
    pub grad_norm: f64,
    pub converged: bool,
}

/// `[d0, d1, d2]` of `G(s) = Σ_k w_k (ᾱ - sβ)^{n-k} (β̄ + sα)^k` for the unit spinor `(α, β)`.
fn local_series(weights: &[Complex64], spinor: [Complex64; 2]) -> [Complex64; 3] {
    let n = weights.len() - 1;
    let [alpha, beta] = spinor;
    let x = [alpha.conj(), -beta];
    let y = [beta.conj(), alpha];
    let zero = Complex64::new(0.0, 0.0);
    let mul =
        |a: [Complex64; 3], b: [Complex64; 2]| [a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1] + a[2] * b[0]];
    let mut xs = Vec::with_capacity(n + 1);
    let mut acc = [Complex64::new(1.0, 0.0), zero, zero];
    xs.push(acc);
    for _ in 0..n {
        acc = mul(acc, x);
        xs.push(acc);
    }
    let mut out = [zero; 3];
    let mut yk = [Complex64::new(1.0, 0.0), zero, zero];
    for (k, w) in weights.iter().enumerate() {
        let xk = xs[n - k];
        let p = [
            xk[0] * yk[0],
            xk[0] * yk[1] + xk[1] * yk[0],
            xk[0] * yk[2] + xk[1] * yk[1] + xk[2] * yk[0],
        ];
        for j in 0..3 {
            out[j] += w * p[j];
        }
        yk = mul(yk, y);
    }
    out
}

fn unit_spinor(s: [Complex64; 2]) -> [Complex64; 2] {
    let r = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
    [s[0] / r, s[1] / r]
}

fn overlap_sq(weights: &[Complex64], spinor: [Complex64; 2]) -> f64 {
    let [alpha, beta] = spinor;
    let n = weights.len() - 1;
    // Homogeneous evaluation of Σ w_k ᾱ^{n-k} β̄^k.
    let (a, b) = (alpha.conj(), beta.conj());
    let sum = if a.norm() >= b.norm() {
        let z = b / a;
        weights
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, w| acc * z + w)
            * a.powu(n as u32)
    } else {
        let z = a / b;
        weights.iter().fold(Complex64::new(0.0, 0.0), |acc, w| acc * z + w) * b.powu(n as u32)
    };
    sum.norm_sqr()
}

pub(crate) fn weights_of(state: &SymmetricState) -> Vec<Complex64> {
    let n = state.n();
    state
        .amps()
        .iter()
        .enumerate()
        .map(|(k, a)| a * binomial(n, k).sqrt())
        .collect()
}

/// Newton ascent on `f²` from `start`.
pub fn refine(state: &SymmetricState, start: &BlochPoint, config: &SolverConfig) -> LocalMax {
    refine_weights(&weights_of(state), start.spinor(), config)
}

fn refine_weights(weights: &[Complex64], start: [Complex64; 2], config: &SolverConfig) -> LocalMax {
    let n = weights.len() - 1;
    let nf = n as f64;
    let mut sigma = unit_spinor(start);
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut value_sq = overlap_sq(weights, sigma);

    for _ in 0..config.max_iter {
        let [d0, d1, d2] = local_series(weights, sigma);
        value_sq = d0.norm_sqr();
        let w = d0.conj() * d1;
        let v = d0.conj() * d2;
        let g = [2.0 * w.re, -2.0 * w.im];
        grad_norm = g[0].hypot(g[1]);
        let diag = 2.0 * (d1.norm_sqr() - nf * d0.norm_sqr());
        let h = [[diag + 4.0 * v.re, -4.0 * v.im], [-4.0 * v.im, diag - 4.0 * v.re]];
        let lam_max = 0.5 * (h[0][0] + h[1][1]) + (0.25 * (h[0][0] - h[1][1]).powi(2) + h[0][1].powi(2)).sqrt();
        if grad_norm <= config.refine_tol && lam_max <= 1e-8 * (1.0 + value_sq) {
            converged = true;
            break;
        }

        // Solve (μI - H) u = g with μ making μI - H positive definite.
        let scale = h[0][0].abs() + h[1][1].abs() + h[0][1].abs() + value_sq;
        let mu = if lam_max < -1e-6 * scale {
            0.0
        } else {
            lam_max + 0.1 * scale
        };
        let a = [[mu - h[0][0], -h[0][1]], [-h[1][0], mu - h[1][1]]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let mut u = [
            (a[1][1] * g[0] - a[0][1] * g[1]) / det,
            (a[0][0] * g[1] - a[1][0] * g[0]) / det,
        ];
        let max_step = 0.5;
        let len = u[0].hypot(u[1]);
        if len > max_step {
            u = [u[0] * max_step / len, u[1] * max_step / len];
        }

        let perp = [-sigma[1].conj(), sigma[0].conj()];
        let mut accepted = false;
        for _ in 0..40 {
            // t = conj(s), s = u0 + i u1
            let t = Complex64::new(u[0], -u[1]);
            let trial = unit_spinor([sigma[0] + t * perp[0], sigma[1] + t * perp[1]]);
            let trial_sq = overlap_sq(weights, trial);
            if trial_sq >= value_sq - 4.0 * f64::EPSILON * value_sq {
                let moved = u[0].hypot(u[1]);
                sigma = trial;
                value_sq = trial_sq;
                accepted = moved > 0.0;
                break;
            }
            u = [0.5 * u[0], 0.5 * u[1]];
        }
        if !accepted {
            // No ascent possible at working precision: stationary up to rounding.
            converged = grad_norm <= config.refine_tol.max(1e-9) && lam_max <= 1e-6;
            break;
        }
    }
    LocalMax {
        point: BlochPoint::from_spinor(sigma),
        value: value_sq.sqrt(),
        grad_norm,
        converged,
    }
}

/// `count` points of the spherical Fibonacci lattice.
pub fn fibonacci_lattice(count: usize) -> Vec<BlochPoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            BlochPoint::new(z.clamp(-1.0, 1.0).acos(), golden * i as f64)
        })
        .collect()
}

/// Meridian structure of a positive non-Dicke state: `None` when the fast path does not apply,
/// otherwise the largest rotational order (`1` for no rotational symmetry).
fn positive_symmetry(state: &SymmetricState) -> Option<(SymmetricState, usize)> {
    let canon = state.canonical_phase();
    let cls = canon.classify(DEFAULT_ZERO_TOL);
    if !cls.is_positive || canon.is_dicke(DEFAULT_ZERO_TOL) {
        return None;
    }
    Some((canon, cls.max_rot_order().unwrap_or(1)))
}

fn seeds(state: &SymmetricState, config: &SolverConfig) -> (Vec<BlochPoint>, Option<usize>) {
    if config.meridian_only {
        if let Some((_, m)) = positive_symmetry(state) {
            let meridian = (0..config.n_starts)
                .map(|i| BlochPoint::new(PI * (i as f64 + 0.5) / config.n_starts as f64, 0.0))
                .collect();
            return (meridian, Some(m));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let rot = SpinRotation::random(&mut rng);
    let lattice = fibonacci_lattice(config.n_starts)
        .into_iter()
        .map(|p| p.rotate(&rot))
        .collect();
    (lattice, None)
}

fn check_input(state: &SymmetricState, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if state.n() < 2 {
        return Err(Error::domain("the CPP solver needs n >= 2"));
    }
    if !state.is_normalized(NORMALIZED_TOL) {
        return Err(Error::domain(format!(
            "state is not normalized (norm^2 = {})",
            state.norm_sqr()
        )));
    }
    Ok(())
}

/// Refines every seed and returns the converged local maxima in seed order.
pub fn local_maxima(state: &SymmetricState, config: &SolverConfig) -> Result<Vec<LocalMax>> {
    check_input(state, config)?;
    let weights = weights_of(state);
    let (starts, _) = seeds(state, config);
    Ok(starts
        .par_iter()
        .map(|p| refine_weights(&weights, p.spinor(), config))
        .collect())
}

/// All closest product points: the global maxima of the amplitude function.
pub fn find_cpps(state: &SymmetricState, config: &SolverConfig) -> Result<CppSet> {
    check_input(state, config)?;
    let weights = weights_of(state);
    let (starts, orbit_order) = seeds(state, config);
    let mut found: Vec<LocalMax> = starts
        .par_iter()
        .map(|p| refine_weights(&weights, p.spinor(), config))
        .collect();
    if !found.iter().any(|m| m.converged) {
        return Err(Error::NonConvergence(format!(
            "none of {} starts reached gradient norm {:e}",
            found.len(),
            config.refine_tol
        )));
    }
    found.retain(|m| m.converged);

    if let Some(m) = orbit_order.filter(|&m| m > 1) {
        let copies: Vec<LocalMax> = found
            .iter()
            .flat_map(|lm| {
                (1..m).map(move |r| {
                    let p = BlochPoint::new(lm.point.theta(), lm.point.phi() + TAU * r as f64 / m as f64);
                    LocalMax { point: p, ..*lm }
                })
            })
            .collect();
        found.extend(copies);
    }

    let max_value = found.iter().map(|m| m.value).fold(0.0, f64::max);
    found.sort_by(|a, b| b.value.total_cmp(&a.value));
    let threshold = max_value - 10.0 * config.refine_tol;
    let mut cpps: Vec<BlochPoint> = Vec::new();
    for m in found.iter().filter(|m| m.value >= threshold) {
        if cpps.iter().all(|q| q.angle_to(&m.point) > config.dedup_angle) {
            cpps.push(m.point);
        }
    }
    let set = CppSet {
        cpps,
        max_value,
        is_ring: false,
        ring_theta: None,
    };
    Ok(detect_ring(state, set, config))
}

/// Geometric entanglement from the maximal amplitude.
pub fn geometric_entanglement(state: &SymmetricState, config: &SolverConfig) -> Result<EntanglementValue> {
    let set = find_cpps(state, config)?;
    Ok(EntanglementValue::from_max_amplitude(set.max_value))
}

/// Maximal amplitude and one maximizer, with fewer refinements than [`find_cpps`].
///
/// Positive states with `meridian_only` are maximized over the `φ = 0` meridian, where
/// they always attain their maximum. Otherwise the seeds are screened on the lattice
/// and only well-separated high seeds are refined.
pub fn max_amplitude(state: &SymmetricState, config: &SolverConfig) -> Result<(f64, BlochPoint)> {
    check_input(state, config)?;
    let weights = weights_of(state);
    let positive = config.meridian_only && {
        let cls = state.canonical_phase().classify(DEFAULT_ZERO_TOL);
        cls.is_positive
    };
    let (weights, candidates) = if positive {
        let canon = state.canonical_phase();
        let w = weights_of(&canon);
        let samples: Vec<(BlochPoint, f64)> = (0..=config.n_starts)
            .map(|i| {
                let p = BlochPoint::new(PI * i as f64 / config.n_starts as f64, 0.0);
                (p, overlap_sq(&w, p.spinor()))
            })
            .collect();
        let mut c = Vec::new();
        for i in 0..samples.len() {
            let left = if i > 0 { samples[i - 1].1 } else { f64::NEG_INFINITY };
            let right = samples.get(i + 1).map_or(f64::NEG_INFINITY, |s| s.1);
            if samples[i].1 >= left && samples[i].1 >= right {
                c.push(samples[i]);
            }
        }
        (w, c)
    } else {
        let (starts, _) = seeds(state, config);
        let scored: Vec<(BlochPoint, f64)> = starts
            .into_iter()
            .map(|p| {
                let v = overlap_sq(&weights, p.spinor());
                (p, v)
            })
            .collect();
        (weights, screen(scored, state.n()))
    };
    let best = candidates
        .iter()
        .map(|(p, _)| refine_weights(&weights, p.spinor(), config))
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::NonConvergence("no candidate seeds".into()))?;
    Ok((best.value, best.point))
}

/// Keeps the highest seeds, skipping any closer than the typical peak width to one already kept.
fn screen(mut scored: Vec<(BlochPoint, f64)>, n: usize) -> Vec<(BlochPoint, f64)> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let radius = 0.6 / (n as f64).sqrt();
    let limit = 4 * n + 8;
    let mut kept: Vec<(BlochPoint, f64)> = Vec::new();
    for s in scored {
        if kept.len() >= limit {
            break;
        }
        if kept.iter().all(|k| k.0.angle_to(&s.0) > radius) {
            kept.push(s);
        }
    }
    kept
}

/// Marks azimuthally symmetric CPP rings.
pub fn detect_ring(state: &SymmetricState, mut set: CppSet, config: &SolverConfig) -> CppSet {
    let n = state.n();
    let support = state.support(DEFAULT_ZERO_TOL);
    if support.len() == 1 {
        let k = support[0];
        let theta = 2.0 * (((n - k) as f64) / n as f64).sqrt().acos();
        set.is_ring = k != 0 && k != n;
        set.ring_theta = set.is_ring.then_some(theta);
        return set;
    }
    let needed = n.max(8);
    for anchor in &set.cpps {
        let theta = anchor.theta();
        let same: usize = set
            .cpps
            .iter()
            .filter(|p| (p.theta() - theta).abs() <= config.dedup_angle)
            .count();
        if same < needed {
            continue;
        }
        let values: Vec<f64> = (0..64)
            .map(|j| amplitude(state, &BlochPoint::new(theta, TAU * j as f64 / 64.0)))
            .collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        if spread < config.refine_tol {
            set.is_ring = true;
            set.ring_theta = Some(theta);
            return set;
        }
    }
    set
}

/// Structural class of a positive non-Dicke state: which poles carry CPPs and the count bound that follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CppClass {
    /// Rotationally symmetric about Z with only the poles as CPPs.
    A,
    /// Rotationally symmetric about Z with a non-positive CPP.
    B,
    /// Not rotationally symmetric; all CPPs positive.
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppStructureReport {
    /// Set when the input is a Dicke state, which the structure results exclude.
    pub excluded_dicke: bool,
    pub class: Option<CppClass>,
    pub rot_order: Option<usize>,
    pub cpp_count: usize,
    pub both_poles_occupied: bool,
    /// Applicable count bound, `None` for class (a) or `n < 3`.
    pub bound: Option<usize>,
    pub within_bound: bool,
    /// Every CPP lies on an allowed meridian.
    pub on_allowed_meridians: bool,
    /// For rotationally symmetric states, the CPP set is closed under the `2π/m` rotation.
    pub orbit_closed: bool,
    pub failures: Vec<String>,
}

impl CppStructureReport {
    pub fn passed(&self) -> bool {
        self.excluded_dicke || self.failures.is_empty()
    }
}

const GEOMETRY_TOL: f64 = 1e-6;

/// Checks a computed CPP set against the structure results for positive states.
pub fn verify_cpp_structure(state: &SymmetricState, set: &CppSet) -> Result<CppStructureReport> {
    let n = state.n();
    let canon = state.canonical_phase();
    let cls = canon.classify(DEFAULT_ZERO_TOL);
    let mut report = CppStructureReport {
        excluded_dicke: false,
        class: None,
        rot_order: cls.max_rot_order(),
        cpp_count: set.cpps.len(),
        both_poles_occupied: canon.amp(0).norm() <= DEFAULT_ZERO_TOL && canon.amp(n).norm() <= DEFAULT_ZERO_TOL,
        bound: None,
        within_bound: true,
        on_allowed_meridians: true,
        orbit_closed: true,
        failures: Vec::new(),
    };
    if canon.is_dicke(DEFAULT_ZERO_TOL) {
        report.excluded_dicke = true;
        return Ok(report);
    }
    if !cls.is_positive {
        return Err(Error::domain("structure checks apply to positive states only"));
    }
    let is_pole = |p: &BlochPoint| p.theta().sin() <= GEOMETRY_TOL;
    match cls.max_rot_order() {
        None => {
            report.class = Some(CppClass::C);
            if n >= 3 {
                report.bound = Some((n + 3) / 2);
            }
            report.on_allowed_meridians = set.cpps.iter().all(|p| {
                let v = p.to_vector();
                is_pole(p) || (v[1].abs() <= GEOMETRY_TOL && v[0] >= 0.0)
            });
            if !report.on_allowed_meridians {
                report.failures.push("class (c) state has a non-positive CPP".into());
            }
        }
        Some(m) => {
            if set.cpps.iter().all(is_pole) {
                report.class = Some(CppClass::A);
            } else {
                report.class = Some(CppClass::B);
                if n >= 3 {
                    report.bound = Some(if report.both_poles_occupied { 2 * n - 4 } else { n });
                }
            }
            report.on_allowed_meridians = set
                .cpps
                .iter()
                .all(|p| p.theta().sin() * (0.5 * m as f64 * p.phi()).sin().abs() <= GEOMETRY_TOL);
            if !report.on_allowed_meridians {
                report.failures.push(format!("CPP off the meridians φ = 2πr/{m}"));
            }
            let rot = SpinRotation::from_axis_angle([0.0, 0.0, 1.0], TAU / m as f64).expect("z axis is nonzero");
            report.orbit_closed = set.cpps.iter().all(|p| {
                let q = p.rotate(&rot);
                set.cpps.iter().any(|r| r.angle_to(&q) <= GEOMETRY_TOL)
            });
            if !report.orbit_closed {
                report
                    .failures
                    .push(format!("CPP set not closed under rotation by 2π/{m}"));
            }
        }
    }
    if let Some(b) = report.bound {
        report.within_bound = report.cpp_count <= b;
        if !report.within_bound {
            report
                .failures
                .push(format!("{} CPPs exceed the bound {b}", report.cpp_count));
        }
    }
    Ok(report)
}
