//! Classical point-configuration problems on the sphere: Thomson (Coulomb energy) and
//! Tóth (largest minimal distance).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analysis::hausdorff_angle;
use crate::error::{Error, Result};
use crate::majorana::MajoranaPoints;
use crate::state::BlochPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalProblem {
    Toth,
    Thomson,
}

impl std::str::FromStr for ClassicalProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toth" | "tóth" => Ok(ClassicalProblem::Toth),
            "thomson" => Ok(ClassicalProblem::Thomson),
            _ => Err(Error::domain(format!("unknown classical problem '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfig {
    pub n: usize,
    pub problem: ClassicalProblem,
    pub restarts: usize,
    /// Stop when the largest tangential gradient component falls below this.
    pub step_tol: f64,
    pub rng_seed: u64,
}

impl ClassicalConfig {
    pub fn new(n: usize, problem: ClassicalProblem) -> Self {
        Self {
            n,
            problem,
            restarts: 8,
            step_tol: 1e-11,
            rng_seed: 42,
        }
    }
}

type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(a: Vec3) -> Vec3 {
    let r = dot(a, a).sqrt();
    [a[0] / r, a[1] / r, a[2] / r]
}

/// Coulomb energy `Σ_{i<j} 1/|v_i - v_j|`.
pub fn thomson_energy(points: &[BlochPoint]) -> f64 {
    let v: Vec<Vec3> = points.iter().map(|p| p.to_vector()).collect();
    energy(&v)
}

fn energy(v: &[Vec3]) -> f64 {
    let mut e = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = sub(v[i], v[j]);
            e += 1.0 / dot(d, d).sqrt();
        }
    }
    e
}

/// Soft minimum `-T ln Σ exp(-r_ij / T)` of the chord lengths, and its gradient.
fn soft_min(v: &[Vec3], t: f64) -> (f64, Vec<Vec3>) {
    let n = v.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = sub(v[i], v[j]);
            pairs.push((i, j, d, dot(d, d).sqrt()));
        }
    }
    let rmin = pairs.iter().map(|p| p.3).fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = pairs.iter().map(|p| (-(p.3 - rmin) / t).exp()).collect();
    let total: f64 = weights.iter().sum();
    let value = rmin - t * total.ln();
    let mut grad = vec![[0.0; 3]; n];
    for ((i, j, d, r), w) in pairs.iter().zip(&weights) {
        let c = w / total / r;
        for a in 0..3 {
            grad[*i][a] += c * d[a];
            grad[*j][a] -= c * d[a];
        }
    }
    (value, grad)
}

fn coulomb(v: &[Vec3]) -> (f64, Vec<Vec3>) {
    let n = v.len();
    let mut grad = vec![[0.0; 3]; n];
    let mut e = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = sub(v[i], v[j]);
            let r2 = dot(d, d);
            let r = r2.sqrt();
            e += 1.0 / r;
            let c = 1.0 / (r2 * r);
            for a in 0..3 {
                // Negative energy gradient, so ascent on -E.
                grad[i][a] += c * d[a];
                grad[j][a] -= c * d[a];
            }
        }
    }
    (-e, grad)
}

/// Projected gradient ascent with Armijo backtracking. Returns the final objective.
fn ascend(v: &mut [Vec3], objective: impl Fn(&[Vec3]) -> (f64, Vec<Vec3>), tol: f64, max_iter: usize) -> f64 {
    let (mut value, mut grad) = objective(v);
    let mut step = 0.1;
    for _ in 0..max_iter {
        let tangent: Vec<Vec3> = v
            .iter()
            .zip(&grad)
            .map(|(p, g)| {
                let r = dot(*p, *g);
                [g[0] - r * p[0], g[1] - r * p[1], g[2] - r * p[2]]
            })
            .collect();
        let gmax = tangent.iter().map(|g| dot(*g, *g).sqrt()).fold(0.0, f64::max);
        if gmax < tol {
            break;
        }
        let g2: f64 = tangent.iter().map(|g| dot(*g, *g)).sum();
        step *= 2.0;
        let mut moved = false;
        while step * gmax > 1e-16 {
            let trial: Vec<Vec3> = v
                .iter()
                .zip(&tangent)
                .map(|(p, g)| unit([p[0] + step * g[0], p[1] + step * g[1], p[2] + step * g[2]]))
                .collect();
            let (tv, tg) = objective(&trial);
            if tv >= value + 1e-4 * step * g2 {
                v.copy_from_slice(&trial);
                value = tv;
                grad = tg;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    value
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if dot(v, v) > 1e-12 {
            return unit(v);
        }
    }
}

fn min_chord(v: &[Vec3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = sub(v[i], v[j]);
            m = m.min(dot(d, d).sqrt());
        }
    }
    m
}

fn solve_once(config: &ClassicalConfig, rng: &mut ChaCha8Rng) -> (Vec<Vec3>, f64) {
    let mut v: Vec<Vec3> = (0..config.n).map(|_| random_unit(rng)).collect();
    match config.problem {
        ClassicalProblem::Thomson => {
            let e = -ascend(&mut v, coulomb, config.step_tol, 200_000);
            (v, -e)
        }
        ClassicalProblem::Toth => {
            // Anneal the soft-min temperature geometrically.
            let mut t = 0.1;
            for _ in 0..12 {
                ascend(&mut v, |x| soft_min(x, t), config.step_tol, 20_000);
                t *= 0.5;
            }
            let score = min_chord(&v);
            (v, score)
        }
    }
}

/// Rotates a configuration so the first point sits at the north pole and the second on `φ = 0`.
pub fn canonical_orientation(points: &[BlochPoint]) -> Vec<BlochPoint> {
    if points.len() < 2 {
        return points.iter().map(|_| BlochPoint::north()).collect();
    }
    let v: Vec<Vec3> = points.iter().map(|p| p.to_vector()).collect();
    let e3 = v[0];
    // Any direction off the first point's axis fixes the azimuth.
    let second = v[1..]
        .iter()
        .copied()
        .find(|w| dot(cross(e3, *w), cross(e3, *w)) > 1e-20)
        .unwrap_or(if e3[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        });
    let s = dot(second, e3);
    let e1 = unit(sub(second, [e3[0] * s, e3[1] * s, e3[2] * s]));
    let e2 = cross(e3, e1);
    let mut out: Vec<BlochPoint> = v
        .iter()
        .map(|w| BlochPoint::from_vector([dot(*w, e1), dot(*w, e2), dot(*w, e3)]))
        .collect();
    out[0] = BlochPoint::north();
    out
}

/// Best configuration over the restarts, canonically oriented.
pub fn classical_points(config: &ClassicalConfig) -> Result<MajoranaPoints> {
    if config.n < 2 {
        return Err(Error::domain("classical problems need n >= 2"));
    }
    if config.restarts == 0 {
        return Err(Error::domain("restarts must be positive"));
    }
    let mut best: Option<(Vec<Vec3>, f64)> = None;
    for r in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed.wrapping_add(r as u64));
        let (v, score) = solve_once(config, &mut rng);
        if best.as_ref().is_none_or(|b| score > b.1) {
            best = Some((v, score));
        }
    }
    let (v, _) = best.expect("at least one restart");
    let pts: Vec<BlochPoint> = v.into_iter().map(BlochPoint::from_vector).collect();
    MajoranaPoints::new(canonical_orientation(&pts))
}

/// Smallest Hausdorff distance between `a` and a rotated copy of `b`.
///
/// Candidate rotations send a point of `b` and its nearest neighbour onto a pair of
/// `a` with a matching separation.
pub fn congruence_distance(a: &[BlochPoint], b: &[BlochPoint]) -> f64 {
    if a.len() != b.len() || a.len() < 2 {
        return hausdorff_angle(a, b);
    }
    let va: Vec<Vec3> = a.iter().map(|p| p.to_vector()).collect();
    let vb: Vec<Vec3> = b.iter().map(|p| p.to_vector()).collect();
    let (j_near, sep) = (1..vb.len())
        .map(|j| (j, a_angle(vb[0], vb[j])))
        .filter(|(_, s)| *s > 1e-6 && *s < std::f64::consts::PI - 1e-6)
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((1, 0.0));
    let frame = |p: Vec3, q: Vec3| {
        let e1 = p;
        let e2 = unit(sub(q, [p[0] * dot(p, q), p[1] * dot(p, q), p[2] * dot(p, q)]));
        [e1, e2, cross(e1, e2)]
    };
    let fb = frame(vb[0], vb[j_near]);
    let mut best = f64::INFINITY;
    for i in 0..va.len() {
        for j in 0..va.len() {
            if i == j || (a_angle(va[i], va[j]) - sep).abs() > 1e-3 {
                continue;
            }
            let fa = frame(va[i], va[j]);
            let moved: Vec<BlochPoint> = vb
                .iter()
                .map(|w| {
                    let c = [dot(*w, fb[0]), dot(*w, fb[1]), dot(*w, fb[2])];
                    BlochPoint::from_vector([
                        c[0] * fa[0][0] + c[1] * fa[1][0] + c[2] * fa[2][0],
                        c[0] * fa[0][1] + c[1] * fa[1][1] + c[2] * fa[2][1],
                        c[0] * fa[0][2] + c[1] * fa[1][2] + c[2] * fa[2][2],
                    ])
                })
                .collect();
            best = best.min(hausdorff_angle(a, &moved));
        }
    }
    best
}

fn a_angle(p: Vec3, q: Vec3) -> f64 {
    let c = cross(p, q);
    dot(c, c).sqrt().atan2(dot(p, q))
}
