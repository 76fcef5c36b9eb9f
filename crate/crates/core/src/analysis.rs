//! Closed-form Dicke results, entanglement bounds, moment checks and Platonic duality.

use std::f64::consts::{LN_2, PI};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::{state_to_points, MajoranaPoints};
use crate::solver::{find_cpps, SolverConfig};
use crate::state::{ln_binomial, BlochPoint, SymmetricState};

/// Default tolerance for the anticoherence and design predicates.
pub const MOMENT_TOL: f64 = 1e-9;

/// Separation below which a pair of states counts as dual.
pub const DUALITY_TOL: f64 = 1e-5;

/// The closest product point of `|S_{n,k}>` on the `φ = 0` meridian.
pub fn dicke_cpp(n: usize, k: usize) -> Result<BlochPoint> {
    if k > n || n == 0 {
        return Err(Error::domain(format!("Dicke index k = {k} out of range for n = {n}")));
    }
    let c = ((n - k) as f64 / n as f64).sqrt();
    Ok(BlochPoint::new(2.0 * c.clamp(0.0, 1.0).acos(), 0.0))
}

/// Geometric entanglement of `|S_{n,k}>` in bits.
pub fn dicke_entanglement(n: usize, k: usize) -> f64 {
    assert!(k <= n, "dicke_entanglement: k > n");
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    let ln = kf * (nf / kf).ln() + (nf - kf) * (nf / (nf - kf)).ln() - ln_binomial(n, k);
    ln / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    /// Entanglement of the most entangled Dicke state.
    pub dicke_lower: f64,
    /// `log2 sqrt(nπ/2)`.
    pub stirling_lower: f64,
    /// `log2(n + 1)`, the symmetric-state ceiling.
    pub upper: f64,
    /// `n/2`, lower bound on the maximum over all n-qubit states.
    pub general_lower: f64,
    /// `n - 1`.
    pub general_upper: f64,
}

pub fn entanglement_bounds(n: usize) -> Result<BoundsReport> {
    if n < 2 {
        return Err(Error::domain("bounds need n >= 2"));
    }
    let nf = n as f64;
    Ok(BoundsReport {
        n,
        dicke_lower: dicke_entanglement(n, n / 2),
        stirling_lower: (nf * PI / 2.0).sqrt().log2(),
        upper: (nf + 1.0).log2(),
        general_lower: nf / 2.0,
        general_upper: nf - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// Mean of the Majorana unit vectors.
    pub spin_vector: [f64; 3],
    /// Spectral-norm distance of the second-moment matrix from `I/3`.
    pub second_moment_deviation: f64,
}

impl MomentReport {
    pub fn spin_norm(&self) -> f64 {
        let [x, y, z] = self.spin_vector;
        (x * x + y * y + z * z).sqrt()
    }

    /// Anticoherent to first order: the spin vector vanishes.
    pub fn is_anticoherent(&self, tol: f64) -> bool {
        self.spin_norm() < tol
    }

    /// Spherical `t`-design check for `t <= 2`.
    pub fn is_design(&self, t: usize, tol: f64) -> bool {
        match t {
            0 => true,
            1 => self.is_anticoherent(tol),
            2 => self.is_anticoherent(tol) && self.second_moment_deviation < tol,
            _ => false,
        }
    }
}

pub fn moment_report(points: &MajoranaPoints) -> MomentReport {
    let n = points.n() as f64;
    let mut spin = [0.0; 3];
    let mut m = Matrix3::<f64>::zeros();
    for p in points.points() {
        let v = p.to_vector();
        for i in 0..3 {
            spin[i] += v[i] / n;
            for j in 0..3 {
                m[(i, j)] += v[i] * v[j] / n;
            }
        }
    }
    let dev = m - Matrix3::identity() / 3.0;
    let second_moment_deviation = dev
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.abs()));
    MomentReport {
        spin_vector: spin,
        second_moment_deviation,
    }
}

/// Symmetric Hausdorff distance between two point sets, in radians.
pub fn hausdorff_angle(a: &[BlochPoint], b: &[BlochPoint]) -> f64 {
    let directed = |x: &[BlochPoint], y: &[BlochPoint]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.angle_to(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed(a, b).max(directed(b, a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub mps_a: Vec<BlochPoint>,
    pub cpps_a: Vec<BlochPoint>,
    pub mps_b: Vec<BlochPoint>,
    pub cpps_b: Vec<BlochPoint>,
    /// Hausdorff distance between the MPs of `a` and the CPPs of `b`.
    pub mp_a_to_cpp_b: f64,
    /// Hausdorff distance between the CPPs of `a` and the MPs of `b`.
    pub cpp_a_to_mp_b: f64,
    pub dual_pair: bool,
}

/// Compares the Majorana points and closest product points of two states crosswise.
pub fn duality_report(a: &SymmetricState, b: &SymmetricState, config: &SolverConfig) -> Result<DualityReport> {
    let mps_a = state_to_points(a)?.into_points();
    let mps_b = state_to_points(b)?.into_points();
    let cpps_a = find_cpps(a, config).map_err(|e| e.context("first state"))?.cpps;
    let cpps_b = find_cpps(b, config).map_err(|e| e.context("second state"))?.cpps;
    let mp_a_to_cpp_b = hausdorff_angle(&mps_a, &cpps_b);
    let cpp_a_to_mp_b = hausdorff_angle(&cpps_a, &mps_b);
    Ok(DualityReport {
        dual_pair: mp_a_to_cpp_b < DUALITY_TOL && cpp_a_to_mp_b < DUALITY_TOL,
        mps_a,
        cpps_a,
        mps_b,
        cpps_b,
        mp_a_to_cpp_b,
        cpp_a_to_mp_b,
    })
}
