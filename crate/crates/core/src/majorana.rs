//! The map between Dicke coefficients and Majorana points.
//!
//! For the coherent product state `|λ(θ,φ)> = (cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>)^{⊗n}`
//!
//! ```text
//! <λ|ψ> = cos^n(θ/2) · Σ_k c_k z^k,   c_k = a_k sqrt(C(n,k)),   z = e^{-iφ} tan(θ/2).
//! ```
//!
//! Each z-root is the stereographic image of a zero direction of the amplitude
//! function; the Majorana points are the antipodes of those directions. A polynomial
//! of degree `d < n` has `n - d` zeros "at infinity" (the south pole), i.e. Majorana
//! points on the north pole.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::roots::polynomial_roots;
use crate::state::{binomial, BlochPoint, SymmetricState};

/// Relative magnitude below which a polynomial coefficient is treated as zero during root finding.
const COEFF_ZERO_REL: f64 = 1e-13;

/// `c_k = a_k sqrt(C(n,k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaPolynomial {
    coeffs: Vec<Complex64>,
}

impl MajoranaPolynomial {
    pub fn from_state(state: &SymmetricState) -> Self {
        let n = state.n();
        Self {
            coeffs: state
                .amps()
                .iter()
                .enumerate()
                .map(|(k, a)| a * binomial(n, k).sqrt())
                .collect(),
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Recovers `a_k = c_k / sqrt(C(n,k))`.
    pub fn to_state(&self) -> Result<SymmetricState> {
        let n = self.n();
        SymmetricState::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / binomial(n, k).sqrt())
                .collect(),
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

/// Shorthand for [`MajoranaPolynomial::from_state`].
pub fn majorana_polynomial(state: &SymmetricState) -> MajoranaPolynomial {
    MajoranaPolynomial::from_state(state)
}

/// Exactly `n` Bloch points, repetitions allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajoranaPoints {
    points: Vec<BlochPoint>,
}

impl MajoranaPoints {
    pub fn new(points: Vec<BlochPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("a Majorana configuration needs at least one point"));
        }
        Ok(Self { points })
    }

    pub fn from_vectors(vs: &[[f64; 3]]) -> Result<Self> {
        Self::new(vs.iter().map(|&v| BlochPoint::from_vector(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[BlochPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<BlochPoint> {
        self.points
    }

    /// Smallest pairwise angular separation (`π` for a single point).
    pub fn min_separation(&self) -> f64 {
        let mut best = PI;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min(p.angle_to(q));
            }
        }
        best
    }

    pub fn rotate(&self, rot: &crate::state::SpinRotation) -> Self {
        Self {
            points: self.points.iter().map(|p| p.rotate(rot)).collect(),
        }
    }
}

/// The positive factor `K` relating the symmetrized product of Majorana qubits to the normalized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationK(f64);

impl NormalizationK {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!("normalization K must be positive, got {value}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Majorana points of a state: antipodes of the zeros of its amplitude function.
pub fn state_to_points(state: &SymmetricState) -> Result<MajoranaPoints> {
    let n = state.n();
    let poly = MajoranaPolynomial::from_state(state);
    let scale = poly.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::domain("zero state has no Majorana representation"));
    }
    let mut coeffs: Vec<Complex64> = poly
        .coeffs
        .iter()
        .map(|c| {
            if c.norm() <= COEFF_ZERO_REL * scale {
                Complex64::new(0.0, 0.0)
            } else {
                *c
            }
        })
        .collect();
    while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;

    let mut points = vec![BlochPoint::north(); n - deg];
    for root in polynomial_roots(&coeffs)? {
        // Zero direction: tan(θ_z/2) = |ζ|, φ_z = -arg ζ. Its antipode is the Majorana point.
        let theta_z = 2.0 * root.norm().atan();
        let phi_z = -root.arg();
        points.push(BlochPoint::new(PI - theta_z, phi_z + PI));
    }
    MajoranaPoints::new(points)
}

/// Coefficients `u_k = e_k / sqrt(C(n,k))` of the unnormalized symmetrized product,
/// where `e_k` are the coefficients of `Π_i (cos(θ_i/2) + e^{iφ_i} sin(θ_i/2) z)`.
fn unnormalized_coefficients(points: &MajoranaPoints) -> Vec<Complex64> {
    let n = points.n();
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for p in points.points() {
        let [alpha, beta] = p.spinor();
        let mut next = vec![Complex64::new(0.0, 0.0); e.len() + 1];
        for (k, ek) in e.iter().enumerate() {
            next[k] += ek * alpha;
            next[k + 1] += ek * beta;
        }
        e = next;
    }
    e.iter().enumerate().map(|(k, ek)| ek / binomial(n, k).sqrt()).collect()
}

/// The normalized symmetric state whose Majorana points are `points` (up to global phase).
pub fn points_to_state(points: &MajoranaPoints) -> SymmetricState {
    SymmetricState::new(unnormalized_coefficients(points))
        .and_then(|s| s.normalize())
        .expect("product of unit spinors is a nonzero finite vector")
}

/// `K = (n!)^2 Σ_k |u_k|^2`.
pub fn normalization_k(points: &MajoranaPoints) -> NormalizationK {
    let u = unnormalized_coefficients(points);
    let norm_sqr: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    let fact: f64 = (1..=points.n()).map(|i| i as f64).product();
    NormalizationK(fact * fact * norm_sqr)
}

/// `n! K^{-1/2} Π_i |<σ|φ_i>|`.
pub fn overlap_product(points: &MajoranaPoints, k: NormalizationK, sigma: &BlochPoint) -> Result<f64> {
    if !(k.0 > 0.0) {
        return Err(Error::domain("normalization K must be positive"));
    }
    let ln_fact: f64 = (1..=points.n()).map(|i| (i as f64).ln()).sum();
    let [s0, s1] = sigma.spinor();
    let mut prod = 1.0;
    for p in points.points() {
        let [p0, p1] = p.spinor();
        prod *= (s0.conj() * p0 + s1.conj() * p1).norm();
    }
    Ok(prod * (ln_fact - 0.5 * k.0.ln()).exp())
}

/// The amplitude function `f(θ,φ) = |<λ(θ,φ)|ψ>|`.
pub fn amplitude(state: &SymmetricState, sigma: &BlochPoint) -> f64 {
    let n = state.n();
    let h = 0.5 * sigma.theta();
    let (s, c) = h.sin_cos();
    let phi = sigma.phi();
    let amps = state.amps();
    let w = |k: usize| amps[k] * binomial(n, k).sqrt();

    // Horner in whichever of z = e^{-iφ} s/c or y = e^{iφ} c/s has modulus <= 1.
    let (big, sum) = if c >= s {
        let z = Complex64::from_polar(s / c, -phi);
        let sum = (0..=n).rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + w(k));
        (c, sum)
    } else {
        let y = Complex64::from_polar(c / s, phi);
        let sum = (0..=n).fold(Complex64::new(0.0, 0.0), |acc, k| acc * y + w(k));
        (s, sum)
    };
    let prefactor = if n > 30 {
        (n as f64 * big.ln()).exp()
    } else {
        big.powi(n as i32)
    };
    prefactor * sum.norm()
}

/// Orders of the product quadrature used by [`integrate_amplitude_sq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl QuadratureSpec {
    /// `(4(n+1), 8(n+1))`, well above the exactness threshold for degree-`n` states.
    pub fn default_for(n: usize) -> Self {
        Self {
            n_theta: 4 * (n + 1),
            n_phi: 8 * (n + 1),
        }
    }
}

/// `∫∫ f² sinθ dθ dφ` with Gauss–Legendre in `cos θ` and the trapezoid rule in `φ`.
pub fn integrate_amplitude_sq(state: &SymmetricState, spec: QuadratureSpec) -> Result<f64> {
    if spec.n_theta < 2 || spec.n_phi < 2 {
        return Err(Error::domain("quadrature orders must be at least 2"));
    }
    let (x, wx) = gauss_legendre(spec.n_theta);
    let dphi = TAU / spec.n_phi as f64;
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&wx) {
        let theta = xi.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for j in 0..spec.n_phi {
            let f = amplitude(state, &BlochPoint::new(theta, j as f64 * dphi));
            ring += f * f;
        }
        total += wi * ring * dphi;
    }
    Ok(total)
}

/// Amplitude samples on `θ_i = π i / (N_θ - 1)`, `φ_j = 2π j / N_φ`, row-major in θ then φ.
pub fn amplitude_grid(state: &SymmetricState, n_theta: usize, n_phi: usize) -> Result<Vec<[f64; 3]>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::domain("grid orders must be at least 2"));
    }
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            out.push([theta, phi, amplitude(state, &BlochPoint::new(theta, phi))]);
        }
    }
    Ok(out)
}
