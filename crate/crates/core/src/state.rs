//! Symmetric states in the Dicke basis, Bloch points and joint single-qubit rotations.
//!
//! A symmetric state of `n` qubits is stored by its `n + 1` amplitudes `a_k` on the
//! Dicke states `|S_{n,k}>`, where `k` counts the excitations.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type ComplexScalar = Complex64;

/// Default magnitude below which an amplitude counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-12;

/// Binomial coefficient as a float. Exact for every `n` where the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

/// `ln C(n, k)` by direct summation, usable far beyond the f64 range of `C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n, "ln_binomial: k > n");
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// A permutation-symmetric pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    amps: Vec<Complex64>,
}

impl SymmetricState {
    /// Builds a state from `n + 1` Dicke amplitudes. The vector is not normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::domain(format!(
                "a symmetric state needs n >= 1, got {} amplitudes",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::domain("non-finite amplitude"));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Sparse real constructor: `(k, a_k)` pairs on `n` qubits, normalized.
    pub fn from_sparse(n: usize, terms: &[(usize, f64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        for &(k, a) in terms {
            if k > n {
                return Err(Error::domain(format!("index {k} exceeds n = {n}")));
            }
            amps[k] += a;
        }
        Self::new(amps)?.normalize()
    }

    /// The Dicke state `|S_{n,k}>`.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if k > n {
            return Err(Error::domain(format!("Dicke index k = {k} outside 0..={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// The `n`-fold product of the single-qubit state at `point`.
    pub fn coherent(n: usize, point: &BlochPoint) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        let [u, v] = point.spinor();
        let amps = (0..=n)
            .map(|k| binomial(n, k).sqrt() * u.powu((n - k) as u32) * v.powu(k as u32))
            .collect();
        Ok(Self { amps })
    }

    /// Haar-random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self { amps }.normalize().expect("gaussian vector is nonzero")
    }

    /// Random state with real Gaussian amplitudes.
    pub fn random_real<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
            .collect();
        Self { amps }.normalize().expect("gaussian vector is nonzero")
    }

    /// Random state with nonnegative amplitudes on the given support.
    pub fn random_positive<R: Rng + ?Sized>(n: usize, support: &[usize], rng: &mut R) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        for &k in support {
            amps[k] = Complex64::new(rng.random_range(0.05..1.0), 0.0);
        }
        Self { amps }.normalize().expect("positive vector is nonzero")
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, k: usize) -> Complex64 {
        self.amps[k]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        if (norm - 1.0).abs() < 1e-16 {
            return Ok(self.clone());
        }
        Ok(Self {
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    /// `<self|other> = sum_k conj(a_k) b_k`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n() != other.n() {
            return Err(Error::domain(format!(
                "inner product of states with n = {} and n = {}",
                self.n(),
                other.n()
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Indices whose amplitude magnitude exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..=self.n()).filter(|&k| self.amps[k].norm() > tol).collect()
    }

    /// Multiplies by the global phase making the largest-magnitude amplitude real positive.
    /// Ties resolve to the lowest index.
    pub fn canonical_phase(&self) -> Self {
        let mut best = 0;
        for (k, a) in self.amps.iter().enumerate() {
            if a.norm() > self.amps[best].norm() * (1.0 + 1e-12) {
                best = k;
            }
        }
        let lead = self.amps[best];
        if lead.norm() == 0.0 {
            return self.clone();
        }
        let phase = lead.conj() / lead.norm();
        Self {
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Applies `U^{⊗n}` directly on the Dicke coefficients.
    pub fn rotate(&self, rot: &SpinRotation) -> Self {
        let n = self.n();
        let (alpha, beta) = (rot.alpha, rot.beta);
        // |0> -> alpha|0> + beta|1>, |1> -> -conj(beta)|0> + conj(alpha)|1>
        let col0 = [alpha, beta];
        let col1 = [-beta.conj(), alpha.conj()];
        let pow0 = binary_form_powers(col0, n);
        let pow1 = binary_form_powers(col1, n);

        // With w_k = a_k sqrt(C(n,k)) the form sum_k w_k x^{n-k} y^k transforms by substitution.
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let wk = self.amps[k] * binomial(n, k).sqrt();
            if wk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let p = &pow0[n - k];
            let q = &pow1[k];
            for (i, pi) in p.iter().enumerate() {
                let s = wk * pi;
                for (j, qj) in q.iter().enumerate() {
                    out[i + j] += s * qj;
                }
            }
        }
        let global = Complex64::from_polar(1.0, rot.phase * n as f64);
        for (j, o) in out.iter_mut().enumerate() {
            *o = *o / binomial(n, j).sqrt() * global;
        }
        Self { amps: out }
    }

    /// Coefficient-level symmetry classification.
    pub fn classify(&self, tol: f64) -> StateClassification {
        let canon = self.canonical_phase();
        let is_real = canon.amps.iter().all(|a| a.im.abs() <= tol);
        let is_positive = is_real && canon.amps.iter().all(|a| a.re >= -tol);
        let support = canon.support(tol);
        let n = self.n();
        let spacing = support.iter().map(|&k| k - support[0]).fold(0usize, gcd);
        let rot_orders = (2..=n).filter(|&m| spacing % m == 0).collect();
        StateClassification {
            is_positive,
            is_real,
            rot_orders,
        }
    }

    /// True when exactly one amplitude exceeds `tol`.
    pub fn is_dicke(&self, tol: f64) -> bool {
        self.support(tol).len() == 1
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coefficients of `(c0 x + c1 y)^m` in the basis `x^{m-j} y^j`, for `m = 0..=n`.
fn binary_form_powers(col: [Complex64; 2], n: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(vec![Complex64::new(1.0, 0.0)]);
    for m in 1..=n {
        let prev: &Vec<Complex64> = &out[m - 1];
        let mut next = vec![Complex64::new(0.0, 0.0); m + 1];
        for (j, p) in prev.iter().enumerate() {
            next[j] += p * col[0];
            next[j + 1] += p * col[1];
        }
        out.push(next);
    }
    out
}

/// Result of [`SymmetricState::classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateClassification {
    pub is_positive: bool,
    pub is_real: bool,
    /// Every `m` in `(1, n]` for which the support spacing is a multiple of `m`.
    pub rot_orders: Vec<usize>,
}

impl StateClassification {
    /// Largest rotational order, i.e. the minimal rotation angle `2π/m`.
    pub fn max_rot_order(&self) -> Option<usize> {
        self.rot_orders.iter().copied().max()
    }
}

/// A direction on the unit sphere, doubling as a single-qubit state
/// `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    /// Canonicalizes `θ` into `[0, π]`, `φ` into `[0, 2π)`, and `φ = 0` at the poles.
    pub fn new(theta: f64, phi: f64) -> Self {
        let v = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        if (0.0..=PI).contains(&theta) {
            Self::canonical(theta, phi)
        } else {
            Self::from_vector(v)
        }
    }

    fn canonical(theta: f64, phi: f64) -> Self {
        if theta == 0.0 || theta == PI {
            return Self { theta, phi: 0.0 };
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn south() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Direction of a (not necessarily unit) 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let rho = v[0].hypot(v[1]);
        let theta = rho.atan2(v[2]);
        let phi = if rho == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
        debug_assert!(r > 0.0);
        Self::canonical(theta, phi)
    }

    pub fn to_vector(&self) -> [f64; 3] {
        let s = self.theta.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.theta.cos()]
    }

    /// `(cos(θ/2), e^{iφ} sin(θ/2))`.
    pub fn spinor(&self) -> [Complex64; 2] {
        let h = 0.5 * self.theta;
        [Complex64::new(h.cos(), 0.0), Complex64::from_polar(h.sin(), self.phi)]
    }

    /// The Bloch direction of an arbitrary nonzero spinor.
    pub fn from_spinor(s: [Complex64; 2]) -> Self {
        let (a, b) = (s[0].norm(), s[1].norm());
        let theta = 2.0 * b.atan2(a);
        let phi = if a == 0.0 || b == 0.0 {
            0.0
        } else {
            s[1].arg() - s[0].arg()
        };
        Self::canonical(theta, phi)
    }

    pub fn antipode(&self) -> Self {
        Self::canonical(PI - self.theta, self.phi + PI)
    }

    /// Great-circle angle to `other`, accurate for tiny and near-antipodal separations.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let a = self.to_vector();
        let b = other.to_vector();
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        sin.atan2(cos)
    }

    pub fn rotate(&self, rot: &SpinRotation) -> Self {
        Self::from_spinor(rot.apply(self.spinor()))
    }

    /// Reflection through the X-Z plane (`φ -> 2π - φ`).
    pub fn conjugate(&self) -> Self {
        Self::canonical(self.theta, -self.phi)
    }
}

/// A single-qubit unitary `e^{iγ} [[α, -conj(β)], [β, conj(α)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRotation {
    alpha: Complex64,
    beta: Complex64,
    phase: f64,
}

impl SpinRotation {
    pub fn new(alpha: Complex64, beta: Complex64, phase: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > UNIT_TOL || !phase.is_finite() {
            return Err(Error::domain(format!(
                "rotation is not unitary: |alpha|^2 + |beta|^2 = {norm}"
            )));
        }
        Ok(Self { alpha, beta, phase })
    }

    pub fn identity() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            phase: 0.0,
        }
    }

    /// `exp(-i angle/2 n·σ)` about the given (normalized internally) axis.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let r = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::domain("rotation axis must be nonzero"));
        }
        let [nx, ny, nz] = [axis[0] / r, axis[1] / r, axis[2] / r];
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self {
            alpha: Complex64::new(c, -s * nz),
            beta: Complex64::new(s * ny, -s * nx),
            phase: 0.0,
        })
    }

    /// Accepts any 2×2 unitary `[[u00, u01], [u10, u11]]`.
    pub fn from_matrix(u: [[Complex64; 2]; 2]) -> Result<Self> {
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        if (det.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::domain(format!("|det U| = {} is not 1", det.norm())));
        }
        // Check U†U = I.
        for i in 0..2 {
            for j in 0..2 {
                let e: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (e - target).norm() > UNIT_TOL {
                    return Err(Error::domain("matrix is not unitary"));
                }
            }
        }
        let gamma = 0.5 * det.arg();
        let g = Complex64::from_polar(1.0, -gamma);
        let alpha = u[0][0] * g;
        let beta = u[1][0] * g;
        Self::new(alpha, beta, gamma)
    }

    /// Haar-random SU(2) element (uniform unit quaternion).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self {
            alpha: Complex64::new(q[0] / r, q[1] / r),
            beta: Complex64::new(q[2] / r, q[3] / r),
            phase: 0.0,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn apply(&self, s: [Complex64; 2]) -> [Complex64; 2] {
        let g = Complex64::from_polar(1.0, self.phase);
        [
            g * (self.alpha * s[0] - self.beta.conj() * s[1]),
            g * (self.beta * s[0] + self.alpha.conj() * s[1]),
        ]
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: -self.beta,
            phase: -self.phase,
        }
    }

    /// The SU(2) rotation taking `point` to the north pole along a great circle.
    pub fn to_north(point: &BlochPoint) -> Self {
        let [u, v] = point.spinor();
        // U = [[conj(u), conj(v)], [-v, u]] maps (u, v) to (1, 0).
        Self {
            alpha: u.conj(),
            beta: -v,
            phase: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dicke_basis_is_orthonormal() {
        for n in 1..8 {
            for j in 0..=n {
                for k in 0..=n {
                    let ip = SymmetricState::dicke(n, j)
                        .unwrap()
                        .inner(&SymmetricState::dicke(n, k).unwrap())
                        .unwrap();
                    assert_eq!(ip, c(if j == k { 1.0 } else { 0.0 }));
                }
            }
        }
    }

    #[test]
    fn dicke_out_of_range_is_domain_error() {
        assert!(matches!(SymmetricState::dicke(3, 4), Err(Error::Domain(_))));
        assert!(SymmetricState::dicke(0, 0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let s = SymmetricState::from_real(&[1.0, 0.0, 1.0])
            .unwrap()
            .normalize()
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amp(0).re - h).abs() < 1e-15 && (s.amp(2).re - h).abs() < 1e-15);

        let ico =
            SymmetricState::from_sparse(12, &[(1, 7f64.sqrt()), (6, -(11f64.sqrt())), (11, -(7f64.sqrt()))]).unwrap();
        assert!((ico.amp(1).norm_sqr() - 7.0 / 25.0).abs() < 1e-15);

        let again = ico.normalize().unwrap();
        for (a, b) in ico.amps().iter().zip(again.amps()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(SymmetricState::from_real(&[0.0, 0.0]).unwrap().normalize().is_err());
    }

    #[test]
    fn inner_products() {
        let ghz = SymmetricState::from_sparse(3, &[(0, 1.0), (3, 1.0)]).unwrap();
        let w = SymmetricState::dicke(3, 1).unwrap();
        assert_eq!(ghz.inner(&w).unwrap(), c(0.0));
        assert!((ghz.inner(&ghz).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(ghz.inner(&SymmetricState::dicke(4, 0).unwrap()).is_err());
    }

    #[test]
    fn identity_and_flip_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = SymmetricState::random(5, &mut rng);
        let same = psi.rotate(&SpinRotation::identity());
        for (a, b) in psi.amps().iter().zip(same.amps()) {
            assert!((a - b).norm() < 1e-15);
        }
        let flip = SpinRotation::from_axis_angle([1.0, 0.0, 0.0], PI).unwrap();
        for n in 1..10 {
            let out = SymmetricState::dicke(n, 0).unwrap().rotate(&flip);
            assert!((out.amp(n).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_rotation_rejected() {
        assert!(SpinRotation::new(c(1.0), c(0.1), 0.0).is_err());
        let m = [[c(1.0), c(0.0)], [c(0.0), c(2.0)]];
        assert!(SpinRotation::from_matrix(m).is_err());
    }

    #[test]
    fn from_matrix_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = SpinRotation::random(&mut rng);
        let g = Complex64::from_polar(1.0, 0.4);
        let m = [
            [g * r.alpha(), -g * r.beta().conj()],
            [g * r.beta(), g * r.alpha().conj()],
        ];
        let r2 = SpinRotation::from_matrix(m).unwrap();
        let s = [c(0.6), Complex64::new(0.0, 0.8)];
        let (a, b) = (
            r2.apply(s),
            [m[0][0] * s[0] + m[0][1] * s[1], m[1][0] * s[0] + m[1][1] * s[1]],
        );
        assert!((a[0] - b[0]).norm() < 1e-14 && (a[1] - b[1]).norm() < 1e-14);
    }

    #[test]
    fn rotation_preserves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=12 {
            let a = SymmetricState::random(n, &mut rng);
            let b = SymmetricState::random(n, &mut rng);
            let u = SpinRotation::random(&mut rng);
            let before = a.inner(&b).unwrap().norm();
            let after = a.rotate(&u).inner(&b.rotate(&u)).unwrap().norm();
            assert!((before - after).abs() < 1e-10, "n = {n}");
            assert!((a.rotate(&u).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn to_north_maps_point_to_pole() {
        let p = BlochPoint::new(1.1, 4.0);
        let q = p.rotate(&SpinRotation::to_north(&p));
        assert!(q.angle_to(&BlochPoint::north()) < 1e-14);
    }

    #[test]
    fn classify_examples() {
        let ghz = SymmetricState::from_sparse(3, &[(0, 1.0), (3, 1.0)]).unwrap();
        let cls = ghz.classify(DEFAULT_ZERO_TOL);
        assert_eq!(cls.rot_orders, vec![3]);
        assert!(cls.is_positive && cls.is_real);

        let s = SymmetricState::from_sparse(15, &[(3, 0.3), (7, -0.5), (15, 0.8)]).unwrap();
        let cls = s.classify(DEFAULT_ZERO_TOL);
        assert!(cls.rot_orders.contains(&4));
        assert!(cls.is_real && !cls.is_positive);

        let w = SymmetricState::dicke(3, 1).unwrap();
        let cls = w.classify(DEFAULT_ZERO_TOL);
        assert_eq!(cls.rot_orders, vec![2, 3]);
        assert!(cls.is_positive);
    }

    #[test]
    fn classify_removes_global_phase() {
        let g = Complex64::from_polar(1.0, 2.0);
        let s = SymmetricState::new(vec![g * 0.6, c(0.0), g * 0.8]).unwrap();
        let cls = s.classify(DEFAULT_ZERO_TOL);
        assert!(cls.is_positive);
        assert_eq!(cls.rot_orders, vec![2]);
    }

    #[test]
    fn single_amplitude_reports_every_order() {
        for n in 2..10 {
            let cls = SymmetricState::dicke(n, n / 2).unwrap().classify(DEFAULT_ZERO_TOL);
            assert_eq!(cls.rot_orders, (2..=n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bloch_point_canonicalization() {
        let p = BlochPoint::new(0.0, 3.0);
        assert_eq!(p.phi(), 0.0);
        let q = BlochPoint::new(1.0, -0.5);
        assert!((q.phi() - (TAU - 0.5)).abs() < 1e-15);
        let r = BlochPoint::new(-1.0, 0.0);
        assert!((r.theta() - 1.0).abs() < 1e-15 && (r.phi() - PI).abs() < 1e-15);
        assert!((BlochPoint::north().antipode().theta() - PI).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(60, 30), 118264581564861424.0);
        assert!((ln_binomial(20, 10) - 184756f64.ln()).abs() < 1e-12);
    }
}
