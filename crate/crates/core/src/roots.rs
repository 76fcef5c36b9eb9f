//! Roots of complex polynomials from companion-matrix eigenvalues, polished by Newton steps.
//!
//! The companion matrix is already upper Hessenberg, so the eigenvalues come from a
//! plain shifted QR iteration on it.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `sum_k coeffs[k] z^k`. The leading coefficient must be nonzero.
///
/// Exact zero roots (vanishing low-order coefficients) are split off before the
/// eigenvalue solve. Each remaining root receives one Newton step, taken on the
/// reversed polynomial in `1/z` when `|z| > 1`.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len().saturating_sub(1);
    if coeffs.is_empty() || coeffs[deg] == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("leading coefficient is zero"));
    }
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let reduced = &coeffs[zeros..];
    let m = reduced.len() - 1;
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-reduced[0] / reduced[1]);
        return Ok(roots);
    }

    // Balance by z = rho y so that the scaled end coefficients have equal magnitude.
    let rho = (reduced[0].norm() / reduced[m].norm()).powf(1.0 / m as f64);
    let scaled: Vec<Complex64> = reduced
        .iter()
        .enumerate()
        .map(|(k, c)| c * rho.powi(k as i32))
        .collect();
    let lead = scaled[m];
    let mut h = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        h[j] = -scaled[m - 1 - j] / lead;
    }
    for i in 1..m {
        h[i * m + i - 1] = Complex64::new(1.0, 0.0);
    }
    for y in hessenberg_eigenvalues(&mut h, m)? {
        roots.push(polish(reduced, y * rho));
    }
    Ok(roots)
}

/// Eigenvalues of an upper Hessenberg matrix (row-major, `m × m`) by single-shift
/// complex QR with Wilkinson shifts. The matrix is overwritten.
fn hessenberg_eigenvalues(h: &mut [Complex64], m: usize) -> Result<Vec<Complex64>> {
    let at = |i: usize, j: usize| i * m + j;
    let mut eig = vec![Complex64::new(0.0, 0.0); m];
    let mut hi = m - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[at(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[at(l, l - 1)].norm();
            let diag = h[at(l, l)].norm() + h[at(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[at(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * m.max(10) {
            return Err(Error::NonConvergence("companion matrix QR iteration".into()));
        }

        let shift = if iter % 11 == 0 {
            // Exceptional shift breaks cycles such as cyclic permutation matrices.
            h[at(hi, hi)] + Complex64::new(0.75, 0.43) * h[at(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };

        for k in l..hi {
            let (x, y) = if k == l {
                (h[at(l, l)] - shift, h[at(l + 1, l)])
            } else {
                (h[at(k, k - 1)], h[at(k + 1, k - 1)])
            };
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                continue;
            }
            let (c, s) = (x / r, y / r);
            let first = if k == l { l } else { k - 1 };
            for j in first..=hi {
                let (t1, t2) = (h[at(k, j)], h[at(k + 1, j)]);
                h[at(k, j)] = c.conj() * t1 + s.conj() * t2;
                h[at(k + 1, j)] = -s * t1 + c * t2;
            }
            for i in l..=(k + 2).min(hi) {
                let (t1, t2) = (h[at(i, k)], h[at(i, k + 1)]);
                h[at(i, k)] = c * t1 + s * t2;
                h[at(i, k + 1)] = -s.conj() * t1 + c.conj() * t2;
            }
            if k > l {
                h[at(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn polish(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    if !z.re.is_finite() || !z.im.is_finite() {
        return z;
    }
    let candidate = if z.norm() <= 1.0 {
        newton_step(coeffs.iter().rev(), z)
    } else {
        let w = newton_step(coeffs.iter(), z.inv());
        if w.norm() == 0.0 {
            return z;
        }
        w.inv()
    };
    // Keep the Newton update only when it does not increase the residual.
    if residual(coeffs, candidate) <= residual(coeffs, z) {
        candidate
    } else {
        z
    }
}

/// One Newton step for the polynomial whose coefficients are yielded from the highest degree down.
fn newton_step<'a>(coeffs_high_first: impl Iterator<Item = &'a Complex64>, z: Complex64) -> Complex64 {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs_high_first {
        dp = dp * z + p;
        p = p * z + c;
    }
    if dp.norm() == 0.0 {
        z
    } else {
        z - p / dp
    }
}

/// Scale-free residual `|p(z)| / sum |c_k| |z|^k`, evaluated in whichever of `z`, `1/z` is small.
fn residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, scale) = if z.norm() <= 1.0 {
        coeffs.iter().rev().fold((Complex64::new(0.0, 0.0), 0.0), |(p, s), c| {
            (p * z + c, s * z.norm() + c.norm())
        })
    } else {
        let w = z.inv();
        coeffs.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(p, s), c| {
            (p * w + c, s * w.norm() + c.norm())
        })
    };
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}
