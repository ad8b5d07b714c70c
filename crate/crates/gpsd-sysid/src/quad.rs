//! Quadrature primitives: adaptive Gauss-Legendre panels on finite intervals
//! and accelerated summation for cosine-weighted tails on `[a, inf)`.

use crate::error::{Error, Result};

/// 15-point Gauss-Legendre nodes on [-1, 1] (positive half; nodes are symmetric).
const GL15_NODES: [f64; 8] = [
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
];
const GL15_WEIGHTS: [f64; 8] = [
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173,
];

/// One Gauss-Legendre panel on [a, b].
pub fn gl15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = GL15_WEIGHTS[0] * f(c);
    for i in 1..8 {
        let x = h * GL15_NODES[i];
        acc += GL15_WEIGHTS[i] * (f(c + x) + f(c - x));
    }
    acc * h
}

/// Adaptive bisection with a per-panel whole-vs-halves error estimate.
///
/// The absolute tolerance is distributed over sub-panels proportionally to
/// their width, which keeps the total error below `tol` for integrable
/// integrands.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = gl15(f, a, m);
        let right = gl15(f, m, b);
        let err = (left + right - whole).abs();
        if err <= tol || (b - a) < 1e-14 * (1.0 + a.abs() + b.abs()) {
            return Ok(left + right);
        }
        if depth == 0 {
            return Err(Error::QuadratureNotConverged {
                estimate: err,
                tol,
            });
        }
        Ok(rec(f, a, m, left, 0.5 * tol, depth - 1)?
            + rec(f, m, b, right, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    rec(f, a, b, gl15(f, a, b), tol, 48)
}

/// Integral of `f` over `[start, inf)` where `f(x) = envelope(x) * cos(x*tau)`
/// with an eventually decreasing, absolutely integrable envelope.
///
/// Panels grow geometrically while shorter than a half-period of the cosine,
/// then lock to half-period width so consecutive panel integrals alternate in
/// sign; iterated averaging of the partial sums accelerates the alternating
/// series. `tau` may be zero (pure monotone tail).
pub fn cosine_tail<F: Fn(f64) -> f64>(f: &F, start: f64, tau: f64, tol: f64) -> Result<f64> {
    let half_period = if tau.abs() > 1e-12 {
        std::f64::consts::PI / tau.abs()
    } else {
        f64::INFINITY
    };
    let mut pos = start.max(1e-12);
    let mut total = 0.0;
    let mut prev_mag = f64::INFINITY;
    // Partial sums collected once panels are half-period locked.
    let mut partials: Vec<f64> = Vec::new();
    let mut locked = false;
    for _ in 0..4096 {
        let width = half_period.min(pos);
        let panel = gl15(f, pos, pos + width);
        pos += width;
        total += panel;
        let mag = panel.abs();
        if !locked {
            // Geometric regime: same-sign decreasing panels; remainder is
            // bounded by a geometric series estimated from the panel ratio.
            if width >= half_period * (1.0 - 1e-12) {
                locked = true;
                partials.push(total);
            } else if mag < 0.25 * tol && mag < prev_mag {
                let r = (mag / prev_mag).min(0.9);
                if mag * r / (1.0 - r) < tol {
                    return Ok(total);
                }
            }
        } else {
            partials.push(total);
            if mag < 0.25 * tol && prev_mag < 0.5 * tol {
                // Alternating series: remainder below the first omitted term.
                return Ok(total);
            }
            if partials.len() >= 12 {
                let (est, err) = euler_average(&partials);
                if err < tol {
                    return Ok(est);
                }
            }
        }
        prev_mag = mag;
    }
    Err(Error::QuadratureNotConverged {
        estimate: prev_mag,
        tol,
    })
}

/// Iterated averaging (Euler transform) of the tail of a partial-sum sequence.
/// Returns the accelerated limit and a crude error estimate.
fn euler_average(partials: &[f64]) -> (f64, f64) {
    let take = partials.len().min(24);
    let mut row: Vec<f64> = partials[partials.len() - take..].to_vec();
    let mut last = *row.last().unwrap();
    let mut err = f64::INFINITY;
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
        let cur = *row.last().unwrap();
        err = (cur - last).abs();
        last = cur;
    }
    (last, err)
}
