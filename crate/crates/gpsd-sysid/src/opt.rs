//! Derivative-free hyper-parameter optimization: a box-constrained
//! Nelder-Mead simplex with deterministic multi-start from a scrambled
//! Halton sequence.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// One Nelder-Mead run. Candidates are clamped into `[lo, hi]` before
/// evaluation; non-finite objective values are treated as `+inf`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let clamp = |x: &mut [f64]| {
        for i in 0..dim {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let mut evals = 0usize;
    let mut eval = |x: &mut Vec<f64>, evals: &mut usize| -> f64 {
        clamp(x);
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    // initial simplex: x0 plus 5% of the box range along each axis
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut first = x0.to_vec();
    let v0 = eval(&mut first, &mut evals);
    simplex.push((first, v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        let step = 0.05 * (hi[i] - lo[i]).max(1e-8);
        x[i] = if x[i] + step <= hi[i] { x[i] + step } else { x[i] - step };
        let v = eval(&mut x, &mut evals);
        simplex.push((x, v));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() < 1e-12 * (1.0 + best.abs()) {
            break;
        }
        // centroid of all but the worst point
        let mut c = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for i in 0..dim {
                c[i] += x[i] / dim as f64;
            }
        }
        let xw = simplex[dim].0.clone();
        let mut xr: Vec<f64> = (0..dim).map(|i| c[i] + alpha * (c[i] - xw[i])).collect();
        let fr = eval(&mut xr, &mut evals);
        if fr < simplex[0].1 {
            let mut xe: Vec<f64> = (0..dim).map(|i| c[i] + gamma * (xr[i] - c[i])).collect();
            let fe = eval(&mut xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let mut xc: Vec<f64> = (0..dim).map(|i| c[i] + rho * (xw[i] - c[i])).collect();
            let fc = eval(&mut xc, &mut evals);
            if fc < simplex[dim].1 {
                simplex[dim] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let xb = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> =
                        (0..dim).map(|i| xb[i] + sigma * (v.0[i] - xb[i])).collect();
                    let fv = eval(&mut x, &mut evals);
                    *v = (x, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Radical-inverse (van der Corput) digit expansion in the given base.
fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut v = 0.0;
    while n > 0 {
        v += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    v
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Start points in `[lo, hi]` from a Cranley-Patterson rotated Halton
/// sequence: low-discrepancy coverage of the box, deterministic in `seed`.
pub fn halton_starts(dim: usize, count: usize, lo: &[f64], hi: &[f64], seed: u64) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "too many free parameters");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|j| {
            (0..dim)
                .map(|i| {
                    let u = (radical_inverse(j as u64 + 1, PRIMES[i]) + shift[i]).fract();
                    lo[i] + u * (hi[i] - lo[i])
                })
                .collect()
        })
        .collect()
}

/// Multi-start minimization. Fails only when every start produced a
/// non-finite best value.
pub fn minimize_multistart<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    starts: usize,
    max_evals_per_start: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    let dim = lo.len();
    let points = halton_starts(dim, starts, lo, hi, seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for x0 in points {
        let (x, v) = nelder_mead(&mut f, &x0, lo, hi, max_evals_per_start);
        if v.is_finite() && best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((x, v));
        }
    }
    best.ok_or_else(|| Error::OptimizationFailed("objective non-finite at every start".into()))
}
