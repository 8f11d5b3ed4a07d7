//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! min  f(a) = 1/2 a'Qa - e'a,   Q_ij = y_i y_j K_ij
//! s.t. 0 <= a_i <= C,  y'a = 0
//! ```
//!
//! Each step picks the maximal violating index `i` and pairs it with the
//! second choice `j` that maximizes the guaranteed decrease of `f`
//! (second-order selection), then solves the two-variable subproblem in
//! closed form with clipping to the box. Index scans run in ascending order
//! so the iterate sequence is fully deterministic. The solver stops when the
//! KKT gap `m(a) - M(a)` falls below `tol`.

use super::kernel::KernelMatrix;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Final KKT gap `m - M`.
    pub residual: f64,
    /// Dual objective `e'a - 1/2 a'Qa` (to be maximized).
    pub dual_objective: f64,
    pub converged: bool,
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

pub(crate) fn solve(kernel: &mut KernelMatrix<'_>, y: &[f64], c: f64, tol: f64, max_iter: usize) -> SmoSolution {
    let n = y.len();
    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let mut iterations = 0;
    let mut residual;

    loop {
        // maximal violating i
        let mut i = usize::MAX;
        let mut m = f64::NEG_INFINITY;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) {
                let v = -y[t] * grad[t];
                if v > m {
                    m = v;
                    i = t;
                }
            }
        }
        let mut big_m = f64::INFINITY;
        for t in 0..n {
            if in_low(y[t], alpha[t], c) {
                big_m = big_m.min(-y[t] * grad[t]);
            }
        }
        residual = m - big_m;
        if i == usize::MAX || residual < tol || iterations >= max_iter {
            break;
        }

        let qi = kernel.row(i);
        let kii = kernel.diag(i);
        let mut j = usize::MAX;
        let mut best_gain = f64::INFINITY;
        for t in 0..n {
            if !in_low(y[t], alpha[t], c) {
                continue;
            }
            let b = m + y[t] * grad[t];
            if b > 0.0 {
                let a = kii + kernel.diag(t) - 2.0 * qi[t];
                let a = if a > 0.0 { a } else { TAU };
                let gain = -(b * b) / a;
                if gain < best_gain {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        if j == usize::MAX {
            break;
        }
        let qj = kernel.row(j);
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = {
            let a = kii + kernel.diag(j) - 2.0 * qi[j];
            if a > 0.0 { a } else { TAU }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        // Q_ti = y_t y_i K_ti
        for t in 0..n {
            grad[t] += y[t] * (y[i] * qi[t] * di + y[j] * qj[t] * dj);
        }
    }

    let bias = compute_bias(&alpha, &grad, y, c);
    let dual_objective = -0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();
    SmoSolution {
        alpha,
        bias,
        iterations,
        residual: residual.max(0.0),
        dual_objective,
        converged: residual < tol,
    }
}

/// Mean of `-y_i G_i` over free vectors; without free vectors, the midpoint
/// of the interval allowed by the bound vectors.
fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for ((&a, &g), &yi) in alpha.iter().zip(grad).zip(y) {
        let v = -yi * g;
        if a > 0.0 && a < c {
            free_sum += v;
            n_free += 1;
        } else if (yi > 0.0) == (a >= c) {
            // (y=+1, a=C) or (y=-1, a=0)
            upper = upper.min(v);
        } else {
            lower = lower.max(v);
        }
    }
    if n_free > 0 {
        free_sum / n_free as f64
    } else if upper.is_finite() && lower.is_finite() {
        0.5 * (upper + lower)
    } else if upper.is_finite() {
        upper
    } else if lower.is_finite() {
        lower
    } else {
        0.0
    }
}
