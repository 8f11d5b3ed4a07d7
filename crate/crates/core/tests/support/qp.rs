//! Reference solver for the SVM dual, independent of the SMO code path.
//!
//! Log-barrier interior-point method on
//! `min 1/2 a'Qa - e'a  s.t.  y'a = 0, 0 <= a <= C`, with feasible-start
//! Newton steps on the equality-constrained barrier problem. The barrier
//! weight is pushed until the duality gap bound `2n/t` is below 1e-12.

use nalgebra::{DMatrix, DVector};

pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub objective: f64,
    /// Interval of optimal bias values; a single point when some multiplier
    /// is strictly inside the box.
    pub bias_lo: f64,
    pub bias_hi: f64,
}

impl QpSolution {
    pub fn bias_is_unique(&self) -> bool {
        self.bias_hi - self.bias_lo < 1e-9
    }
}

pub fn rbf_gram(x: &[Vec<f64>], gamma: f64) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        let d: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        (-gamma * d).exp()
    })
}

fn barrier_value(q: &DMatrix<f64>, a: &DVector<f64>, c: f64, t: f64) -> f64 {
    let f = 0.5 * a.dot(&(q * a)) - a.sum();
    let b: f64 = a.iter().map(|&v| -(v.ln()) - (c - v).ln()).sum();
    t * f + b
}

pub fn solve_dual(x: &[Vec<f64>], y: &[f64], c: f64, gamma: f64) -> QpSolution {
    let n = y.len();
    let k = rbf_gram(x, gamma);
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
    let yv = DVector::from_column_slice(y);

    let n_pos = y.iter().filter(|&&v| v > 0.0).count() as f64;
    let n_neg = n as f64 - n_pos;
    let s = 0.5 * c * n_pos.min(n_neg);
    let mut a = DVector::from_iterator(n, y.iter().map(|&v| if v > 0.0 { s / n_pos } else { s / n_neg }));
    let mut nu = 0.0;

    let mut t = 1.0;
    while 2.0 * n as f64 / t > 1e-13 {
        for _ in 0..100 {
            let grad = (&q * &a - DVector::from_element(n, 1.0)) * t
                + DVector::from_iterator(n, a.iter().map(|&v| -1.0 / v + 1.0 / (c - v)));
            let mut hess = &q * t;
            for i in 0..n {
                hess[(i, i)] += 1.0 / (a[i] * a[i]) + 1.0 / ((c - a[i]) * (c - a[i]));
            }
            let mut sys = DMatrix::zeros(n + 1, n + 1);
            sys.view_mut((0, 0), (n, n)).copy_from(&hess);
            for i in 0..n {
                sys[(i, n)] = y[i];
                sys[(n, i)] = y[i];
            }
            let mut rhs = DVector::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&(-&grad));
            let sol = sys.lu().solve(&rhs).expect("KKT system is nonsingular");
            let step = sol.rows(0, n).into_owned();
            nu = sol[n] / t;
            let decrement = -grad.dot(&step);
            if decrement / 2.0 < 1e-14 {
                break;
            }
            let mut h = 1.0;
            while (0..n).any(|i| {
                let v = a[i] + h * step[i];
                v <= 0.0 || v >= c
            }) {
                h *= 0.5;
            }
            let f0 = barrier_value(&q, &a, c, t);
            while barrier_value(&q, &(&a + &step * h), c, t) > f0 - 0.25 * h * decrement && h > 1e-20 {
                h *= 0.5;
            }
            a += &step * h;
            let drift = yv.dot(&a);
            // keep y'a = 0 exact against rounding
            a -= &yv * (drift / n as f64);
        }
        t *= 8.0;
    }
    let _ = nu;

    let alpha: Vec<f64> = a.iter().copied().collect();
    let objective = a.sum() - 0.5 * a.dot(&(&q * &a));
    let grad = &q * &a - DVector::from_element(n, 1.0);
    // classify by distance to the bounds; the barrier keeps everything strictly inside
    let tol = 1e-6 * c.max(1.0);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut free = Vec::new();
    for i in 0..n {
        let v = -y[i] * grad[i];
        let at_zero = alpha[i] < tol;
        let at_c = alpha[i] > c - tol;
        if !at_zero && !at_c {
            free.push(v);
        } else if (y[i] > 0.0) == at_c {
            hi = hi.min(v);
        } else {
            lo = lo.max(v);
        }
    }
    let (bias_lo, bias_hi) = if free.is_empty() {
        (lo, hi)
    } else {
        let b = free.iter().sum::<f64>() / free.len() as f64;
        (b, b)
    };
    QpSolution { alpha, objective, bias_lo, bias_hi }
}

/// `sum_i a_i y_i k(x_i, p)`, without the bias.
pub fn expansion(x: &[Vec<f64>], y: &[f64], sol: &QpSolution, gamma: f64, point: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(&sol.alpha)
        .map(|((xi, yi), ai)| {
            let d: f64 = xi.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
            ai * yi * (-gamma * d).exp()
        })
        .sum()
}
