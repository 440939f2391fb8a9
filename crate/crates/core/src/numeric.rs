//! Small numerical kernels shared across the analysis modules: log-gamma,
//! 1-d and simplex minimizers, Chebyshev least squares, and entropy sums.

use faer::Mat;

/// Natural log of the gamma function, Lanczos approximation (g = 7, 9
/// coefficients), |error| < 1e-13 on the positive axis.
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection keeps the approximation inside its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = G[0];
    for (i, &c) in G.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Golden-section minimizer on [a, b] followed by one parabolic refinement
/// of the final bracket. `f` must be unimodal on the interval for the
/// global guarantee; otherwise a local minimum is returned.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, iters: usize) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (x1, x2, x3) = (a, 0.5 * (a + b), b);
    let (f1, f2, f3) = (f(x1), f(x2), f(x3));
    let denom = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1);
    if denom.abs() > 1e-300 {
        let num = (x2 - x1).powi(2) * (f2 - f3) - (x2 - x3).powi(2) * (f2 - f1);
        let cand = x2 - 0.5 * num / denom;
        if cand.is_finite() && cand >= x1 && cand <= x3 && f(cand) <= f2 {
            return cand;
        }
    }
    x2
}

/// Nelder-Mead simplex minimizer. Plain reflection/expansion/contraction/
/// shrink with termination on simplex diameter; good enough for the 2-d
/// envelope fits it serves.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: &[f64],
    max_iter: usize,
) -> Vec<f64> {
    let dim = x0.len();
    assert_eq!(step.len(), dim);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for k in 0..dim {
        let mut v = x0.to_vec();
        v[k] += step[k];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let diameter: f64 = (0..dim)
            .map(|k| {
                simplex
                    .iter()
                    .map(|v| (v[k] - simplex[best][k]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < 1e-12 {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (i, v) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for k in 0..dim {
                centroid[k] += v[k] / dim as f64;
            }
        }

        let point = |t: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + t * (centroid[k] - simplex[worst][k]))
                .collect()
        };

        let reflected = point(1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = point(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = point(-0.5);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for i in 0..=dim {
                    if i == best {
                        continue;
                    }
                    for k in 0..dim {
                        simplex[i][k] = 0.5 * (simplex[i][k] + simplex[best][k]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    simplex.swap_remove(best)
}

/// Least-squares Chebyshev coefficients of degree `degree` over `window`,
/// solved by dense QR.
pub fn polyfit_chebyshev(x: &[f64], y: &[f64], degree: usize, window: (f64, f64)) -> Vec<f64> {
    use faer::prelude::SpSolverLstsq;
    assert_eq!(x.len(), y.len());
    assert!(x.len() > degree, "need more points than coefficients");
    let m = x.len();
    let n = degree + 1;
    let mut a = Mat::<f64>::zeros(m, n);
    for (r, &xv) in x.iter().enumerate() {
        let u = to_unit(xv, window);
        let mut t_prev = 1.0;
        let mut t_cur = u;
        a[(r, 0)] = 1.0;
        if n > 1 {
            a[(r, 1)] = u;
        }
        for k in 2..n {
            let t_next = 2.0 * u * t_cur - t_prev;
            a[(r, k)] = t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    let rhs = Mat::<f64>::from_fn(m, 1, |r, _| y[r]);
    let sol = a.qr().solve_lstsq(&rhs);
    (0..n).map(|k| sol[(k, 0)]).collect()
}

/// Clenshaw evaluation of a Chebyshev series over `window`.
pub fn cheb_eval(coeffs: &[f64], window: (f64, f64), x: f64) -> f64 {
    let u = to_unit(x, window);
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + u * b1 - b2
}

fn to_unit(x: f64, (lo, hi): (f64, f64)) -> f64 {
    (2.0 * x - lo - hi) / (hi - lo)
}

/// Ordinary least squares line fit; returns (slope, intercept).
pub fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Shannon entropy -sum w ln w in nats, with 0 ln 0 = 0.
pub fn shannon_entropy(w: &[f64]) -> f64 {
    -w.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
