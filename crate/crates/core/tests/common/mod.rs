//! Shared test-side oracle: time evolution by scaled-and-squared Taylor
//! matrix exponential over explicit real/imaginary parts. Independent of
//! the library's spectral propagation.

use faer::Mat;
use spinshell::SymMatrix;

pub struct ComplexMat {
    pub re: Mat<f64>,
    pub im: Mat<f64>,
}

fn cmul(a: &ComplexMat, b: &ComplexMat) -> ComplexMat {
    ComplexMat {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
}

/// exp(-i H t) via Taylor series on a norm-scaled argument, then repeated
/// squaring.
pub fn expm_minus_i_ht(h: &SymMatrix, t: f64) -> ComplexMat {
    let n = h.order();
    let norm = h.max_abs() * n as f64 * t.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = t / f64::powi(2.0, squarings as i32);

    // Taylor base: sum_k (-i H scale)^k / k!.
    let mut acc = ComplexMat {
        re: Mat::identity(n, n),
        im: Mat::zeros(n, n),
    };
    let mut term = ComplexMat {
        re: Mat::identity(n, n),
        im: Mat::zeros(n, n),
    };
    for k in 1..=30usize {
        // term <- term * (-i H scale) / k
        let f = scale / k as f64;
        let re = Mat::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for m in 0..n {
                s += term.im[(i, m)] * h.get(m, j);
            }
            s * f
        });
        let im = Mat::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for m in 0..n {
                s += term.re[(i, m)] * h.get(m, j);
            }
            -s * f
        });
        term = ComplexMat { re, im };
        acc = ComplexMat { re: acc.re + &term.re, im: acc.im + &term.im };
    }
    for _ in 0..squarings {
        acc = cmul(&acc, &acc);
    }
    acc
}

/// Occupations |<n| exp(-i H t) |k>|^2 for every n.
pub fn expm_occupations(h: &SymMatrix, k: usize, t: f64) -> Vec<f64> {
    let u = expm_minus_i_ht(h, t);
    (0..h.order())
        .map(|n| u.re[(n, k)] * u.re[(n, k)] + u.im[(n, k)] * u.im[(n, k)])
        .collect()
}
