//! Bessel functions of the first kind, `J_n(x)`, by power series.
//!
//! The series `J_n(x) = Σ_k (−1)^k (x/2)^{2k+n} / (k!(k+n)!)` converges for
//! every `x`, but cancellation grows like `e^{|x|}`; at the modulation depths
//! used here (`|x| ≲ 3`) it is accurate to a few ulp.

/// Terms are summed until they fall below this fraction of the running sum.
const REL_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 200;

/// `J_n(x)` for integer order `n ≥ 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    for k in 1..MAX_TERMS {
        term *= -q / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() <= REL_EPS * sum.abs() {
            break;
        }
    }
    sum
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j(0, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j(1, x)
}
