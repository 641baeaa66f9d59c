//! Adaptive Gauss-Legendre quadrature.

use crate::error::{BlochError, Result};
use crate::real::Real;

/// Refinement levels before an interval is declared hopeless.
pub const MAX_DEPTH: usize = 20;

/// Nodes and weights of an n-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize(n).unwrap();
        let two = T::lit(2.0);
        for i in 0..n.div_ceil(2) {
            let fi = T::from_usize(i).unwrap();
            let mut x = (T::PI() * (fi + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (mut p0, mut p1) = (T::one(), x);
                for k in 2..=n {
                    let kf = T::from_usize(k).unwrap();
                    let p2 = ((two * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { T::one() } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - T::one());
                let dx = pn / dp;
                x = x - dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let w = two / ((T::one() - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn apply<F>(&self, f: &mut F, a: T, b: T) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + *w * f(mid + half * *x)?;
        }
        Ok(s * half)
    }
}

/// Integral and the accumulated estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` by recursive
/// bisection, comparing a 10-point rule on each interval with the same rule on
/// its two halves.
pub fn integrate_adaptive<T, F>(mut f: F, a: T, b: T, abs_tol: T) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let rule = GaussLegendre::new(10);
    let whole = rule.apply(&mut f, a, b)?;
    recurse(&rule, &mut f, a, b, whole, abs_tol, 0)
}

fn recurse<T, F>(
    rule: &GaussLegendre<T>,
    f: &mut F,
    a: T,
    b: T,
    whole: T,
    tol: T,
    depth: usize,
) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mid = (a + b) * T::lit(0.5);
    let left = rule.apply(f, a, mid)?;
    let right = rule.apply(f, mid, b)?;
    let refined = left + right;
    let diff = (refined - whole).abs();
    if diff <= tol {
        return Ok(Quadrature {
            value: refined,
            error: diff,
        });
    }
    if depth >= MAX_DEPTH {
        return Err(BlochError::Quadrature {
            a: a.as_f64(),
            b: b.as_f64(),
            tol: tol.as_f64(),
        });
    }
    let half_tol = tol * T::lit(0.5);
    let l = recurse(rule, f, a, mid, left, half_tol, depth + 1)?;
    let r = recurse(rule, f, mid, b, right, half_tol, depth + 1)?;
    Ok(Quadrature {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

/// Composite trapezoid rule on samples at uniform spacing `h`.
pub fn trapezoid<T: Real>(samples: &[T], h: T) -> T {
    match samples.len() {
        0 | 1 => T::zero(),
        n => {
            let inner: T = samples[1..n - 1].iter().copied().sum();
            h * (inner + (samples[0] + samples[n - 1]) * T::lit(0.5))
        }
    }
}
