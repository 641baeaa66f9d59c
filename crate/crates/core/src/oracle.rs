//! Direct numerical integration of `psi'' + (E - U(z)) psi = 0`, independent
//! of the special-function basis.
//!
//! Smooth arcs are integrated with an adaptive Dormand-Prince 5(4) scheme,
//! split at every point where the potential changes formula. Flat segments
//! are propagated in closed form.

use crate::error::{BlochError, Result};
use crate::potential::{PotentialKind, PotentialSpec};
use crate::real::Real;

/// Default local error tolerance per step.
pub const DEFAULT_TOL: f64 = 1e-13;

const MAX_STEPS: usize = 2_000_000;

/// Transfer matrix over one period: maps `(psi, psi')` at the left end of the
/// canonical cell to its right end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy<T> {
    pub energy: T,
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T: Real> Monodromy<T> {
    pub fn determinant(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `(m11 + m22) / 2`, which equals `cos(2 pi P)` inside a band.
    pub fn half_trace(&self) -> T {
        (self.m11 + self.m22) * T::lit(0.5)
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            energy: self.energy,
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }

    fn identity(energy: T) -> Self {
        Self {
            energy,
            m11: T::one(),
            m12: T::zero(),
            m21: T::zero(),
            m22: T::one(),
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State<T> = [T; 4];

/// `(psi_a, psi_a', psi_b, psi_b')` for two solutions sharing one `q(z)`.
fn rhs<T: Real, Q: Fn(T) -> T>(q: &Q, z: T, y: &State<T>) -> State<T> {
    let k = q(z);
    [y[1], -k * y[0], y[3], -k * y[2]]
}

/// Integrates across one smooth arc `[a, b]` (either direction).
fn dopri5<T: Real, Q: Fn(T) -> T>(q: &Q, a: T, b: T, mut y: State<T>, tol: T) -> Result<State<T>> {
    let span = b - a;
    if span == T::zero() {
        return Ok(y);
    }
    let dir = span.signum();
    let mut z = a;
    let mut h = span.abs().min(T::lit(0.05)) * dir;
    let h_min = span.abs() * T::lit(1e-14);
    let lit = |x: f64| T::lit(x);
    for _ in 0..MAX_STEPS {
        if (b - z) * dir <= T::zero() {
            return Ok(y);
        }
        if (z + h - b) * dir > T::zero() {
            h = b - z;
        }
        let mut k: [State<T>; 7] = [[T::zero(); 4]; 7];
        k[0] = rhs(q, z, &y);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a_sj = lit(A[s][j]);
                if a_sj != T::zero() {
                    for i in 0..4 {
                        ys[i] = ys[i] + h * a_sj * kj[i];
                    }
                }
            }
            k[s] = rhs(q, z + h * lit(C[s]), &ys);
        }
        let mut y_new = y;
        let mut err = T::zero();
        for i in 0..4 {
            let mut hi = T::zero();
            let mut lo = T::zero();
            for s in 0..7 {
                hi = hi + lit(B5[s]) * k[s][i];
                lo = lo + lit(B4[s]) * k[s][i];
            }
            y_new[i] = y[i] + h * hi;
            let scale = tol * (T::one() + y[i].abs().max(y_new[i].abs()));
            err = err.max((h * (hi - lo)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(BlochError::NonFinite(format!("integrator at z={}", z.as_f64())));
        }
        if err <= T::one() {
            z = z + h;
            y = y_new;
        }
        let factor = if err == T::zero() {
            lit(5.0)
        } else {
            (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.2)).min(lit(5.0))
        };
        h = h * factor;
        if h.abs() < h_min && (b - z).abs() > h_min {
            return Err(BlochError::StepFailure(z.as_f64()));
        }
    }
    Err(BlochError::StepFailure(z.as_f64()))
}

/// Fundamental matrix of `psi'' + q(z) psi = 0` from `a` to `b`, restarting the
/// integrator at each interior point of `breaks`.
pub fn fundamental_with<T, Q>(q: Q, a: T, b: T, breaks: &[T], tol: T) -> Result<Monodromy<T>>
where
    T: Real,
    Q: Fn(T) -> T,
{
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut pts: Vec<T> = breaks.iter().copied().filter(|&p| p > lo && p < hi).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if a > b {
        pts.reverse();
    }
    let mut y: State<T> = [T::one(), T::zero(), T::zero(), T::one()];
    let mut z = a;
    for p in pts.into_iter().chain(std::iter::once(b)) {
        y = dopri5(&q, z, p, y, tol)?;
        z = p;
    }
    Ok(Monodromy {
        energy: T::nan(),
        m11: y[0],
        m12: y[2],
        m21: y[1],
        m22: y[3],
    })
}

/// Propagates `(psi, psi')` from `a` to `b` under a supplied `q(z) = E - U(z)`.
pub fn integrate_with<T, Q>(q: Q, a: T, b: T, y0: [T; 2], breaks: &[T], tol: T) -> Result<[T; 2]>
where
    T: Real,
    Q: Fn(T) -> T,
{
    let m = fundamental_with(q, a, b, breaks, tol)?;
    Ok([m.m11 * y0[0] + m.m12 * y0[1], m.m21 * y0[0] + m.m22 * y0[1]])
}

/// Points in `[a, b]` where the potential changes formula.
fn junctions<T: Real>(spec: &PotentialSpec<T>, a: T, b: T) -> Vec<T> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let two_pi = T::lit(2.0) * T::PI();
    let offsets = [spec.barrier_half_width(), -spec.barrier_half_width()];
    let first = (lo / two_pi).floor() - T::one();
    let last = (hi / two_pi).ceil() + T::one();
    let mut out = Vec::new();
    let mut m = first;
    while m <= last {
        for off in offsets {
            let p = m * two_pi + off;
            if p > lo && p < hi {
                out.push(p);
            }
        }
        m = m + T::one();
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

fn flat_transfer<T: Real>(k2: T, len: T) -> Monodromy<T> {
    let (c, s_over_k, minus_k_s) = if k2 > T::zero() {
        let k = k2.sqrt();
        let (s, c) = (k * len).sin_cos();
        (c, s / k, -k * s)
    } else if k2 < T::zero() {
        let kappa = (-k2).sqrt();
        let (s, c) = ((kappa * len).sinh(), (kappa * len).cosh());
        (c, s / kappa, kappa * s)
    } else {
        (T::one(), len, T::zero())
    };
    Monodromy {
        energy: T::nan(),
        m11: c,
        m12: s_over_k,
        m21: minus_k_s,
        m22: c,
    }
}

/// Fundamental matrix of the true potential from `a` to `b` at energy `e`.
pub fn fundamental_of<T: Real>(spec: &PotentialSpec<T>, e: T, a: T, b: T, tol: T) -> Result<Monodromy<T>> {
    let pts = junctions(spec, a, b);
    match spec.kind {
        PotentialKind::Biparabolic => {
            let m = fundamental_with(|z| e - spec.eval(z), a, b, &pts, tol)?;
            Ok(Monodromy { energy: e, ..m })
        }
        PotentialKind::KronigPenney => {
            let mut m = Monodromy::identity(e);
            let mut z = a;
            for p in pts.into_iter().chain(std::iter::once(b)) {
                let mid = (z + p) * T::lit(0.5);
                let seg = flat_transfer(e - spec.eval(mid), p - z);
                m = seg.mul(&m);
                z = p;
            }
            Ok(m)
        }
    }
}

/// Propagates `(psi, psi')` from `z_from` to `z_to` through the true
/// potential with local error per step at most `tol`, in `[1e-13, 1e-6]`.
pub fn integrate<T: Real>(spec: &PotentialSpec<T>, e: T, z_from: T, y: [T; 2], z_to: T, tol: T) -> Result<[T; 2]> {
    if !(tol >= T::tol(1e-13) && tol <= T::lit(1e-6)) {
        return Err(BlochError::Domain(format!(
            "integrator tolerance {} outside [1e-13, 1e-6]",
            tol.as_f64()
        )));
    }
    let m = fundamental_of(spec, e, z_from, z_to, tol)?;
    let y0 = y;
    Ok([m.m11 * y0[0] + m.m12 * y0[1], m.m21 * y0[0] + m.m22 * y0[1]])
}

/// Monodromy over the canonical cell of the true potential.
pub fn monodromy_of<T: Real>(spec: &PotentialSpec<T>, e: T) -> Result<Monodromy<T>> {
    let (left, _, right) = spec.cell_bounds();
    let m = fundamental_of(spec, e, left, right, T::tol(DEFAULT_TOL))?;
    let scale = T::one().max((m.m11 * m.m22).abs() + (m.m12 * m.m21).abs());
    let gap = (m.determinant() - T::one()).abs() / scale;
    if gap > T::tol(1e-8) {
        return Err(BlochError::Inconsistency {
            energy: e.as_f64(),
            gap: gap.as_f64(),
        });
    }
    Ok(m)
}

/// Closed-form half-trace of the Kronig-Penney monodromy with well width
/// `2 pi (1 - f)` and barrier width `2 pi f`.
pub fn kp_trace_analytic<T: Real>(e: T, v: T, f: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let ww = two_pi * (T::one() - f);
    let wb = two_pi * f;
    let half = T::lit(0.5);
    // sin(q w) / q, continuous through q = 0
    let sinc = |q: T, w: T| {
        if (q * w).abs() < T::lit(1e-8) {
            w
        } else {
            (q * w).sin() / q
        }
    };
    let sinhc = |q: T, w: T| {
        if (q * w).abs() < T::lit(1e-8) {
            w
        } else {
            (q * w).sinh() / q
        }
    };
    if e <= T::zero() {
        // no well propagation phase; handled by the general flat formula
        let kw = (-e).sqrt();
        let kb = (v - e).sqrt();
        let a = (kw * ww).cosh() * (kb * wb).cosh();
        let b = half * (kw * kw + kb * kb) * sinhc(kw, ww) * sinhc(kb, wb);
        return a + b;
    }
    let k = e.sqrt();
    if e >= v {
        let q = (e - v).sqrt();
        (k * ww).cos() * (q * wb).cos() - half * (k * k + q * q) * sinc(k, ww) * sinc(q, wb)
    } else {
        let kappa = (v - e).sqrt();
        (k * ww).cos() * (kappa * wb).cosh() + half * (kappa * kappa - k * k) * sinc(k, ww) * sinhc(kappa, wb)
    }
}
