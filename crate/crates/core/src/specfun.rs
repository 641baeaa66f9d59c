//! Special-function kernel: Kummer's confluent hypergeometric function for
//! complex parameters, fractional-order Bessel functions of the first kind and
//! the gamma function.
//!
//! Everything here is evaluated by ascending series. The solver only ever asks
//! for arguments with modulus below about five, where the series keep close to
//! full double precision; [`SeriesReport::cancellation_digits`] exposes how
//! many digits were lost so callers can notice when that stops being true.

use num_complex::Complex;

use crate::error::{BlochError, Result};
use crate::real::Real;

/// Hard cap on the number of series terms before giving up.
pub const TERM_CAP: usize = 10_000;

/// Relative size of the last included term at which a series is declared
/// converged.
const TERM_REL_TOL: f64 = 1e-16;

/// Cancellation (in decimal digits) above which Kummer's transformation is
/// tried as an alternative evaluation.
const CANCELLATION_SWITCH: f64 = 6.0;

/// Value of a summed series together with numerical-health telemetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesReport<T> {
    pub value: Complex<T>,
    pub terms_used: usize,
    pub max_term_magnitude: T,
    /// `log10(max_term / |value|)`, clamped at zero.
    pub cancellation_digits: T,
}

fn cancellation<T: Real>(max_term: T, value: T) -> T {
    let v = value.max(T::min_positive_value());
    (max_term / v).log10().max(T::zero())
}

fn is_nonpositive_integer<T: Real>(b: Complex<T>) -> bool {
    let tol = T::lit(1e-12);
    if b.im.abs() > tol {
        return false;
    }
    let r = b.re.round();
    r <= T::zero() && (b.re - r).abs() <= tol
}

fn check_finite<T: Real>(v: Complex<T>, what: &str) -> Result<Complex<T>> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(BlochError::NonFinite(what.to_string()))
    }
}

/// Plain ascending series for `M(a, b; x)` with no transformation.
pub fn kummer_series<T: Real>(a: Complex<T>, b: Complex<T>, x: Complex<T>) -> Result<SeriesReport<T>> {
    if is_nonpositive_integer(b) {
        return Err(BlochError::Pole(format!(
            "Kummer M with b = {} + {}i",
            b.re.as_f64(),
            b.im.as_f64()
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut sum = one;
    let mut term = one;
    let mut max_term = T::one();
    let xabs = x.norm();
    let rel = T::lit(TERM_REL_TOL);
    let mut k = 0usize;
    loop {
        let kk = T::from_usize(k).unwrap();
        term = term * (a + kk) / (b + kk) * x / (kk + T::one());
        k += 1;
        sum = sum + term;
        let tn = term.norm();
        if tn > max_term {
            max_term = tn;
        }
        if tn == T::zero() || (tn <= rel * sum.norm() && T::from_usize(k).unwrap() > xabs) {
            break;
        }
        if k >= TERM_CAP {
            return Err(BlochError::Convergence {
                what: "Kummer M series".into(),
                terms: k,
            });
        }
    }
    let value = check_finite(sum, "Kummer M series")?;
    Ok(SeriesReport {
        value,
        terms_used: k + 1,
        max_term_magnitude: max_term,
        cancellation_digits: cancellation(max_term, value.norm()),
    })
}

/// Kummer's confluent hypergeometric function `M(a, b; x)` (a.k.a. `1F1`).
///
/// When the direct series loses more than six digits to cancellation the
/// function is re-evaluated as `e^x M(b - a, b; -x)` and whichever evaluation
/// lost fewer digits is returned.
pub fn kummer_m<T: Real>(a: Complex<T>, b: Complex<T>, x: Complex<T>) -> Result<SeriesReport<T>> {
    let direct = kummer_series(a, b, x)?;
    if direct.cancellation_digits <= T::lit(CANCELLATION_SWITCH) {
        return Ok(direct);
    }
    let inner = kummer_series(b - a, b, -x)?;
    let scale = x.exp();
    let value = check_finite(scale * inner.value, "Kummer transform")?;
    let max_term = inner.max_term_magnitude * scale.norm();
    let transformed = SeriesReport {
        value,
        terms_used: inner.terms_used,
        max_term_magnitude: max_term,
        cancellation_digits: cancellation(max_term, value.norm()),
    };
    if transformed.cancellation_digits < direct.cancellation_digits {
        Ok(transformed)
    } else {
        Ok(direct)
    }
}

/// `M(a, b; x)` and its derivative with respect to `x`.
///
/// The derivative is the term-wise differentiated series,
/// `dM/dx = (a/b) M(a+1, b+1; x)`.
pub fn kummer_m_with_derivative<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    x: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let m = kummer_m(a, b, x)?.value;
    let one = T::one();
    let dm = if a.norm() == T::zero() {
        Complex::new(T::zero(), T::zero())
    } else {
        a / b * kummer_m(a + one, b + one, x)?.value
    };
    Ok((m, dm))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, nine coefficients),
/// with the reflection formula below one half.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(BlochError::Domain(format!("gamma of non-finite {}", x.as_f64())));
    }
    if x <= T::zero() && x == x.round() {
        return Err(BlochError::Pole(format!("gamma at {}", x.as_f64())));
    }
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        let s = (pi * x).sin();
        return Ok(pi / (s * gamma_fn(T::one() - x)?));
    }
    let xm = x - T::one();
    let mut acc = T::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (xm + T::from_usize(i).unwrap());
    }
    let t = xm + T::lit(LANCZOS_G) + half;
    let sqrt_two_pi = (T::lit(2.0) * T::PI()).sqrt();
    Ok(sqrt_two_pi * t.powf(xm + half) * (-t).exp() * acc)
}

/// Bessel function of the first kind `J_nu(x)` from its ascending series.
///
/// Orders are restricted to `[-1, 2]`, the only range the solver needs.
pub fn bessel_j<T: Real>(nu: T, x: T) -> Result<T> {
    if nu < -T::one() || nu > T::lit(2.0) {
        return Err(BlochError::Domain(format!(
            "Bessel order {} outside [-1, 2]",
            nu.as_f64()
        )));
    }
    if x < T::zero() || !x.is_finite() {
        return Err(BlochError::Domain(format!("Bessel argument {}", x.as_f64())));
    }
    if x == T::zero() {
        return if nu > T::zero() {
            Ok(T::zero())
        } else if nu == T::zero() {
            Ok(T::one())
        } else {
            Err(BlochError::Divergent(format!("J_{} at x = 0", nu.as_f64())))
        };
    }
    if nu == -T::one() {
        return Ok(-bessel_j(T::one(), x)?);
    }
    let half_x = x * T::lit(0.5);
    let q = -half_x * half_x;
    let mut term = half_x.powf(nu) / gamma_fn(nu + T::one())?;
    let mut sum = term;
    let mut max_term = term.abs();
    let rel = T::lit(TERM_REL_TOL);
    let mut k = 0usize;
    loop {
        let kk = T::from_usize(k).unwrap();
        term = term * q / ((kk + T::one()) * (nu + kk + T::one()));
        k += 1;
        sum = sum + term;
        let ta = term.abs();
        max_term = max_term.max(ta);
        if ta == T::zero() || (ta <= rel * sum.abs() && T::from_usize(k).unwrap() > half_x) {
            break;
        }
        if k >= TERM_CAP {
            return Err(BlochError::Convergence {
                what: format!("Bessel J_{} series", nu.as_f64()),
                terms: k,
            });
        }
    }
    if !sum.is_finite() {
        return Err(BlochError::NonFinite("Bessel series".into()));
    }
    Ok(sum)
}

/// Residual of the Bessel/Kummer representation
/// `J_nu(x) = (x/2)^nu / Gamma(nu+1) * e^{-ix} M(1/2 + nu, 1 + 2nu; 2ix)`.
///
/// The right-hand side is computed in complex arithmetic; its imaginary part
/// must vanish, and a residue above `1e-12` is reported as an error.
pub fn verify_bessel_hypergeometric_identity<T: Real>(nu: T, x: T) -> Result<T> {
    if x <= T::zero() {
        return Err(BlochError::Domain(format!(
            "identity check needs x > 0, got {}",
            x.as_f64()
        )));
    }
    let lhs = bessel_j(nu, x)?;
    let half = T::lit(0.5);
    let a = Complex::new(half + nu, T::zero());
    let b = Complex::new(T::one() + T::lit(2.0) * nu, T::zero());
    let arg = Complex::new(T::zero(), T::lit(2.0) * x);
    let m = kummer_m(a, b, arg)?.value;
    let phase = Complex::new(T::zero(), -x).exp();
    let pref = (x * half).powf(nu) / gamma_fn(nu + T::one())?;
    let rhs = phase * m * pref;
    if rhs.im.abs() > T::tol(1e-12) {
        return Err(BlochError::Reality {
            residue: rhs.im.abs().as_f64(),
            z2: x.as_f64(),
        });
    }
    Ok((lhs - rhs.re).abs())
}
