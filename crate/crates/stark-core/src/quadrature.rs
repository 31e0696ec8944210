//! Adaptive one-dimensional quadrature.
//!
//! Gauss-Kronrod 7-15 panels with recursive bisection, plus a real-line
//! integrator that doubles the truncation window until the tail is
//! certified (analytically from a decay envelope, or empirically from
//! shell decay).

use crate::error::{CoreError, Result};

// G7-K15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7-15 panel: returns (K15 value, |K15 - G7| estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h.abs())
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> std::result::Result<f64, f64> {
        let (val, err) = gk15(f, a, b);
        if err <= tol || (b - a).abs() < 1e-14 {
            return Ok(val);
        }
        if depth >= 48 {
            return Err(err);
        }
        let c = 0.5 * (a + b);
        let left = recurse(f, a, c, 0.5 * tol, depth + 1)?;
        let right = recurse(f, c, b, 0.5 * tol, depth + 1)?;
        Ok(left + right)
    }
    recurse(f, a, b, abs_tol, 0).map_err(|achieved| CoreError::Tolerance {
        requested: abs_tol,
        achieved,
    })
}

/// Tail handling for integrals over the whole real line.
pub enum Tail<'a> {
    /// `bound(T)` is an upper bound on the remaining `|integral|` beyond
    /// `[-T, T]`; the window is doubled until it certifies the tolerance.
    Bound(&'a dyn Fn(f64) -> f64),
    /// No analytic bound: stop once the last doubling shell contributes
    /// less than the tolerance and the shells are shrinking; flag
    /// divergence when shells fail to shrink.
    Empirical,
}

/// Integral of `f` over the real line by window doubling.
pub fn integrate_line<F: Fn(f64) -> f64>(
    f: &F,
    abs_tol: f64,
    t0: f64,
    tail: Tail<'_>,
) -> Result<f64> {
    let mut t = t0.max(1.0);
    let mut acc = integrate(f, -t, t, 0.25 * abs_tol)?;
    let mut prev_shell = f64::INFINITY;
    let mut non_decreasing = 0u32;
    for _ in 0..40 {
        match tail {
            Tail::Bound(bound) => {
                let b = bound(t);
                if b.abs() <= abs_tol.max(1e-12 * acc.abs()) {
                    return Ok(acc);
                }
            }
            Tail::Empirical => {}
        }
        let t2 = 2.0 * t;
        let shell = integrate(f, t, t2, 0.25 * abs_tol)?
            + integrate(f, -t2, -t, 0.25 * abs_tol)?;
        acc += shell;
        let shell_mag = shell.abs();
        if let Tail::Empirical = tail {
            if shell_mag >= prev_shell && shell_mag > abs_tol {
                non_decreasing += 1;
                if non_decreasing >= 3 {
                    return Err(CoreError::Divergence(format!(
                        "shell contributions not decaying (|shell| = {shell_mag:.3e} at T = {t2:.3e})"
                    )));
                }
            } else {
                non_decreasing = 0;
            }
            if shell_mag <= abs_tol.max(1e-12 * acc.abs()) && shell_mag < prev_shell {
                return Ok(acc);
            }
        }
        prev_shell = shell_mag;
        t = t2;
    }
    Err(CoreError::Horizon(format!(
        "window doubling did not certify tolerance {abs_tol:.1e} by T = {t:.3e}"
    )))
}

// 8-point Gauss-Legendre abscissae and weights on [-1, 1].
const XGL8: [f64; 4] = [
    0.183434642495649804939476142360184,
    0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,
    0.960289856497536231683560868569473,
];
const WGL8: [f64; 4] = [
    0.362683783378361982965150449277196,
    0.313706645877887287337962201986601,
    0.222381034453374470544355994426241,
    0.101228536290376259152531354309962,
];

/// Fixed 8-point Gauss-Legendre panel on `[a, b]`.
pub fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for j in 0..4 {
        let x = h * XGL8[j];
        s += WGL8[j] * (f(c - x) + f(c + x));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk15_is_exact_on_low_degree_polynomials() {
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        let (val, _) = gk15(&f, -1.0, 2.0);
        // antiderivative: x^3 - x^2 + x
        assert_relative_eq!(val, (8.0 - 4.0 + 2.0) - (-1.0 - 1.0 - 1.0), epsilon = 1e-13);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let f = |x: f64| (-(x * x) * 400.0).exp();
        let val = integrate(&f, -10.0, 10.0, 1e-12).unwrap();
        assert_relative_eq!(
            val,
            (std::f64::consts::PI / 400.0).sqrt(),
            epsilon = 1e-11
        );
    }

    #[test]
    fn line_integral_of_gaussian() {
        let f = |x: f64| (-(x * x)).exp();
        let val = integrate_line(&f, 1e-10, 1.0, Tail::Empirical).unwrap();
        assert_relative_eq!(val, std::f64::consts::PI.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn line_integral_with_certified_tail() {
        // f = <t>^-3, tail beyond T bounded by T^-2 / 2
        let f = |t: f64| (1.0 + t * t).powf(-1.5);
        let bound = |t: f64| 1.0 / (t * t);
        let val = integrate_line(&f, 1e-10, 1.0, Tail::Bound(&bound)).unwrap();
        assert_relative_eq!(val, 2.0, epsilon = 1e-9); // int <t>^-3 dt = 2
    }

    #[test]
    fn divergent_integrand_is_detected() {
        let f = |t: f64| (1.0 + t * t).powf(-0.2);
        let res = integrate_line(&f, 1e-8, 1.0, Tail::Empirical);
        assert!(matches!(res, Err(CoreError::Divergence(_))));
    }

    #[test]
    fn gl8_matches_adaptive_on_smooth_function() {
        let f = |x: f64| (x * 0.7).sin() + 0.2 * x;
        let a = gl8(&f, 0.0, 1.5);
        let b = integrate(&f, 0.0, 1.5, 1e-13).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }
}
