use std::sync::OnceLock;

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::StatsError;

const GL_POINTS: usize = 16;
const INNER_LIMIT: f64 = 8.5;
const INNER_PANELS: usize = 17;
const OUTER_PANELS: usize = 24;
/// Half-width of the outer window in standard deviations of `s`.
const OUTER_SPREAD: f64 = 9.0;

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre() -> &'static [(f64, f64); GL_POINTS] {
    static RULE: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = [(0.0, 0.0); GL_POINTS];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            rule[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with `panels` panels.
fn integrate(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let rule = gauss_legendre();
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    total * 0.5 * h
}

fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn big_phi(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// P(range of k standard normals <= w).
fn range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let v = k as f64
        * integrate(-INNER_LIMIT, INNER_LIMIT, INNER_PANELS, |z| phi(z) * (big_phi(z) - big_phi(z - w)).powi(km1));
    v.clamp(0.0, 1.0)
}

/// Studentized-range CDF `P(Q <= q)` for `k` means and `df` degrees of freedom.
pub fn ptukey(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if !df.is_finite() {
        return range_cdf(q, k);
    }
    // S = sqrt(chi2_df / df); ln f_S(s).
    let half = df / 2.0;
    let norm = std::f64::consts::LN_2 + half * half.ln() - ln_gamma(half);
    let density = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (norm + (df - 1.0) * s.ln() - df * s * s / 2.0).exp()
    };
    let sd = (1.0 / (2.0 * df)).sqrt();
    let lo = (1.0 - OUTER_SPREAD * sd).max(0.0);
    let hi = 1.0 + OUTER_SPREAD * sd;
    // Resolve the region where W(q s) is still rising separately.
    let knee = (2.0 * INNER_LIMIT / q).clamp(lo, hi);
    let f = |s: f64| density(s) * range_cdf(q * s, k);
    let v = integrate(lo, knee, OUTER_PANELS, f) + integrate(knee, hi, OUTER_PANELS, f);
    v.clamp(0.0, 1.0)
}

/// Upper `alpha` quantile of the studentized range.
pub fn studentized_range_quantile(alpha: f64, k: usize, df: f64) -> Result<f64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidArgument(format!("alpha = {alpha}")));
    }
    if k < 2 || !(df >= 1.0) {
        return Err(StatsError::InvalidArgument(format!("k = {k}, df = {df}")));
    }
    let target = 1.0 - alpha;
    let g = |q: f64| ptukey(q, k, df) - target;

    let (mut a, mut b) = (0.0, 1.0);
    let (mut fa, mut fb) = (-target, g(b));
    while fb < 0.0 {
        a = b;
        fa = fb;
        b *= 2.0;
        if b > 1e6 {
            return Err(StatsError::ConvergenceFailure);
        }
        fb = g(b);
    }
    // Illinois regula falsi.
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c);
        if fc.abs() < 1e-13 || (b - a).abs() < 1e-11 * c.abs().max(1.0) {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    Err(StatsError::ConvergenceFailure)
}
