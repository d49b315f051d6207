//! The constant `t₀`, the `𝒜/ℬ` distortion bound, the Hölder envelope and
//! the radius threshold `R` with its calibrated `c`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::maps::MapSpec;
use crate::special::grotzsch::{distortion_phi, Interval, SpecialFnContext, Value};

pub const DEFAULT_HOLDER_M: f64 = 10.0;
/// Slack for `K ≤ 4/3` and `A ≤ 16/9` checks against decimal input.
const RANGE_EPS: f64 = 1e-12;

/// `t₀ = (λ^{2(α−1)} (A−1)/A)^β` with `α = A^{1/(1−n)}`, `β = A^{1/(n−1)}`.
pub fn t0_from_a(n: usize, a: f64, lambda: f64) -> f64 {
    let p = (n - 1) as f64;
    let alpha = a.powf(-1.0 / p);
    let beta = a.powf(1.0 / p);
    (lambda.powf(2.0 * (alpha - 1.0)) * (a - 1.0) / a).powf(beta)
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 1.0 && k <= 4.0 / 3.0 + RANGE_EPS) {
        return Err(invalid(format!("K must lie in (1, 4/3], got {k}")));
    }
    Ok(())
}

/// `t₀` for `A = K²`. Exact in the plane; for `n ≥ 3` the interval spanned by
/// `λ = 2e^{n−1}` (lower end) and `λ = 4` (upper end).
pub fn t0_constant(ctx: &SpecialFnContext, k: f64) -> Result<Value> {
    check_k(k)?;
    let a = k * k;
    let (lam_lo, lam_up) = ctx.lambda();
    if ctx.n == 2 {
        Ok(Value::Exact(t0_from_a(2, a, lam_lo)))
    } else {
        Ok(Value::Bounds(Interval::new(t0_from_a(ctx.n, a, lam_up), t0_from_a(ctx.n, a, lam_lo))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsBound {
    #[serde(rename = "A")]
    pub a: f64,
    pub t0: f64,
    #[serde(rename = "A_t0")]
    pub a_t0: Value,
    #[serde(rename = "B_t0")]
    pub b_t0: Value,
    pub ratio: Value,
    pub ratio_bound: f64,
    /// Whether `𝒜/ℬ ≤ ratio_bound`; `None` when the interval straddles it.
    pub holds: Option<bool>,
}

/// `exp(72 (A−1) log(1/(A−1)))`.
pub fn ratio_bound(a: f64) -> f64 {
    (72.0 * (a - 1.0) * (1.0 / (a - 1.0)).ln()).exp()
}

/// `𝒜(t₀) = φ²_A(√t₀)/(1 − φ²_A(√t₀))`, `ℬ(t₀) = φ²_{1/A}(√(t₀/(1+t₀)))`.
pub fn qs_bound_evaluator(ctx: &SpecialFnContext, a: f64) -> Result<QsBound> {
    if !(a > 1.0 && a <= 16.0 / 9.0 + RANGE_EPS) {
        return Err(invalid(format!("A must lie in (1, 16/9], got {a}")));
    }
    let t0 = t0_from_a(ctx.n, a, ctx.lambda_upper());
    let pa = distortion_phi(ctx, a, t0.sqrt())?.interval();
    let pb = distortion_phi(ctx, 1.0 / a, (t0 / (1.0 + t0)).sqrt())?.interval();
    let (sa_lo, sa_hi) = (pa.lo * pa.lo, pa.hi * pa.hi);
    if sa_hi >= 1.0 {
        return Err(Error::ATooLargeForT0 { phi_sq: sa_hi });
    }
    let a_iv = Interval::new(sa_lo / (1.0 - sa_lo), sa_hi / (1.0 - sa_hi));
    let b_iv = Interval::new(pb.lo * pb.lo, pb.hi * pb.hi);
    let r_iv = Interval::new(a_iv.lo / b_iv.hi, a_iv.hi / b_iv.lo);
    let bound = ratio_bound(a);
    let wrap = |i: Interval| if ctx.n == 2 { Value::Exact(i.lo) } else { Value::Bounds(i) };
    let holds = if r_iv.hi <= bound {
        Some(true)
    } else if r_iv.lo > bound {
        Some(false)
    } else {
        None
    };
    Ok(QsBound { a, t0, a_t0: wrap(a_iv), b_t0: wrap(b_iv), ratio: wrap(r_iv), ratio_bound: bound, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEnvelope {
    pub alpha_prime: f64,
    pub beta_prime: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub note: String,
}

/// Exponents `α′ = K′^{1/(1−n)}`, `β′ = K′^{1/(n−1)}` of the global Hölder
/// envelope; `M` is a configuration constant, see [`holder_constant_for`].
pub fn holder_envelope(n: usize, k_prime: f64) -> Result<HolderEnvelope> {
    if n < 2 || !(k_prime >= 1.0 && k_prime.is_finite()) {
        return Err(invalid("need n ≥ 2 and K′ ≥ 1"));
    }
    let p = (n - 1) as f64;
    Ok(HolderEnvelope {
        alpha_prime: k_prime.powf(-1.0 / p),
        beta_prime: k_prime.powf(1.0 / p),
        m: DEFAULT_HOLDER_M,
        note: "M is not given in closed form; default 10, check with holder_constant_for".into(),
    })
}

/// Smallest `M` with `M⁻¹ min(|z|^α′, |z|^β′) ≤ |f(z)| ≤ M max(|z|^α′, |z|^β′)`
/// on sampled `z` (radii 1e-3 … 1e3, 64 directions per radius), for a map
/// with `f(0) = 0`.
pub fn holder_constant_for(f: &MapSpec, alpha_prime: f64, beta_prime: f64) -> Result<f64> {
    let dim = f.dim();
    let dirs = crate::sampling::sphere_points(dim, 64);
    let f0 = f.evaluate(&crate::geometry::Point::zero(dim))?;
    if f0.norm() > 1e-12 {
        return Err(invalid("Hölder envelope needs f(0) = 0"));
    }
    let mut m = 1.0f64;
    for k in 0..=60 {
        let rho = 10f64.powf(-3.0 + 0.1 * k as f64);
        let (lo, hi) = {
            let (a, b) = (rho.powf(alpha_prime), rho.powf(beta_prime));
            (a.min(b), a.max(b))
        };
        for u in &dirs {
            let v = f.evaluate(&(*u * rho))?.norm();
            m = m.max(v / hi).max(lo / v);
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_prime")]
    pub k_prime: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    pub holder_m: f64,
    pub t0: f64,
    /// `t₀` with `λ = 4` (differs from `t0` only for `n ≥ 3`).
    pub t0_lambda4: f64,
    /// Minimal radius; `+∞` when it overflows (see `log_r`).
    #[serde(rename = "R")]
    pub r: f64,
    pub log_r: f64,
    pub c: f64,
    /// `log` of `(c/(K−1))^{c/(K−1)}`.
    pub log_r_closed_form: f64,
}

/// Both absorption inequalities at `log R = x`, as `(lhs − rhs)` in the
/// form `K′ (log …)^{1−n} − K(K−1)(log …)^{1−n}`; non-positive means satisfied.
fn absorption_gaps(n: usize, k: f64, kp: f64, t0: f64, lam: f64, m: f64, x: f64) -> (f64, f64) {
    let p = 1.0 - n as f64;
    let ap = kp.powf(-1.0 / (n - 1) as f64);
    let bp = kp.powf(1.0 / (n - 1) as f64);
    let rhs1 = k * (k - 1.0) * (lam * t0.powf(-0.5)).ln().powf(p);
    let rhs2 = k * (k - 1.0) * (lam * (m / t0.powf(bp)).sqrt()).ln().powf(p);
    let l2 = ap * x - m.ln();
    let g1 = if x > 0.0 { kp * x.powf(p) - rhs1 } else { f64::INFINITY };
    let g2 = if l2 > 0.0 { kp * l2.powf(p) - rhs2 } else { f64::INFINITY };
    (g1, g2)
}

/// Minimal `log R` satisfying both absorption inequalities, by bisection.
pub fn minimal_log_r(n: usize, k: f64, kp: f64, t0: f64, lam: f64, m: f64) -> Result<f64> {
    let ok = |x: f64| {
        let (a, b) = absorption_gaps(n, k, kp, t0, lam, m, x);
        a <= 0.0 && b <= 0.0
    };
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::BracketFailure("no finite radius satisfies the absorption inequalities".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `c` with `(c/(K−1)) log(c/(K−1)) ≥ log_r`.
fn c_for(k: f64, log_r: f64) -> f64 {
    let f = |c: f64| {
        let q = c / (k - 1.0);
        q * q.ln() - log_r
    };
    // q log q is increasing for q > 1/e; start at q = 1
    let (mut lo, mut hi) = (k - 1.0, (k - 1.0) * 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub const C_GRID: [f64; 33] = {
    let mut g = [0.0; 33];
    let mut i = 0;
    while i < 33 {
        g[i] = 1.01 + 0.01 * i as f64;
        i += 1;
    }
    g
};

/// Calibrated `c`: the supremum over the grid `K ∈ {1.01, …, 1.33}` (capped
/// at `K′`) of the smallest admissible `c`, plus a 5% margin.
pub fn calibrate_c(ctx: &SpecialFnContext, k_prime: f64, holder_m: f64) -> Result<f64> {
    let mut c = 1.0f64;
    for &k in C_GRID.iter().filter(|&&k| k <= k_prime + RANGE_EPS) {
        let t0 = t0_from_a(ctx.n, k * k, ctx.lambda_upper());
        let lr = minimal_log_r(ctx.n, k, k_prime, t0, ctx.lambda_upper(), holder_m)?;
        c = c.max(c_for(k, lr));
    }
    Ok(1.05 * c)
}

pub fn radius_threshold(ctx: &SpecialFnContext, k: f64, k_prime: f64, holder_m: f64) -> Result<ThresholdParams> {
    check_k(k)?;
    if !(k_prime >= k - RANGE_EPS) {
        return Err(invalid(format!("need K ≤ K′, got K = {k}, K′ = {k_prime}")));
    }
    if !(holder_m >= 1.0) {
        return Err(invalid("Hölder constant M must be at least 1"));
    }
    let n = ctx.n;
    let p = (n - 1) as f64;
    let a = k * k;
    let lam = ctx.lambda_upper();
    let t0 = t0_from_a(n, a, lam);
    let log_r = minimal_log_r(n, k, k_prime, t0, lam, holder_m)?;
    let c = calibrate_c(ctx, k_prime, holder_m)?;
    let q = c / (k - 1.0);
    Ok(ThresholdParams {
        k,
        k_prime,
        a,
        alpha: k.powf(-1.0 / p),
        beta: k.powf(1.0 / p),
        alpha_prime: k_prime.powf(-1.0 / p),
        beta_prime: k_prime.powf(1.0 / p),
        holder_m,
        t0,
        t0_lambda4: t0_from_a(n, a, 4.0),
        r: log_r.exp(),
        log_r,
        c,
        log_r_closed_form: q * q.ln(),
    })
}
