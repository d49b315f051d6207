//! Surface areas, Grötzsch and Teichmüller ring moduli, and the distortion
//! function `φ_{A,n}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `[lo, hi]`, possibly with `hi = +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "{lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn scale(&self, s: f64) -> Self {
        if s >= 0.0 {
            Interval::new(self.lo * s, self.hi * s)
        } else {
            Interval::new(self.hi * s, self.lo * s)
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_infinite()
    }
}

/// An exact planar value or a bound in higher dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Exact(f64),
    Bounds(Interval),
}

impl Value {
    pub fn interval(&self) -> Interval {
        match *self {
            Value::Exact(v) => Interval::point(v),
            Value::Bounds(i) => i,
        }
    }

    pub fn exact(&self) -> Option<f64> {
        match *self {
            Value::Exact(v) => Some(v),
            Value::Bounds(_) => None,
        }
    }

    /// `{lo, hi, exact}` as printed by the command-line tool.
    pub fn to_json(&self) -> serde_json::Value {
        let i = self.interval();
        let num = |v: f64| if v.is_finite() { serde_json::json!(v) } else { serde_json::json!(v.to_string()) };
        serde_json::json!({ "lo": num(i.lo), "hi": num(i.hi), "exact": self.exact().map(num) })
    }
}

/// How the Grötzsch constant `λ_n` is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// `λ₂ = 4`.
    Exact2d,
    /// `λ_n ∈ [4, 2e^{n−1})`.
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialFnContext {
    pub n: usize,
    pub lambda_mode: LambdaMode,
    pub precision: f64,
}

impl SpecialFnContext {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {n}")));
        }
        let lambda_mode = if n == 2 { LambdaMode::Exact2d } else { LambdaMode::Interval };
        Ok(SpecialFnContext { n, lambda_mode, precision: 1e-10 })
    }

    pub fn sigma(&self) -> f64 {
        surface_area(self.n).expect("n >= 2")
    }

    /// Lower and upper values used for `λ_n`.
    pub fn lambda(&self) -> (f64, f64) {
        match self.lambda_mode {
            LambdaMode::Exact2d => (4.0, 4.0),
            LambdaMode::Interval => (4.0, 2.0 * ((self.n - 1) as f64).exp()),
        }
    }

    /// `λ` used where one value is needed: exact in the plane, the upper end
    /// (the conservative choice for radii) otherwise.
    pub fn lambda_upper(&self) -> f64 {
        self.lambda().1
    }

    fn exponent(&self) -> f64 {
        (self.n - 1) as f64
    }
}

/// `Γ(n/2)` by the half-integer recurrence.
fn gamma_half(n: usize) -> f64 {
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `σ_{n−1} = 2π^{n/2} / Γ(n/2)`, the area of `S^{n−1}`.
pub fn surface_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {n}")));
    }
    Ok(2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n))
}

/// Arithmetic–geometric mean, iterated until successive terms agree to 1e-15.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a.abs().max(b.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, modulus `k ∈ [0, 1)`.
pub fn elliptic_k(k: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / agm(1.0, (1.0 - k * k).sqrt())
}

/// `γ₂` as a function of `u = log t > 0`; accurate for `t` near 1.
fn gamma2_log(u: f64) -> f64 {
    if u > 700.0 {
        // γ₂(t) = 2π / log(4t) up to O(t⁻²)
        return std::f64::consts::TAU / (u + 4f64.ln());
    }
    let r = (-u).exp();
    let rp = (-(-u).exp_m1() * (1.0 + r)).sqrt();
    // 2π / μ(r) with μ(r) = (π/2) K(r′)/K(r)
    4.0 * agm(1.0, r) / agm(1.0, rp)
}

/// The planar Grötzsch ring modulus `γ₂(t) = 2π / μ(1/t)`, `t > 1`.
pub fn grotzsch_gamma_2d(t: f64) -> Result<f64> {
    if !(t > 1.0) || t.is_nan() {
        return Err(Error::OutsideGrotzschDomain(t));
    }
    Ok(gamma2_log(t.ln()))
}

/// Solves `γ₂(e^u) = y` for `u`.
fn gamma2_inverse_log(y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::BracketFailure(format!("γ₂ takes every value in (0, ∞), got {y}")));
    }
    let sigma = std::f64::consts::TAU;
    let top = sigma / y;
    if top > 700.0 {
        return Ok(top - 4f64.ln());
    }
    // σ/log(4t) ≤ γ₂(t) ≤ σ/log t brackets the root
    let (mut lo, mut hi) = ((top - 4f64.ln()).max(0.0), top);
    if !(gamma2_log(hi) <= y && (lo == 0.0 || gamma2_log(lo) >= y)) {
        return Err(Error::BracketFailure(format!("no bracket for γ₂⁻¹({y}) in log t ∈ [{lo}, {hi}]")));
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gamma2_log(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse of `γ₂` on `(1, ∞)`.
pub fn grotzsch_gamma_2d_inverse(y: f64) -> Result<f64> {
    Ok(gamma2_inverse_log(y)?.exp())
}

/// `[σ/(log λ_up t)^{n−1}, σ/(log t)^{n−1}]`; the upper end is `+∞` as `t → 1⁺`.
pub fn gamma_bounds(ctx: &SpecialFnContext, t: f64) -> Result<Interval> {
    if !(t > 1.0) {
        return Err(Error::OutsideGrotzschDomain(t));
    }
    let (lam_lo, lam_up) = ctx.lambda();
    if !(lam_lo * t > 1.0) {
        return Err(Error::OutsideGrotzschDomain(t));
    }
    let s = ctx.sigma();
    let p = ctx.exponent();
    let l = t.ln();
    let hi = if l > 0.0 { s / l.powf(p) } else { f64::INFINITY };
    Ok(Interval::new(s / (lam_up * t).ln().powf(p), hi))
}

/// `γ_n(t)`: exact for `n = 2`, bounds otherwise.
pub fn gamma_n(ctx: &SpecialFnContext, t: f64) -> Result<Value> {
    if ctx.n == 2 {
        Ok(Value::Exact(grotzsch_gamma_2d(t)?))
    } else {
        Ok(Value::Bounds(gamma_bounds(ctx, t)?))
    }
}

/// Teichmüller modulus `τ_n(s) = 2^{1−n} γ_n(√(s+1))`.
pub fn tau_from_gamma(ctx: &SpecialFnContext, s: f64) -> Result<Value> {
    if !(s > 0.0) {
        return Err(invalid(format!("τ needs s > 0, got {s}")));
    }
    let f = 2f64.powi(1 - ctx.n as i32);
    Ok(match gamma_n(ctx, (s + 1.0).sqrt())? {
        Value::Exact(v) => Value::Exact(f * v),
        Value::Bounds(i) => Value::Bounds(i.scale(f)),
    })
}

/// `φ_{A,n}(r) = 1 / γ_n⁻¹(A γ_n(1/r))` for `0 < r < 1`.
pub fn distortion_phi(ctx: &SpecialFnContext, a: f64, r: f64) -> Result<Value> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("φ needs 0 < r < 1, got {r}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("φ needs A > 0, got {a}")));
    }
    if ctx.n == 2 {
        if a == 1.0 {
            return Ok(Value::Exact(r));
        }
        let y = a * gamma2_log(-r.ln());
        return Ok(Value::Exact((-gamma2_inverse_log(y)?).exp()));
    }
    // lo(t) ≤ γ(t) ≤ hi(t) with both bounds decreasing, so
    // γ⁻¹(y) ∈ [lo⁻¹(y), hi⁻¹(y)] and y ranges over A·[lo(1/r), hi(1/r)]
    let g = gamma_bounds(ctx, 1.0 / r)?.scale(a);
    let s = ctx.sigma();
    let p = 1.0 / ctx.exponent();
    let lam = ctx.lambda_upper();
    let log_lo_inv = |y: f64| (s / y).powf(p) - lam.ln();
    let log_hi_inv = |y: f64| (s / y).powf(p);
    let t_min_log = log_lo_inv(g.hi).max(0.0);
    let t_max_log = log_hi_inv(g.lo);
    Ok(Value::Bounds(Interval::new((-t_max_log).exp(), (-t_min_log).exp().min(1.0))))
}

/// `ρ_n(r, R) = σ_{n−1} (log R/r)^{1−n}`.
pub fn ring_modulus_rho(n: usize, r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && big_r > r) {
        return Err(invalid(format!("ring needs 0 < r < R, got r = {r}, R = {big_r}")));
    }
    Ok(surface_area(n)? * (big_r / r).ln().powf(1.0 - n as f64))
}
