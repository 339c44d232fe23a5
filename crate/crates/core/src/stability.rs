//! Linear stability of stabilizing-correction methods.
//!
//! Applied to `u' = (λ0 + λ1 + ... + λs) u` with `z_j = Δt·λ_j`, one step
//! multiplies `u` by a rational function of `z = Σ z_j` and
//! `ϖ = Π_{j≥1} (1 - θ z_j)`. This module evaluates those functions, their
//! limits for a stiff last argument, and the domains `D_α` of explicit
//! arguments `z0` that stay stable for every implicit argument in the wedge
//! `W_α = {ζ : |arg(-ζ)| ≤ α} ∪ {0}`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("pole: varpi = 0")]
    Pole,
    #[error("query needs at least the explicit argument z0")]
    EmptyQuery,
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("at least one implicit term is required")]
    NoImplicitTerms,
    #[error("alpha must lie in [0, pi/2], got {0}")]
    InvalidAlpha(f64),
    #[error("raster needs at least 2x2 cells, got {0}x{1}")]
    Resolution(usize, usize),
    #[error("invalid window {0:?}")]
    Window(Window),
}

/// Arguments `(z0, z1, ..., zs)` with scheme parameters `θ`, `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityQuery {
    pub z: Vec<Complex64>,
    pub theta: f64,
    pub nu: f64,
}

impl StabilityQuery {
    pub fn new(z: Vec<Complex64>, theta: f64, nu: f64) -> Self {
        StabilityQuery { z, theta, nu }
    }

    pub fn z_sum(&self) -> Complex64 {
        self.z.iter().sum()
    }

    pub fn varpi(&self) -> Complex64 {
        self.z
            .iter()
            .skip(1)
            .map(|&zj| 1.0 - self.theta * zj)
            .product()
    }

    /// `(z, 1/ϖ)`.
    fn combined(&self) -> Result<(Complex64, Complex64), StabilityError> {
        if self.z.is_empty() {
            return Err(StabilityError::EmptyQuery);
        }
        let w = self.varpi();
        if w.norm_sqr() == 0.0 {
            return Err(StabilityError::Pole);
        }
        Ok((self.z_sum(), w.inv()))
    }
}

fn finite(v: Complex64) -> Result<Complex64, StabilityError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(StabilityError::Pole)
    }
}

/// Amplification of `w_s` for general correction weights:
/// `1 + (1 + μ2κ) z/ϖ - μ2κ z/ϖ² + b̂2κ z²/ϖ²`.
pub fn eval_q(
    query: &StabilityQuery,
    mu2kappa: f64,
    bhat2kappa: f64,
) -> Result<Complex64, StabilityError> {
    let (z, p) = query.combined()?;
    let zp = z * p;
    finite(1.0 + (1.0 + mu2kappa) * zp - mu2kappa * zp * p + bhat2kappa * zp * zp)
}

/// Type-A stability function `1 + 2z/ϖ - z/ϖ² + ½ z²/ϖ²`.
pub fn eval_r_a(query: &StabilityQuery) -> Result<Complex64, StabilityError> {
    let (z, p) = query.combined()?;
    finite(r_a(z, p))
}

/// Type-B stability function
/// `1 + z + (½+ν) z²/ϖ - ν z²/ϖ² + (½-θ+ν)θ z³/ϖ²`.
pub fn eval_r_b(query: &StabilityQuery) -> Result<Complex64, StabilityError> {
    let (z, p) = query.combined()?;
    finite(r_b(z, p, query.theta, query.nu))
}

fn r_a(z: Complex64, p: Complex64) -> Complex64 {
    let zp = z * p;
    1.0 + 2.0 * zp - zp * p + 0.5 * zp * zp
}

fn r_b(z: Complex64, p: Complex64, theta: f64, nu: f64) -> Complex64 {
    let z2 = z * z;
    let p2 = p * p;
    1.0 + z + (0.5 + nu) * z2 * p - nu * z2 * p2 + (0.5 - theta + nu) * theta * z2 * z * p2
}

/// Stability function of the implicit DIRK,
/// `(1 + (1-2θ)z + (½-2θ+θ²)z²) / (1-θz)²`.
pub fn eval_r_impl(z: Complex64, theta: f64) -> Result<Complex64, StabilityError> {
    let den = 1.0 - theta * z;
    if den.norm_sqr() == 0.0 {
        return Err(StabilityError::Pole);
    }
    let num = 1.0 + (1.0 - 2.0 * theta) * z + (0.5 - 2.0 * theta + theta * theta) * z * z;
    finite(num / (den * den))
}

/// `1 + z + ½z²`.
pub fn eval_r_expl_a(z: Complex64) -> Complex64 {
    1.0 + z + 0.5 * z * z
}

/// `1 + z + ½z² + ½θz³`.
pub fn eval_r_expl_b(z: Complex64, theta: f64) -> Complex64 {
    1.0 + z + 0.5 * z * z + 0.5 * theta * z * z * z
}

/// Type-A limit as the last implicit argument tends to infinity:
/// `1 - (2/θ)π + π²/(2θ²)`.
pub fn phi_a(pi_s: f64, theta: f64) -> f64 {
    1.0 - 2.0 / theta * pi_s + pi_s * pi_s / (2.0 * theta * theta)
}

fn phi_a_complex(pi_s: Complex64, theta: f64) -> Complex64 {
    1.0 - 2.0 / theta * pi_s + pi_s * pi_s / (2.0 * theta * theta)
}

/// Type-B limit for `s = 1`:
/// `(½-2θ+θ²)/θ² + (½-2θ+ν) z0/θ`.
pub fn phi_b(z0: Complex64, theta: f64, nu: f64) -> Complex64 {
    (0.5 - 2.0 * theta + theta * theta) / (theta * theta) + (0.5 - 2.0 * theta + nu) / theta * z0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    A,
    B,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::A => f.write_str("A"),
            SchemeKind::B => f.write_str("B"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(SchemeKind::A),
            "B" | "b" => Ok(SchemeKind::B),
            _ => Err(format!("unknown scheme type `{s}` (expected A or B)")),
        }
    }
}

/// Scheme parameters entering the stability functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    pub kind: SchemeKind,
    pub theta: f64,
    pub nu: f64,
    /// Number of implicit terms.
    pub s: usize,
}

impl StabilityParams {
    pub fn new(kind: SchemeKind, theta: f64, nu: f64, s: usize) -> Self {
        StabilityParams { kind, theta, nu, s }
    }

    fn validate(&self) -> Result<(), StabilityError> {
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(StabilityError::InvalidTheta(self.theta));
        }
        if self.s == 0 {
            return Err(StabilityError::NoImplicitTerms);
        }
        Ok(())
    }
}

/// Radii per ray used when sampling `s` implicit arguments jointly; the
/// number of sampled tuples grows like `(2·radii)^s`.
pub fn default_radii_count(s: usize) -> usize {
    match s {
        0 | 1 => 400,
        2 => 80,
        3 => 24,
        _ => 12,
    }
}

/// Boundary sampling of the wedge `W_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeSpec {
    pub alpha: f64,
    pub magnitude_samples: Vec<f64>,
    pub include_stiff_limit: bool,
}

/// `n` radii log-spaced over `[1e-3, 1e6]`.
pub fn log_radii(n: usize) -> Vec<f64> {
    let (lo, hi) = (-3.0f64, 6.0f64);
    match n {
        0 => vec![],
        1 => vec![10f64.powf(hi)],
        _ => (0..n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect(),
    }
}

impl WedgeSpec {
    /// 400 log-spaced radii per ray with stiff limits.
    pub fn new(alpha: f64) -> Self {
        Self::with_radii(alpha, log_radii(400))
    }

    pub fn with_radii(alpha: f64, magnitude_samples: Vec<f64>) -> Self {
        WedgeSpec {
            alpha,
            magnitude_samples,
            include_stiff_limit: true,
        }
    }

    /// Sampling density suited to `s` jointly sampled arguments.
    pub fn for_implicit_count(alpha: f64, s: usize) -> Self {
        Self::with_radii(alpha, log_radii(default_radii_count(s)))
    }

    fn validate(&self) -> Result<(), StabilityError> {
        if !(0.0..=PI / 2.0 + 1e-15).contains(&self.alpha) {
            return Err(StabilityError::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    /// `0` and the points `ρ·e^{i(π∓α)}` on both boundary rays.
    pub fn boundary_points(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        let rays: Vec<f64> = if self.alpha == 0.0 {
            vec![PI]
        } else {
            vec![PI - self.alpha, PI + self.alpha]
        };
        for &angle in &rays {
            // exact negative reals on the α = 0 ray
            let dir = if self.alpha == 0.0 {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, angle)
            };
            pts.extend(self.magnitude_samples.iter().map(|&r| dir * r));
        }
        pts
    }
}

/// Calls `f` with every multiset of size `k` drawn from `0..n`.
fn for_each_multiset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let next = idx[pos] + 1;
                for slot in &mut idx[pos..] {
                    *slot = next;
                }
                break;
            }
        }
    }
}

/// Polynomial `1 + c1 z + c2 z² + c3 z³` in `z = z0 + shift` for one sampled
/// tuple of implicit arguments.
#[derive(Debug, Clone, Copy)]
struct TupleTerm {
    shift: Complex64,
    c1: Complex64,
    c2: Complex64,
    c3: Complex64,
}

/// Precomputed sampling of `ψ_α` for a fixed scheme and wedge; the tuples
/// do not depend on `z0`, so rasters reuse one sampler for every cell.
#[derive(Debug, Clone)]
pub struct WedgeSampler {
    params: StabilityParams,
    terms: Vec<TupleTerm>,
    /// Largest `|r|` over stiff limits that do not depend on `z0`.
    floor: f64,
    include_stiff_limit: bool,
}

/// Grid size used for the real `π_s ∈ [0, 1]` sweep of the type-A limit.
pub const STIFF_LIMIT_GRID: usize = 10_000;

/// `max |φ_A(π)|` over an even grid on `[0, 1]` of `points` points.
pub fn max_abs_phi_a(theta: f64, points: usize) -> f64 {
    let n = points.max(2);
    (0..n)
        .map(|k| phi_a(k as f64 / (n - 1) as f64, theta).abs())
        .fold(0.0, f64::max)
}

impl WedgeSampler {
    pub fn new(params: StabilityParams, wedge: &WedgeSpec) -> Result<Self, StabilityError> {
        params.validate()?;
        wedge.validate()?;
        let StabilityParams { kind, theta, nu, s } = params;
        let pts = wedge.boundary_points();
        let factors: Vec<Complex64> = pts.iter().map(|&z| (1.0 - theta * z).inv()).collect();

        let mut terms = Vec::new();
        for_each_multiset(pts.len(), s, |idx| {
            let shift: Complex64 = idx.iter().map(|&k| pts[k]).sum();
            let p: Complex64 = idx.iter().map(|&k| factors[k]).product();
            let (c1, c2, c3) = match kind {
                SchemeKind::A => (p * (2.0 - p), 0.5 * p * p, Complex64::new(0.0, 0.0)),
                SchemeKind::B => {
                    let p2 = p * p;
                    (
                        Complex64::new(1.0, 0.0),
                        (0.5 + nu) * p - nu * p2,
                        (0.5 - theta + nu) * theta * p2,
                    )
                }
            };
            terms.push(TupleTerm { shift, c1, c2, c3 });
        });

        let mut floor: f64 = 0.0;
        if wedge.include_stiff_limit {
            match kind {
                SchemeKind::A => {
                    floor = max_abs_phi_a(theta, STIFF_LIMIT_GRID);
                    // one argument at infinity, the other s-1 on the boundary
                    for_each_multiset(pts.len(), s - 1, |idx| {
                        let pi: Complex64 = idx.iter().map(|&k| factors[k]).product();
                        floor = floor.max(phi_a_complex(pi, theta).norm());
                    });
                }
                SchemeKind::B if s >= 2 => floor = f64::INFINITY,
                SchemeKind::B => {}
            }
        }
        Ok(WedgeSampler {
            params,
            terms,
            floor,
            include_stiff_limit: wedge.include_stiff_limit,
        })
    }

    pub fn tuple_count(&self) -> usize {
        self.terms.len()
    }

    /// Sampled `ψ_α(z0)`.
    pub fn psi(&self, z0: Complex64) -> f64 {
        let mut best = self.floor;
        if best.is_infinite() {
            return best;
        }
        if self.include_stiff_limit && self.params.kind == SchemeKind::B && self.params.s == 1 {
            best = best.max(phi_b(z0, self.params.theta, self.params.nu).norm());
        }
        let mut best_sq = best * best;
        for t in &self.terms {
            let z = z0 + t.shift;
            let r = 1.0 + z * (t.c1 + z * (t.c2 + z * t.c3));
            let m = r.norm_sqr();
            if m > best_sq || m.is_nan() {
                best_sq = if m.is_nan() { f64::INFINITY } else { m };
            }
        }
        best_sq.sqrt()
    }
}

/// Sampled `sup |r(z0, z1, ..., zs)|` over implicit arguments in the wedge.
pub fn psi_alpha(
    z0: Complex64,
    kind: SchemeKind,
    theta: f64,
    nu: f64,
    s: usize,
    wedge: &WedgeSpec,
) -> Result<f64, StabilityError> {
    Ok(WedgeSampler::new(StabilityParams::new(kind, theta, nu, s), wedge)?.psi(z0))
}

/// Slack on `ψ ≤ 1` for raster membership.
pub const RASTER_TOL: f64 = 1e-9;

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the `z0` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            re_min: -5.0,
            re_max: 1.0,
            im_min: -4.0,
            im_max: 4.0,
        }
    }
}

impl Window {
    fn validate(&self) -> Result<(), StabilityError> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if ok {
            Ok(())
        } else {
            Err(StabilityError::Window(*self))
        }
    }
}

impl FromStr for Window {
    type Err = String;

    /// `re_min,re_max,im_min,im_max`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad window `{s}`: {e}"))?;
        if parts.len() != 4 {
            return Err(format!("window needs 4 numbers, got {}", parts.len()));
        }
        let w = Window {
            re_min: parts[0],
            re_max: parts[1],
            im_min: parts[2],
            im_max: parts[3],
        };
        w.validate().map_err(|e| e.to_string())?;
        Ok(w)
    }
}

/// `ψ_α` sampled at cell centers. Row 0 is the top row (largest imaginary
/// part); storage is row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainRaster {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub psi_values: Vec<f64>,
    pub membership: Vec<bool>,
}

impl DomainRaster {
    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        cell_center(&self.window, self.nx, self.ny, ix, iy)
    }

    pub fn psi(&self, ix: usize, iy: usize) -> f64 {
        self.psi_values[iy * self.nx + ix]
    }

    pub fn is_member(&self, ix: usize, iy: usize) -> bool {
        self.membership[iy * self.nx + ix]
    }

    pub fn member_count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    /// Header `re,im,psi,member`, one row per cell in storage order.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "psi", "member"])?;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let c = self.cell_center(ix, iy);
                w.write_record([
                    c.re.to_string(),
                    c.im.to_string(),
                    self.psi(ix, iy).to_string(),
                    u8::from(self.is_member(ix, iy)).to_string(),
                ])?;
            }
        }
        w.flush()
    }

    /// Binary PGM (`P5`, maxval 255); member cells black, others white.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        let bytes: Vec<u8> = self
            .membership
            .iter()
            .map(|&m| if m { 0 } else { 255 })
            .collect();
        out.write_all(&bytes)
    }
}

fn cell_center(w: &Window, nx: usize, ny: usize, ix: usize, iy: usize) -> Complex64 {
    let dx = (w.re_max - w.re_min) / nx as f64;
    let dy = (w.im_max - w.im_min) / ny as f64;
    Complex64::new(
        w.re_min + (ix as f64 + 0.5) * dx,
        w.im_max - (iy as f64 + 0.5) * dy,
    )
}

/// Rasterizes `D_α` with the default wedge sampling for `s` arguments.
pub fn raster_domain(
    params: StabilityParams,
    alpha: f64,
    window: Window,
    resolution: (usize, usize),
) -> Result<DomainRaster, StabilityError> {
    raster_domain_with(
        params,
        &WedgeSpec::for_implicit_count(alpha, params.s),
        window,
        resolution,
    )
}

pub fn raster_domain_with(
    params: StabilityParams,
    wedge: &WedgeSpec,
    window: Window,
    (nx, ny): (usize, usize),
) -> Result<DomainRaster, StabilityError> {
    if nx < 2 || ny < 2 {
        return Err(StabilityError::Resolution(nx, ny));
    }
    window.validate()?;
    let sampler = WedgeSampler::new(params, wedge)?;
    let mut psi_values = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            psi_values.push(sampler.psi(cell_center(&window, nx, ny, ix, iy)));
        }
    }
    let membership = psi_values.iter().map(|&p| p <= 1.0 + RASTER_TOL).collect();
    Ok(DomainRaster {
        window,
        nx,
        ny,
        psi_values,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(z: &[Complex64], theta: f64, nu: f64) -> StabilityQuery {
        StabilityQuery::new(z.to_vec(), theta, nu)
    }

    #[test]
    fn consistency_at_zero() {
        let zero = [c(0.0, 0.0); 3];
        let query = q(&zero, 0.4, 0.7);
        assert_eq!(eval_q(&query, 1.3, 0.2).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_r_a(&query).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_r_b(&query).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_r_impl(c(0.0, 0.0), 0.3).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_r_expl_a(c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(eval_r_expl_b(c(0.0, 0.0), 0.3), c(1.0, 0.0));
    }

    #[test]
    fn q_hand_value() {
        let r = eval_q(&q(&[c(-1.0, 0.0), c(0.0, 0.0)], 0.5, 0.5), 1.0, 0.5).unwrap();
        assert!((r - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn q_with_order_two_weights_is_r_a() {
        let query = q(&[c(-0.3, 1.2), c(-4.0, 0.5), c(-0.1, -2.0)], 0.6, 0.6);
        let a = eval_q(&query, 1.0, 0.5).unwrap();
        let b = eval_r_a(&query).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn explicit_reductions() {
        let z = c(-0.7, 0.9);
        let ra = eval_r_a(&q(&[z, c(0.0, 0.0)], 0.3, 0.3)).unwrap();
        assert!((ra - eval_r_expl_a(z)).norm() < 1e-15);
        assert_eq!(eval_r_expl_a(c(-2.0, 0.0)), c(1.0, 0.0));
        let rb = eval_r_b(&q(&[z, c(0.0, 0.0), c(0.0, 0.0)], 0.3, 0.3)).unwrap();
        assert!((rb - eval_r_expl_b(z, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn implicit_reduction_matches_r_impl() {
        let theta = 0.37;
        for k in 0..100 {
            let z = c(-(k as f64) * 0.7, ((k * 37) % 23) as f64 - 11.0);
            let ra = eval_r_a(&q(&[c(0.0, 0.0), z], theta, theta)).unwrap();
            let ri = eval_r_impl(z, theta).unwrap();
            assert!((ra - ri).norm() <= 1e-13 * ri.norm().max(1.0));
        }
    }

    #[test]
    fn l_stable_limit() {
        let theta = 1.0 - 0.5 * S2;
        let ra = eval_r_a(&q(&[c(0.0, 0.0), c(-1e8, 0.0)], theta, theta)).unwrap();
        assert!(ra.norm() < 1e-7);
        assert!(eval_r_impl(c(-1e12, 0.0), theta).unwrap().norm() < 1e-10);
        assert!(phi_a(1.0, theta).abs() < 1e-15);
    }

    #[test]
    fn r_b_with_nu_theta_matches_reduced_form() {
        let theta = 0.45;
        let query = q(&[c(-0.4, 0.3), c(-2.0, 1.0), c(-7.0, 0.0)], theta, theta);
        let (z, p) = (query.z_sum(), query.varpi().inv());
        let reduced = 1.0 + z + (0.5 + theta) * z * z * p - theta * z * z * p * p
            + 0.5 * theta * z * z * z * p * p;
        assert!((eval_r_b(&query).unwrap() - reduced).norm() < 1e-13);
    }

    #[test]
    fn poles_are_rejected() {
        assert_eq!(eval_r_impl(c(2.0, 0.0), 0.5), Err(StabilityError::Pole));
        let query = q(&[c(0.0, 0.0), c(2.0, 0.0)], 0.5, 0.5);
        assert_eq!(eval_r_a(&query), Err(StabilityError::Pole));
        assert_eq!(eval_r_b(&query), Err(StabilityError::Pole));
        assert_eq!(eval_r_a(&q(&[], 0.5, 0.5)), Err(StabilityError::EmptyQuery));
    }

    #[test]
    fn phi_values() {
        for theta in [0.3, 0.5] {
            assert_eq!(phi_a(0.0, theta), 1.0);
            assert!((phi_a(2.0 * theta, theta) + 1.0).abs() < 1e-14);
        }
        assert_eq!(phi_a(1.0, 1.0), -0.5);
        assert!((phi_b(c(0.0, 0.0), 0.25, 0.0) - c(1.0, 0.0)).norm() < 1e-14);
        // ω = 0 for the θ = 1 - ½√2 pair makes φ_B vanish identically
        let theta = 1.0 - 0.5 * S2;
        let nu = 2.0 * theta - 0.5;
        for z0 in [c(0.0, 0.0), c(-3.0, 2.0)] {
            assert!(phi_b(z0, theta, nu).norm() < 1e-15);
        }
    }

    #[test]
    fn stiff_limit_of_r_b_is_phi_b() {
        let (theta, nu) = (0.3, 0.55);
        for z0 in [c(-0.5, 0.2), c(-1.5, -1.0)] {
            let r = eval_r_b(&q(&[z0, c(-1e8, 0.0)], theta, nu)).unwrap();
            assert!((r - phi_b(z0, theta, nu)).norm() < 1e-6);
        }
    }

    #[test]
    fn multisets_are_enumerated_once() {
        let mut count = 0;
        for_each_multiset(5, 3, |idx| {
            assert!(idx.windows(2).all(|w| w[0] <= w[1]));
            count += 1;
        });
        assert_eq!(count, 35);
        let mut empty = 0;
        for_each_multiset(5, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn boundary_points_follow_alpha() {
        let w = WedgeSpec::with_radii(0.0, vec![1.0, 2.0]);
        assert_eq!(
            w.boundary_points(),
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0)]
        );
        let w = WedgeSpec::with_radii(PI / 2.0, vec![1.0]);
        let pts = w.boundary_points();
        assert_eq!(pts.len(), 3);
        assert!((pts[1] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((pts[2] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(WedgeSampler::new(
            StabilityParams::new(SchemeKind::A, 0.5, 0.5, 1),
            &WedgeSpec::new(2.0)
        )
        .is_err());
    }

    #[test]
    fn psi_examples() {
        let wedge = WedgeSpec::new(0.0);
        for theta in [0.25, 0.5, 1.0] {
            for s in 1..=3 {
                let w = WedgeSpec::for_implicit_count(0.0, s);
                let p = psi_alpha(c(0.0, 0.0), SchemeKind::A, theta, theta, s, &w).unwrap();
                assert!(p <= 1.0 + 1e-9, "theta {theta} s {s}: {p}");
            }
        }
        let p = psi_alpha(c(-0.1, 0.0), SchemeKind::B, 0.5, 0.5, 2, &wedge).unwrap();
        assert!(p > 1.0);
        let half_plane = WedgeSpec::new(PI / 2.0);
        for z0 in [c(-1.0, 0.5), c(-0.5, -1.0), c(-1.9, 0.0)] {
            assert!(eval_r_expl_a(z0).norm() <= 1.0);
            let p = psi_alpha(z0, SchemeKind::A, 0.5, 0.5, 1, &half_plane).unwrap();
            assert!(p <= 1.0 + 1e-9, "{z0}: {p}");
        }
    }

    #[test]
    fn raster_output_formats() {
        let r = raster_domain(
            StabilityParams::new(SchemeKind::A, 0.5, 0.5, 1),
            0.0,
            Window::default(),
            (2, 2),
        )
        .unwrap();
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("re,im,psi,member\n-3.5,2,"));
        let mut pgm = Vec::new();
        r.write_pgm(&mut pgm).unwrap();
        assert_eq!(&pgm[..11], b"P5\n2 2\n255\n");
        assert_eq!(pgm.len(), 11 + 4);
        assert!(raster_domain(
            StabilityParams::new(SchemeKind::A, 0.5, 0.5, 1),
            0.0,
            Window::default(),
            (1, 5)
        )
        .is_err());
    }

    #[test]
    fn window_parsing() {
        let w: Window = "-5,1,-4,4".parse().unwrap();
        assert_eq!(w, Window::default());
        assert!("1,-5,-4,4".parse::<Window>().is_err());
        assert!("1,2,3".parse::<Window>().is_err());
    }
}
