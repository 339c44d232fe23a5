//! Schnakenberg reaction-diffusion benchmark on the unit square.
//!
//! ```text
//! u_t = D1 Δu + κ(a - u + u²v)
//! v_t = D2 Δv + κ(b - u²v)
//! ```
//!
//! Cell-centered `m×m` grid, homogeneous Neumann boundaries via mirror ghost
//! cells. State layout: all `u` values, then all `v` values, each row-major
//! with index `iy·m + ix` (rows run along x).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stepper::{integrate_with, NamedScheme, Outcome, SplitSystem, StageFailure, StepError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchnakenbergParams {
    pub d1: f64,
    pub d2: f64,
    /// Reaction rate.
    pub kappa_r: f64,
    pub a: f64,
    pub b: f64,
    /// Final time.
    pub t_final: f64,
    /// Amplitude of the Gaussian bump added to the steady state.
    pub perturbation: f64,
}

impl Default for SchnakenbergParams {
    fn default() -> Self {
        SchnakenbergParams {
            d1: 0.05,
            d2: 1.0,
            kappa_r: 100.0,
            a: 0.1305,
            b: 0.7695,
            t_final: 1.0,
            perturbation: 1e-3,
        }
    }
}

impl SchnakenbergParams {
    /// Homogeneous chemical steady state `(a + b, b/(a + b)²)`.
    pub fn steady_state(&self) -> (f64, f64) {
        let s = self.a + self.b;
        (s, self.b / (s * s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid2D {
    /// Cells per dimension.
    pub m: usize,
}

impl Grid2D {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "grid needs at least one cell");
        Grid2D { m }
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn cells(&self) -> usize {
        self.m * self.m
    }

    /// Length of the full two-species state.
    pub fn state_len(&self) -> usize {
        2 * self.cells()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.m + ix
    }

    pub fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let h = self.h();
        ((ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Full,
    X,
    Y,
}

/// How the diffusion operator is split among implicit terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitMode {
    /// `F1` = full 2D diffusion.
    #[serde(rename = "s1")]
    S1,
    /// `F1` = x-diffusion, `F2` = y-diffusion.
    #[serde(rename = "s2")]
    S2,
}

impl SplitMode {
    pub fn implicit_count(self) -> usize {
        match self {
            SplitMode::S1 => 1,
            SplitMode::S2 => 2,
        }
    }

    pub fn direction(self, j: usize) -> Direction {
        match (self, j) {
            (SplitMode::S1, 1) => Direction::Full,
            (SplitMode::S2, 1) => Direction::X,
            (SplitMode::S2, 2) => Direction::Y,
            _ => panic!("no implicit component {j} for split {self}"),
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitMode::S1 => f.write_str("s1"),
            SplitMode::S2 => f.write_str("s2"),
        }
    }
}

impl FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s1" | "1" => Ok(SplitMode::S1),
            "s2" | "2" => Ok(SplitMode::S2),
            _ => Err(format!("unknown split `{s}` (expected s1 or s2)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("state length {got} does not match grid ({expected})")]
    Shape { expected: usize, got: usize },
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("gamma must be non-negative and finite, got {0}")]
    InvalidGamma(f64),
    #[error("output time {0} is not a whole number of steps of size {1}")]
    OutputTime(f64, f64),
    #[error("no reference state for output time {0}")]
    MissingReference(f64),
    #[error("reference run diverged at step {0}")]
    ReferenceDiverged(usize),
    #[error(transparent)]
    Step(#[from] StepError),
}

fn check_len(grid: &Grid2D, state: &[f64]) -> Result<(), BenchmarkError> {
    if state.len() == grid.state_len() {
        Ok(())
    } else {
        Err(BenchmarkError::Shape {
            expected: grid.state_len(),
            got: state.len(),
        })
    }
}

fn reaction_into(p: &SchnakenbergParams, state: &[f64], out: &mut [f64]) {
    let n = state.len() / 2;
    let (u, v) = state.split_at(n);
    let (fu, fv) = out.split_at_mut(n);
    for i in 0..n {
        let uuv = u[i] * u[i] * v[i];
        fu[i] = p.kappa_r * (p.a - u[i] + uuv);
        fv[i] = p.kappa_r * (p.b - uuv);
    }
}

/// Pointwise reaction terms.
pub fn reaction_rhs(params: &SchnakenbergParams, state: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; state.len()];
    reaction_into(params, state, &mut out);
    out
}

/// `Σ (u_nb - u_i)` over the x-neighbors of each cell of one species field;
/// missing neighbors are mirror ghosts and contribute zero.
fn lap_x(m: usize, f: &[f64], out: &mut [f64]) {
    for iy in 0..m {
        let row = &f[iy * m..(iy + 1) * m];
        let o = &mut out[iy * m..(iy + 1) * m];
        for ix in 0..m {
            let c = row[ix];
            let mut acc = 0.0;
            if ix > 0 {
                acc += row[ix - 1] - c;
            }
            if ix + 1 < m {
                acc += row[ix + 1] - c;
            }
            o[ix] = acc;
        }
    }
}

fn lap_y(m: usize, f: &[f64], out: &mut [f64]) {
    for iy in 0..m {
        for ix in 0..m {
            let k = iy * m + ix;
            let c = f[k];
            let mut acc = 0.0;
            if iy > 0 {
                acc += f[k - m] - c;
            }
            if iy + 1 < m {
                acc += f[k + m] - c;
            }
            out[k] = acc;
        }
    }
}

/// Unscaled Laplacian stencil of one species field in `dir`.
fn lap_dir(m: usize, dir: Direction, f: &[f64], out: &mut [f64]) {
    match dir {
        Direction::X => lap_x(m, f, out),
        Direction::Y => lap_y(m, f, out),
        Direction::Full => {
            let mut tmp = vec![0.0; f.len()];
            lap_x(m, f, out);
            lap_y(m, f, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t;
            }
        }
    }
}

fn diffusion_into(
    p: &SchnakenbergParams,
    grid: &Grid2D,
    state: &[f64],
    dir: Direction,
    out: &mut [f64],
) {
    let m = grid.m;
    let n = grid.cells();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    for (species, d) in [(0, p.d1), (1, p.d2)] {
        let f = &state[species * n..(species + 1) * n];
        let o = &mut out[species * n..(species + 1) * n];
        match dir {
            Direction::Full => {
                let mut ly = vec![0.0; n];
                lap_x(m, f, o);
                lap_y(m, f, &mut ly);
                for (ox, y) in o.iter_mut().zip(&ly) {
                    *ox = d * inv_h2 * *ox + d * inv_h2 * y;
                }
            }
            _ => {
                lap_dir(m, dir, f, o);
                for x in o.iter_mut() {
                    *x *= d * inv_h2;
                }
            }
        }
    }
}

/// Second-order diffusion terms in the requested direction(s);
/// `Full` is exactly `X + Y`.
pub fn diffusion_rhs(
    params: &SchnakenbergParams,
    grid: &Grid2D,
    state: &[f64],
    dir: Direction,
) -> Result<Vec<f64>, BenchmarkError> {
    check_len(grid, state)?;
    let mut out = vec![0.0; state.len()];
    diffusion_into(params, grid, state, dir, &mut out);
    Ok(out)
}

/// Full semi-discrete right-hand side, unsplit.
pub fn full_rhs(
    params: &SchnakenbergParams,
    grid: &Grid2D,
    state: &[f64],
) -> Result<Vec<f64>, BenchmarkError> {
    let mut out = diffusion_rhs(params, grid, state, Direction::Full)?;
    let r = reaction_rhs(params, state);
    for (o, x) in out.iter_mut().zip(&r) {
        *o += x;
    }
    Ok(out)
}

/// LU factors of the constant-coefficient 1D matrix `I - c·L1` with Neumann
/// closure (`c = γD/h²`): super-diagonal multipliers and inverse pivots.
struct Tridiag {
    c: f64,
    cp: Vec<f64>,
    inv_den: Vec<f64>,
}

impl Tridiag {
    fn new(m: usize, c: f64) -> Self {
        let diag = |i: usize| {
            let nbs = usize::from(i > 0) + usize::from(i + 1 < m);
            1.0 + c * nbs as f64
        };
        let mut cp = vec![0.0; m];
        let mut inv_den = vec![0.0; m];
        for i in 0..m {
            // off-diagonals are -c
            let den = diag(i) + if i > 0 { c * cp[i - 1] } else { 0.0 };
            inv_den[i] = 1.0 / den;
            cp[i] = if i + 1 < m { -c * inv_den[i] } else { 0.0 };
        }
        Tridiag { c, cp, inv_den }
    }

    /// Solves every x-line of an `m×m` field in place.
    fn solve_rows(&self, m: usize, f: &mut [f64]) {
        for row in f.chunks_exact_mut(m) {
            row[0] *= self.inv_den[0];
            for i in 1..m {
                row[i] = (row[i] + self.c * row[i - 1]) * self.inv_den[i];
            }
            for i in (0..m - 1).rev() {
                row[i] -= self.cp[i] * row[i + 1];
            }
        }
    }

    /// Solves every y-line in place, sweeping whole rows at a time.
    fn solve_columns(&self, m: usize, f: &mut [f64]) {
        for v in &mut f[..m] {
            *v *= self.inv_den[0];
        }
        for iy in 1..m {
            let (prev, cur) = f.split_at_mut(iy * m);
            let prev = &prev[(iy - 1) * m..];
            let cur = &mut cur[..m];
            let (c, d) = (self.c, self.inv_den[iy]);
            for ix in 0..m {
                cur[ix] = (cur[ix] + c * prev[ix]) * d;
            }
        }
        for iy in (0..m - 1).rev() {
            let (cur, next) = f.split_at_mut((iy + 1) * m);
            let cur = &mut cur[iy * m..];
            let next = &next[..m];
            let cpi = self.cp[iy];
            for ix in 0..m {
                cur[ix] -= cpi * next[ix];
            }
        }
    }
}

/// Relative residual target and iteration cap (per grid line) for the 2D
/// conjugate gradient solve.
pub const CG_TOL: f64 = 1e-12;
pub const CG_ITER_PER_LINE: usize = 10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `out = y - c·lap(y)`, the SPD operator `I - γD·L2D` scaled by `h²`-free
/// coefficient `c = γD/h²`.
fn apply_full(m: usize, c: f64, y: &[f64], out: &mut [f64]) {
    for iy in 0..m {
        for ix in 0..m {
            let k = iy * m + ix;
            let v = y[k];
            let mut acc = 0.0;
            if ix > 0 {
                acc += y[k - 1] - v;
            }
            if ix + 1 < m {
                acc += y[k + 1] - v;
            }
            if iy > 0 {
                acc += y[k - m] - v;
            }
            if iy + 1 < m {
                acc += y[k + m] - v;
            }
            out[k] = v - c * acc;
        }
    }
}

/// Conjugate gradients for `(I - c·lap) y = b`, stopping at
/// `‖b - Ay‖ ≤ CG_TOL·scale`.
fn cg_full(m: usize, c: f64, b: &[f64], scale: f64) -> Result<Vec<f64>, BenchmarkError> {
    let n = b.len();
    let mut y = vec![0.0; n];
    let target = CG_TOL * scale;
    let mut r = b.to_vec();
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= target {
        return Ok(y);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let cap = CG_ITER_PER_LINE * m;
    for _ in 0..cap {
        apply_full(m, c, &p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            return Ok(y);
        }
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Err(BenchmarkError::NoConvergence {
        iterations: cap,
        residual: rr.sqrt() / scale,
    })
}

/// Solves `(I - γ·L_dir) x = rhs`, each species with its own diffusion
/// coefficient. Line-wise Thomas for `X`/`Y`, conjugate gradients for `Full`.
///
/// The solve runs on the increment `y = x - rhs`, which satisfies
/// `(I - γL) y = γL·rhs`; fields with `L·rhs = 0` (constants) come back
/// unchanged bit for bit.
pub fn solve_implicit_diffusion(
    params: &SchnakenbergParams,
    grid: &Grid2D,
    rhs: &[f64],
    gamma: f64,
    dir: Direction,
) -> Result<Vec<f64>, BenchmarkError> {
    check_len(grid, rhs)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(BenchmarkError::InvalidGamma(gamma));
    }
    let m = grid.m;
    let n = grid.cells();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut x = rhs.to_vec();
    for (species, d) in [(0, params.d1), (1, params.d2)] {
        let f = &rhs[species * n..(species + 1) * n];
        let c = gamma * d * inv_h2;
        let mut inc = vec![0.0; n];
        lap_dir(m, dir, f, &mut inc);
        for v in inc.iter_mut() {
            *v *= c;
        }
        let inc = match dir {
            Direction::X => {
                Tridiag::new(m, c).solve_rows(m, &mut inc);
                inc
            }
            Direction::Y => {
                Tridiag::new(m, c).solve_columns(m, &mut inc);
                inc
            }
            Direction::Full => {
                let scale = dot(f, f).sqrt();
                if scale == 0.0 {
                    continue;
                }
                cg_full(m, c, &inc, scale)?
            }
        };
        for (xi, yi) in x[species * n..(species + 1) * n].iter_mut().zip(&inc) {
            *xi += yi;
        }
    }
    Ok(x)
}

/// Steady state plus a Gaussian bump centred at `(¼, ⅙)` in `u`.
pub fn initial_condition(params: &SchnakenbergParams, grid: &Grid2D) -> Vec<f64> {
    let (us, vs) = params.steady_state();
    let n = grid.cells();
    let mut state = vec![vs; 2 * n];
    for iy in 0..grid.m {
        for ix in 0..grid.m {
            let (x, y) = grid.center(ix, iy);
            let r2 = (x - 0.25).powi(2) + (y - 1.0 / 6.0).powi(2);
            state[grid.index(ix, iy)] = us + params.perturbation * (-100.0 * r2).exp();
        }
    }
    state
}

/// Grid-weighted `L2` norm of the `u`-component difference,
/// `sqrt(h² Σ (u - u_ref)²)`.
pub fn l2_error(state: &[f64], reference: &[f64], grid: &Grid2D) -> Result<f64, BenchmarkError> {
    check_len(grid, state)?;
    check_len(grid, reference)?;
    let n = grid.cells();
    let h = grid.h();
    let sum: f64 = state[..n]
        .iter()
        .zip(&reference[..n])
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((h * h * sum).sqrt())
}

/// The semi-discrete Schnakenberg system with reaction explicit and
/// diffusion split according to `split`.
#[derive(Debug, Clone)]
pub struct SchnakenbergSystem {
    pub params: SchnakenbergParams,
    pub grid: Grid2D,
    pub split: SplitMode,
}

impl SchnakenbergSystem {
    pub fn new(params: SchnakenbergParams, grid: Grid2D, split: SplitMode) -> Self {
        SchnakenbergSystem {
            params,
            grid,
            split,
        }
    }
}

impl SplitSystem for SchnakenbergSystem {
    fn dimension(&self) -> usize {
        self.grid.state_len()
    }

    fn implicit_count(&self) -> usize {
        self.split.implicit_count()
    }

    fn eval_component(&self, j: usize, _t: f64, u: &[f64], out: &mut [f64]) {
        if j == 0 {
            reaction_into(&self.params, u, out);
        } else {
            diffusion_into(&self.params, &self.grid, u, self.split.direction(j), out);
        }
    }

    fn solve_implicit_stage(
        &self,
        j: usize,
        _t: f64,
        rhs: &[f64],
        gamma: f64,
    ) -> Result<Vec<f64>, StageFailure> {
        solve_implicit_diffusion(
            &self.params,
            &self.grid,
            rhs,
            gamma,
            self.split.direction(j),
        )
        .map_err(|e| StageFailure {
            residual: match e {
                BenchmarkError::NoConvergence { residual, .. } => residual,
                _ => f64::NAN,
            },
            message: e.to_string(),
        })
    }

    fn stage_tolerance(&self) -> f64 {
        match self.split {
            SplitMode::S1 => CG_TOL,
            SplitMode::S2 => f64::EPSILON,
        }
    }
}

/// Step count for index `j ≥ 1`: `50·2^{(j-1)/2}` rounded to the nearest
/// even integer.
pub fn step_count(j: u32) -> usize {
    let x = 50.0 * 2f64.powf((j as f64 - 1.0) / 2.0);
    2 * (x / 2.0).round() as usize
}

/// Step index at which time `t` is reached with `n_per_unit` steps per unit
/// time.
fn steps_to(t: f64, n_per_unit: usize) -> Result<usize, BenchmarkError> {
    let k = t * n_per_unit as f64;
    let r = k.round();
    if (k - r).abs() > 1e-9 * k.max(1.0) || r < 1.0 {
        return Err(BenchmarkError::OutputTime(t, 1.0 / n_per_unit as f64));
    }
    Ok(r as usize)
}

/// States at the requested output times, or the step at which the run
/// diverged (later times are then missing).
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshots {
    pub states: Vec<(f64, Vec<f64>)>,
    pub diverged_at: Option<usize>,
}

/// Integrates from `u0` at `t = 0` with `Δt = 1/n_per_unit`, keeping the
/// states at `output_times`.
pub fn run_to_times(
    scheme: NamedScheme,
    sys: &SchnakenbergSystem,
    u0: &[f64],
    n_per_unit: usize,
    output_times: &[f64],
) -> Result<Snapshots, BenchmarkError> {
    let targets: Vec<(usize, f64)> = output_times
        .iter()
        .map(|&t| steps_to(t, n_per_unit).map(|k| (k, t)))
        .collect::<Result<_, _>>()?;
    let total = targets.iter().map(|(k, _)| *k).max().unwrap_or(0);
    if total == 0 {
        return Ok(Snapshots {
            states: vec![],
            diverged_at: None,
        });
    }
    let spec = scheme.spec();
    let dt = 1.0 / n_per_unit as f64;
    let mut states = Vec::new();
    let (_, outcome) = integrate_with(&spec, sys, 0.0, u0, dt, total, false, |k, rec| {
        for &(kt, t) in &targets {
            if kt == k {
                states.push((t, rec.u.clone()));
            }
        }
    })?;
    let diverged_at = match outcome {
        Outcome::Completed => None,
        Outcome::Diverged { step } => Some(step),
    };
    Ok(Snapshots {
        states,
        diverged_at,
    })
}

/// Number of reference steps per unit time.
pub const REFERENCE_STEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub m: usize,
    pub n_per_unit: usize,
    pub states: Vec<(f64, Vec<f64>)>,
}

impl Reference {
    pub fn at(&self, t: f64) -> Option<&[f64]> {
        self.states
            .iter()
            .find(|(rt, _)| (rt - t).abs() < 1e-12)
            .map(|(_, s)| s.as_slice())
    }
}

/// Reference states with SCM-A1, full 2D diffusion implicit, on the same
/// spatial grid.
pub fn reference_solution(
    grid: &Grid2D,
    params: &SchnakenbergParams,
    output_times: &[f64],
) -> Result<Reference, BenchmarkError> {
    reference_solution_with(grid, params, output_times, REFERENCE_STEPS)
}

pub fn reference_solution_with(
    grid: &Grid2D,
    params: &SchnakenbergParams,
    output_times: &[f64],
    n_per_unit: usize,
) -> Result<Reference, BenchmarkError> {
    let sys = SchnakenbergSystem::new(*params, *grid, SplitMode::S1);
    let u0 = initial_condition(params, grid);
    let snaps = run_to_times(NamedScheme::ScmA1, &sys, &u0, n_per_unit, output_times)?;
    if let Some(step) = snaps.diverged_at {
        return Err(BenchmarkError::ReferenceDiverged(step));
    }
    Ok(Reference {
        m: grid.m,
        n_per_unit,
        states: snaps.states,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "UNSTABLE")]
    Unstable,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Ok => f.write_str("OK"),
            RunStatus::Unstable => f.write_str("UNSTABLE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub scheme: NamedScheme,
    pub split: SplitMode,
    pub t: f64,
    pub n: usize,
    /// `None` when unstable.
    pub error: Option<f64>,
    pub status: RunStatus,
}

impl ErrorRow {
    pub fn dt(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Stability status per output time without computing errors.
pub fn stability_rows(
    scheme: NamedScheme,
    split: SplitMode,
    grid: &Grid2D,
    params: &SchnakenbergParams,
    step_indices: impl IntoIterator<Item = u32>,
    output_times: &[f64],
) -> Result<Vec<ErrorRow>, BenchmarkError> {
    experiment_rows(
        scheme,
        split,
        grid,
        params,
        step_indices,
        output_times,
        None,
    )
}

/// Errors against `reference` for `Δt = 1/N_j`, `j` in `step_indices`.
pub fn run_experiment(
    scheme: NamedScheme,
    split: SplitMode,
    grid: &Grid2D,
    params: &SchnakenbergParams,
    step_indices: impl IntoIterator<Item = u32>,
    output_times: &[f64],
    reference: &Reference,
) -> Result<Vec<ErrorRow>, BenchmarkError> {
    for &t in output_times {
        if reference.at(t).is_none() {
            return Err(BenchmarkError::MissingReference(t));
        }
    }
    experiment_rows(
        scheme,
        split,
        grid,
        params,
        step_indices,
        output_times,
        Some(reference),
    )
}

fn experiment_rows(
    scheme: NamedScheme,
    split: SplitMode,
    grid: &Grid2D,
    params: &SchnakenbergParams,
    step_indices: impl IntoIterator<Item = u32>,
    output_times: &[f64],
    reference: Option<&Reference>,
) -> Result<Vec<ErrorRow>, BenchmarkError> {
    let sys = SchnakenbergSystem::new(*params, *grid, split);
    let u0 = initial_condition(params, grid);
    let mut rows = Vec::new();
    for j in step_indices {
        let n = step_count(j);
        let snaps = run_to_times(scheme, &sys, &u0, n, output_times)?;
        for &t in output_times {
            let state = snaps.states.iter().find(|(st, _)| *st == t);
            let row = match state {
                Some((_, u)) => {
                    let error = match reference {
                        Some(r) => {
                            let ur = r.at(t).ok_or(BenchmarkError::MissingReference(t))?;
                            Some(l2_error(u, ur, grid)?)
                        }
                        None => None,
                    };
                    ErrorRow {
                        scheme,
                        split,
                        t,
                        n,
                        error,
                        status: RunStatus::Ok,
                    }
                }
                None => ErrorRow {
                    scheme,
                    split,
                    t,
                    n,
                    error: None,
                    status: RunStatus::Unstable,
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Writes the error table with header `scheme,split,T,dt,N,error,status`.
pub fn write_error_table<W: std::io::Write>(rows: &[ErrorRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "split", "T", "dt", "N", "error", "status"])?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            r.split.to_string(),
            r.t.to_string(),
            r.dt().to_string(),
            r.n.to_string(),
            r.error.map(|e| format!("{e:e}")).unwrap_or_default(),
            r.status.to_string(),
        ])?;
    }
    w.flush()
}

/// Writes `t,x,y,u,v` rows for each snapshot, and a final
/// `UNSTABLE,<step>,,,` marker when the run diverged.
pub fn write_fields_csv<W: std::io::Write>(
    grid: &Grid2D,
    snaps: &Snapshots,
    out: W,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "u", "v"])?;
    let n = grid.cells();
    for (t, state) in &snaps.states {
        for iy in 0..grid.m {
            for ix in 0..grid.m {
                let (x, y) = grid.center(ix, iy);
                let k = grid.index(ix, iy);
                w.write_record([
                    t.to_string(),
                    x.to_string(),
                    y.to_string(),
                    state[k].to_string(),
                    state[n + k].to_string(),
                ])?;
            }
        }
    }
    if let Some(step) = snaps.diverged_at {
        w.write_record(["UNSTABLE", &step.to_string(), "", "", ""])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SchnakenbergParams {
        SchnakenbergParams::default()
    }

    #[test]
    fn reaction_examples() {
        let p = params();
        let g = Grid2D::new(3);
        let n = g.cells();
        let mut s = vec![0.90; 2 * n];
        s[n..].fill(0.95);
        assert!(reaction_rhs(&p, &s).iter().all(|x| x.abs() < 1e-12));

        let r = reaction_rhs(&p, &vec![0.0; 2 * n]);
        assert!(r[..n].iter().all(|&x| (x - 13.05).abs() < 1e-12));
        assert!(r[n..].iter().all(|&x| (x - 76.95).abs() < 1e-12));

        let q = SchnakenbergParams {
            a: 0.0,
            b: 0.0,
            ..p
        };
        let r = reaction_rhs(&q, &vec![1.0; 2 * n]);
        assert!(r[..n].iter().all(|&x| x == 0.0));
        assert!(r[n..].iter().all(|&x| x == -100.0));
    }

    #[test]
    fn steady_state_values() {
        let (u, v) = params().steady_state();
        assert!((u - 0.9).abs() < 1e-15);
        assert!((v - 0.95).abs() < 1e-15);
    }

    #[test]
    fn diffusion_of_constant_vanishes() {
        let g = Grid2D::new(5);
        let s = vec![0.3; g.state_len()];
        for dir in [Direction::Full, Direction::X, Direction::Y] {
            assert!(diffusion_rhs(&params(), &g, &s, dir)
                .unwrap()
                .iter()
                .all(|&x| x == 0.0));
        }
    }

    #[test]
    fn linear_profile_boundary_rows() {
        // u = x at m = 4: interior second differences vanish, the mirror
        // closure gives ±h/h² at the two boundary columns
        let g = Grid2D::new(4);
        let p = SchnakenbergParams {
            d1: 1.0,
            d2: 1.0,
            ..params()
        };
        let mut s = vec![0.0; g.state_len()];
        for iy in 0..4 {
            for ix in 0..4 {
                s[g.index(ix, iy)] = g.center(ix, iy).0;
            }
        }
        let d = diffusion_rhs(&p, &g, &s, Direction::X).unwrap();
        for iy in 0..4 {
            assert!((d[g.index(0, iy)] - 4.0).abs() < 1e-12);
            assert!(d[g.index(1, iy)].abs() < 1e-12);
            assert!(d[g.index(2, iy)].abs() < 1e-12);
            assert!((d[g.index(3, iy)] + 4.0).abs() < 1e-12);
        }
        let dy = diffusion_rhs(&p, &g, &s, Direction::Y).unwrap();
        assert!(dy.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn cosine_modes_are_eigenvectors() {
        let m = 8;
        let g = Grid2D::new(m);
        let h = g.h();
        let p = SchnakenbergParams {
            d1: 1.0,
            d2: 1.0,
            ..params()
        };
        for k in 0..m {
            let mut s = vec![0.0; g.state_len()];
            for iy in 0..m {
                for ix in 0..m {
                    let x = g.center(ix, iy).0;
                    s[g.index(ix, iy)] = (std::f64::consts::PI * k as f64 * x).cos();
                }
            }
            let lam = -4.0 / (h * h) * (std::f64::consts::PI * k as f64 * h / 2.0).sin().powi(2);
            let d = diffusion_rhs(&p, &g, &s, Direction::X).unwrap();
            for i in 0..g.cells() {
                assert!(
                    (d[i] - lam * s[i]).abs() < 1e-10 * (1.0 + lam.abs()),
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn full_is_x_plus_y() {
        let g = Grid2D::new(6);
        let s: Vec<f64> = (0..g.state_len())
            .map(|i| ((i * 7919) % 101) as f64 / 101.0)
            .collect();
        let f = diffusion_rhs(&params(), &g, &s, Direction::Full).unwrap();
        let x = diffusion_rhs(&params(), &g, &s, Direction::X).unwrap();
        let y = diffusion_rhs(&params(), &g, &s, Direction::Y).unwrap();
        for i in 0..s.len() {
            assert_eq!(f[i], x[i] + y[i]);
        }
    }

    #[test]
    fn solver_edge_cases() {
        let g = Grid2D::new(6);
        let s: Vec<f64> = (0..g.state_len())
            .map(|i| 2.0 + (i as f64 * 0.37).sin())
            .collect();
        for dir in [Direction::Full, Direction::X, Direction::Y] {
            let x = solve_implicit_diffusion(&params(), &g, &s, 1e-300, dir).unwrap();
            assert_eq!(x, s);
            let c = vec![0.42; g.state_len()];
            assert_eq!(
                solve_implicit_diffusion(&params(), &g, &c, 0.1, dir).unwrap(),
                c
            );
        }
        assert!(solve_implicit_diffusion(&params(), &g, &s, -1.0, Direction::X).is_err());
        assert!(solve_implicit_diffusion(&params(), &g, &s[1..], 0.1, Direction::X).is_err());
    }

    #[test]
    fn cg_converges_and_reports_failure() {
        let g = Grid2D::new(40);
        let s: Vec<f64> = (0..g.state_len()).map(|i| ((i * 31) % 17) as f64).collect();
        let x = solve_implicit_diffusion(&params(), &g, &s, 1e-2, Direction::Full).unwrap();
        // residual of (I - γD·L) x = s for the u-species
        let n = g.cells();
        let d = diffusion_rhs(&params(), &g, &x, Direction::Full).unwrap();
        let res: f64 = (0..n)
            .map(|i| (x[i] - 1e-2 * d[i] - s[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = s[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res <= 1e-11 * norm);

        // an unreachable target exhausts the 10·m iteration cap
        let b: Vec<f64> = s[..n].to_vec();
        match cg_full(40, 1e6, &b, 1e-20) {
            Err(BenchmarkError::NoConvergence { iterations, .. }) => assert_eq!(iterations, 400),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn initial_condition_values() {
        let g = Grid2D::new(100);
        let u0 = initial_condition(&params(), &g);
        let n = g.cells();
        // nearest center to (1/4, 1/6) is (0.245, 0.165)
        let k = g.index(24, 16);
        let expected =
            0.9 + 1e-3 * (-100.0f64 * (0.005f64.powi(2) + (0.165f64 - 1.0 / 6.0).powi(2))).exp();
        assert!((u0[k] - expected).abs() < 1e-15);
        assert!((u0[k] - 0.901).abs() < 1e-5);
        let corner = g.index(99, 99);
        assert!((u0[corner] - 0.9).abs() < 1e-15);
        assert!(u0[n..].iter().all(|&v| (v - 0.95).abs() < 1e-15));
    }

    #[test]
    fn l2_error_examples() {
        let g = Grid2D::new(100);
        let r = initial_condition(&params(), &g);
        assert_eq!(l2_error(&r, &r, &g).unwrap(), 0.0);
        let mut s = r.clone();
        for x in &mut s[..g.cells()] {
            *x += 0.25;
        }
        assert!((l2_error(&s, &r, &g).unwrap() - 0.25).abs() < 1e-12);
        let mut s = r.clone();
        s[17] += 0.5;
        assert!((l2_error(&s, &r, &g).unwrap() - 0.005).abs() < 1e-15);
        // v differences are ignored
        let mut s = r.clone();
        s[g.cells() + 3] += 1.0;
        assert_eq!(l2_error(&s, &r, &g).unwrap(), 0.0);
        assert!(l2_error(&s[1..], &r, &g).is_err());
    }

    #[test]
    fn step_counts() {
        let n: Vec<usize> = (1..=14).map(step_count).collect();
        // nearest even integers to 50·2^{(j-1)/2}, computed by hand:
        // 70.71→70, 141.42→142, 282.84→282, 565.69→566, 1131.37→1132,
        // 2262.74→2262, 4525.48→4526
        assert_eq!(
            n,
            [50, 70, 100, 142, 200, 282, 400, 566, 800, 1132, 1600, 2262, 3200, 4526]
        );
    }

    #[test]
    fn output_times_must_be_whole_steps() {
        assert_eq!(steps_to(0.5, 70).unwrap(), 35);
        assert!(steps_to(0.5, 71).is_err());
        assert!(steps_to(0.0, 50).is_err());
    }

    #[test]
    fn split_sums_match_unsplit() {
        let g = Grid2D::new(7);
        let p = params();
        let s: Vec<f64> = (0..g.state_len())
            .map(|i| 0.9 + 0.1 * (i as f64).cos())
            .collect();
        let full = full_rhs(&p, &g, &s).unwrap();
        for split in [SplitMode::S1, SplitMode::S2] {
            let sys = SchnakenbergSystem::new(p, g, split);
            let mut acc = vec![0.0; s.len()];
            let mut part = vec![0.0; s.len()];
            for j in 0..=sys.implicit_count() {
                sys.eval_component(j, 0.0, &s, &mut part);
                for (a, b) in acc.iter_mut().zip(&part) {
                    *a += b;
                }
            }
            let scale = full.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..s.len() {
                assert!((acc[i] - full[i]).abs() <= 1e-13 * scale);
            }
        }
    }
}
