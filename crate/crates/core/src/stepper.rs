//! Stabilizing-correction time stepping for split systems
//! `F = F0 + F1 + ... + Fs`.
//!
//! `F0` is always treated explicitly. Each implicit component `Fj` gets one
//! correction stage per internal time level, of the fixed form
//! `x = rhs + θΔt·Fj(t, x)`, which the [`SplitSystem`] solves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tableau::{
    build_example1, build_example3, correction_coefficients, CorrectionCoefficients, PairKind,
    RkPair, TableauError, ORDER_TOL,
};

/// Failure reported by a system's implicit stage solver.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} (residual {residual:e})")]
pub struct StageFailure {
    pub message: String,
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("implicit solve failed at stage {stage}, component {component}: {source}")]
    StageSolve {
        stage: usize,
        component: usize,
        #[source]
        source: StageFailure,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("state has length {got}, system dimension is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("scheme is type {method} but the step operation requires type {required}")]
    WrongMethod {
        method: MethodType,
        required: MethodType,
    },
    #[error("check coefficients violate row-sum matching in stage {stage}: residual {residual:e}")]
    RowSum { stage: usize, residual: f64 },
    #[error("invalid scheme: {0}")]
    Scheme(#[from] TableauError),
    #[error("{0}")]
    Incompatible(String),
}

/// An ODE right-hand side split into an explicit part and `s` implicit parts.
///
/// Component `0` is the explicit term; `1..=s` are treated implicitly.
/// Implementations that are `Sync` may be shared between concurrently running
/// trajectories.
pub trait SplitSystem {
    fn dimension(&self) -> usize;

    /// Number `s` of implicitly treated components.
    fn implicit_count(&self) -> usize;

    /// Writes `F_j(t, u)` into `out`.
    fn eval_component(&self, j: usize, t: f64, u: &[f64], out: &mut [f64]);

    /// Returns `x` with `x = rhs + gamma·F_j(t, x)`, `j >= 1`.
    fn solve_implicit_stage(
        &self,
        j: usize,
        t: f64,
        rhs: &[f64],
        gamma: f64,
    ) -> Result<Vec<f64>, StageFailure>;

    /// Weight vector `h` with `hᵀF(t, v) = 0` for all `v`, if known.
    fn invariant_weights(&self) -> Option<&[f64]> {
        None
    }

    /// Relative accuracy of [`SplitSystem::solve_implicit_stage`].
    fn stage_tolerance(&self) -> f64 {
        f64::EPSILON
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodType {
    /// Output is the last correction stage `w_s`.
    TypeA,
    /// Appends a finishing stage with the whole `F`; conserves linear invariants.
    TypeB,
}

impl fmt::Display for MethodType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodType::TypeA => f.write_str("A"),
            MethodType::TypeB => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub pair: RkPair,
    pub coeffs: CorrectionCoefficients,
    pub method: MethodType,
}

impl SchemeSpec {
    /// Type-A needs the two-stage explicit order conditions, so only
    /// [`PairKind::TypeA`] pairs qualify. Type-B only needs the finishing
    /// weights, which every valid pair carries.
    pub fn new(pair: RkPair, method: MethodType) -> Result<Self, StepError> {
        pair.validate()?;
        if method == MethodType::TypeA && pair.kind != PairKind::TypeA {
            return Err(StepError::Incompatible(
                "a type-A method needs a type-A pair (two-stage explicit method of order two)"
                    .into(),
            ));
        }
        let coeffs = correction_coefficients(&pair)?;
        Ok(SchemeSpec {
            pair,
            coeffs,
            method,
        })
    }

    pub fn type_a(pair: RkPair) -> Result<Self, StepError> {
        Self::new(pair, MethodType::TypeA)
    }

    pub fn type_b(pair: RkPair) -> Result<Self, StepError> {
        Self::new(pair, MethodType::TypeB)
    }
}

/// The four schemes used in the reaction-diffusion experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedScheme {
    #[serde(rename = "SCM-A1")]
    ScmA1,
    #[serde(rename = "SCM-A2")]
    ScmA2,
    #[serde(rename = "SCM-B1")]
    ScmB1,
    #[serde(rename = "SCM-B2")]
    ScmB2,
}

impl NamedScheme {
    pub const ALL: [NamedScheme; 4] = [
        NamedScheme::ScmA1,
        NamedScheme::ScmA2,
        NamedScheme::ScmB1,
        NamedScheme::ScmB2,
    ];

    pub fn spec(self) -> SchemeSpec {
        let s2 = std::f64::consts::SQRT_2;
        let built = match self {
            NamedScheme::ScmA1 => build_example1(1.0 - 0.5 * s2).map(SchemeSpec::type_a),
            NamedScheme::ScmA2 => build_example1(0.5 + 3f64.sqrt() / 6.0).map(SchemeSpec::type_a),
            NamedScheme::ScmB1 => build_example3(0.0).map(SchemeSpec::type_b),
            NamedScheme::ScmB2 => build_example3(s2 / 3.0).map(SchemeSpec::type_b),
        };
        built
            .expect("closed-form coefficients")
            .expect("closed-form coefficients")
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedScheme::ScmA1 => "SCM-A1",
            NamedScheme::ScmA2 => "SCM-A2",
            NamedScheme::ScmB1 => "SCM-B1",
            NamedScheme::ScmB2 => "SCM-B2",
        }
    }
}

impl fmt::Display for NamedScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedScheme::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown scheme `{s}` (expected SCM-A1, SCM-A2, SCM-B1 or SCM-B2)")
            })
    }
}

/// Coefficients `ǎ_ik` multiplying the implicit components in the explicit
/// predictors of stages 2 and 3, for the generalized procedure where `F0`
/// and `F1..Fs` get different explicit weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckCoefficients {
    pub a21: f64,
    pub a31: f64,
    pub a32: f64,
}

impl CheckCoefficients {
    /// `ǎ = â`, which reduces the generalized step to the plain one.
    pub fn matching(scheme: &SchemeSpec) -> Self {
        let p = &scheme.pair;
        CheckCoefficients {
            a21: p.ahat21,
            a31: p.ahat31,
            a32: p.ahat32,
        }
    }
}

/// Deviations `ǎ - â`; zero entries are skipped so that `ǎ = â` reproduces
/// the plain step bit for bit.
#[derive(Debug, Clone, Copy, Default)]
struct Deviation {
    d21: f64,
    d31: f64,
    d32: f64,
}

/// Labelled internal vectors of one step.
pub type StageRecord = Vec<(String, Vec<f64>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub u: Vec<f64>,
    /// `v0..vs, w0..ws` when stage recording is enabled.
    pub stages: Option<StageRecord>,
}

type Recorder<'r> = Option<&'r mut StageRecord>;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct Evaluator<'s, S: SplitSystem + ?Sized> {
    sys: &'s S,
    n: usize,
    s: usize,
}

impl<'s, S: SplitSystem + ?Sized> Evaluator<'s, S> {
    /// All components `F_0..F_s` at `(t, u)` followed by their sum.
    fn components(&self, t: f64, u: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut parts = vec![vec![0.0; self.n]; self.s + 1];
        for (j, part) in parts.iter_mut().enumerate() {
            self.sys.eval_component(j, t, u, part);
        }
        let total = sum_parts(&parts, 0, self.n);
        (parts, total)
    }

    fn solve(
        &self,
        stage: usize,
        j: usize,
        t: f64,
        rhs: &[f64],
        gamma: f64,
    ) -> Result<Vec<f64>, StepError> {
        let x = self
            .sys
            .solve_implicit_stage(j, t, rhs, gamma)
            .map_err(|source| StepError::StageSolve {
                stage,
                component: j,
                source,
            })?;
        if x.len() != self.n {
            return Err(StepError::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(x)
    }
}

/// Sum of `parts[from..]`.
fn sum_parts(parts: &[Vec<f64>], from: usize, n: usize) -> Vec<f64> {
    let mut total = vec![0.0; n];
    for part in &parts[from..] {
        for (acc, x) in total.iter_mut().zip(part) {
            *acc += x;
        }
    }
    total
}

fn advance<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    dev: Option<Deviation>,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
    mut rec: Recorder<'_>,
) -> Result<Vec<f64>, StepError> {
    let n = sys.dimension();
    if u.len() != n {
        return Err(StepError::Dimension {
            expected: n,
            got: u.len(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(StepError::InvalidStep(dt));
    }
    if !all_finite(u) {
        return Err(StepError::NonFinite("input state"));
    }
    let ev = Evaluator {
        sys,
        n,
        s: sys.implicit_count(),
    };
    let pair = &scheme.pair;
    let theta = pair.theta;
    let kappa = pair.kappa;
    let gamma = theta * dt;
    let [w1, w2] = pair.explicit_weights();
    let CorrectionCoefficients { mu1, mu2, .. } = scheme.coeffs;
    let dev = dev.unwrap_or_default();
    let t_kappa = t + kappa * dt;
    let t_one = t + dt;

    let mut push = |label: String, x: &[f64]| {
        if let Some(r) = rec.as_deref_mut() {
            r.push((label, x.to_vec()));
        }
    };

    // stage 2: v-stages at t + κΔt
    let (fu, fu_sum) = ev.components(t, u);
    let mut v: Vec<f64> = (0..n).map(|i| u[i] + kappa * dt * fu_sum[i]).collect();
    let fu_imp = if dev.d21 != 0.0 || dev.d31 != 0.0 {
        Some(sum_parts(&fu, 1, n))
    } else {
        None
    };
    if dev.d21 != 0.0 {
        let g = fu_imp.as_ref().unwrap();
        for i in 0..n {
            v[i] += dt * dev.d21 * g[i];
        }
    }
    push("v0".into(), &v);
    for (j, fj) in fu.iter().enumerate().skip(1).take(ev.s) {
        let mut rhs: Vec<f64> = (0..n).map(|i| v[i] - gamma * fj[i]).collect();
        if dev.d21 != 0.0 {
            for (r, f) in rhs.iter_mut().zip(fj) {
                *r -= dt * dev.d21 * f;
            }
        }
        v = ev.solve(2, j, t_kappa, &rhs, gamma)?;
        push(format!("v{j}"), &v);
    }

    // stage 3: w-stages at t + Δt
    let (fv, fv_sum) = ev.components(t_kappa, &v);
    let mut w: Vec<f64> = (0..n)
        .map(|i| u[i] + w1 * dt * fu_sum[i] + w2 * dt * fv_sum[i])
        .collect();
    if dev.d31 != 0.0 {
        let g = fu_imp.as_ref().unwrap();
        for i in 0..n {
            w[i] += dt * dev.d31 * g[i];
        }
    }
    if dev.d32 != 0.0 {
        let g = sum_parts(&fv, 1, n);
        for i in 0..n {
            w[i] += dt * dev.d32 * g[i];
        }
    }
    push("w0".into(), &w);
    for j in 1..=ev.s {
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| w[i] - gamma * (mu1 * fu[j][i] + mu2 * fv[j][i]))
            .collect();
        if dev.d31 != 0.0 {
            for i in 0..n {
                rhs[i] -= dt * dev.d31 * fu[j][i];
            }
        }
        if dev.d32 != 0.0 {
            for i in 0..n {
                rhs[i] -= dt * dev.d32 * fv[j][i];
            }
        }
        w = ev.solve(3, j, t_one, &rhs, gamma)?;
        push(format!("w{j}"), &w);
    }

    let out = match scheme.method {
        MethodType::TypeA => w,
        MethodType::TypeB => {
            let (_, fw_sum) = ev.components(t_one, &w);
            (0..n)
                .map(|i| {
                    u[i] + dt * (pair.b1 * fu_sum[i] + pair.b2 * fv_sum[i] + theta * fw_sum[i])
                })
                .collect()
        }
    };
    if !all_finite(&out) {
        return Err(StepError::NonFinite("step result"));
    }
    Ok(out)
}

fn require(scheme: &SchemeSpec, required: MethodType) -> Result<(), StepError> {
    if scheme.method == required {
        Ok(())
    } else {
        Err(StepError::WrongMethod {
            method: scheme.method,
            required,
        })
    }
}

/// One type-A step; returns `u_{n+1} = w_s`.
pub fn step_type_a<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>, StepError> {
    require(scheme, MethodType::TypeA)?;
    advance(scheme, None, sys, t, u, dt, None)
}

/// One type-B step, including the finishing stage
/// `u + Δt(b1 F(t,u) + b2 F(t+κΔt, v_s) + θ F(t+Δt, w_s))`.
pub fn step_type_b<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>, StepError> {
    require(scheme, MethodType::TypeB)?;
    advance(scheme, None, sys, t, u, dt, None)
}

/// Dispatches on the scheme's method type.
pub fn step<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>, StepError> {
    advance(scheme, None, sys, t, u, dt, None)
}

/// Like [`step`], additionally returning the internal vectors
/// `v0..vs, w0..ws`.
pub fn step_recorded<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, StageRecord), StepError> {
    let mut stages = Vec::with_capacity(2 * (sys.implicit_count() + 1));
    let out = advance(scheme, None, sys, t, u, dt, Some(&mut stages))?;
    Ok((out, stages))
}

/// Generalized step where the predictors weight `F1..Fs` by `ǎ_ik` instead
/// of `â_ik`; the corrections then use `a_ik - ǎ_ik`. Row sums of `ǎ` must
/// match those of `â` so every internal vector stays consistent.
pub fn step_generalized<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    check: &CheckCoefficients,
    sys: &S,
    t: f64,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>, StepError> {
    let dev = check_deviation(scheme, check)?;
    advance(scheme, Some(dev), sys, t, u, dt, None)
}

fn check_deviation(scheme: &SchemeSpec, check: &CheckCoefficients) -> Result<Deviation, StepError> {
    let p = &scheme.pair;
    if ![check.a21, check.a31, check.a32]
        .iter()
        .all(|x| x.is_finite())
    {
        return Err(StepError::NonFinite("check coefficients"));
    }
    let r2 = check.a21 - p.ahat21;
    if r2.abs() > ORDER_TOL {
        return Err(StepError::RowSum {
            stage: 2,
            residual: r2,
        });
    }
    let r3 = (check.a31 + check.a32) - (p.ahat31 + p.ahat32);
    if r3.abs() > ORDER_TOL {
        return Err(StepError::RowSum {
            stage: 3,
            residual: r3,
        });
    }
    Ok(Deviation {
        d21: check.a21 - p.ahat21,
        d31: check.a31 - p.ahat31,
        d32: check.a32 - p.ahat32,
    })
}

/// Growth factor over the initial sup-norm beyond which a run is declared
/// divergent.
pub const DIVERGENCE_FACTOR: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// Divergence detected after step `step` (1-based).
    Diverged {
        step: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Initial record followed by one record per completed step.
    pub records: Vec<StepRecord>,
    pub outcome: Outcome,
}

fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs `n_steps` steps, handing each record to `observe(step_index, record)`
/// (index 0 is the initial state). Returns the last accepted record and
/// whether the run completed or diverged.
#[allow(clippy::too_many_arguments)]
pub fn integrate_with<S, F>(
    scheme: &SchemeSpec,
    sys: &S,
    t0: f64,
    u0: &[f64],
    dt: f64,
    n_steps: usize,
    record_stages: bool,
    mut observe: F,
) -> Result<(StepRecord, Outcome), StepError>
where
    S: SplitSystem + ?Sized,
    F: FnMut(usize, &StepRecord),
{
    if n_steps == 0 {
        return Err(StepError::Incompatible("n_steps must be at least 1".into()));
    }
    if !all_finite(u0) {
        return Err(StepError::NonFinite("initial state"));
    }
    let limit = DIVERGENCE_FACTOR * (1.0 + sup_norm(u0));
    let mut current = StepRecord {
        t: t0,
        u: u0.to_vec(),
        stages: None,
    };
    observe(0, &current);
    for k in 1..=n_steps {
        // t_n = t0 + nΔt avoids drift from repeated addition
        let t = t0 + (k - 1) as f64 * dt;
        let mut stages = record_stages.then(Vec::new);
        let result = advance(scheme, None, sys, t, &current.u, dt, stages.as_mut());
        let u = match result {
            Ok(u) => u,
            Err(StepError::NonFinite("step result")) => {
                return Ok((current, Outcome::Diverged { step: k }))
            }
            Err(e) => return Err(e),
        };
        if sup_norm(&u) > limit {
            return Ok((current, Outcome::Diverged { step: k }));
        }
        current = StepRecord {
            t: t0 + k as f64 * dt,
            u,
            stages,
        };
        observe(k, &current);
    }
    Ok((current, Outcome::Completed))
}

/// Collects every record of [`integrate_with`].
pub fn integrate<S: SplitSystem + ?Sized>(
    scheme: &SchemeSpec,
    sys: &S,
    t0: f64,
    u0: &[f64],
    dt: f64,
    n_steps: usize,
    record_stages: bool,
) -> Result<Trajectory, StepError> {
    let mut records = Vec::with_capacity(n_steps + 1);
    let (_, outcome) = integrate_with(scheme, sys, t0, u0, dt, n_steps, record_stages, |_, r| {
        records.push(r.clone())
    })?;
    Ok(Trajectory { records, outcome })
}

/// Split systems used in tests and examples.
pub mod systems {
    use super::{SplitSystem, StageFailure};

    /// Complex scalar test equation `u' = (λ0 + ... + λs) u`, realized on
    /// `[Re u, Im u]`.
    #[derive(Debug, Clone)]
    pub struct ComplexLinear {
        /// `(re, im)` of `λ_0..λ_s`.
        pub lambdas: Vec<(f64, f64)>,
    }

    impl SplitSystem for ComplexLinear {
        fn dimension(&self) -> usize {
            2
        }

        fn implicit_count(&self) -> usize {
            self.lambdas.len() - 1
        }

        fn eval_component(&self, j: usize, _t: f64, u: &[f64], out: &mut [f64]) {
            let (a, b) = self.lambdas[j];
            out[0] = a * u[0] - b * u[1];
            out[1] = a * u[1] + b * u[0];
        }

        fn solve_implicit_stage(
            &self,
            j: usize,
            _t: f64,
            rhs: &[f64],
            gamma: f64,
        ) -> Result<Vec<f64>, StageFailure> {
            // x = rhs / (1 - γλ)
            let (a, b) = self.lambdas[j];
            let (dr, di) = (1.0 - gamma * a, -gamma * b);
            let den = dr * dr + di * di;
            if den == 0.0 {
                return Err(StageFailure {
                    message: "singular stage equation".into(),
                    residual: f64::INFINITY,
                });
            }
            Ok(vec![
                (rhs[0] * dr + rhs[1] * di) / den,
                (rhs[1] * dr - rhs[0] * di) / den,
            ])
        }
    }

    /// Affine system `F_j(u) = A_j u + g_j` with small dense matrices; stage
    /// equations solved by Gaussian elimination with partial pivoting.
    #[derive(Debug, Clone)]
    pub struct Affine {
        pub n: usize,
        /// Row-major `n×n` matrices `A_0..A_s`.
        pub mats: Vec<Vec<f64>>,
        pub shifts: Vec<Vec<f64>>,
        pub weights: Option<Vec<f64>>,
    }

    impl SplitSystem for Affine {
        fn dimension(&self) -> usize {
            self.n
        }

        fn implicit_count(&self) -> usize {
            self.mats.len() - 1
        }

        fn eval_component(&self, j: usize, _t: f64, u: &[f64], out: &mut [f64]) {
            let a = &self.mats[j];
            for r in 0..self.n {
                out[r] =
                    self.shifts[j][r] + (0..self.n).map(|c| a[r * self.n + c] * u[c]).sum::<f64>();
            }
        }

        fn solve_implicit_stage(
            &self,
            j: usize,
            _t: f64,
            rhs: &[f64],
            gamma: f64,
        ) -> Result<Vec<f64>, StageFailure> {
            // (I - γA) x = rhs + γg
            let n = self.n;
            let a = &self.mats[j];
            let mut m: Vec<f64> = (0..n * n)
                .map(|k| {
                    let id = if k / n == k % n { 1.0 } else { 0.0 };
                    id - gamma * a[k]
                })
                .collect();
            let mut b: Vec<f64> = (0..n).map(|r| rhs[r] + gamma * self.shifts[j][r]).collect();
            gauss_solve(n, &mut m, &mut b)?;
            Ok(b)
        }

        fn invariant_weights(&self) -> Option<&[f64]> {
            self.weights.as_deref()
        }
    }

    pub(crate) fn gauss_solve(n: usize, m: &mut [f64], b: &mut [f64]) -> Result<(), StageFailure> {
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))
                .unwrap();
            if m[piv * n + col] == 0.0 {
                return Err(StageFailure {
                    message: "singular stage matrix".into(),
                    residual: f64::INFINITY,
                });
            }
            if piv != col {
                for c in 0..n {
                    m.swap(piv * n + c, col * n + c);
                }
                b.swap(piv, col);
            }
            for r in col + 1..n {
                let f = m[r * n + col] / m[col * n + col];
                if f != 0.0 {
                    for c in col..n {
                        m[r * n + c] -= f * m[col * n + c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| m[r * n + c] * b[c]).sum();
            b[r] = (b[r] - s) / m[r * n + r];
        }
        Ok(())
    }
}
