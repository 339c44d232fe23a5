//! Matched explicit / diagonally-implicit Runge-Kutta pairs of order two.
//!
//! The implicit method is a stiffly accurate three-stage DIRK with abscissae
//! `0, κ, 1` and diagonal `θ`:
//!
//! ```text
//!   0 | 0
//!   κ | a21  θ
//!   1 | b1   b2   θ
//!   --+-------------
//!     | b1   b2   θ
//! ```
//!
//! The explicit partner shares the abscissa `κ = â21`. For a [`PairKind::TypeA`]
//! pair it is the two-stage method with weights `b̂1, b̂2` (stored in
//! `ahat31`, `ahat32`); for a [`PairKind::TypeB`] pair it is the augmented
//! three-stage method whose last row `â31, â32` is followed by the implicit
//! method's own weights.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on order-condition residuals.
pub const ORDER_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableauError {
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("omega must be finite, got {0}")]
    InvalidOmega(f64),
    #[error("kappa must be nonzero")]
    ZeroKappa,
    #[error("coefficient `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("order condition `{name}` violated: residual {residual:e}")]
    OrderCondition { name: &'static str, residual: f64 },
}

/// Which explicit partner the pair carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// Two-stage explicit method; `ahat31`/`ahat32` hold its weights `b̂1`/`b̂2`.
    TypeA,
    /// Augmented three-stage explicit method with last stage row `â31, â32`.
    TypeB,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKind::TypeA => f.write_str("A"),
            PairKind::TypeB => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RkPair {
    pub theta: f64,
    pub kappa: f64,
    pub a21: f64,
    pub b1: f64,
    pub b2: f64,
    pub ahat21: f64,
    pub ahat31: f64,
    pub ahat32: f64,
    pub kind: PairKind,
}

/// One named order/matching condition and its residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
}

fn check_theta(theta: f64) -> Result<(), TableauError> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        Err(TableauError::InvalidTheta(theta))
    }
}

impl RkPair {
    /// Accepts an arbitrary coefficient set, provided it passes
    /// [`verify_order2`] at [`ORDER_TOL`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw(
        theta: f64,
        kappa: f64,
        a21: f64,
        b1: f64,
        b2: f64,
        ahat21: f64,
        ahat31: f64,
        ahat32: f64,
        kind: PairKind,
    ) -> Result<Self, TableauError> {
        let pair = RkPair {
            theta,
            kappa,
            a21,
            b1,
            b2,
            ahat21,
            ahat31,
            ahat32,
            kind,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<(), TableauError> {
        for (name, v) in [
            ("theta", self.theta),
            ("kappa", self.kappa),
            ("a21", self.a21),
            ("b1", self.b1),
            ("b2", self.b2),
            ("ahat21", self.ahat21),
            ("ahat31", self.ahat31),
            ("ahat32", self.ahat32),
        ] {
            if !v.is_finite() {
                return Err(TableauError::NonFinite(name));
            }
        }
        check_theta(self.theta)?;
        if self.kappa == 0.0 {
            return Err(TableauError::ZeroKappa);
        }
        match verify_order2(self)
            .into_iter()
            .find(|r| r.value.abs() >= ORDER_TOL)
        {
            Some(r) => Err(TableauError::OrderCondition {
                name: r.name,
                residual: r.value,
            }),
            None => Ok(()),
        }
    }

    /// Explicit weights used in the `w0` predictor: `b̂1, b̂2` for type-A
    /// pairs, `â31, â32` for type-B pairs.
    pub fn explicit_weights(&self) -> [f64; 2] {
        [self.ahat31, self.ahat32]
    }

    /// Abscissae `0, κ, 1`.
    pub fn abscissae(&self) -> [f64; 3] {
        [0.0, self.kappa, 1.0]
    }
}

/// Explicit trapezoidal rule (`κ = 1`, `b̂1 = b̂2 = ½`) with its matching DIRK.
pub fn build_example1(theta: f64) -> Result<RkPair, TableauError> {
    check_theta(theta)?;
    Ok(RkPair {
        theta,
        kappa: 1.0,
        a21: 1.0 - theta,
        b1: 0.5,
        b2: 0.5 - theta,
        ahat21: 1.0,
        ahat31: 0.5,
        ahat32: 0.5,
        kind: PairKind::TypeA,
    })
}

/// DIRK whose second stage is a scaled implicit trapezoidal step (`a21 = θ`).
pub fn build_example2(theta: f64) -> Result<RkPair, TableauError> {
    check_theta(theta)?;
    let q = 1.0 / (4.0 * theta);
    Ok(RkPair {
        theta,
        kappa: 2.0 * theta,
        a21: theta,
        b1: 1.5 - theta - q,
        b2: -0.5 + q,
        ahat21: 2.0 * theta,
        ahat31: 1.0 - q,
        ahat32: q,
        kind: PairKind::TypeA,
    })
}

/// The `θ = 1 - ½√2` DIRK of [`build_example2`] combined with the augmented
/// explicit method `â31 = ½ - ω`, `â32 = ½ + ω`.
pub fn build_example3(omega: f64) -> Result<RkPair, TableauError> {
    if !omega.is_finite() {
        return Err(TableauError::InvalidOmega(omega));
    }
    let s2 = std::f64::consts::SQRT_2;
    let theta = 1.0 - 0.5 * s2;
    Ok(RkPair {
        theta,
        kappa: 2.0 - s2,
        a21: theta,
        b1: 0.25 * s2,
        b2: 0.25 * s2,
        ahat21: 2.0 - s2,
        ahat31: 0.5 - omega,
        ahat32: 0.5 + omega,
        kind: PairKind::TypeB,
    })
}

/// Residuals of the matching and order-two conditions. A pair is valid iff
/// every `|value| < ORDER_TOL`.
pub fn verify_order2(pair: &RkPair) -> Vec<Residual> {
    let p = pair;
    let mut out = vec![
        Residual {
            name: "kappa-ahat21",
            value: p.kappa - p.ahat21,
        },
        Residual {
            name: "kappa-a21-theta",
            value: p.kappa - p.a21 - p.theta,
        },
        Residual {
            name: "b1+b2+theta-1",
            value: p.b1 + p.b2 + p.theta - 1.0,
        },
        Residual {
            name: "b2*kappa+theta-1/2",
            value: p.b2 * p.kappa + p.theta - 0.5,
        },
    ];
    match p.kind {
        PairKind::TypeA => {
            out.push(Residual {
                name: "bhat1+bhat2-1",
                value: p.ahat31 + p.ahat32 - 1.0,
            });
            out.push(Residual {
                name: "bhat2*kappa-1/2",
                value: p.ahat32 * p.kappa - 0.5,
            });
        }
        PairKind::TypeB => out.push(Residual {
            name: "ahat31+ahat32-1",
            value: p.ahat31 + p.ahat32 - 1.0,
        }),
    }
    out
}

/// Weights of `F_j(t_n, u_n)` and `F_j(t_n + κΔt, v_s)` in the `w`-stage
/// corrections, plus `ν = θκμ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionCoefficients {
    pub mu1: f64,
    pub mu2: f64,
    pub nu: f64,
}

pub fn correction_coefficients(pair: &RkPair) -> Result<CorrectionCoefficients, TableauError> {
    let (mu1, mu2) = match pair.kind {
        PairKind::TypeA => {
            if pair.kappa == 0.0 {
                return Err(TableauError::ZeroKappa);
            }
            (1.0 - 1.0 / pair.kappa, 1.0 / pair.kappa)
        }
        PairKind::TypeB => {
            check_theta(pair.theta)?;
            (
                (pair.ahat31 - pair.b1) / pair.theta,
                (pair.ahat32 - pair.b2) / pair.theta,
            )
        }
    };
    // type-A: θ·κ·(1/κ) rounds away from θ, and the stability analysis
    // relies on ν = θ there
    let nu = match pair.kind {
        PairKind::TypeA => pair.theta,
        PairKind::TypeB => pair.theta * pair.kappa * mu2,
    };
    Ok(CorrectionCoefficients { mu1, mu2, nu })
}
