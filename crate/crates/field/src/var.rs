use std::fmt;
use std::str::FromStr;

use crate::FieldError;

/// Number of ring variables.
pub const NVARS: usize = 9;

/// Ring variables in their fixed monomial-order position.
///
/// The order `a1 > a2 > a3 > a4 > q > p > t > z > x` drives the graded
/// lexicographic order used for canonical forms. `a0` is deliberately absent:
/// it is always `1 - a1 - 2 a2 - a3 - a4`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A1,
    A2,
    A3,
    A4,
    Q,
    P,
    T,
    Z,
    /// Spectral variable of the scalar Fuchsian equation.
    X,
}

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::A1,
        Var::A2,
        Var::A3,
        Var::A4,
        Var::Q,
        Var::P,
        Var::T,
        Var::Z,
        Var::X,
    ];

    /// The four independent root parameters `a1..a4`.
    pub const ALPHAS: [Var; 4] = [Var::A1, Var::A2, Var::A3, Var::A4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Var {
        Var::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::A1 => "a1",
            Var::A2 => "a2",
            Var::A3 => "a3",
            Var::A4 => "a4",
            Var::Q => "q",
            Var::P => "p",
            Var::T => "t",
            Var::Z => "z",
            Var::X => "x",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "a1" | "alpha1" => Var::A1,
            "a2" | "alpha2" => Var::A2,
            "a3" | "alpha3" => Var::A3,
            "a4" | "alpha4" => Var::A4,
            "q" => Var::Q,
            "p" => Var::P,
            "t" => Var::T,
            "z" => Var::Z,
            "x" => Var::X,
            other => return Err(FieldError::UnknownVariable(other.to_string())),
        })
    }
}
