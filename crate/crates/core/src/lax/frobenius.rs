//! Formal solution `Psi = sum Psi_n z^(D + n)` of `(z d/dz + M) Psi = 0` at
//! the regular singular point `z = 0`, with `D = -H(eps)`.

use num_complex::Complex64;
use pvi_field::{Point, Var};

use super::{build_m, N};
use crate::hamiltonian::ParamVec;
use crate::{CoreError, Result};

pub type CMatrix = [[Complex64; N]; N];

/// Divisors below this count as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;

fn zero_matrix() -> CMatrix {
    [[Complex64::new(0.0, 0.0); N]; N]
}

fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = zero_matrix();
    for i in 0..N {
        for k in 0..N {
            if a[i][k] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..N {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn max_norm(a: &CMatrix) -> f64 {
    a.iter()
        .flat_map(|row| row.iter())
        .map(|x| x.norm())
        .fold(0.0, f64::max)
}

/// `M = M0 + z M1` evaluated at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericLax {
    pub m0: CMatrix,
    pub m1: CMatrix,
}

impl NumericLax {
    pub fn at(pv: &ParamVec, q: Complex64, p: Complex64, t: Complex64) -> Result<Self> {
        let a = pv.complex_alphas()?;
        let point = Point::new()
            .with(Var::A1, a[1])
            .with(Var::A2, a[2])
            .with(Var::A3, a[3])
            .with(Var::A4, a[4])
            .with(Var::Q, q)
            .with(Var::P, p)
            .with(Var::T, t);
        let m = build_m();
        let mut out = NumericLax {
            m0: zero_matrix(),
            m1: zero_matrix(),
        };
        for i in 0..N {
            for j in 0..N {
                for (h, coeff) in m.get(i, j).terms() {
                    let v = coeff.eval_complex(&point)?;
                    match h {
                        0 => out.m0[i][j] = v,
                        2 => out.m1[i][j] = v,
                        _ => return Err(CoreError::Invalid(format!("M has a z^({h}/2) term"))),
                    }
                }
            }
        }
        Ok(out)
    }

    /// The exponents `d_i = -M0_ii`.
    pub fn exponents(&self) -> [Complex64; N] {
        std::array::from_fn(|i| -self.m0[i][i])
    }
}

/// Coefficients `Psi_0..Psi_N` with `Psi_0` unit upper triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusSeries {
    pub exponents: [Complex64; N],
    pub coeffs: Vec<CMatrix>,
}

impl FrobeniusSeries {
    /// Solves the recursion up to `order` by back-substitution, rows from the
    /// bottom up since `M0` is upper triangular.
    pub fn solve(lax: &NumericLax, order: usize) -> Result<Self> {
        let d = lax.exponents();
        let m0 = &lax.m0;
        for i in 0..N {
            for j in 0..i {
                if m0[i][j].norm() > 0.0 {
                    return Err(CoreError::Invalid("M0 is not upper triangular".into()));
                }
            }
        }
        let mut coeffs: Vec<CMatrix> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let rhs = match coeffs.last() {
                Some(prev) => {
                    let mut r = mat_mul(&lax.m1, prev);
                    r.iter_mut().flatten().for_each(|x| *x = -*x);
                    r
                }
                None => zero_matrix(),
            };
            let mut psi = zero_matrix();
            for j in 0..N {
                for i in (0..N).rev() {
                    if n == 0 {
                        if i > j {
                            continue;
                        }
                        if i == j {
                            psi[i][j] = Complex64::new(1.0, 0.0);
                            continue;
                        }
                    }
                    let mut acc = rhs[i][j];
                    for k in i + 1..N {
                        acc -= m0[i][k] * psi[k][j];
                    }
                    let divisor = d[j] + n as f64 - d[i];
                    if divisor.norm() < RESONANCE_TOL {
                        return Err(CoreError::Resonance { order: n, row: i + 1, col: j + 1 });
                    }
                    psi[i][j] = acc / divisor;
                }
            }
            coeffs.push(psi);
        }
        Ok(FrobeniusSeries { exponents: d, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Relative residual of `Psi_n (D + n) + M0 Psi_n + M1 Psi_{n-1}` for each
    /// `n`, recomputed by plain matrix products.
    pub fn residuals(&self, lax: &NumericLax) -> Vec<f64> {
        let d = self.exponents;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, psi)| {
                let mut shifted = *psi;
                for row in shifted.iter_mut() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x *= d[j] + n as f64;
                    }
                }
                let a = mat_mul(&lax.m0, psi);
                let b = if n > 0 {
                    mat_mul(&lax.m1, &self.coeffs[n - 1])
                } else {
                    zero_matrix()
                };
                let mut res = zero_matrix();
                for i in 0..N {
                    for j in 0..N {
                        res[i][j] = shifted[i][j] + a[i][j] + b[i][j];
                    }
                }
                let scale = max_norm(&shifted).max(max_norm(&a)).max(max_norm(&b)).max(1.0);
                max_norm(&res) / scale
            })
            .collect()
    }

    /// Whether `Psi_0` is upper triangular with unit diagonal.
    pub fn leading_is_unit_upper(&self, tol: f64) -> bool {
        let psi = &self.coeffs[0];
        (0..N).all(|i| {
            (psi[i][i] - Complex64::new(1.0, 0.0)).norm() <= tol
                && (0..i).all(|j| psi[i][j].norm() <= tol)
        })
    }
}

/// Expansion at `(q, p, t)` for numeric parameters.
pub fn frobenius_expand(
    pv: &ParamVec,
    q: Complex64,
    p: Complex64,
    t: Complex64,
    order: usize,
) -> Result<FrobeniusSeries> {
    FrobeniusSeries::solve(&NumericLax::at(pv, q, p, t)?, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::fr;
    use crate::hamiltonian::ParamVec;

    fn sample() -> ParamVec {
        ParamVec::epsilon([fr(3, 10), fr(1, 7), fr(2, 11), fr(1, 13)])
    }

    #[test]
    fn generic_point_satisfies_the_recursion() {
        let (q, p, t) = (
            Complex64::new(0.3, 0.2),
            Complex64::new(-0.7, 0.1),
            Complex64::new(2.5, 0.0),
        );
        let pv = sample();
        let lax = NumericLax::at(&pv, q, p, t).unwrap();
        let series = FrobeniusSeries::solve(&lax, 8).unwrap();
        assert!(series.leading_is_unit_upper(0.0));
        for r in series.residuals(&lax) {
            assert!(r < 1e-10, "{r}");
        }
    }

    #[test]
    fn integer_exponent_gap_is_resonant() {
        let pv = ParamVec::epsilon([fr(1, 2), fr(-1, 2), fr(1, 5), fr(1, 9)]);
        let err = frobenius_expand(&pv, 0.3.into(), 0.2.into(), 2.0.into(), 4).unwrap_err();
        assert!(matches!(err, CoreError::Resonance { .. }));
    }
}
