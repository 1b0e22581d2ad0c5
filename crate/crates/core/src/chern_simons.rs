//! The first Pontryagin invariant polynomial, the transgression 3-form
//! TP1(omega), and its variational integrand.
//!
//! The degree is fixed at 2: on a 3-manifold the transgression of the
//! first Pontryagin polynomial is a 3-form and the general-degree integral
//! is never needed. The t-integral in the transgression is a polynomial of
//! degree 2 in t and is integrated in closed form coefficientwise
//! (int_0^1 t dt = 1/2, int_0^1 (t^2 - t) dt = -1/6).

use std::f64::consts::PI;

use crate::exterior::{lie_bracket_form, matrix_wedge, trace, Form, MatrixForm};
use crate::{CsError, Result};

/// 1/(2 pi^2), the normalization of the first Pontryagin polynomial.
pub const P1_NORMALIZATION: f64 = 1.0 / (2.0 * PI * PI);

/// An invariant polynomial of degree 2 on pairs of matrices.
#[derive(Clone, Copy, Debug)]
pub struct InvariantPolynomial {
    degree: u8,
    normalization: f64,
}

impl InvariantPolynomial {
    /// The first Pontryagin polynomial (tr A tr B - tr(AB)) / (2 pi^2).
    pub fn first_pontryagin() -> Self {
        InvariantPolynomial { degree: 2, normalization: P1_NORMALIZATION }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn eval(&self, a: &MatrixForm, b: &MatrixForm) -> Result<Form> {
        p1_eval(a, b)
    }
}

/// P1(A (x) B) = (tr A ^ tr B - tr(A ^ B)) / (2 pi^2).
pub fn p1_eval(a: &MatrixForm, b: &MatrixForm) -> Result<Form> {
    if a.degree() + b.degree() > 3 {
        return Err(CsError::DegreeOverflow(a.degree(), b.degree()));
    }
    let tt = trace(a).wedge(&trace(b))?;
    let tw = trace(&matrix_wedge(a, b)?);
    Ok(tt.add(&tw.neg())?.scale(P1_NORMALIZATION))
}

/// phi_t = t Omega + 1/2 (t^2 - t) [omega, omega].
pub fn phi_t(t: f64, omega: &MatrixForm, curvature: &MatrixForm) -> Result<MatrixForm> {
    check_degrees(omega, curvature)?;
    let bracket = lie_bracket_form(omega)?;
    curvature.scale(t).add(&bracket.scale(0.5 * (t * t - t)))
}

/// The transgression 3-form TP1(omega) = 2 int_0^1 P1(omega ^ phi_t) dt,
/// integrated in closed form:
/// TP1 = P1(omega (x) Omega) - 1/6 P1(omega (x) [omega, omega]).
pub fn tp_form(omega: &MatrixForm, curvature: &MatrixForm) -> Result<Form> {
    check_degrees(omega, curvature)?;
    let bracket = lie_bracket_form(omega)?;
    let a = p1_eval(omega, curvature)?;
    let b = p1_eval(omega, &bracket)?;
    a.add(&b.scale(-1.0 / 6.0))
}

/// The non-exact part of the derivative of TP1 along a family of
/// connections: 2 P1(omega_dot (x) Omega).
pub fn tp_dot_integrand(omega_dot: &MatrixForm, curvature: &MatrixForm) -> Result<Form> {
    check_degrees(omega_dot, curvature)?;
    Ok(p1_eval(omega_dot, curvature)?.scale(2.0))
}

/// The coefficient of TP1(omega) relative to the unit-volume coframe
/// 3-form. Defined for constant-coefficient (homogeneous) inputs only;
/// position-dependent coefficients make the density a function of the
/// point and are rejected.
pub fn cs_invariant_density(omega: &MatrixForm, curvature: &MatrixForm) -> Result<f64> {
    for i in 0..3 {
        for j in 0..3 {
            if !omega.entry(i, j).is_constant() || !curvature.entry(i, j).is_constant() {
                return Err(CsError::NonConstantCoefficient);
            }
        }
    }
    tp_form(omega, curvature)?.top_coefficient()
}

fn check_degrees(omega: &MatrixForm, curvature: &MatrixForm) -> Result<()> {
    if omega.degree() != 1 {
        return Err(CsError::DegreeMismatch { expected: 1, got: omega.degree() });
    }
    if curvature.degree() != 2 {
        return Err(CsError::DegreeMismatch { expected: 2, got: curvature.degree() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::ScalarField;
    use crate::verify::gauss_legendre;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(degree: u8, rng: &mut ChaCha8Rng) -> MatrixForm {
        let n = crate::exterior::basis_len(degree);
        let mut vals = [[vec![], vec![], vec![]], [vec![], vec![], vec![]], [vec![], vec![], vec![]]];
        for (i, row) in vals.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i < j {
                    *cell = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
                }
            }
        }
        MatrixForm::from_fn(degree, |i, j| {
            let coeffs: Vec<f64> = if i == j {
                vec![0.0; n]
            } else if i < j {
                vals[i][j].clone()
            } else {
                vals[j][i].iter().map(|v| -v).collect()
            };
            let mut f = Form::zero(degree)?;
            for (pos, v) in coeffs.iter().enumerate() {
                let idx = basis_tuple(degree, pos);
                f = f.add(&Form::from_terms(degree, &[(&idx, ScalarField::Constant(*v))])?)?;
            }
            Ok(f)
        })
        .unwrap()
        .with_skew_verified()
        .unwrap()
    }

    fn basis_tuple(degree: u8, pos: usize) -> Vec<usize> {
        match degree {
            0 => vec![],
            1 => vec![pos],
            2 => [[0, 1], [0, 2], [1, 2]][pos].to_vec(),
            _ => vec![0, 1, 2],
        }
    }

    #[test]
    fn p1_zero_and_degree_guard() {
        let z = MatrixForm::zero(2).unwrap();
        let b = MatrixForm::zero(2).unwrap();
        assert!(matches!(p1_eval(&z, &b), Err(CsError::DegreeOverflow(2, 2))));
        let z1 = MatrixForm::zero(1).unwrap();
        let p = p1_eval(&z1, &b).unwrap();
        assert!(p.constant_coeffs().unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn p1_on_skew_pairs_reduces_to_minus_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_skew(1, &mut rng);
            let b = random_skew(2, &mut rng);
            let full = p1_eval(&a, &b).unwrap().top_coefficient().unwrap();
            let reduced = trace(&matrix_wedge(&a, &b).unwrap())
                .top_coefficient()
                .unwrap()
                * -P1_NORMALIZATION;
            assert_eq!(full, reduced);
        }
    }

    #[test]
    fn p1_graded_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_skew(1, &mut rng);
            let b = random_skew(2, &mut rng);
            let ab = p1_eval(&a, &b).unwrap().top_coefficient().unwrap();
            let ba = p1_eval(&b, &a).unwrap().top_coefficient().unwrap();
            assert!((ab - ba).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_t_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_skew(1, &mut rng);
        let omega_cap = random_skew(2, &mut rng);
        let at0 = phi_t(0.0, &w, &omega_cap).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(at0.entry(i, j).constant_coeffs().unwrap().iter().all(|v| *v == 0.0));
            }
        }
        let at1 = phi_t(1.0, &w, &omega_cap).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    at1.entry(i, j).constant_coeffs().unwrap(),
                    omega_cap.entry(i, j).constant_coeffs().unwrap()
                );
            }
        }
        // t = 1/2: phi = Omega/2 - [w,w]/8
        let half = phi_t(0.5, &w, &omega_cap).unwrap();
        let expect = omega_cap
            .scale(0.5)
            .add(&lie_bracket_form(&w).unwrap().scale(-0.125))
            .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let a = half.entry(i, j).constant_coeffs().unwrap();
                let b = expect.entry(i, j).constant_coeffs().unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-15);
                }
            }
        }
        assert!(phi_t(0.3, &omega_cap, &w).is_err());
    }

    #[test]
    fn tp_form_zero_connection() {
        let w = MatrixForm::zero(1).unwrap();
        let omega_cap = MatrixForm::zero(2).unwrap();
        assert_eq!(tp_form(&w, &omega_cap).unwrap().top_coefficient().unwrap(), 0.0);
    }

    #[test]
    fn tp_form_matches_quadrature_oracle() {
        // closed-form t-integration vs 16-point Gauss-Legendre on [0, 1]
        let (nodes, weights) = gauss_legendre(16);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let w = random_skew(1, &mut rng);
            let omega_cap = random_skew(2, &mut rng);
            let closed = tp_form(&w, &omega_cap).unwrap().top_coefficient().unwrap();
            let mut quad = 0.0;
            for (t, wt) in nodes.iter().zip(&weights) {
                let phi = phi_t(*t, &w, &omega_cap).unwrap();
                quad += wt * p1_eval(&w, &phi).unwrap().top_coefficient().unwrap();
            }
            quad *= 2.0;
            assert!(
                (closed - quad).abs() < 1e-12,
                "closed {closed} vs quadrature {quad}"
            );
        }
    }

    #[test]
    fn tp_dot_integrand_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w1 = random_skew(1, &mut rng);
        let w2 = random_skew(1, &mut rng);
        let omega_cap = random_skew(2, &mut rng);
        let (a, b) = (1.3, -0.7);
        let combined = w1.scale(a).add(&w2.scale(b)).unwrap();
        let lhs = tp_dot_integrand(&combined, &omega_cap).unwrap().top_coefficient().unwrap();
        let rhs = a * tp_dot_integrand(&w1, &omega_cap).unwrap().top_coefficient().unwrap()
            + b * tp_dot_integrand(&w2, &omega_cap).unwrap().top_coefficient().unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
        assert!(tp_dot_integrand(&omega_cap, &w1).is_err());
    }

    #[test]
    fn density_rejects_position_dependent_coefficients() {
        let w = MatrixForm::from_fn(1, |_, _| {
            Form::from_terms(
                1,
                &[(&[0], ScalarField::evaluable(|p| crate::jet::Jet3::coordinate(0, p[0]).sin()))],
            )
        })
        .unwrap();
        let omega_cap = MatrixForm::zero(2).unwrap();
        assert!(matches!(
            cs_invariant_density(&w, &omega_cap),
            Err(CsError::NonConstantCoefficient)
        ));
    }
}
