//! Closed-form geometry of the generalized Berger sphere: the metric on
//! S^3 = SU(2) making (X_1/l1, X_2/l2, X_3/l3) orthonormal, where the
//! left-invariant fields obey [X_i, X_{i+1}] = 2 X_{i+2}.
//!
//! Sign arbitration notes (each asserted by an oracle test):
//! * The curvature numerator is
//!   3 l_k^4 - l_i^4 - l_j^4 + 2 l_i^2 l_j^2 - 2 l_i^2 l_k^2 - 2 l_j^2 l_k^2,
//!   the sign fixed by the structure equation Omega = d omega - omega ^ omega.
//! * `omega_dot` is the time-0 derivative of the connection form of the
//!   evolving metric in the fixed frame. Rescaling a metric by a constant
//!   leaves the connection unchanged, so it vanishes on round spheres. The
//!   scaled-connection variant `omega_dot_scaled_connection` is kept only
//!   for comparison; the finite-difference oracle rejects it.
//! * The oracle pipeline 2 P1(omega_dot (x) Omega) equals exactly
//!   [`PIPELINE_TO_REFERENCE_RATIO`] times [`tp1_dot_coefficient`].
//!
//! All time-derivative formulas use the fixed-frame convention: the l's
//! evolve, the coframe does not.

use std::f64::consts::PI;

use crate::chern_simons::{cs_invariant_density, tp_dot_integrand};
use crate::exterior::{levi_civita, Form, FrameStructure, MatrixForm, ScalarField};
use crate::{CsError, Result};

/// Admissible range for the metric scalings; outside it the degree-10
/// rational functions of the derivative coefficient lose precision.
pub const PARAM_MIN: f64 = 1e-3;
pub const PARAM_MAX: f64 = 1e3;

/// Ratio of the oracle pipeline 2 P1(omega_dot (x) Omega) to the reference
/// closed form [`tp1_dot_coefficient`]; constant across all parameters.
pub const PIPELINE_TO_REFERENCE_RATIO: f64 = 4.0;

/// The metric scalings (l1, l2, l3), all positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerParams {
    l: [f64; 3],
}

impl BergerParams {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        for (i, v) in [l1, l2, l3].into_iter().enumerate() {
            if !(v.is_finite() && v > PARAM_MIN && v < PARAM_MAX) {
                return Err(CsError::InvalidParameter(format!(
                    "lambda{} = {v} must lie in ({PARAM_MIN}, {PARAM_MAX})",
                    i + 1
                )));
            }
        }
        Ok(BergerParams { l: [l1, l2, l3] })
    }

    pub fn lambdas(&self) -> [f64; 3] {
        self.l
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.l[i]
    }

    /// Riemannian volume: the coframe volume form integrates to
    /// l1 l2 l3 times the round unit-sphere volume 2 pi^2.
    pub fn volume(&self) -> f64 {
        2.0 * PI * PI * sorted_product(self.l)
    }
}

/// Product computed in ascending order, so that permuting the inputs
/// reproduces the result bit for bit.
fn sorted_product(v: [f64; 3]) -> f64 {
    let mut s = v;
    s.sort_by(f64::total_cmp);
    s[0] * s[1] * s[2]
}

/// Structure constants of the orthonormal frame:
/// c^k_ij = 2 eps_ijk l_k / (l_i l_j).
pub fn structure(params: &BergerParams) -> FrameStructure {
    let l = params.l;
    let mut c = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    c[k][i][j] = 2.0 * e * l[k] / (l[i] * l[j]);
                }
            }
        }
    }
    FrameStructure::lie(c).expect("antisymmetric by construction")
}

/// Connection coefficients gamma[i][j][k] = <nabla_{Xbar_i} Xbar_j, Xbar_k>
/// = eps_ijk (-l_i^2 + l_j^2 + l_k^2) / (l_1 l_2 l_3) for distinct indices,
/// zero otherwise.
pub fn connection_coeffs(params: &BergerParams) -> [[[f64; 3]; 3]; 3] {
    let l = params.l;
    let vol = sorted_product(l);
    let mut g = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    g[i][j][k] = e * (-l[i] * l[i] + l[j] * l[j] + l[k] * l[k]) / vol;
                }
            }
        }
    }
    g
}

/// The connection form: omega_i^j = eps_ijk (l_i^2 + l_j^2 - l_k^2) /
/// (l_1 l_2 l_3) theta^k. Skew-symmetric with zero diagonal.
pub fn connection_form(params: &BergerParams) -> MatrixForm {
    let l = params.l;
    let vol = sorted_product(l);
    MatrixForm::from_fn(1, |i, j| {
        if i == j {
            return Form::zero(1);
        }
        let k = 3 - i - j;
        let coeff = levi_civita(i, j, k) * (l[i] * l[i] + l[j] * l[j] - l[k] * l[k]) / vol;
        Form::from_terms(1, &[(&[k], ScalarField::Constant(coeff))])
    })
    .expect("uniform degree")
    .with_skew_verified()
    .expect("skew by construction")
}

/// The curvature form Omega_i^j = Q_ij theta^i ^ theta^j with
/// Q_ij = (3 l_k^4 - l_i^4 - l_j^4 + 2 l_i^2 l_j^2 - 2 l_i^2 l_k^2
///         - 2 l_j^2 l_k^2) / (l_1 l_2 l_3)^2.
pub fn curvature_form(params: &BergerParams) -> MatrixForm {
    let vol = sorted_product(params.l);
    let den = vol * vol;
    MatrixForm::from_fn(2, |i, j| {
        if i == j {
            return Form::zero(2);
        }
        let q = curvature_numerator(params, i, j) / den;
        Form::from_terms(2, &[(&[i, j], ScalarField::Constant(q))])
    })
    .expect("uniform degree")
    .with_skew_verified()
    .expect("skew by construction")
}

fn curvature_numerator(params: &BergerParams, i: usize, j: usize) -> f64 {
    let sq = [
        params.l[0] * params.l[0],
        params.l[1] * params.l[1],
        params.l[2] * params.l[2],
    ];
    let k = 3 - i - j;
    3.0 * sq[k] * sq[k] - (sq[i] * sq[i] + sq[j] * sq[j]) + 2.0 * sq[i] * sq[j]
        - 2.0 * (sq[i] + sq[j]) * sq[k]
}

/// Orthonormal-frame Ricci components:
/// R_ii = 2 (l_i^4 - l_j^4 - l_k^4 + 2 l_j^2 l_k^2) / (l_1 l_2 l_3)^2.
/// Off-diagonal components vanish in this frame.
pub fn ricci(params: &BergerParams) -> [f64; 3] {
    ricci_raw(params.l)
}

pub(crate) fn ricci_raw(l: [f64; 3]) -> [f64; 3] {
    let vol = sorted_product(l);
    let den = vol * vol;
    let sq = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
    let mut r = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        r[i] = 2.0 * (sq[i] * sq[i] - (sq[j] * sq[j] + sq[k] * sq[k]) + 2.0 * (sq[j] * sq[k])) / den;
    }
    r
}

/// Sum of the Ricci eigenvalues (the scalar curvature in this frame).
pub fn scalar_curvature(params: &BergerParams) -> f64 {
    let r = ricci(params);
    r[0] + r[1] + r[2]
}

/// Time-0 derivative of the connection form under the flow
/// d g / dt = -2 Ric, in the fixed frame:
///
/// omega_dot_i^j = 2 eps_kij (l_i^2 (R_jj - R_ii) + l_k^2 (R_kk - R_jj))
///                 / (l_1 l_2 l_3) theta^k.
///
/// Derived by differentiating the Koszul expansion of the evolving metric
/// against the fixed frame; confirmed by the finite-difference oracle. It
/// vanishes identically at round parameters and is not skew-symmetric in
/// general (the frame is orthonormal only at time 0).
pub fn omega_dot(params: &BergerParams) -> MatrixForm {
    let l = params.l;
    let r = ricci(params);
    let vol = sorted_product(l);
    MatrixForm::from_fn(1, |i, j| {
        if i == j {
            return Form::zero(1);
        }
        let k = 3 - i - j;
        let w = 2.0 * levi_civita(k, i, j)
            * (l[i] * l[i] * (r[j] - r[i]) + l[k] * l[k] * (r[k] - r[j]))
            / vol;
        Form::from_terms(1, &[(&[k], ScalarField::Constant(w))])
    })
    .expect("uniform degree")
}

/// The connection form scaled by -2 (R_11 + R_22 + R_33).
///
/// Retained only for comparison with [`omega_dot`]: it does not match the
/// finite-difference derivative of the connection (in particular it is
/// nonzero on round spheres, where the connection does not move at all).
pub fn omega_dot_scaled_connection(params: &BergerParams) -> MatrixForm {
    connection_form(params).scale(-2.0 * scalar_curvature(params))
}

/// Reference closed form for the derivative of the transgression
/// coefficient:
///
/// 16 / (pi^2 (l1 l2 l3)^5) * sum_p l_p^6 (l_p^2 - l_{p+1}^2)(l_p^2 - l_{p+2}^2).
///
/// The numerator is the per-term factorization of
/// sum_p l_p^10 - sum_{p != q} l_p^8 l_q^2 + sum_p l_p^6 l_{p+1}^2 l_{p+2}^2,
/// so homothety triples give exactly zero and permutations of the inputs
/// reproduce the value bit for bit (terms are sorted before summation).
///
/// The oracle pipeline (`tp_dot_integrand` on `omega_dot`, `curvature_form`)
/// is proportional to this with the single global constant
/// [`PIPELINE_TO_REFERENCE_RATIO`].
pub fn tp1_dot_coefficient(params: &BergerParams) -> f64 {
    let sq = [
        params.l[0] * params.l[0],
        params.l[1] * params.l[1],
        params.l[2] * params.l[2],
    ];
    let mut terms = [0.0; 3];
    for p in 0..3 {
        let (q, r) = ((p + 1) % 3, (p + 2) % 3);
        terms[p] = sq[p] * sq[p] * sq[p] * ((sq[p] - sq[q]) * (sq[p] - sq[r]));
    }
    terms.sort_by(f64::total_cmp);
    let numerator = terms[0] + terms[1] + terms[2];
    let vol = sorted_product(params.l);
    let den = vol * vol * vol * vol * vol;
    16.0 / (PI * PI) * numerator / den
}

/// The coefficient of the oracle pipeline 2 P1(omega_dot (x) Omega) in the
/// coframe volume basis.
pub fn cs_derivative_density(params: &BergerParams) -> f64 {
    tp_dot_integrand(&omega_dot(params), &curvature_form(params))
        .expect("degrees 1 and 2 by construction")
        .top_coefficient()
        .expect("constant coefficients by construction")
}

/// The transgression density of the Berger metric: the coefficient of
/// TP1(omega) in the orthonormal coframe volume basis.
pub fn cs_density(params: &BergerParams) -> f64 {
    cs_invariant_density(&connection_form(params), &curvature_form(params))
        .expect("homogeneous coefficients are constant")
}

/// F(a, b) = a^10 + b^10 - a^8 b^2 - b^8 a^2 - a^8 - b^8 + a^6 b^2
///           + b^6 a^2 + a^2 b^2 - a^2 - b^2 + 1.
///
/// Zero exactly at a = b = 1; positive for a, b > 1.
pub fn big_f(alpha: f64, beta: f64) -> f64 {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (a6, b6) = (a4 * a2, b4 * b2);
    let (a8, b8) = (a4 * a4, b4 * b4);
    a8 * a2 + b8 * b2 - a8 * b2 - b8 * a2 - a8 - b8 + a6 * b2 + b6 * a2 + a2 * b2 - a2 - b2 + 1.0
}

/// Which of the two factored expressions of F to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactoredVariant {
    First,
    Second,
}

impl FactoredVariant {
    /// Maps 1 or 2 to a variant; anything else is rejected.
    pub fn from_index(v: u32) -> Result<Self> {
        match v {
            1 => Ok(FactoredVariant::First),
            2 => Ok(FactoredVariant::Second),
            other => Err(CsError::InvalidParameter(format!(
                "factored variant must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// The factored forms of F:
/// variant 1: (a^2-b^2)^2 ((a^2-1)(a^4+a^2 b^2+b^4) + b^6) + (a^2-1)(b^2-1)
/// variant 2: the same expression with a and b exchanged in the first term.
pub fn big_f_factored(alpha: f64, beta: f64, variant: FactoredVariant) -> f64 {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let diff = a2 - b2;
    let cross = diff * diff;
    let inner = match variant {
        FactoredVariant::First => (a2 - 1.0) * (a4 + a2 * b2 + b4) + b4 * b2,
        FactoredVariant::Second => (b2 - 1.0) * (b4 + a2 * b2 + a4) + a4 * a2,
    };
    cross * inner + (a2 - 1.0) * (b2 - 1.0)
}
