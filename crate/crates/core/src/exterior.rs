//! Degree-graded differential forms in a fixed 3-dimensional coframe.
//!
//! Forms are stored sparsely by strictly increasing multi-index and the
//! canonical sign normalization is applied at construction, so no sign
//! bookkeeping leaks out of this module. Coefficients are either exact
//! constants (the homogeneous case) or point-evaluable fields carrying
//! analytic jets (the coordinate-chart case).

use std::fmt;
use std::sync::Arc;

use crate::jet::Jet3;
use crate::{CsError, Result};

/// Basis index tuples in canonical order, per degree.
const BASIS: [&[&[usize]]; 4] = [
    &[&[]],
    &[&[0], &[1], &[2]],
    &[&[0, 1], &[0, 2], &[1, 2]],
    &[&[0, 1, 2]],
];

/// Number of basis coefficients a `degree`-form stores: C(3, degree).
pub fn basis_len(degree: u8) -> usize {
    BASIS[degree as usize].len()
}

/// Sign of the permutation of pairwise-distinct indices, 0 on repeats.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Position of a sorted index tuple in the canonical basis of its degree.
fn basis_position(sorted: &[usize]) -> usize {
    BASIS[sorted.len()]
        .iter()
        .position(|b| *b == sorted)
        .expect("sorted index tuple within 0..3")
}

/// Sorts `idx` in place; returns the permutation sign, or 0.0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            if idx[a] == idx[b] {
                return 0.0;
            }
            if idx[a] > idx[b] {
                idx.swap(a, b);
                sign = -sign;
            }
        }
    }
    sign
}

/// A scalar coefficient: an exact constant or a point-evaluable field
/// supplying value and partial derivatives through order 3.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Evaluable(Arc<dyn Fn([f64; 3]) -> Jet3 + Send + Sync>),
}

impl ScalarField {
    pub fn constant(v: f64) -> Self {
        ScalarField::Constant(v)
    }

    pub fn evaluable<F>(f: F) -> Self
    where
        F: Fn([f64; 3]) -> Jet3 + Send + Sync + 'static,
    {
        ScalarField::Evaluable(Arc::new(f))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant(_))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(v) => Some(*v),
            ScalarField::Evaluable(_) => None,
        }
    }

    /// Constant fields report zero for all derivative orders.
    pub fn jet_at(&self, p: [f64; 3]) -> Jet3 {
        match self {
            ScalarField::Constant(v) => Jet3::constant(*v),
            ScalarField::Evaluable(f) => f(p),
        }
    }

    pub fn value_at(&self, p: [f64; 3]) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::Evaluable(f) => f(p).v,
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        match (self, other) {
            (ScalarField::Constant(a), ScalarField::Constant(b)) => ScalarField::Constant(a + b),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                ScalarField::evaluable(move |p| a.jet_at(p).add(&b.jet_at(p)))
            }
        }
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        match (self, other) {
            (ScalarField::Constant(a), ScalarField::Constant(b)) => ScalarField::Constant(a * b),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                ScalarField::evaluable(move |p| a.jet_at(p).mul(&b.jet_at(p)))
            }
        }
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        match self {
            ScalarField::Constant(a) => ScalarField::Constant(a * c),
            ScalarField::Evaluable(_) => {
                let a = self.clone();
                ScalarField::evaluable(move |p| a.jet_at(p).scale(c))
            }
        }
    }

    /// The field of the partial derivative along `axis`. For evaluable
    /// fields the returned jet loses one derivative order per application.
    pub fn partial(&self, axis: usize) -> ScalarField {
        match self {
            ScalarField::Constant(_) => ScalarField::Constant(0.0),
            ScalarField::Evaluable(_) => {
                let a = self.clone();
                ScalarField::evaluable(move |p| a.jet_at(p).shift(axis))
            }
        }
    }

    fn is_const_zero(&self) -> bool {
        matches!(self, ScalarField::Constant(v) if *v == 0.0)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(v) => write!(f, "Constant({v})"),
            ScalarField::Evaluable(_) => write!(f, "Evaluable(..)"),
        }
    }
}

/// A degree-k differential form on the fixed 3-dimensional coframe,
/// k in 0..=3. Exactly C(3, k) coefficients are stored, one per strictly
/// increasing index tuple. Values are immutable after construction.
#[derive(Clone, Debug)]
pub struct Form {
    degree: u8,
    coeffs: Vec<ScalarField>,
}

impl Form {
    pub fn zero(degree: u8) -> Result<Form> {
        if degree > 3 {
            return Err(CsError::InvalidParameter(format!(
                "form degree {degree} exceeds dimension 3"
            )));
        }
        Ok(Form {
            degree,
            coeffs: vec![ScalarField::Constant(0.0); basis_len(degree)],
        })
    }

    /// A constant 0-form.
    pub fn constant(v: f64) -> Form {
        Form { degree: 0, coeffs: vec![ScalarField::Constant(v)] }
    }

    /// A 0-form with the given coefficient field.
    pub fn scalar(field: ScalarField) -> Form {
        Form { degree: 0, coeffs: vec![field] }
    }

    /// The basis k-form with the given (possibly unordered) indices.
    /// Repeated indices yield the zero form of that degree.
    pub fn basis(indices: &[usize]) -> Result<Form> {
        Form::from_terms(indices.len() as u8, &[(indices, ScalarField::Constant(1.0))])
    }

    /// Builds a form by accumulating `(indices, coefficient)` terms; index
    /// tuples may arrive in any order and are sign-normalized here.
    pub fn from_terms(degree: u8, terms: &[(&[usize], ScalarField)]) -> Result<Form> {
        let mut form = Form::zero(degree)?;
        for (indices, field) in terms {
            if indices.len() != degree as usize {
                return Err(CsError::DegreeMismatch {
                    expected: degree,
                    got: indices.len() as u8,
                });
            }
            if indices.iter().any(|&i| i > 2) {
                return Err(CsError::InvalidParameter(format!(
                    "coframe index out of range in {indices:?}"
                )));
            }
            let mut sorted = indices.to_vec();
            let sign = sort_sign(&mut sorted);
            if sign == 0.0 {
                continue;
            }
            let pos = basis_position(&sorted);
            form.coeffs[pos] = form.coeffs[pos].add(&field.scale(sign));
        }
        Ok(form)
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// The coefficient of the given index tuple, including the sign of its
    /// reordering; zero on repeated indices.
    pub fn coeff(&self, indices: &[usize]) -> ScalarField {
        assert_eq!(indices.len(), self.degree as usize, "coefficient degree");
        let mut sorted = indices.to_vec();
        let sign = sort_sign(&mut sorted);
        if sign == 0.0 {
            return ScalarField::Constant(0.0);
        }
        self.coeffs[basis_position(&sorted)].scale(sign)
    }

    /// Coefficients in canonical basis order.
    pub fn coeffs(&self) -> &[ScalarField] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(ScalarField::is_constant)
    }

    /// The constant coefficients in canonical order, or an error if any
    /// coefficient is position-dependent.
    pub fn constant_coeffs(&self) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| c.as_constant().ok_or(CsError::NonConstantCoefficient))
            .collect()
    }

    /// The single coefficient of a 3-form in the volume basis.
    pub fn top_coefficient(&self) -> Result<f64> {
        if self.degree != 3 {
            return Err(CsError::DegreeMismatch { expected: 3, got: self.degree });
        }
        self.coeffs[0].as_constant().ok_or(CsError::NonConstantCoefficient)
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        if self.degree != other.degree {
            return Err(CsError::DegreeMismatch { expected: self.degree, got: other.degree });
        }
        Ok(Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Form {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> Form {
        self.scale(-1.0)
    }

    /// Evaluates every coefficient at `p`, producing a constant-coefficient form.
    pub fn evaluate_at(&self, p: [f64; 3]) -> Form {
        Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| ScalarField::Constant(c.value_at(p)))
                .collect(),
        }
    }

    /// Graded-anticommutative bilinear product in the coframe basis.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        let total = self.degree + other.degree;
        if total > 3 {
            return Err(CsError::DegreeOverflow(self.degree, other.degree));
        }
        let mut out = Form::zero(total)?;
        for (ia, a) in BASIS[self.degree as usize].iter().zip(&self.coeffs) {
            if a.is_const_zero() {
                continue;
            }
            for (ib, b) in BASIS[other.degree as usize].iter().zip(&other.coeffs) {
                if b.is_const_zero() {
                    continue;
                }
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                let sign = sort_sign(&mut idx);
                if sign == 0.0 {
                    continue;
                }
                let pos = basis_position(&idx);
                out.coeffs[pos] = out.coeffs[pos].add(&a.mul(b).scale(sign));
            }
        }
        Ok(out)
    }
}

/// Which exterior-derivative rule a coframe obeys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoframeKind {
    /// Invariant coframe of a Lie group: d theta^k = -1/2 c^k_ij theta^i ^ theta^j.
    LieCoframe,
    /// Coordinate coframe: d theta^k = 0, coefficients differentiate.
    CoordinateCoframe,
}

/// Structure constants c^k_ij of the frame, antisymmetric in (i, j).
#[derive(Clone, Debug)]
pub struct FrameStructure {
    kind: CoframeKind,
    c: [[[f64; 3]; 3]; 3],
}

impl FrameStructure {
    pub fn coordinate() -> FrameStructure {
        FrameStructure { kind: CoframeKind::CoordinateCoframe, c: [[[0.0; 3]; 3]; 3] }
    }

    pub fn lie(c: [[[f64; 3]; 3]; 3]) -> Result<FrameStructure> {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    if c[k][i][j] != -c[k][j][i] {
                        return Err(CsError::InvalidParameter(format!(
                            "structure constants not antisymmetric at c^{k}_{i}{j}"
                        )));
                    }
                }
            }
        }
        Ok(FrameStructure { kind: CoframeKind::LieCoframe, c })
    }

    pub fn kind(&self) -> CoframeKind {
        self.kind
    }

    /// c^k_ij, the theta-k component of the bracket of frame fields i and j.
    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[k][i][j]
    }

    /// d theta^k as a constant-coefficient 2-form.
    pub fn dtheta(&self, k: usize) -> Form {
        let mut form = Form::zero(2).expect("degree 2");
        if self.kind == CoframeKind::CoordinateCoframe {
            return form;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = -self.c[k][i][j];
                if v != 0.0 {
                    let pos = basis_position(&[i, j]);
                    form.coeffs[pos] = ScalarField::Constant(v);
                }
            }
        }
        form
    }
}

/// Leibniz expansion of d over a basis index tuple: sum over positions of
/// (-1)^pos prefix ^ dtheta ^ suffix. Zero for coordinate coframes.
fn d_basis_tuple(indices: &[usize], fs: &FrameStructure) -> Result<Form> {
    let mut acc = Form::zero(indices.len() as u8 + 1)?;
    if fs.kind == CoframeKind::CoordinateCoframe {
        return Ok(acc);
    }
    for (pos, &i) in indices.iter().enumerate() {
        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
        let prefix = Form::basis(&indices[..pos])?;
        let suffix = Form::basis(&indices[pos + 1..])?;
        let term = prefix.wedge(&fs.dtheta(i))?.wedge(&suffix)?;
        acc = acc.add(&term.scale(sign))?;
    }
    Ok(acc)
}

/// Exterior derivative, evaluated at `point` when any coefficient is
/// position-dependent (the result then has constant coefficients holding
/// the derivative's values at that point).
///
/// For Lie coframes with constant coefficients the result is exact:
/// d theta^k = -1/2 c^k_ij theta^i ^ theta^j extended by the Leibniz rule.
pub fn exterior_derivative(a: &Form, fs: &FrameStructure, point: Option<[f64; 3]>) -> Result<Form> {
    if a.degree > 2 {
        return Err(CsError::InvalidParameter(
            "cannot differentiate a top-degree form".into(),
        ));
    }
    let needs_point = !a.is_constant();
    let p = match (needs_point, point) {
        (true, None) => return Err(CsError::MissingChartPoint),
        (true, Some(p)) => Some(p),
        (false, _) => point,
    };
    let mut out = Form::zero(a.degree + 1)?;
    for (indices, coeff) in BASIS[a.degree as usize].iter().zip(&a.coeffs) {
        match coeff {
            ScalarField::Constant(v) => {
                if *v != 0.0 {
                    out = out.add(&d_basis_tuple(indices, fs)?.scale(*v))?;
                }
            }
            ScalarField::Evaluable(_) => {
                let jet = coeff.jet_at(p.expect("point checked above"));
                // gradient term: sum_m (d_m c) theta^m ^ theta^I
                for m in 0..3 {
                    if jet.d1[m] != 0.0 {
                        let mut idx = vec![m];
                        idx.extend_from_slice(indices);
                        let term =
                            Form::from_terms(a.degree + 1, &[(&idx, ScalarField::Constant(jet.d1[m]))])?;
                        out = out.add(&term)?;
                    }
                }
                // coefficient times d of the basis tuple (Lie coframes only)
                if fs.kind == CoframeKind::LieCoframe && jet.v != 0.0 {
                    out = out.add(&d_basis_tuple(indices, fs)?.scale(jet.v))?;
                }
            }
        }
    }
    Ok(out)
}

/// Lazy exterior derivative: position-dependent coefficients stay
/// evaluable (via jet shifts), so d can be applied repeatedly. Each
/// application costs one derivative order of the underlying jets.
pub fn differential(a: &Form, fs: &FrameStructure) -> Result<Form> {
    if a.degree > 2 {
        return Err(CsError::InvalidParameter(
            "cannot differentiate a top-degree form".into(),
        ));
    }
    let mut out = Form::zero(a.degree + 1)?;
    for (indices, coeff) in BASIS[a.degree as usize].iter().zip(&a.coeffs) {
        if coeff.is_const_zero() {
            continue;
        }
        for m in 0..3 {
            let grad = coeff.partial(m);
            if grad.is_const_zero() {
                continue;
            }
            let mut idx = vec![m];
            idx.extend_from_slice(indices);
            out = out.add(&Form::from_terms(a.degree + 1, &[(&idx, grad)])?)?;
        }
        if fs.kind == CoframeKind::LieCoframe {
            let d_tuple = d_basis_tuple(indices, fs)?;
            for (tidx, tcoeff) in BASIS[a.degree as usize + 1].iter().zip(d_tuple.coeffs()) {
                if tcoeff.is_const_zero() {
                    continue;
                }
                let term = Form::from_terms(a.degree + 1, &[(tidx, coeff.mul(tcoeff))])?;
                out = out.add(&term)?;
            }
        }
    }
    Ok(out)
}

/// A 3x3 matrix of forms of uniform degree (connection, curvature, and
/// their derivatives). The skew flag is only set after verification.
#[derive(Clone, Debug)]
pub struct MatrixForm {
    degree: u8,
    entries: Vec<Form>,
    skew_verified: bool,
}

impl MatrixForm {
    pub fn zero(degree: u8) -> Result<MatrixForm> {
        Ok(MatrixForm {
            degree,
            entries: vec![Form::zero(degree)?; 9],
            skew_verified: false,
        })
    }

    /// Builds entries from a closure over (row, column).
    pub fn from_fn<F>(degree: u8, mut f: F) -> Result<MatrixForm>
    where
        F: FnMut(usize, usize) -> Result<Form>,
    {
        let mut entries = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                let e = f(i, j)?;
                if e.degree() != degree {
                    return Err(CsError::DegreeMismatch { expected: degree, got: e.degree() });
                }
                entries.push(e);
            }
        }
        Ok(MatrixForm { degree, entries, skew_verified: false })
    }

    /// The identity pattern: constant 1 on the diagonal, zero elsewhere.
    pub fn identity() -> MatrixForm {
        MatrixForm::from_fn(0, |i, j| {
            Ok(if i == j { Form::constant(1.0) } else { Form::constant(0.0) })
        })
        .expect("degree 0")
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn entry(&self, i: usize, j: usize) -> &Form {
        &self.entries[3 * i + j]
    }

    pub fn is_skew_verified(&self) -> bool {
        self.skew_verified
    }

    /// Verifies entry(i, j) = -entry(j, i) on constant coefficients and sets
    /// the skew flag. Position-dependent entries cannot be verified.
    pub fn with_skew_verified(mut self) -> Result<MatrixForm> {
        for i in 0..3 {
            for j in 0..3 {
                let a = self.entry(i, j).constant_coeffs()?;
                let b = self.entry(j, i).constant_coeffs()?;
                for (x, y) in a.iter().zip(&b) {
                    if *x != -*y {
                        return Err(CsError::InvalidParameter(format!(
                            "matrix is not skew-symmetric at entry ({i},{j})"
                        )));
                    }
                }
            }
        }
        self.skew_verified = true;
        Ok(self)
    }

    pub fn add(&self, other: &MatrixForm) -> Result<MatrixForm> {
        if self.degree != other.degree {
            return Err(CsError::DegreeMismatch { expected: self.degree, got: other.degree });
        }
        MatrixForm::from_fn(self.degree, |i, j| self.entry(i, j).add(other.entry(i, j)))
    }

    pub fn scale(&self, c: f64) -> MatrixForm {
        MatrixForm {
            degree: self.degree,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            skew_verified: false,
        }
    }

    pub fn evaluate_at(&self, p: [f64; 3]) -> MatrixForm {
        MatrixForm {
            degree: self.degree,
            entries: self.entries.iter().map(|e| e.evaluate_at(p)).collect(),
            skew_verified: false,
        }
    }
}

/// (A ^ B)_i^j = sum_p A_i^p ^ B_p^j.
pub fn matrix_wedge(a: &MatrixForm, b: &MatrixForm) -> Result<MatrixForm> {
    if a.degree() + b.degree() > 3 {
        return Err(CsError::DegreeOverflow(a.degree(), b.degree()));
    }
    MatrixForm::from_fn(a.degree() + b.degree(), |i, j| {
        let mut acc = Form::zero(a.degree() + b.degree())?;
        for p in 0..3 {
            acc = acc.add(&a.entry(i, p).wedge(b.entry(p, j))?)?;
        }
        Ok(acc)
    })
}

/// Sum of the diagonal entries.
pub fn trace(a: &MatrixForm) -> Form {
    let mut acc = Form::zero(a.degree()).expect("valid degree");
    for p in 0..3 {
        acc = acc.add(a.entry(p, p)).expect("uniform degree");
    }
    acc
}

/// The matrix Lie-algebra bracket [w, w] of a matrix of 1-forms with itself.
///
/// The entries compose in the order compatible with the curvature
/// convention Omega = d omega - omega ^ omega used throughout; with the
/// row-into-column contraction of [`matrix_wedge`] this is
/// -2 matrix_wedge(w, w). The closed-form t-integration of the
/// transgression form and its variation identity (see chern_simons tests)
/// pin this sign.
pub fn lie_bracket_form(omega: &MatrixForm) -> Result<MatrixForm> {
    if omega.degree() != 1 {
        return Err(CsError::DegreeMismatch { expected: 1, got: omega.degree() });
    }
    Ok(matrix_wedge(omega, omega)?.scale(-2.0))
}

/// Entrywise exterior derivative of a matrix of forms.
pub fn matrix_exterior_derivative(
    a: &MatrixForm,
    fs: &FrameStructure,
    point: Option<[f64; 3]>,
) -> Result<MatrixForm> {
    MatrixForm::from_fn(a.degree() + 1, |i, j| exterior_derivative(a.entry(i, j), fs, point))
}
