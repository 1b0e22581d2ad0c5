//! Truncated Taylor expansions (value and partial derivatives to order 3)
//! in three chart variables. Arithmetic propagates derivatives by the
//! Leibniz and chain rules, so coefficient fields built from these jets
//! carry analytic derivatives instead of numeric ones.

/// Value plus symmetric partial derivatives to third order at a point.
///
/// The order budget shrinks under [`Jet3::shift`]: a shifted jet has valid
/// data only up to order 2 (its third-order block is zeroed), and so on.
/// Callers composing shifts are responsible for reading only valid orders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: [f64; 3],
    pub d2: [[f64; 3]; 3],
    pub d3: [[[f64; 3]; 3]; 3],
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 {
        v: 0.0,
        d1: [0.0; 3],
        d2: [[0.0; 3]; 3],
        d3: [[[0.0; 3]; 3]; 3],
    };

    pub fn constant(v: f64) -> Jet3 {
        Jet3 { v, ..Jet3::ZERO }
    }

    /// The coordinate function of the given axis evaluated at `x`.
    pub fn coordinate(axis: usize, x: f64) -> Jet3 {
        let mut j = Jet3::constant(x);
        j.d1[axis] = 1.0;
        j
    }

    /// The jet of the partial derivative along `axis`. Drops one order.
    pub fn shift(&self, axis: usize) -> Jet3 {
        let mut out = Jet3::ZERO;
        out.v = self.d1[axis];
        for m in 0..3 {
            out.d1[m] = self.d2[axis][m];
            for n in 0..3 {
                out.d2[m][n] = self.d3[axis][m][n];
            }
        }
        out
    }

    pub fn add(&self, o: &Jet3) -> Jet3 {
        let mut r = *self;
        r.v += o.v;
        for i in 0..3 {
            r.d1[i] += o.d1[i];
            for j in 0..3 {
                r.d2[i][j] += o.d2[i][j];
                for k in 0..3 {
                    r.d3[i][j][k] += o.d3[i][j][k];
                }
            }
        }
        r
    }

    pub fn sub(&self, o: &Jet3) -> Jet3 {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Jet3 {
        let mut r = *self;
        r.v *= c;
        for i in 0..3 {
            r.d1[i] *= c;
            for j in 0..3 {
                r.d2[i][j] *= c;
                for k in 0..3 {
                    r.d3[i][j][k] *= c;
                }
            }
        }
        r
    }

    pub fn mul(&self, o: &Jet3) -> Jet3 {
        let (u, w) = (self, o);
        let mut r = Jet3::ZERO;
        r.v = u.v * w.v;
        for i in 0..3 {
            r.d1[i] = u.d1[i] * w.v + u.v * w.d1[i];
            for j in 0..3 {
                r.d2[i][j] =
                    u.d2[i][j] * w.v + u.d1[i] * w.d1[j] + u.d1[j] * w.d1[i] + u.v * w.d2[i][j];
                for k in 0..3 {
                    r.d3[i][j][k] = u.d3[i][j][k] * w.v
                        + u.d2[i][j] * w.d1[k]
                        + u.d2[i][k] * w.d1[j]
                        + u.d2[j][k] * w.d1[i]
                        + u.d1[i] * w.d2[j][k]
                        + u.d1[j] * w.d2[i][k]
                        + u.d1[k] * w.d2[i][j]
                        + u.v * w.d3[i][j][k];
                }
            }
        }
        r
    }

    /// Compose a scalar function through this jet given its derivatives
    /// g', g'', g''' at the jet's value.
    pub fn chain(&self, g0: f64, g1: f64, g2: f64, g3: f64) -> Jet3 {
        let u = self;
        let mut r = Jet3::ZERO;
        r.v = g0;
        for i in 0..3 {
            r.d1[i] = g1 * u.d1[i];
            for j in 0..3 {
                r.d2[i][j] = g2 * u.d1[i] * u.d1[j] + g1 * u.d2[i][j];
                for k in 0..3 {
                    r.d3[i][j][k] = g3 * u.d1[i] * u.d1[j] * u.d1[k]
                        + g2 * (u.d2[i][j] * u.d1[k] + u.d2[i][k] * u.d1[j] + u.d2[j][k] * u.d1[i])
                        + g1 * u.d3[i][j][k];
                }
            }
        }
        r
    }

    pub fn sin(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s, -c)
    }

    pub fn cos(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c, s)
    }

    pub fn recip(&self) -> Jet3 {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x))
    }

    pub fn div(&self, o: &Jet3) -> Jet3 {
        self.mul(&o.recip())
    }
}
