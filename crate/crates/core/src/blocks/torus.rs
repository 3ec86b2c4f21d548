
#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use crate::math::ScalarFn;
use crate::{Error, Result};

use super::{LutzPair, Profile};

/// Element of `GL₂(ℤ)`: a linear automorphism of the 2-torus.
///
/// Points map as `x ↦ M x`; vector components follow `M`, 1-form coefficients
/// follow `M⁻ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusMatrix([[i64; 2]; 2]);

impl TorusMatrix {
    pub const IDENTITY: Self = Self([[1, 0], [0, 1]]);
    /// `(θ, ψ) ↦ (θ, −ψ)`, the orientation-reversing flip used for gluings.
    pub const FLIP: Self = Self([[1, 0], [0, -1]]);

    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = det(&m);
        if det.abs() != 1 {
            return Err(Error::NotTorusAutomorphism { det });
        }
        Ok(Self(m))
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.0
    }

    pub fn det(&self) -> i64 {
        det(&self.0)
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        let s = self.det();
        Self([[s * d, -s * b], [-s * c, s * a]])
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[a, c], [b, d]])
    }

    pub fn inverse_transpose(&self) -> Self {
        self.inverse().transpose()
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [m[0][0] as f64 * v[0] + m[0][1] as f64 * v[1], m[1][0] as f64 * v[0] + m[1][1] as f64 * v[1]]
    }

    fn combine(&self, u: &ScalarFn, v: &ScalarFn) -> (ScalarFn, ScalarFn) {
        let m = self.0;
        (
            ScalarFn::linear_combination(&[(m[0][0] as f64, u), (m[0][1] as f64, v)]),
            ScalarFn::linear_combination(&[(m[1][0] as f64, u), (m[1][1] as f64, v)]),
        )
    }
}

pub(crate) fn det(m: &[[i64; 2]; 2]) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Objects that live on a torus and change under `GL₂(ℤ)` coordinate changes.
pub trait TorusTransform: Sized {
    fn transformed(&self, m: &TorusMatrix) -> Self;
}

impl TorusTransform for Profile {
    fn transformed(&self, m: &TorusMatrix) -> Self {
        let (f, g) = m.combine(self.f(), self.g());
        // M is invertible, so a nonvanishing field stays nonvanishing
        Profile::new(f, g).expect("invertible image of a nonsingular profile")
    }
}

impl TorusTransform for LutzPair {
    fn transformed(&self, m: &TorusMatrix) -> Self {
        let (p, q) = m.inverse_transpose().combine(&self.p, &self.q);
        LutzPair::new(p, q)
    }
}

impl TorusTransform for BoundaryJet {
    fn transformed(&self, m: &TorusMatrix) -> Self {
        let mt = m.inverse_transpose();
        let [p, q] = mt.apply([self.p, self.q]);
        let [dp, dq] = mt.apply([self.dp, self.dq]);
        Self { p, q, dp, dq }
    }
}

/// Checks `|det M| = 1`, then transforms.
pub fn transform_torus<T: TorusTransform>(object: &T, m: [[i64; 2]; 2]) -> Result<T> {
    Ok(object.transformed(&TorusMatrix::new(m)?))
}

/// First-order jet `(p, q, p′, q′)` of a `T²`-invariant 1-form at a boundary torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryJet {
    pub p: f64,
    pub q: f64,
    pub dp: f64,
    pub dq: f64,
}

impl BoundaryJet {
    pub const fn new(p: f64, q: f64, dp: f64, dq: f64) -> Self {
        Self { p, q, dp, dq }
    }

    pub fn of_pair(pair: &LutzPair, t: f64) -> Self {
        Self { p: pair.p.eval(t), q: pair.q.eval(t), dp: pair.p.deriv(t), dq: pair.q.deriv(t) }
    }

    /// `p′q − q′p`.
    pub fn wronskian(&self) -> f64 {
        self.dp * self.q - self.dq * self.p
    }

    pub fn magnitude(&self) -> f64 {
        self.p.hypot(self.q)
    }

    /// Jet with the transverse coordinate reversed.
    pub fn reversed(&self) -> Self {
        Self { dp: -self.dp, dq: -self.dq, ..*self }
    }

    /// What the neighbouring block must see across a gluing `x_b = M x_a`, when
    /// both jets are taken along their own outward normals.
    pub fn glued_across(&self, m: &TorusMatrix) -> Self {
        self.transformed(m).reversed()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [self.p - other.p, self.q - other.q, self.dp - other.dp, self.dq - other.dq]
            .iter()
            .fold(0.0, |m, d| m.max(d.abs()))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::lutz_valid;

    #[test]
    fn determinant_gate() {
        assert!(TorusMatrix::new([[1, 0], [0, 1]]).is_ok());
        assert_eq!(TorusMatrix::new([[1, 0], [0, 2]]).unwrap_err(), Error::NotTorusAutomorphism { det: 2 });
        let p = Profile::constant(1.0, 2.0).unwrap();
        assert!(transform_torus(&p, [[1, 0], [0, 2]]).is_err());
    }

    #[test]
    fn identity_and_swap() {
        let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.5), ScalarFn::affine(1.0, 1.0)).unwrap();
        assert_eq!(transform_torus(&p, [[1, 0], [0, 1]]).unwrap(), p);
        let swapped = transform_torus(&p, [[0, 1], [1, 0]]).unwrap();
        assert_eq!(swapped, p.swapped());
    }

    #[test]
    fn inverse_round_trip() {
        let m = TorusMatrix::new([[2, 1], [1, 1]]).unwrap();
        let jet = BoundaryJet::new(0.3, -1.2, 0.7, 2.0);
        let back = jet.transformed(&m).transformed(&m.inverse());
        assert!(back.max_abs_diff(&jet) < 1e-14);
        assert_eq!(m.inverse().inverse(), m);
    }

    #[test]
    fn wronskian_scales_by_determinant() {
        let pair = LutzPair::new(ScalarFn::constant(1.0), ScalarFn::affine(1.0, 0.0));
        for m in [[[2, 1], [1, 1]], [[0, 1], [1, 0]], [[1, 3], [0, -1]]] {
            let tm = TorusMatrix::new(m).unwrap();
            let out = pair.transformed(&tm);
            for t in [0.0, 0.4, 1.0] {
                assert!((out.wronskian(t) - tm.det() as f64 * pair.wronskian(t)).abs() < 1e-12);
            }
            assert!(lutz_valid(&out).is_valid);
        }
    }
}
