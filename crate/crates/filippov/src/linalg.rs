//! Fixed-size 2×2 helpers.

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn scale(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

pub fn add(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn norm(v: &Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Max-abs entry norm.
pub fn mat_norm(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Invertible affine map `z -> m z + v`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Affine2 {
    pub m: Mat2,
    pub v: Vec2,
}

impl Affine2 {
    pub fn identity() -> Self {
        Affine2 { m: IDENTITY, v: [0.0, 0.0] }
    }

    pub fn apply(&self, z: &Vec2) -> Vec2 {
        add(&mat_vec(&self.m, z), &self.v)
    }

    pub fn inverse(&self) -> Affine2 {
        let mi = inverse(&self.m).expect("affine map is invertible by construction");
        let v = mat_vec(&mi, &self.v);
        Affine2 { m: mi, v: [-v[0], -v[1]] }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Affine2) -> Affine2 {
        Affine2 { m: mat_mul(&self.m, &first.m), v: self.apply(&first.v) }
    }

    pub fn det(&self) -> f64 {
        det(&self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_inverse_round_trip() {
        let a = Affine2 { m: [[2.0, 1.0], [-0.5, 3.0]], v: [1.0, -2.0] };
        let z = [0.3, -4.0];
        let back = a.inverse().apply(&a.apply(&z));
        assert!((back[0] - z[0]).abs() < 1e-14 && (back[1] - z[1]).abs() < 1e-14);
    }

    #[test]
    fn composition_order() {
        let a = Affine2 { m: [[0.0, 1.0], [1.0, 0.0]], v: [1.0, 0.0] };
        let b = Affine2 { m: [[2.0, 0.0], [0.0, 1.0]], v: [0.0, 3.0] };
        let z = [1.0, 2.0];
        let c = b.after(&a);
        assert_eq!(c.apply(&z), b.apply(&a.apply(&z)));
    }
}
