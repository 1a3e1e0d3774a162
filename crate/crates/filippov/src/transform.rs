//! Per-half-plane affine and time-rescale chains.

use serde::{Deserialize, Serialize};

use crate::linalg::{inverse, mat_mul, mat_vec, scale, sub, Affine2, Vec2};
use crate::system::{AffineField, FilippovSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideMap {
    pub map: Affine2,
    /// New time is `time_scale * old time`.
    pub time_scale: f64,
}

impl SideMap {
    pub fn new(map: Affine2, time_scale: f64) -> Self {
        SideMap { map, time_scale }
    }

    pub fn spatial(map: Affine2) -> Self {
        SideMap { map, time_scale: 1.0 }
    }

    /// Image of `z' = A z + b` under the map and the time rescale.
    pub fn push_field(&self, f: &AffineField) -> AffineField {
        let mi = inverse(&self.map.m).expect("side maps are invertible");
        let a = scale(&mat_mul(&mat_mul(&self.map.m, &f.a), &mi), 1.0 / self.time_scale);
        let mb = mat_vec(&self.map.m, &f.b);
        let av = mat_vec(&a, &self.map.v);
        let b = sub(&[mb[0] / self.time_scale, mb[1] / self.time_scale], &av);
        AffineField::new(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Normalize,
    Mirror,
    FlipY,
    ChangeOfVariables,
    TimeRescale,
    Scale,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    /// Applies to source points with x <= 0.
    pub left: SideMap,
    /// Applies to source points with x >= 0.
    pub right: SideMap,
    /// Source left half-plane lands in the target right half-plane.
    pub swaps_sides: bool,
}

impl Step {
    pub fn uniform(kind: StepKind, map: SideMap, swaps_sides: bool) -> Self {
        Step { kind, left: map, right: map, swaps_sides }
    }

    pub fn is_reflection(&self) -> bool {
        self.left.map.det() < 0.0 || self.right.map.det() < 0.0
    }

    fn push_point(&self, z: &Vec2) -> Vec2 {
        if z[0] < 0.0 {
            self.left.map.apply(z)
        } else {
            self.right.map.apply(z)
        }
    }

    fn pull_point(&self, z: &Vec2) -> Vec2 {
        let from_left = self.left.map.inverse().apply(z);
        let from_right = self.right.map.inverse().apply(z);
        let scale = 1.0 + z[0].abs() + z[1].abs();
        if from_left[0] <= 1e-12 * scale && from_right[0] >= -1e-12 * scale {
            // on the axis both blocks agree
            from_left
        } else if from_left[0] <= 0.0 {
            from_left
        } else {
            from_right
        }
    }

    fn push_system(&self, sys: &FilippovSystem) -> FilippovSystem {
        let l = self.left.push_field(&sys.left);
        let r = self.right.push_field(&sys.right);
        if self.swaps_sides {
            FilippovSystem { left: r, right: l }
        } else {
            FilippovSystem { left: l, right: r }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub steps: Vec<Step>,
}

impl TransformRecord {
    pub fn identity() -> Self {
        TransformRecord { steps: Vec::new() }
    }

    pub fn push_step(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TransformRecord) -> TransformRecord {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&next.steps);
        TransformRecord { steps }
    }

    pub fn push(&self, z: &Vec2) -> Vec2 {
        self.steps.iter().fold(*z, |acc, s| s.push_point(&acc))
    }

    pub fn pullback(&self, z: &Vec2) -> Vec2 {
        self.steps.iter().rev().fold(*z, |acc, s| s.pull_point(&acc))
    }

    pub fn push_system(&self, sys: &FilippovSystem) -> FilippovSystem {
        self.steps.iter().fold(*sys, |acc, s| s.push_system(&acc))
    }

    pub fn mirrored(&self) -> bool {
        self.steps.iter().filter(|s| s.swaps_sides).count() % 2 == 1
    }

    pub fn has_reflection(&self) -> bool {
        self.steps.iter().filter(|s| s.is_reflection()).count() % 2 == 1
    }
}
