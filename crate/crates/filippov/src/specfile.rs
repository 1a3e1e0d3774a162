//! JSON system specs and the bundled examples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FlpError, Result};
use crate::linalg::{Mat2, Vec2};
use crate::system::{normalize_to_y_axis, AffineField, FilippovSystem, RawSystem};
use crate::transform::TransformRecord;

/// A system `z' = A± z + b±` on the two sides of `c·z + d = 0`; the `plus`
/// field governs `c·z + d > 0`. Omitted `c` and `d` mean `(1, 0)` and `0`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub A_plus: Mat2,
    pub b_plus: Vec2,
    pub A_minus: Mat2,
    pub b_minus: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Named aliases for entries, e.g. `"rho": "b_minus[1]"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
}

impl SystemSpec {
    pub fn from_fields(plus: &AffineField, minus: &AffineField) -> Self {
        SystemSpec {
            name: None,
            note: None,
            A_plus: plus.a,
            b_plus: plus.b,
            A_minus: minus.a,
            b_minus: minus.b,
            c: None,
            d: None,
            parameters: BTreeMap::new(),
        }
    }

    pub fn from_system(sys: &FilippovSystem) -> Self {
        Self::from_fields(&sys.right, &sys.left)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text).map_err(|e| FlpError::MalformedSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Pretty JSON with a trailing newline, the layout of the bundled files.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn c(&self) -> Vec2 {
        self.c.unwrap_or([1.0, 0.0])
    }

    pub fn d(&self) -> f64 {
        self.d.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let mut all: Vec<f64> = Vec::new();
        for m in [&self.A_plus, &self.A_minus] {
            all.extend(m.iter().flatten());
        }
        all.extend(self.b_plus);
        all.extend(self.b_minus);
        all.extend(self.c());
        all.push(self.d());
        if all.iter().any(|v| !v.is_finite()) {
            return Err(FlpError::MalformedSpec("non-finite entry".into()));
        }
        if self.c() == [0.0, 0.0] {
            return Err(FlpError::ZeroNormal);
        }
        for (name, path) in &self.parameters {
            if self.get(path).is_none() {
                return Err(FlpError::MalformedSpec(format!("parameter {name} names unknown entry {path}")));
            }
        }
        Ok(())
    }

    pub fn raw(&self) -> RawSystem {
        RawSystem {
            plus: AffineField::new(self.A_plus, self.b_plus),
            minus: AffineField::new(self.A_minus, self.b_minus),
            c: self.c(),
            d: self.d(),
        }
    }

    pub fn system(&self) -> Result<(FilippovSystem, TransformRecord)> {
        self.validate()?;
        normalize_to_y_axis(&self.raw())
    }

    fn resolve<'a>(&'a self, name: &'a str) -> &'a str {
        self.parameters.get(name).map_or(name, String::as_str)
    }

    fn slot(&mut self, path: &str) -> Option<&mut f64> {
        let (head, idx) = parse_path(path)?;
        match (head, idx.as_slice()) {
            ("A_plus", [i, j]) => self.A_plus.get_mut(*i)?.get_mut(*j),
            ("A_minus", [i, j]) => self.A_minus.get_mut(*i)?.get_mut(*j),
            ("b_plus", [i]) => self.b_plus.get_mut(*i),
            ("b_minus", [i]) => self.b_minus.get_mut(*i),
            ("c", [i]) => {
                let c = self.c.get_or_insert([1.0, 0.0]);
                c.get_mut(*i)
            }
            ("d", []) => Some(self.d.get_or_insert(0.0)),
            _ => None,
        }
    }

    /// Value of an entry path such as `A_plus[0][1]` or a named parameter.
    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = self.clone();
        let path = self.resolve(name).to_string();
        copy.slot(&path).map(|v| *v)
    }

    /// Copy with one entry or named parameter replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<SystemSpec> {
        let mut copy = self.clone();
        let path = self.resolve(name).to_string();
        match copy.slot(&path) {
            Some(v) => *v = value,
            None => return Err(FlpError::MalformedSpec(format!("unknown parameter {name}"))),
        }
        Ok(copy)
    }
}

fn parse_path(path: &str) -> Option<(&str, Vec<usize>)> {
    let head_end = path.find('[').unwrap_or(path.len());
    let head = &path[..head_end];
    let mut idx = Vec::new();
    let mut rest = &path[head_end..];
    while !rest.is_empty() {
        let close = rest.find(']')?;
        if !rest.starts_with('[') {
            return None;
        }
        idx.push(rest[1..close].trim().parse().ok()?);
        rest = &rest[close + 1..];
    }
    Some((head, idx))
}

pub const BUNDLED: [(&str, &str); 11] = [
    ("example1", include_str!("../specs/example1.json")),
    ("example2", include_str!("../specs/example2.json")),
    ("example3", include_str!("../specs/example3.json")),
    ("example4", include_str!("../specs/example4.json")),
    ("example5", include_str!("../specs/example5.json")),
    ("example6", include_str!("../specs/example6.json")),
    ("example7", include_str!("../specs/example7.json")),
    ("rho_family", include_str!("../specs/rho_family.json")),
    ("eta_family", include_str!("../specs/eta_family.json")),
    ("buck_converter", include_str!("../specs/buck_converter.json")),
    ("dry_friction", include_str!("../specs/dry_friction.json")),
];

pub fn bundled_examples() -> Vec<(&'static str, SystemSpec)> {
    BUNDLED.iter().map(|(n, t)| (*n, SystemSpec::parse(t).expect("bundled spec parses"))).collect()
}

pub fn bundled(name: &str) -> Option<SystemSpec> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, t)| SystemSpec::parse(t).expect("bundled spec parses"))
}
