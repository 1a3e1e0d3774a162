//! Structured reports emitted by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::canonical::{check_premises, classify_csl, shear_to_equal_gammas, to_canonical, CanonicalParams, Premises};
use crate::error::Result;
use crate::halfmaps::{addcond_violation, HalfMapContext};
use crate::periodic::{coexistence, ConfigurationLabel, PeriodicOrbitRecord};
use crate::specfile::SystemSpec;
use crate::system::{
    equilibrium_info, pseudo_equilibria, sigma_decomposition, tangency_points, EquilibriumInfo, FilippovSystem,
    SigmaDecomposition, Side, TangencyInfo,
};
use crate::transform::TransformRecord;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub system: FilippovSystem,
    pub normalization: TransformRecord,
    pub sigma: SigmaDecomposition,
    /// `None` for a side whose matrix is singular.
    pub left_equilibrium: Option<EquilibriumInfo>,
    pub right_equilibrium: Option<EquilibriumInfo>,
    pub tangencies: Vec<TangencyInfo>,
    pub pseudo_equilibria: Vec<[f64; 2]>,
}

pub fn classify_report(spec: &SystemSpec) -> Result<ClassifyReport> {
    let (system, normalization) = spec.system()?;
    Ok(ClassifyReport {
        sigma: sigma_decomposition(&system),
        left_equilibrium: equilibrium_info(&system.left, Side::Left).ok(),
        right_equilibrium: equilibrium_info(&system.right, Side::Right).ok(),
        tangencies: tangency_points(&system),
        pseudo_equilibria: pseudo_equilibria(&system),
        system,
        normalization,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub premises: Premises,
    pub params: CanonicalParams,
    pub tau: f64,
    #[serde(rename = "Delta")]
    pub delta_det: f64,
    pub nu: f64,
    pub switching_pattern: char,
    pub transform: TransformRecord,
    pub reflection: bool,
    /// Parameters after equalizing `γ1` and `γ3`, when `δ = 1`.
    pub sheared: Option<CanonicalParams>,
    /// First failed clause of the half-map condition, for the sheared parameters.
    pub halfmap_condition: Option<String>,
    pub halfmaps: Option<HalfMapContext>,
}

pub fn canonical_report(sys: &FilippovSystem) -> Result<CanonicalReport> {
    let premises = check_premises(sys)?;
    let (params, transform) = to_canonical(sys)?;
    let sheared = shear_to_equal_gammas(&params).ok().map(|(q, _)| q);
    let target = sheared.unwrap_or(params);
    Ok(CanonicalReport {
        premises,
        tau: params.tau(),
        delta_det: params.Delta(),
        nu: params.nu(),
        switching_pattern: classify_csl(&params).map_or('?', |c| c.letter()),
        reflection: transform.has_reflection(),
        transform,
        params,
        sheared,
        halfmap_condition: addcond_violation(&target),
        halfmaps: HalfMapContext::new(&target).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub seed: u64,
    pub spec: SystemSpec,
    pub classification: ClassifyReport,
    /// Canonical data, or the reason it is unavailable.
    pub canonical: std::result::Result<CanonicalReport, String>,
    pub n_crossing: usize,
    pub n_sliding: usize,
    pub n_standard: usize,
    pub configuration: Option<ConfigurationLabel>,
    pub records: Vec<PeriodicOrbitRecord>,
}

pub fn analysis_report(spec: &SystemSpec, seed: u64) -> Result<AnalysisReport> {
    let classification = classify_report(spec)?;
    let sys = classification.system;
    let canonical = canonical_report(&sys).map_err(|e| e.to_string());
    let co = coexistence(&sys)?;
    Ok(AnalysisReport {
        tool_version: TOOL_VERSION.to_string(),
        seed,
        spec: spec.clone(),
        classification,
        canonical,
        n_crossing: co.n_crossing,
        n_sliding: co.n_sliding,
        n_standard: co.n_standard,
        configuration: co.configuration,
        records: co.records,
    })
}
