//! Declarative run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::to_json_string;
use crate::profiles::ProfileCurve;
use crate::spectral::{ClipEdge, GridOptions, EIG_TOL};
use crate::transverse::{BoundedPotential, TransverseProfile};
use crate::variational::CertOptions;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Geometry,
    Transverse,
    Certify,
    Spectrum,
    Sweep,
    Report,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Geometry => "geometry",
            Task::Transverse => "transverse",
            Task::Certify => "certify",
            Task::Spectrum => "spectrum",
            Task::Sweep => "sweep",
            Task::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Plane,
    CapCone { radius: f64, theta: f64 },
    Paraboloid { c: f64 },
    Tabulated { path: PathBuf },
}

fn parse_params(kind: &str, text: Option<&str>, want: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = match text {
        None | Some("") => Vec::new(),
        Some(t) => t
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("{kind}: cannot parse '{x}'"))))
            .collect::<Result<_>>()?,
    };
    if v.len() != want {
        return Err(Error::invalid(format!("{kind} takes {want} parameter(s), got {}", v.len())));
    }
    Ok(v)
}

impl SurfaceSpec {
    /// `plane`, `cap_cone:R,θ`, `paraboloid:c` or `tabulated:path`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (s.trim(), None),
        };
        match kind {
            "plane" => parse_params(kind, rest, 0).map(|_| SurfaceSpec::Plane),
            "cap_cone" => parse_params(kind, rest, 2).map(|p| SurfaceSpec::CapCone { radius: p[0], theta: p[1] }),
            "paraboloid" => parse_params(kind, rest, 1).map(|p| SurfaceSpec::Paraboloid { c: p[0] }),
            "tabulated" => Ok(SurfaceSpec::Tabulated { path: PathBuf::from(rest.unwrap_or("")) }),
            _ => Err(Error::invalid(format!("unknown surface '{kind}'"))),
        }
    }

    pub fn build(&self, base: &Path) -> Result<ProfileCurve> {
        match self {
            SurfaceSpec::Plane => Ok(ProfileCurve::plane()),
            SurfaceSpec::CapCone { radius, theta } => ProfileCurve::cap_cone(*radius, *theta),
            SurfaceSpec::Paraboloid { c } => ProfileCurve::paraboloid(*c),
            SurfaceSpec::Tabulated { path } => ProfileCurve::from_csv(&base.join(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Delta { alpha: f64 },
    SquareWell { depth: f64, a: f64 },
    Sampled { path: PathBuf },
}

impl PotentialSpec {
    /// `delta:α`, `square_well:W0,a` or `sampled:path`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (s.trim(), None),
        };
        match kind {
            "delta" => parse_params(kind, rest, 1).map(|p| PotentialSpec::Delta { alpha: p[0] }),
            "square_well" => parse_params(kind, rest, 2).map(|p| PotentialSpec::SquareWell { depth: p[0], a: p[1] }),
            "sampled" => Ok(PotentialSpec::Sampled { path: PathBuf::from(rest.unwrap_or("")) }),
            _ => Err(Error::invalid(format!("unknown potential '{kind}'"))),
        }
    }

    pub fn build(&self, base: &Path) -> Result<TransverseProfile> {
        match self {
            PotentialSpec::Delta { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::invalid("δ strength must be finite"));
                }
                Ok(TransverseProfile::delta(*alpha))
            }
            PotentialSpec::SquareWell { depth, a } => Ok(TransverseProfile::Bounded(BoundedPotential::square_well(*depth, *a)?)),
            PotentialSpec::Sampled { path } => Ok(TransverseProfile::Bounded(BoundedPotential::from_csv(&base.join(path))?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    pub s_end: f64,
    pub samples: usize,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec { s_end: 100.0, samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransverseSpec {
    pub half_width: f64,
    pub h: f64,
}

impl Default for TransverseSpec {
    fn default() -> Self {
        TransverseSpec { half_width: 40.0, h: 0.005 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifySpec {
    pub schedule: Vec<f64>,
    pub cert_margin: f64,
    pub line_search: bool,
}

impl Default for CertifySpec {
    fn default() -> Self {
        let d = CertOptions::default();
        CertifySpec { schedule: d.schedule, cert_margin: d.cert_margin, line_search: d.line_search }
    }
}

impl CertifySpec {
    pub fn options(&self) -> CertOptions {
        CertOptions { schedule: self.schedule.clone(), cert_margin: self.cert_margin, line_search: self.line_search }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClipEdgeSpec {
    #[default]
    AxisLike,
    Dirichlet,
}

/// Discretization shared by the spectrum and sweep tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub m: u32,
    pub t_half: f64,
    pub h_s: f64,
    pub h_t: f64,
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub eta: f64,
    pub clip_edge: ClipEdgeSpec,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { m: 0, t_half: 10.0, h_s: 0.05, h_t: 0.05, k: 4, tol: EIG_TOL, max_iter: 500, eta: 0.98, clip_edge: ClipEdgeSpec::AxisLike }
    }
}

impl GridSpec {
    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            eta: self.eta,
            clip_edge: match self.clip_edge {
                ClipEdgeSpec::AxisLike => ClipEdge::AxisLike,
                ClipEdgeSpec::Dirichlet => ClipEdge::Dirichlet,
            },
            ..GridOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSpec {
    pub s_end: f64,
    pub grid: GridSpec,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec { s_end: 40.0, grid: GridSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub s_list: Vec<f64>,
    pub grid: GridSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { s_list: vec![20.0, 40.0, 80.0], grid: GridSpec::default() }
    }
}

fn default_seed() -> u64 {
    0x5eed
}

/// One surface, one potential and the parameters of every task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub surface: SurfaceSpec,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub transverse: TransverseSpec,
    #[serde(default)]
    pub certify: CertifySpec,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(surface: SurfaceSpec, potential: PotentialSpec) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            task: None,
            surface,
            potential,
            geometry: GeometrySpec::default(),
            transverse: TransverseSpec::default(),
            certify: CertifySpec::default(),
            spectrum: SpectrumSpec::default(),
            sweep: SweepSpec::default(),
            seed: default_seed(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        match v.get("schema_version").and_then(|x| x.as_u64()) {
            Some(x) if x == SCHEMA_VERSION as u64 => {}
            Some(x) => return Err(Error::Schema(format!("config schema_version {x}, expected {SCHEMA_VERSION}"))),
            None => return Err(Error::Schema("config lacks an integer schema_version".into())),
        }
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks signs and extents that need no numerics.
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64, what: &str| -> Result<()> {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive and finite, got {x}")))
            }
        };
        pos(self.geometry.s_end, "geometry.s_end")?;
        pos(self.transverse.half_width, "transverse.half_width")?;
        pos(self.transverse.h, "transverse.h")?;
        pos(self.spectrum.s_end, "spectrum.s_end")?;
        for g in [&self.spectrum.grid, &self.sweep.grid] {
            pos(g.t_half, "t_half")?;
            pos(g.h_s, "h_s")?;
            pos(g.h_t, "h_t")?;
            pos(g.tol, "tol")?;
            if g.k == 0 {
                return Err(Error::invalid("k must be at least 1"));
            }
        }
        if self.sweep.s_list.is_empty() {
            return Err(Error::invalid("sweep.s_list is empty"));
        }
        for &s in &self.sweep.s_list {
            pos(s, "sweep.s_list entry")?;
        }
        if self.sweep.s_list.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("sweep.s_list must be strictly ascending"));
        }
        Ok(())
    }

    /// Canonical JSON of the configuration.
    pub fn canonical(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical JSON, in hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(to_json_string(&self.canonical()).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONE: &str = r#"{"schema_version": 1,
        "surface": {"kind": "cap_cone", "radius": 1.0, "theta": 1.5707963267948966},
        "potential": {"kind": "delta", "alpha": -2.0}}"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = RunConfig::from_json(CONE).unwrap();
        assert_eq!(c.sweep.s_list, vec![20.0, 40.0, 80.0]);
        assert_eq!(c.certify.schedule, vec![10.0, 30.0, 100.0, 300.0]);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = CONE.replace("\"alpha\"", "\"beta\": 1, \"alpha\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Invalid(_))));
        let bad = CONE.replace("\"surface\"", "\"colour\": 3, \"surface\"");
        assert!(RunConfig::from_json(&bad).is_err());
    }

    #[test]
    fn schema_version_is_checked() {
        let bad = CONE.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn flags_parse() {
        assert_eq!(SurfaceSpec::parse_flag("cap_cone:1,0.5").unwrap(), SurfaceSpec::CapCone { radius: 1.0, theta: 0.5 });
        assert_eq!(PotentialSpec::parse_flag("square_well:1,0.3").unwrap(), PotentialSpec::SquareWell { depth: 1.0, a: 0.3 });
        assert!(SurfaceSpec::parse_flag("cap_cone:1").is_err());
        assert!(PotentialSpec::parse_flag("lorentz:1").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::from_json(CONE).unwrap();
        let mut b = a.clone();
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.clone().hash());
    }
}
