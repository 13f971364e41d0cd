//! Run configuration: JSON with explicit units in field names, since unit
//! mix-ups are the dominant failure mode in this domain.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::force::MaterialModel;
use crate::geometry::{ThreadingProfile, ToolGeometry, ToothOutline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Curved,
    Colwell,
    Young,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Curved => "curved",
            ModelKind::Colwell => "colwell",
            ModelKind::Young => "young",
        }
    }

    pub fn all() -> Vec<ModelKind> {
        vec![ModelKind::Curved, ModelKind::Colwell, ModelKind::Young]
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curved" => Ok(ModelKind::Curved),
            "colwell" => Ok(ModelKind::Colwell),
            "young" => Ok(ModelKind::Young),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolSpec {
    pub kappa_r_deg: f64,
    pub epsilon_deg: f64,
    pub nose_radius_mm: f64,
    #[serde(default)]
    pub side_rake_deg: f64,
    #[serde(default)]
    pub back_rake_deg: f64,
}

impl ToolSpec {
    pub fn build(&self) -> Result<ToolGeometry> {
        ToolGeometry::from_degrees(
            self.kappa_r_deg,
            self.epsilon_deg,
            self.nose_radius_mm,
            self.side_rake_deg,
            self.back_rake_deg,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeedsSpec {
    List(Vec<f64>),
    Range { from_mm: f64, to_mm: f64, count: usize },
}

impl FeedsSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            FeedsSpec::List(v) => v.clone(),
            FeedsSpec::Range { from_mm, to_mm, count } => {
                let n = (*count).max(2);
                (0..n)
                    .map(|i| from_mm + (to_mm - from_mm) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub feeds_mm: FeedsSpec,
    pub depths_mm: Vec<f64>,
    #[serde(default)]
    pub cutting_speed_m_min: Option<f64>,
    #[serde(default)]
    pub spindle_rpm: Option<f64>,
    #[serde(default)]
    pub workpiece_radius_mm: Option<f64>,
}

/// Threading sweep: a two-tooth pass at fixed first infeed with the
/// increment of the selected tooth swept over `delta_a_mm`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreadingSpec {
    pub pitch_width_mm: f64,
    pub nose_radius_mm: f64,
    pub steep_flank_deg: f64,
    pub slant_flank_deg: f64,
    pub tooth_height_mm: f64,
    pub a1_mm: f64,
    pub delta_a_mm: Vec<f64>,
    #[serde(default = "default_tooth")]
    pub tooth: usize,
}

fn default_tooth() -> usize {
    2
}

impl ThreadingSpec {
    pub fn profile_for(&self, delta_a: f64) -> Result<ThreadingProfile> {
        let tooth = ToothOutline::buttress(
            self.steep_flank_deg.to_radians(),
            self.slant_flank_deg.to_radians(),
            self.tooth_height_mm,
            self.nose_radius_mm,
        )?;
        let mut infeeds = vec![self.a1_mm];
        for k in 1..self.tooth.max(2) {
            infeeds.push(self.a1_mm + delta_a * k as f64);
        }
        ThreadingProfile::new(vec![tooth; self.tooth.max(2)], self.pitch_width_mm, infeeds)
    }
}

fn default_poisson() -> f64 {
    0.3
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_young_segments() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: ToolSpec,
    pub material: MaterialModel,
    #[serde(default)]
    pub process: Option<ProcessSpec>,
    #[serde(default)]
    pub threading: Option<ThreadingSpec>,
    pub models: Vec<ModelKind>,
    pub mesh_size_mm: f64,
    #[serde(default = "default_poisson")]
    pub poisson: f64,
    #[serde(default)]
    pub compliance_m_per_n: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub normalized: bool,
    #[serde(default)]
    pub plots: bool,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default = "default_young_segments")]
    pub young_segments: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no model selected".into()));
        }
        if !(self.mesh_size_mm > 0.0) {
            return Err(Error::InvalidConfig("mesh_size_mm must be positive".into()));
        }
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return Err(Error::InvalidConfig("poisson must lie in (0, 0.5)".into()));
        }
        match (&self.process, &self.threading) {
            (None, None) => {
                return Err(Error::InvalidConfig("either process or threading must be given".into()))
            }
            (Some(p), _) => {
                if p.feeds_mm.values().iter().any(|&f| !(f > 0.0)) {
                    return Err(Error::InvalidConfig("feeds must be positive".into()));
                }
                if p.depths_mm.is_empty() || p.depths_mm.iter().any(|&a| !(a > 0.0)) {
                    return Err(Error::InvalidConfig("depths must be positive".into()));
                }
            }
            (None, Some(t)) => {
                if t.delta_a_mm.is_empty() || t.delta_a_mm.iter().any(|&d| !(d > 0.0)) {
                    return Err(Error::InvalidConfig("delta_a values must be positive".into()));
                }
            }
        }
        if self.normalized {
            if !matches!(self.material, MaterialModel::Linear { .. }) {
                return Err(Error::InvalidConfig(
                    "normalized output requires a linear material model (forces scale with K_uc A_max)"
                        .into(),
                ));
            }
            if self.threading.is_some() {
                return Err(Error::InvalidConfig("normalized output applies to turning sweeps".into()));
            }
        }
        if self.threading.is_some() && self.compliance_m_per_n.is_some() {
            return Err(Error::InvalidConfig(
                "deflection compensation is defined for turning sweeps (depth of cut couples to the radial deflection)".into(),
            ));
        }
        if self.young_segments < 8 {
            return Err(Error::InvalidConfig("young_segments must be >= 8".into()));
        }
        Ok(())
    }
}
