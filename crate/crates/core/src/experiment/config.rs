//! Experiment configuration: TOML file, command-line overrides, validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::DEFAULT_LMAX;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "STOPTICS_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DesignDump,
    DnSpectrum,
    CloakConverge,
    QuantumConverge,
    TrappedScan,
    Rays,
    WormholeRays,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::DesignDump,
        Self::DnSpectrum,
        Self::CloakConverge,
        Self::QuantumConverge,
        Self::TrappedScan,
        Self::Rays,
        Self::WormholeRays,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::DesignDump => "design-dump",
            Self::DnSpectrum => "dn-spectrum",
            Self::CloakConverge => "cloak-converge",
            Self::QuantumConverge => "quantum-converge",
            Self::TrappedScan => "trapped-scan",
            Self::Rays => "rays",
            Self::WormholeRays => "wormhole-rays",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Medium used by `design-dump` and `dn-spectrum`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    Homogeneous,
    Ideal,
    Truncated,
    Layered,
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayMetricKind {
    Cloak,
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FanKind {
    /// Seeded random directions and impact parameters.
    Random,
    /// Parallel rays along `+x` offset in `y` by the listed impacts.
    Planar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarpKind {
    Product,
    Collimator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub kind: DesignKind,
    /// Truncation radius `R` for truncated and layered designs.
    pub r: f64,
    /// Layer count for layered and quantum designs.
    pub n: usize,
    /// Interior potential `W` for the quantum design.
    pub potential: f64,
    /// Radial sample count of `design-dump`.
    pub grid: usize,
}

impl Default for DesignSection {
    fn default() -> Self {
        Self {
            kind: DesignKind::Ideal,
            r: 1.5,
            n: 16,
            potential: 0.0,
            grid: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub omega: f64,
    pub energy: f64,
    pub l_max: u32,
    /// Degree for the trapped-state scan.
    pub l: u32,
    pub r_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub potentials: Vec<f64>,
    pub energy_range: [f64; 2],
    pub samples: usize,
    /// Relative tolerance of the integrators.
    pub tol: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self {
            omega: 1.0,
            energy: 1.0,
            l_max: DEFAULT_LMAX,
            l: 0,
            r_list: vec![1.5, 1.25, 1.1, 1.05, 1.01],
            n_list: vec![4, 8, 16, 32],
            potentials: vec![0.0, 10.0],
            energy_range: [15.0, 25.0],
            samples: 401,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RaysSection {
    pub metric: RayMetricKind,
    pub fan: FanKind,
    /// Number of random rays.
    pub count: usize,
    pub impact_range: [f64; 2],
    /// Impacts of the planar fan.
    pub impacts: Vec<f64>,
    pub seed: u64,
    /// Launch and exit sphere radius.
    pub radius: f64,
    pub t_max: f64,
    /// Write full polylines (otherwise only the comparison table).
    pub polylines: bool,
}

impl Default for RaysSection {
    fn default() -> Self {
        Self {
            metric: RayMetricKind::Cloak,
            fan: FanKind::Random,
            count: 100,
            impact_range: [0.1, 1.9],
            impacts: Vec::new(),
            seed: 1,
            radius: 3.0,
            t_max: 100.0,
            polylines: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WormholeSection {
    /// Distance `L` between the ball centres.
    pub separation: f64,
    pub handle_length: f64,
    pub warp: WarpKind,
    pub r_min: f64,
    /// Rays start at `z = -start_distance` heading along `+z`, offset in `x`.
    pub impacts: Vec<f64>,
    pub start_distance: f64,
    pub max_transits: usize,
}

impl Default for WormholeSection {
    fn default() -> Self {
        Self {
            separation: 4.0,
            handle_length: 1.0,
            warp: WarpKind::Product,
            r_min: 0.2,
            impacts: vec![0.0, 0.25, 0.5, 0.75, 1.5],
            start_distance: 3.0,
            max_transits: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the experiment kind.
    pub name: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            name: None,
            format: OutputFormat::Both,
        }
    }
}

/// Full experiment description. Every section has defaults, so a file only
/// needs the keys it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub design: DesignSection,
    #[serde(default)]
    pub rays: RaysSection,
    #[serde(default)]
    pub wormhole: WormholeSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            threads: None,
            params: ParamsSection::default(),
            design: DesignSection::default(),
            rays: RaysSection::default(),
            wormhole: WormholeSection::default(),
            output: OutputSection::default(),
        }
    }

    /// Parses TOML text. Errors name the offending line and key.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = Some(out.clone());
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if let Some(tol) = o.tol {
            self.params.tol = tol;
        }
    }

    /// Output directory: the config value, else `$STOPTICS_OUT_DIR`, else `.`.
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn stem(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    /// Range checks for the fields the selected experiment reads.
    pub fn check(&self) -> Result<()> {
        let p = &self.params;
        let bad = |name: &str, value: String, rule: &str| Err(Error::Config(format!("{name} = {value}: must satisfy {rule}")));
        let check_r = |name: &str, r: f64| if r > 1.0 && r < 2.0 { Ok(()) } else { bad(name, r.to_string(), "1 < R < 2") };
        let check_n = |name: &str, n: usize| if n >= 1 { Ok(()) } else { bad(name, n.to_string(), "n >= 1") };
        if !(p.tol > 0.0 && p.tol < 1.0) {
            return bad("params.tol", p.tol.to_string(), "0 < tol < 1");
        }
        if self.threads == Some(0) {
            return bad("threads", "0".into(), "threads >= 1");
        }
        if let Some(name) = &self.output.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return bad("output.name", format!("{name:?}"), "a non-empty file stem");
            }
        }
        let needs_design = matches!(self.kind, ExperimentKind::DesignDump | ExperimentKind::DnSpectrum);
        if needs_design {
            let d = &self.design;
            match d.kind {
                DesignKind::Truncated | DesignKind::Layered => check_r("design.r", d.r)?,
                _ => {}
            }
            if matches!(d.kind, DesignKind::Layered | DesignKind::Quantum) {
                check_n("design.n", d.n)?;
            }
            if self.kind == ExperimentKind::DesignDump && d.grid < 2 {
                return bad("design.grid", d.grid.to_string(), "grid >= 2");
            }
        }
        match self.kind {
            ExperimentKind::DnSpectrum | ExperimentKind::CloakConverge => {
                if !p.omega.is_finite() || p.omega < 0.0 {
                    return bad("params.omega", p.omega.to_string(), "omega >= 0");
                }
                if self.kind == ExperimentKind::CloakConverge {
                    if p.r_list.is_empty() {
                        return bad("params.r_list", "[]".into(), "a non-empty list");
                    }
                    for &r in &p.r_list {
                        check_r("params.r_list", r)?;
                    }
                }
            }
            ExperimentKind::QuantumConverge => {
                if !p.energy.is_finite() {
                    return bad("params.energy", p.energy.to_string(), "a finite energy");
                }
                if p.n_list.is_empty() || p.potentials.is_empty() {
                    return bad("params.n_list", format!("{:?}", p.n_list), "non-empty n_list and potentials");
                }
                for &n in &p.n_list {
                    check_n("params.n_list", n)?;
                }
            }
            ExperimentKind::TrappedScan => {
                check_n("design.n", self.design.n)?;
                let [lo, hi] = p.energy_range;
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return bad("params.energy_range", format!("{:?}", p.energy_range), "lo < hi");
                }
                if p.samples < 3 {
                    return bad("params.samples", p.samples.to_string(), "samples >= 3");
                }
            }
            ExperimentKind::Rays => {
                let r = &self.rays;
                if !(r.radius > 2.0) {
                    return bad("rays.radius", r.radius.to_string(), "radius > 2");
                }
                let [lo, hi] = r.impact_range;
                if r.fan == FanKind::Random && r.count > 0 && !(0.0 <= lo && lo <= hi && hi < r.radius) {
                    return bad("rays.impact_range", format!("{:?}", r.impact_range), "0 <= lo <= hi < radius");
                }
                if r.fan == FanKind::Planar && r.impacts.iter().any(|b| !(b.abs() < r.radius)) {
                    return bad("rays.impacts", format!("{:?}", r.impacts), "|impact| < radius");
                }
                if !(r.t_max > 0.0) {
                    return bad("rays.t_max", r.t_max.to_string(), "t_max > 0");
                }
            }
            ExperimentKind::WormholeRays => {
                let w = &self.wormhole;
                if !(w.separation > 3.0) {
                    return bad("wormhole.separation", w.separation.to_string(), "L > 3");
                }
                if !(w.handle_length > 0.0) {
                    return bad("wormhole.handle_length", w.handle_length.to_string(), "length > 0");
                }
                if w.warp == WarpKind::Collimator && !(w.r_min > 0.0 && w.r_min <= 1.0) {
                    return bad("wormhole.r_min", w.r_min.to_string(), "0 < r_min <= 1");
                }
                if !(w.start_distance > 1.0) {
                    return bad("wormhole.start_distance", w.start_distance.to_string(), "start_distance > 1");
                }
            }
            ExperimentKind::DesignDump => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = ExperimentConfig::parse("kind = \"cloak-converge\"\n").unwrap();
        assert_eq!(c.kind, ExperimentKind::CloakConverge);
        assert_eq!(c.params, ParamsSection::default());
        c.check().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new(ExperimentKind::Rays);
        c.rays.impacts = vec![0.5, 1.0];
        c.output.name = Some("fan".into());
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_key_names_line() {
        let err = ExperimentConfig::parse("kind = \"rays\"\n[params]\nomgea = 2.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("omgea"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_kind() {
        assert!(ExperimentConfig::parse("kind = \"mirror\"\n").is_err());
        assert!("mirror".parse::<ExperimentKind>().is_err());
        assert_eq!("trapped-scan".parse::<ExperimentKind>().unwrap(), ExperimentKind::TrappedScan);
    }

    #[test]
    fn range_checks() {
        let mut c = ExperimentConfig::new(ExperimentKind::DesignDump);
        c.design.kind = DesignKind::Truncated;
        c.design.r = 2.5;
        assert!(c.check().unwrap_err().to_string().contains("1 < R < 2"));
        let mut c = ExperimentConfig::new(ExperimentKind::QuantumConverge);
        c.params.n_list = vec![4, 0];
        assert!(c.check().is_err());
        let mut c = ExperimentConfig::new(ExperimentKind::Rays);
        c.apply(&Overrides { tol: Some(-1.0), ..Default::default() });
        assert!(c.check().is_err());
    }
}
