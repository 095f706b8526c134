//! Dispatch of experiment kinds to the solvers and the run manifest.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{DesignKind, ExperimentConfig, ExperimentKind, FanKind, RayMetricKind, WarpKind};
use super::output::{write_atomic, Cell, Csv};
use crate::designs::{
    ideal_cloak_profile, layered_isotropic_profile, quantum_potential_profile, truncated_cloak_profile,
    wormhole_geometry, QuantumCloakSpec, RadialMediumProfile, Warp, WaveModel,
};
use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::radial::{
    cloak_convergence_sweep, dn_spectrum_with, free_spectrum, neumann_eigenvalues, quantum_dn_convergence,
    trapped_state_scan, SolveOptions, SourceFn,
};
use crate::rays::{
    compare_with_line, random_ray_family, trace, wormhole_trace, CloakMetric, Euclidean, RayComparison, RayLaunch,
    RayMetric, RayState, TraceOptions, TraceResult, Transit,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Manifest schema version; bumped with any change to an output layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub seconds: f64,
    pub status: String,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub config: ExperimentConfig,
    pub stages: Vec<StageRecord>,
    /// Data files written by this run, relative to the output directory.
    pub files: Vec<String>,
    pub status: String,
}

/// Result of [`validate`]: the resolved configuration and any warnings.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

struct Stages {
    records: Vec<StageRecord>,
}

impl Stages {
    fn run<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        self.records.push(StageRecord {
            name: name.into(),
            seconds: start.elapsed().as_secs_f64(),
            status: if out.is_ok() { "ok" } else { "failed" }.into(),
            message: out.as_ref().err().map(|e| e.to_string()),
        });
        out
    }
}

/// Named output files of one experiment, in write order.
type Outputs = Vec<(String, Vec<u8>)>;

/// Runs the experiment and writes its data files and `<stem>.manifest.json`
/// into the output directory. The manifest is written on failure as well.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let dir = config.out_dir();
    let stem = config.stem();
    let mut stages = Stages { records: Vec::new() };
    let mut files = Vec::new();
    let result = pool.install(|| {
        let outputs = stages.run("compute", || compute(config))?;
        stages.run("write", || {
            for (name, bytes) in &outputs {
                write_atomic(&dir.join(name), bytes)?;
                files.push(name.clone());
            }
            Ok(())
        })
    });
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        toolkit_version: VERSION.into(),
        config: config.clone(),
        stages: stages.records,
        files,
        status: match &result {
            Ok(()) => "ok".into(),
            Err(e) => format!("failed (exit {}): {e}", e.exit_code()),
        },
    };
    let path = dir.join(format!("{stem}.manifest.json"));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    let written = write_atomic(&path, format!("{text}\n").as_bytes());
    result?;
    written?;
    Ok(manifest)
}

/// Range checks plus a dry run of the resonance preconditions.
pub fn validate(config: &ExperimentConfig) -> Result<Diagnostics> {
    config.check()?;
    let mut warnings = Vec::new();
    let p = &config.params;
    let energies: Vec<(f64, Vec<f64>, Vec<u32>)> = match config.kind {
        ExperimentKind::QuantumConverge => vec![(p.energy, p.potentials.clone(), (0..=p.l_max).collect())],
        ExperimentKind::DnSpectrum if config.design.kind == DesignKind::Quantum => {
            vec![(p.energy, vec![config.design.potential], (0..=p.l_max).collect())]
        }
        _ => Vec::new(),
    };
    for (energy, potentials, degrees) in energies {
        for &w in &potentials {
            for &l in &degrees {
                if let Some(mu) = nearest_neumann(l, w, energy)? {
                    if (energy - mu).abs() < 1e-3 * energy.abs().max(1.0) {
                        warnings.push(format!(
                            "E = {energy} is within 1e-3 of the interior Neumann eigenvalue {mu:.6} \
                             (l = {l}, W = {w}): almost trapped state, DN values will be large"
                        ));
                    }
                }
            }
        }
    }
    if config.kind == ExperimentKind::Rays && config.rays.fan == FanKind::Random && config.rays.impact_range[0] < 1e-3 {
        warnings.push("impact parameters near 0 approach the exceptional ray through the origin".into());
    }
    Ok(Diagnostics {
        config: config.clone(),
        warnings,
    })
}

fn nearest_neumann(l: u32, w: f64, energy: f64) -> Result<Option<f64>> {
    let potential: SourceFn = Arc::new(move |_| w);
    let mut count = 4;
    loop {
        let mu = neumann_eigenvalues(l, 1.0, Some(potential.clone()), count)?;
        if mu.last().is_some_and(|&m| m > energy + 1.0) || count >= 256 {
            return Ok(mu.into_iter().min_by(|a, b| (a - energy).abs().total_cmp(&(b - energy).abs())));
        }
        count *= 2;
    }
}

fn design_profile(config: &ExperimentConfig) -> Result<RadialMediumProfile> {
    let d = &config.design;
    match d.kind {
        DesignKind::Homogeneous => Ok(RadialMediumProfile::homogeneous()),
        DesignKind::Ideal => Ok(ideal_cloak_profile()),
        DesignKind::Truncated => truncated_cloak_profile(d.r),
        DesignKind::Layered => layered_isotropic_profile(d.r, d.n),
        DesignKind::Quantum => quantum_potential_profile(&QuantumCloakSpec::new(d.n, config.params.energy, Some(d.potential))),
    }
}

fn compute(config: &ExperimentConfig) -> Result<Outputs> {
    match config.kind {
        ExperimentKind::DesignDump => design_dump(config),
        ExperimentKind::DnSpectrum => dn_spectrum_run(config),
        ExperimentKind::CloakConverge => cloak_converge(config),
        ExperimentKind::QuantumConverge => quantum_converge(config),
        ExperimentKind::TrappedScan => trapped_scan(config),
        ExperimentKind::Rays => rays(config),
        ExperimentKind::WormholeRays => wormhole_rays(config),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialise");
    s.push('\n');
    s.into_bytes()
}

fn emit(config: &ExperimentConfig, csv: Option<Csv>, json_value: Option<Vec<u8>>) -> Outputs {
    let stem = config.stem();
    let f = config.output.format;
    let mut out = Vec::new();
    if let (true, Some(c)) = (f.csv(), csv) {
        out.push((format!("{stem}.csv"), c.into_string().into_bytes()));
    }
    if let (true, Some(j)) = (f.json(), json_value) {
        out.push((format!("{stem}.json"), j));
    }
    out
}

/// Coefficients at cell midpoints `r_k = 2 (k + 1/2) / grid`; `g = w^2`.
fn design_dump(config: &ExperimentConfig) -> Result<Outputs> {
    let profile = design_profile(config)?;
    let n = config.design.grid;
    let mut csv = Csv::new(&["r", "a", "b", "w", "v", "g"]);
    for k in 0..n {
        let r = 2.0 * (k as f64 + 0.5) / n as f64;
        let c = profile.coefficients(r, crate::designs::Side::Plus)?;
        csv.row(&[Cell::F(r), Cell::F(c.a), Cell::F(c.b), Cell::F(c.w), Cell::F(c.v), Cell::F(c.w * c.w)]);
    }
    Ok(emit(config, Some(csv), Some(json(&profile.to_schema(n)))))
}

#[derive(Serialize)]
struct SpectrumOutput {
    label: String,
    model: WaveModel,
    spectral: f64,
    l_max: u32,
    lambdas: Vec<f64>,
    free: Vec<f64>,
    errors: Vec<f64>,
}

fn dn_spectrum_run(config: &ExperimentConfig) -> Result<Outputs> {
    let p = &config.params;
    let profile = design_profile(config)?;
    let spectral = match profile.model {
        WaveModel::Helmholtz => p.omega,
        WaveModel::Schrodinger => p.energy,
    };
    let opts = SolveOptions {
        rtol: p.tol,
        ..SolveOptions::default()
    };
    let spec = dn_spectrum_with(&profile, spectral, p.l_max, opts)?;
    let free = free_spectrum(profile.model, spectral, p.l_max)?;
    let errors = spec.errors(&free);
    let mut csv = Csv::new(&["l", "lambda", "free", "error"]);
    for (((l, v), f), e) in spec.values.iter().zip(free.lambdas()).zip(&errors) {
        csv.row(&[Cell::I(*l as i64), Cell::F(*v), Cell::F(f), Cell::F(*e)]);
    }
    let out = SpectrumOutput {
        label: profile.label.clone(),
        model: profile.model,
        spectral,
        l_max: p.l_max,
        lambdas: spec.lambdas(),
        free: free.lambdas(),
        errors,
    };
    Ok(emit(config, Some(csv), Some(json(&out))))
}

fn cloak_converge(config: &ExperimentConfig) -> Result<Outputs> {
    let p = &config.params;
    let table = cloak_convergence_sweep(p.omega, p.l_max, &p.r_list)?;
    let mut csv = Csv::new(&["R", "l", "lambda", "reference", "error", "flagged"]);
    for row in &table.rows {
        for l in 0..=p.l_max as usize {
            csv.row(&[
                Cell::F(row.parameter),
                Cell::I(l as i64),
                Cell::OptF(row.lambdas.as_ref().map(|v| v[l])),
                Cell::F(table.reference[l]),
                Cell::OptF(row.errors.as_ref().map(|v| v[l])),
                Cell::I(row.flag.is_some() as i64),
            ]);
        }
    }
    Ok(emit(config, Some(csv), Some(json(&table))))
}

fn quantum_converge(config: &ExperimentConfig) -> Result<Outputs> {
    let p = &config.params;
    let table = quantum_dn_convergence(p.energy, &p.n_list, &p.potentials, p.l_max)?;
    let mut csv = Csv::new(&["n", "R", "W", "l", "lambda", "free", "error"]);
    for row in &table.rows {
        for l in 0..=p.l_max as usize {
            csv.row(&[
                Cell::I(row.layers as i64),
                Cell::F(row.r_trunc),
                Cell::F(row.potential),
                Cell::I(l as i64),
                Cell::F(row.lambdas[l]),
                Cell::F(table.free[l]),
                Cell::F(row.errors[l]),
            ]);
        }
    }
    Ok(emit(config, Some(csv), Some(json(&table))))
}

fn trapped_scan(config: &ExperimentConfig) -> Result<Outputs> {
    let p = &config.params;
    let [lo, hi] = p.energy_range;
    let scan = trapped_state_scan(config.design.n, lo, hi, p.samples, p.l, config.design.potential)?;
    let mut csv = Csv::new(&["E", "ratio"]);
    for pt in &scan.points {
        csv.row(&[Cell::F(pt.energy), Cell::F(pt.ratio)]);
    }
    Ok(emit(config, Some(csv), Some(json(&scan))))
}

fn trace_options(config: &ExperimentConfig, radius: f64, t_max: f64) -> TraceOptions {
    TraceOptions {
        t_max,
        tol: config.params.tol,
        domain_radius: Some(radius),
        ..TraceOptions::default()
    }
}

fn launches(config: &ExperimentConfig) -> Result<Vec<RayLaunch>> {
    let r = &config.rays;
    match r.fan {
        FanKind::Random => random_ray_family(r.count, (r.impact_range[0], r.impact_range[1]), r.radius, r.seed),
        FanKind::Planar => r
            .impacts
            .iter()
            .map(|&b| RayLaunch::new(r.radius, Vec3::x(), Vec3::y(), b))
            .collect(),
    }
}

#[derive(Serialize)]
struct RayRecord {
    ray: usize,
    start: [f64; 3],
    direction: [f64; 3],
    comparison: RayComparison,
    refractions: usize,
    steps: usize,
}

fn polyline_rows(csv: &mut Csv, ray: usize, res: &TraceResult) {
    let mut rows = String::new();
    res.csv_rows(&mut rows);
    for line in rows.lines() {
        csv.push_raw(&format!("{ray},{line}\n"));
    }
}

fn rays(config: &ExperimentConfig) -> Result<Outputs> {
    let r = &config.rays;
    let metric: &dyn RayMetric = match r.metric {
        RayMetricKind::Cloak => &CloakMetric,
        RayMetricKind::Euclidean => &Euclidean,
    };
    let fan = launches(config)?;
    let mut opts = trace_options(config, r.radius, r.t_max);
    opts.record = r.polylines;
    let traced: Vec<(TraceResult, RayComparison)> = fan
        .par_iter()
        .map(|ray| {
            let res = trace(metric, RayState::launch(metric, ray.position(), ray.dir())?, &opts)?;
            let cmp = compare_with_line(metric, ray, &res, r.radius)?;
            Ok((res, cmp))
        })
        .collect::<Result<_>>()?;
    let stem = config.stem();
    let mut out = Vec::new();
    if config.output.format.csv() {
        if r.polylines {
            let text = if traced.is_empty() {
                String::new()
            } else {
                let mut csv = Csv::with_header(&format!("ray,{}", TraceResult::csv_header()));
                for (i, (res, _)) in traced.iter().enumerate() {
                    polyline_rows(&mut csv, i, res);
                }
                csv.into_string()
            };
            out.push((format!("{stem}.csv"), text.into_bytes()));
        }
        let mut summary = Csv::new(&[
            "ray",
            "impact",
            "termination",
            "exit_error",
            "direction_error",
            "length_error",
            "drift_rate",
            "refractions",
        ]);
        for (i, (res, c)) in traced.iter().enumerate() {
            summary.row(&[
                Cell::I(i as i64),
                Cell::F(c.impact),
                Cell::S(termination_name(&res.termination)),
                Cell::F(c.exit_error),
                Cell::F(c.direction_error),
                Cell::F(c.length_error),
                Cell::F(c.drift_rate),
                Cell::I(res.refractions as i64),
            ]);
        }
        out.push((format!("{stem}_summary.csv"), summary.into_string().into_bytes()));
    }
    if config.output.format.json() {
        let records: Vec<RayRecord> = traced
            .into_iter()
            .zip(&fan)
            .enumerate()
            .map(|(i, ((res, comparison), l))| RayRecord {
                ray: i,
                start: l.start,
                direction: l.direction,
                comparison,
                refractions: res.refractions,
                steps: res.steps,
            })
            .collect();
        out.push((format!("{stem}.json"), json(&records)));
    }
    Ok(out)
}

fn termination_name(t: &crate::rays::Termination) -> String {
    serde_json::to_value(t)
        .ok()
        .and_then(|v| match v {
            serde_json::Value::String(s) => Some(s),
            serde_json::Value::Object(m) => m.into_iter().next().map(|(k, v)| format!("{k}-{v}")),
            _ => None,
        })
        .unwrap_or_default()
}

#[derive(Serialize)]
struct WormholeRecord {
    ray: usize,
    impact: f64,
    termination: String,
    transits: Vec<Transit>,
}

#[derive(Serialize)]
struct WormholeOutput {
    design: crate::designs::wormhole::WormholeSummary,
    rays: Vec<WormholeRecord>,
}

fn wormhole_rays(config: &ExperimentConfig) -> Result<Outputs> {
    let w = &config.wormhole;
    let warp = match w.warp {
        WarpKind::Product => Warp::Product,
        WarpKind::Collimator => Warp::Collimator { r_min: w.r_min },
    };
    let design = wormhole_geometry(w.separation, w.handle_length, warp)?;
    let outer = w.separation / 2.0 + 4.0;
    let opts = trace_options(config, outer, config.rays.t_max);
    let traced: Vec<_> = w
        .impacts
        .par_iter()
        .map(|&b| {
            let start = Point3::new(b, 0.0, -w.start_distance);
            if (start - Point3::new(0.0, 0.0, w.separation / 2.0)).norm() >= outer {
                return Err(Error::Config(format!("wormhole ray with impact {b} starts outside the domain")));
            }
            wormhole_trace(&design, RayState::new(start, Vec3::z()), &opts, w.max_transits)
        })
        .collect::<Result<_>>()?;
    let stem = config.stem();
    let mut out = Vec::new();
    if config.output.format.csv() {
        let text = if traced.is_empty() {
            String::new()
        } else {
            let mut csv = Csv::with_header(&format!("ray,{}", TraceResult::csv_header()));
            for (i, t) in traced.iter().enumerate() {
                polyline_rows(&mut csv, i, &t.trace);
            }
            csv.into_string()
        };
        out.push((format!("{stem}.csv"), text.into_bytes()));
        let mut transits = Csv::new(&[
            "ray",
            "impact",
            "transit",
            "entered",
            "exited",
            "clairaut",
            "clairaut_drift",
            "zeta_extreme",
        ]);
        let end = |e: Option<crate::rays::HandleEnd>| match e {
            Some(crate::rays::HandleEnd::O) => "O".to_string(),
            Some(crate::rays::HandleEnd::P) => "P".to_string(),
            None => String::new(),
        };
        for (i, (t, &b)) in traced.iter().zip(&w.impacts).enumerate() {
            for (k, tr) in t.transits.iter().enumerate() {
                transits.row(&[
                    Cell::I(i as i64),
                    Cell::F(b),
                    Cell::I(k as i64),
                    Cell::S(end(Some(tr.entered))),
                    Cell::S(end(tr.exited)),
                    Cell::F(tr.clairaut),
                    Cell::F(tr.clairaut_drift),
                    Cell::F(tr.zeta_extreme),
                ]);
            }
        }
        out.push((format!("{stem}_transits.csv"), transits.into_string().into_bytes()));
    }
    if config.output.format.json() {
        let rays = traced
            .into_iter()
            .zip(&w.impacts)
            .enumerate()
            .map(|(i, (t, &b))| WormholeRecord {
                ray: i,
                impact: b,
                termination: termination_name(&t.trace.termination),
                transits: t.transits,
            })
            .collect();
        out.push((format!("{stem}.json"), json(&WormholeOutput { design: design.summary(), rays })));
    }
    Ok(out)
}
