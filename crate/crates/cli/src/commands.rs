use std::path::PathBuf;

use serde::Serialize;
use spinmodes::coupling::TrapDepth;
use spinmodes::hp::{dicke, heralded_cat, squeezed_db};
use spinmodes::metrology::{gain_curves, heisenberg_breakdown, HeisenbergAssessment, HEISENBERG_FACTOR};
use spinmodes::oracle::{run_suite, VerificationRecord};
use spinmodes::wigner::{min_wigner, wigner_grid, wigner_point, WignerMinimum};
use spinmodes::{
    apply_mismatch, effective_params, overlap_j, required_temperature, sample_couplings, thermal_overlap, AtomCloud,
    EffectiveParams64, GridSpec64, PureState64, SpinLadder,
};

use crate::config::{Loaded, ScenarioConfig, StateSpec};
use crate::error::CliError;
use crate::output::{num, Metadata, OutDir};

/// Options shared by every subcommand.
pub struct Context {
    pub loaded: Loaded,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl Context {
    fn config(&self) -> &ScenarioConfig {
        &self.loaded.config
    }

    fn out_dir(&self) -> Option<OutDir> {
        self.out.clone().or_else(|| self.config().output.dir.clone()).map(OutDir::new)
    }

    fn out_dir_or_default(&self) -> OutDir {
        self.out_dir().unwrap_or_else(|| OutDir::new(PathBuf::from("out")))
    }

    fn emit<S: Serialize>(&self, report: &S, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
        } else {
            print!("{}", text());
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub preparation: EffectiveParams64,
    pub readout: EffectiveParams64,
    pub j: f64,
    pub j_from_geometry: f64,
    pub heisenberg: HeisenbergAssessment<f64>,
}

pub fn geometry(loaded: &Loaded) -> Result<GeometryReport, CliError> {
    let g = &loaded.config.geometry;
    let cloud = AtomCloud::new(g.n_atoms, g.cloud.clone(), loaded.config.seed);
    let build = |profile, key: &str| {
        sample_couplings(profile, &cloud)
            .and_then(|cv| cv.set_spin(g.spin))
            .map_err(|e| loaded.invalid("geometry", key, e.to_string()))
    };
    let prep = build(&g.preparation, "preparation")?;
    let read = build(&g.readout, "readout")?;
    let j_geo = overlap_j(&prep, &read)?;
    let j = match g.j {
        Some(j) if !(-1.0..=1.0).contains(&j) => {
            return Err(loaded.invalid("geometry", "j", format!("overlap must lie in [-1, 1], got {j}")))
        }
        Some(j) => j,
        None => j_geo,
    };
    let heisenberg = heisenberg_breakdown(g.n_atoms as f64, j, g.spin, HEISENBERG_FACTOR)?;
    Ok(GeometryReport {
        preparation: effective_params(&prep)?,
        readout: effective_params(&read)?,
        j,
        j_from_geometry: j_geo,
        heisenberg,
    })
}

fn describe(p: &EffectiveParams64) -> String {
    format!(
        "N={} <eta>={:.6} <eta^2>={:.6} eta_eff={:.6} N_e={:.3} S_e={:.3}",
        p.n_atoms, p.mean_eta, p.mean_eta_sq, p.eta_eff, p.n_eff, p.s_eff
    )
}

#[derive(Serialize)]
struct ParamsReport<'a> {
    metadata: Metadata,
    #[serde(flatten)]
    geometry: GeometryReport,
    config: &'a ScenarioConfig,
}

pub fn params(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config();
    let report = ParamsReport { metadata: Metadata::new("params", cfg), geometry: geometry(&ctx.loaded)?, config: cfg };
    if let Some(dir) = ctx.out_dir() {
        dir.json("params.json", &report)?;
        dir.config(&report.metadata, cfg)?;
    }
    ctx.emit(&report, || {
        let g = &report.geometry;
        format!(
            "preparation ({}): {}\nreadout ({}): {}\nJ = {:.6}{}\nscaling: {:?} (1-|J| = {:.3e}, threshold {:.3e})\n",
            cfg.geometry.preparation.name(),
            describe(&g.preparation),
            cfg.geometry.readout.name(),
            describe(&g.readout),
            g.j,
            if cfg.geometry.j.is_some() { " (override)" } else { "" },
            g.heisenberg.regime,
            g.heisenberg.mismatch,
            g.heisenberg.threshold,
        )
    });
    Ok(())
}

const MAX_AUTO_CUTOFF: usize = 2048;

fn build_state(loaded: &Loaded, s_eff: f64) -> Result<PureState64, CliError> {
    let invalid = |key: &str, e: spinmodes::Error| loaded.invalid("state", key, e.to_string());
    match loaded.config.state {
        StateSpec::Dicke { n, cutoff } => {
            let ladder = SpinLadder::new(s_eff, cutoff.unwrap_or(n + 2)).map_err(|e| invalid("cutoff", e))?;
            dicke(ladder, n).map_err(|e| invalid("n", e))
        }
        StateSpec::Cat { m, cutoff } => {
            let ladder = SpinLadder::new(s_eff, cutoff.unwrap_or(m + 2)).map_err(|e| invalid("cutoff", e))?;
            heralded_cat(ladder, m).map_err(|e| invalid("m", e))
        }
        StateSpec::Squeezed { db, cutoff: Some(c) } => {
            let ladder = SpinLadder::new(s_eff, c).map_err(|e| invalid("cutoff", e))?;
            squeezed_db(ladder, db).map_err(|e| invalid("db", e))
        }
        StateSpec::Squeezed { db, cutoff: None } => {
            let mut c = 16;
            loop {
                let ladder = SpinLadder::new(s_eff, c).map_err(|e| invalid("cutoff", e))?;
                match squeezed_db(ladder, db) {
                    Ok(st) => return Ok(st),
                    Err(spinmodes::Error::CutoffTooSmall { .. }) if c < MAX_AUTO_CUTOFF => c *= 2,
                    Err(e) => return Err(invalid("db", e)),
                }
            }
        }
    }
}

#[derive(Serialize)]
struct WignerSummary<'a> {
    metadata: Metadata,
    state: &'a StateSpec,
    s_eff: f64,
    cutoff: usize,
    j: f64,
    origin: f64,
    minimum: WignerMinimum<f64>,
    normalization: f64,
    purity: f64,
    parity: f64,
    grid: GridSpec64,
    files: Vec<String>,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct WignerData<'a> {
    metadata: &'a Metadata,
    grid: GridSpec64,
    /// Row-major in `x`: index `ix * np + ip`.
    values: &'a [f64],
}

pub fn wigner(ctx: &Context, grid_flag: Option<&str>) -> Result<(), CliError> {
    let cfg = ctx.config();
    let spec = match grid_flag {
        Some(g) => g.parse::<GridSpec64>().map_err(|e| CliError::Usage(format!("--grid: {e}")))?,
        None => cfg.grid().map_err(|e| ctx.loaded.invalid("wigner", "grid", e))?,
    };
    spec.validate().map_err(|e| CliError::Usage(format!("grid: {e}")))?;
    let geo = geometry(&ctx.loaded)?;
    let state = build_state(&ctx.loaded, geo.preparation.s_eff)?;
    let rho = apply_mismatch(&state, geo.j)?;
    let grid = wigner_grid(&rho, &spec)?;
    let minimum = min_wigner(&rho, &spec)?;
    let origin = wigner_point(&rho, 0.0, 0.0)?;

    let dir = ctx.out_dir_or_default();
    let meta = Metadata::new("wigner", cfg);
    let notes = [("j", num(geo.j)), ("s_eff", num(geo.preparation.s_eff))];
    let mut files = vec![dir
        .csv("wigner.csv", &meta, &notes, &["x", "p", "W"], grid.rows().map(|(x, p, w)| vec![num(x), num(p), num(w)]))?];
    files.push(dir.json("wigner.json", &WignerData { metadata: &meta, grid: spec, values: &grid.values })?);
    if let Some(sweep) = cfg.wigner.sweep {
        if sweep.points < 2 || !(-1.0..=1.0).contains(&sweep.j_min) || !(-1.0..=1.0).contains(&sweep.j_max) {
            return Err(ctx.loaded.invalid("wigner.sweep", "points", "need points >= 2 and J limits in [-1, 1]".into()));
        }
        let rows = (0..sweep.points)
            .map(|i| {
                let j = sweep.j_min + (sweep.j_max - sweep.j_min) * i as f64 / (sweep.points - 1) as f64;
                let w = wigner_point(&apply_mismatch(&state, j)?, 0.0, 0.0)?;
                Ok(vec![num(j), num(w)])
            })
            .collect::<Result<Vec<_>, spinmodes::Error>>()?;
        files.push(dir.csv("origin_vs_j.csv", &meta, &notes, &["J", "W0"], rows)?);
    }
    files.push(dir.config(&meta, cfg)?);
    let summary = WignerSummary {
        metadata: meta,
        state: &cfg.state,
        s_eff: geo.preparation.s_eff,
        cutoff: state.ladder().cutoff(),
        j: geo.j,
        origin,
        minimum,
        normalization: grid.normalization(),
        purity: rho.purity(),
        parity: rho.parity(),
        grid: spec,
        files: files.iter().map(|p| p.display().to_string()).collect(),
        config: cfg,
    };
    dir.json("summary.json", &summary)?;
    ctx.emit(&summary, || {
        format!(
            "J = {:.6}  S_e = {:.3}  cutoff = {}\nW(0,0) = {:.9}\nmin W = {:.9} at (x, p) = ({:.4}, {:.4})\nnormalization = {:.6}\nwrote {}\n",
            summary.j,
            summary.s_eff,
            summary.cutoff,
            summary.origin,
            summary.minimum.value,
            summary.minimum.x,
            summary.minimum.p,
            summary.normalization,
            dir.path("").display()
        )
    });
    Ok(())
}

#[derive(Serialize)]
struct GainReport<'a> {
    metadata: Metadata,
    s: f64,
    curves: Vec<GainEndpoints>,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct GainEndpoints {
    label: String,
    gain_db_at_j_max: f64,
    gain_db_at_j_min: f64,
}

pub fn gain(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config();
    let g = &cfg.gain;
    if g.points < 2 || !(g.j_min > 0.0 && g.j_min < g.j_max && g.j_max <= 1.0) {
        return Err(ctx.loaded.invalid("gain", "j_min", "need 0 < j_min < j_max <= 1 and points >= 2".into()));
    }
    let s = match g.s {
        Some(s) => s,
        None => geometry(&ctx.loaded)?.preparation.s_eff,
    };
    let js: Vec<f64> = (0..g.points).map(|i| g.j_min + (g.j_max - g.j_min) * i as f64 / (g.points - 1) as f64).collect();
    let curves = gain_curves(&g.db, s, &js).map_err(|e| ctx.loaded.invalid("gain", "db", e.to_string()))?;
    let dir = ctx.out_dir_or_default();
    let meta = Metadata::new("gain", cfg);
    let rows = curves.iter().flat_map(|c| {
        c.j.iter()
            .zip(c.gain_db())
            .zip(&c.gain)
            .map(|((j, db), lin)| vec![num(*j), num(*lin), num(db), c.label.clone()])
            .collect::<Vec<_>>()
    });
    dir.csv("gain.csv", &meta, &[("s", num(s))], &["J", "gain", "gain_dB", "label"], rows)?;
    dir.config(&meta, cfg)?;
    let report = GainReport {
        metadata: meta,
        s,
        curves: curves
            .iter()
            .map(|c| {
                let db = c.gain_db();
                GainEndpoints { label: c.label.clone(), gain_db_at_j_max: db[db.len() - 1], gain_db_at_j_min: db[0] }
            })
            .collect(),
        config: cfg,
    };
    dir.json("gain_summary.json", &report)?;
    ctx.emit(&report, || {
        let mut out = format!("S = {s:.3}\n");
        for c in &report.curves {
            out += &format!(
                "{:>8}: {:8.3} dB at J={}  {:8.3} dB at J={}\n",
                c.label, c.gain_db_at_j_max, g.j_max, c.gain_db_at_j_min, g.j_min
            );
        }
        out
    });
    Ok(())
}

#[derive(Serialize)]
struct ThermalReport<'a> {
    metadata: Metadata,
    trap_depth_kelvin: f64,
    n_atoms: f64,
    t_max_kelvin: f64,
    points: Vec<ThermalPoint>,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct ThermalPoint {
    temperature_nk: f64,
    j: f64,
    heisenberg: HeisenbergAssessment<f64>,
}

pub fn thermal(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config();
    let t = &cfg.thermal;
    if t.trap_depth_hz.is_some() && t.trap_depth_kelvin.is_some() {
        return Err(ctx.loaded.invalid("thermal", "trap_depth_kelvin", "give the depth in hertz or kelvin, not both".into()));
    }
    let depth: TrapDepth<f64> = t.depth();
    let t_max = required_temperature(depth, t.n_atoms).map_err(|e| ctx.loaded.invalid("thermal", "n_atoms", e.to_string()))?;
    let points = t
        .temperatures_nk
        .iter()
        .map(|&nk| {
            let j = thermal_overlap(nk * 1e-9, depth)?;
            let heisenberg = heisenberg_breakdown(t.n_atoms, j, cfg.geometry.spin, HEISENBERG_FACTOR)?;
            Ok(ThermalPoint { temperature_nk: nk, j, heisenberg })
        })
        .collect::<Result<Vec<_>, spinmodes::Error>>()
        .map_err(|e| ctx.loaded.invalid("thermal", "temperatures_nk", e.to_string()))?;
    let report = ThermalReport {
        metadata: Metadata::new("thermal", cfg),
        trap_depth_kelvin: depth.kelvin(),
        n_atoms: t.n_atoms,
        t_max_kelvin: t_max,
        points,
        config: cfg,
    };
    if let Some(dir) = ctx.out_dir() {
        dir.json("thermal.json", &report)?;
        dir.config(&report.metadata, cfg)?;
    }
    ctx.emit(&report, || {
        let mut out = format!(
            "trap depth U/k_B = {:.4e} K\nN = {:e}\nT_max = U/(k_B sqrt N) = {:.3} nK\n",
            report.trap_depth_kelvin,
            report.n_atoms,
            report.t_max_kelvin * 1e9
        );
        for p in &report.points {
            out += &format!("T = {:.3} nK: J = {:.12} ({:?})\n", p.temperature_nk, p.j, p.heisenberg.regime);
        }
        out
    });
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    metadata: Metadata,
    pass: bool,
    records: Vec<VerificationRecord>,
    config: &'a ScenarioConfig,
}

pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config();
    let suite = cfg.verify.suite(cfg.seed);
    let records = run_suite(&suite).map_err(|e| ctx.loaded.invalid("verify", "n_min", e.to_string()))?;
    let failed = records.iter().filter(|r| !r.pass).count();
    let report = VerifyReport { metadata: Metadata::new("verify", cfg), pass: failed == 0, records, config: cfg };
    if let Some(dir) = ctx.out_dir() {
        dir.json("verify_report.json", &report)?;
        dir.config(&report.metadata, cfg)?;
    }
    ctx.emit(&report, || {
        report
            .records
            .iter()
            .map(|r| {
                format!(
                    "{} {:<36} residual {:.3e}  tolerance {:.1e}\n",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check,
                    r.residual,
                    r.tolerance
                )
            })
            .collect()
    });
    if failed > 0 {
        return Err(CliError::Verification { failed, total: report.records.len() });
    }
    Ok(())
}
