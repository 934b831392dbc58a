//! Scenario execution.

use std::path::PathBuf;
use std::time::Instant;

use b4nl::analysis::{
    apply_rescale_g, decay_study, illposed_check, reference_growth, scaling_exponent, smalldisp_study,
    strichartz_gain_study, EnsembleStats, FitResult, IllPosedParams, IllPosedReport,
};
use b4nl::evolution::{strang_evolve, Sample, Trajectory};
use b4nl::initial::{random_field, InitialData, RandomSpec};
use b4nl::interaction::interaction_morawetz_ratio;
use b4nl::norms::{field_norm, inhom_sobolev, lebesgue};
use b4nl::observables::lp_square_function;
use b4nl::scattering::{forward_wave_limit, inverse_wave_operator, scattering_defect, DefectRow, InverseConfig, ScatterReport};
use b4nl::spectral::fractional_derivative;
use b4nl::{ComplexField, Exponent, Grid, Observable};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{InequalityTest, ScenarioConfig, ScenarioKind, Study};
use crate::error::{RunError, RunResult};
use crate::output::{fmt_f64, ErrorEntry, FileEntry, Manifest, OutputDir, Versions};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Replaces the seed of random initial data.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out: PathBuf,
    pub files: Vec<FileEntry>,
    pub wall_time_seconds: f64,
}

/// Runs one scenario into `opts.out`. The canonical config is written first
/// and `manifest.json` last, also when the run fails.
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> RunResult<RunSummary> {
    let mut cfg = config.clone();
    if let Some(seed) = opts.seed {
        cfg.override_seed(seed);
    }
    let mut out = OutputDir::create(&opts.out)?;
    out.write_bytes("config.json", cfg.to_canonical_json().as_bytes())?;
    let start = Instant::now();
    let result = execute(&cfg, &mut out);
    let wall = start.elapsed().as_secs_f64();
    let manifest = Manifest {
        kind: cfg.kind.to_string(),
        status: if result.is_ok() { "ok" } else { "failed" }.into(),
        error: result.as_ref().err().map(|e| ErrorEntry { category: e.category().into(), message: e.to_string() }),
        config_hash: cfg.hash(),
        seeds: cfg.seeds(),
        threads: rayon::current_num_threads(),
        wall_time_seconds: wall,
        versions: Versions { b4nl: b4nl::VERSION.into(), runner: env!("CARGO_PKG_VERSION").into() },
        observables: cfg.observables.clone(),
        files: out.entries()?,
    };
    out.write_json("manifest.json", &manifest)?;
    result?;
    Ok(RunSummary { out: opts.out.clone(), files: manifest.files, wall_time_seconds: wall })
}

fn execute(cfg: &ScenarioConfig, out: &mut OutputDir) -> RunResult<()> {
    let grid = cfg.build_grid()?;
    let grid = || grid.as_ref().ok_or_else(|| RunError::invalid("grid", format!("required for kind {}", cfg.kind)));
    match (&cfg.study, cfg.kind) {
        (Study::Evolve(_), ScenarioKind::Evolve) => run_evolve(cfg, grid()?, out),
        (Study::Smalldisp(s), ScenarioKind::Smalldisp) => {
            let phi = build_initial(&cfg.initial, grid()?)?;
            let evolve = cfg.evolve_config()?;
            let study = smalldisp_study(&phi, &s.nu, evolve.t_end, s.sobolev_order, &evolve)?;
            let mut footer = fit_footer(study.fit.as_ref());
            footer.push(("sobolev_order".into(), fmt_f64(s.sobolev_order)));
            footer.push(("t_end".into(), fmt_f64(evolve.t_end)));
            out.write_csv("smalldisp.csv", &header(&["nu", "error"]), &pair_rows(&study.rows), &footer)?;
            let growth = reference_growth(&phi, cfg.equation.mu(), &s.growth_times)?;
            out.write_csv(
                "reference_growth.csv",
                &header(&["t", "h2"]),
                &pair_rows(&growth.rows),
                &fit_footer(growth.fit.as_ref()),
            )
        }
        (Study::Decay(d), ScenarioKind::Decay) => {
            let u0 = build_initial(&cfg.initial, grid()?)?;
            let res = decay_study(&u0, &d.times)?;
            let mut footer = fit_footer(Some(&res.fit));
            footer.push(("max_leak".into(), fmt_f64(res.max_leak)));
            out.write_csv("decay.csv", &header(&["t", "linf"]), &pair_rows(&res.rows), &footer)
        }
        (Study::Scaling(s), ScenarioKind::Scaling) => {
            let grid = grid()?;
            let u = build_initial(&cfg.initial, grid)?;
            let gdim = grid.dim() as u32;
            let mut rows = Vec::new();
            for norm in &s.norms {
                // Exact rows at the study dimension; measured rows need a field norm on this grid.
                let mut dims = vec![s.dimension];
                if gdim != s.dimension && !norm.needs_trajectory() {
                    dims.push(gdim);
                }
                for &n in &dims {
                    let e = scaling_exponent(norm, n)?;
                    let measurable = n == gdim && !norm.needs_trajectory();
                    let base = if measurable { Some(field_norm(&u, norm)?) } else { None };
                    for &h in &s.h {
                        let predicted = h.powf(*e.numer() as f64 / *e.denom() as f64);
                        let measured = match base {
                            Some(b) if b > 0.0 => fmt_f64(field_norm(&apply_rescale_g(&u, h, &s.x0)?, norm)? / b),
                            _ => String::new(),
                        };
                        rows.push(vec![norm.to_string(), n.to_string(), e.to_string(), fmt_f64(h), fmt_f64(predicted), measured]);
                    }
                }
            }
            out.write_csv("scaling.csv", &header(&["norm", "n", "exponent", "h", "predicted", "measured"]), &rows, &[])
        }
        (Study::Illposed(s), ScenarioKind::Illposed) => {
            let mut reports: Vec<IllPosedReport> = Vec::new();
            for &n in &s.dimensions {
                for eps in &s.epsilon {
                    for nu in &s.nu {
                        let p = IllPosedParams::parse(n, eps, nu, &s.t_nu)?;
                        reports.push(illposed_check(&p)?);
                    }
                }
            }
            let rows = reports.iter().map(illposed_row).collect::<Vec<_>>();
            let all = reports.iter().filter(|r| r.all_conditions()).count();
            out.write_csv(
                "illposed.csv",
                &header(&ILLPOSED_COLUMNS),
                &rows,
                &[("all_conditions".into(), format!("{all} of {}", reports.len()))],
            )?;
            out.write_json("illposed.json", &reports)
        }
        (Study::Scatter(s), ScenarioKind::Scatter) => {
            let grid = grid()?;
            let u0 = build_initial(&cfg.initial, grid)?;
            let evolve = cfg.evolve_config()?;
            let observers: Vec<&dyn Observable> = cfg.observables.iter().map(|o| o as &dyn Observable).collect();
            let traj = strang_evolve(&u0, &evolve, &observers)?;
            write_observables(out, &traj)?;
            let defects = s
                .defect_pairs
                .iter()
                .map(|&[t1, t2]| Ok(DefectRow { t1, t2, defect: scattering_defect(&traj, t1, t2)? }))
                .collect::<RunResult<Vec<_>>>()?;
            let mut horizons = s.horizons.clone();
            horizons.sort_by(f64::total_cmp);
            let mut reports = Vec::new();
            let mut last = None;
            for &h in &horizons {
                let res = forward_wave_limit(&truncated(&traj, h))?;
                reports.push(ScatterReport::new(&res, Vec::new()));
                last = Some(res);
            }
            let last = last.expect("horizons are materialized");
            out.write_snapshot("u_plus.b4nl", &last.u_plus)?;
            let round_trip_h2_error = if s.round_trip {
                let inv = InverseConfig {
                    params: cfg.equation,
                    t_start: s.inverse_start_fraction * last.horizon,
                    t_max: last.horizon,
                    frames: s.inverse_frames,
                    tol: s.inverse_tol,
                    max_iters: s.inverse_max_iters,
                    dt: evolve.dt,
                    dealias: evolve.dealias,
                };
                let back = inverse_wave_operator(&last.u_plus, &inv)?;
                let base = inhom_sobolev(&u0, 2.0)?;
                let err = inhom_sobolev(&back.sub(&u0)?, 2.0)?;
                Some(if base == 0.0 { err } else { err / base })
            } else {
                None
            };
            let l4 = Exponent::from_integer(4);
            let final_field = traj.last_field().expect("scatter runs store fields");
            let l4_initial = lebesgue(&u0, l4)?;
            let l4_ratio = if l4_initial == 0.0 { None } else { Some(lebesgue(final_field, l4)? / l4_initial) };
            out.write_json("scatter.json", &ScatterFile { horizons: reports, defects, round_trip_h2_error, l4_ratio })
        }
        (Study::Inequality(s), ScenarioKind::Inequality) => {
            let grid = grid()?;
            let InitialData::Random(template) = &cfg.initial else {
                return Err(RunError::invalid("initial", "kind inequality draws its ensemble from initial.random"));
            };
            let stats = match &s.test {
                InequalityTest::StrichartzGain { q, r, window, samples } => {
                    strichartz_gain_study(s.ensemble_size, *q, *r, grid, template, *window, *samples)?
                }
                InequalityTest::InteractionMorawetz {} => {
                    ensemble(s.ensemble_size, grid, template, interaction_morawetz_ratio)?
                }
                InequalityTest::SquareFunction { sigma } => ensemble(s.ensemble_size, grid, template, |f| {
                    let l4 = Exponent::from_integer(4);
                    let num = lebesgue(&lp_square_function(f, *sigma)?, l4)?;
                    let den = lebesgue(&fractional_derivative(f, -*sigma)?, l4)?;
                    if den == 0.0 {
                        return Err(b4nl::Error::UndefinedRatio("zero member".into()));
                    }
                    Ok(num / den)
                })?,
            };
            let rows = stats
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i.to_string(), template.seed.wrapping_add(i as u64).to_string(), fmt_f64(*v)])
                .collect::<Vec<_>>();
            let footer = vec![
                ("min".into(), fmt_f64(stats.min)),
                ("median".into(), fmt_f64(stats.median)),
                ("max".into(), fmt_f64(stats.max)),
                ("spread".into(), fmt_f64(stats.max / stats.min)),
            ];
            out.write_csv("inequality.csv", &header(&["member", "seed", "ratio"]), &rows, &footer)
        }
        _ => unreachable!("study variant always matches kind"),
    }
}

#[derive(Serialize)]
struct ScatterFile {
    horizons: Vec<ScatterReport>,
    defects: Vec<DefectRow>,
    /// `‖W₊(u⁺) − u₀‖_{H²} / ‖u₀‖_{H²}`.
    round_trip_h2_error: Option<f64>,
    /// `‖u(T)‖_{L⁴} / ‖u₀‖_{L⁴}`.
    l4_ratio: Option<f64>,
}

fn run_evolve(cfg: &ScenarioConfig, grid: &Grid, out: &mut OutputDir) -> RunResult<()> {
    let u0 = build_initial(&cfg.initial, grid)?;
    let mut evolve = cfg.evolve_config()?;
    let periodic = evolve.snapshot_every;
    if periodic.is_none() && cfg.output.final_snapshot {
        evolve.snapshot_every = Some(usize::MAX);
    }
    let observers: Vec<&dyn Observable> = cfg.observables.iter().map(|o| o as &dyn Observable).collect();
    let traj = strang_evolve(&u0, &evolve, &observers)?;
    write_observables(out, &traj)?;
    if let Some(stride) = periodic {
        for s in traj.samples() {
            let step = (s.time / evolve.dt).round() as usize;
            if let (Some(f), true) = (&s.field, step % stride == 0) {
                out.write_snapshot(&format!("snapshot_{step:08}.b4nl"), f)?;
            }
        }
    }
    if cfg.output.final_snapshot {
        out.write_snapshot("final.b4nl", traj.last_field().expect("final field stored"))?;
    }
    Ok(())
}

fn write_observables(out: &mut OutputDir, traj: &Trajectory) -> RunResult<()> {
    let mut cols = vec!["t".to_string()];
    cols.extend(traj.columns().iter().cloned());
    let rows = traj
        .samples()
        .iter()
        .map(|s| std::iter::once(s.time).chain(s.record.iter().copied()).map(fmt_f64).collect())
        .collect::<Vec<_>>();
    out.write_csv("observables.csv", &cols, &rows, &[])
}

fn truncated(traj: &Trajectory, horizon: f64) -> Trajectory {
    let mut out = Trajectory::new(*traj.params(), traj.columns().to_vec());
    for s in traj.samples().iter().filter(|s| s.time <= horizon * (1.0 + 1e-12) && s.field.is_some()) {
        out.push(Sample { time: s.time, field: s.field.clone(), record: s.record.clone() }).expect("time ordered");
    }
    out
}

fn ensemble(
    size: usize,
    grid: &Grid,
    template: &RandomSpec,
    ratio: impl Fn(&ComplexField) -> b4nl::Result<f64> + Sync,
) -> RunResult<EnsembleStats> {
    let values = (0..size)
        .into_par_iter()
        .map(|i| {
            let spec = RandomSpec { seed: template.seed.wrapping_add(i as u64), ..template.clone() };
            ratio(&random_field(grid, &spec)?)
        })
        .collect::<b4nl::Result<Vec<_>>>()?;
    Ok(EnsembleStats::from_values(values)?)
}

/// Reading a snapshot is I/O, not a contract violation.
fn build_initial(initial: &InitialData, grid: &Grid) -> RunResult<ComplexField> {
    initial.build(grid).map_err(|e| match (e, initial) {
        (b4nl::Error::Io(source), InitialData::Snapshot { path }) => RunError::io(path, source),
        (e, _) => RunError::Contract(e),
    })
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn pair_rows(rows: &[(f64, f64)]) -> Vec<Vec<String>> {
    rows.iter().map(|&(a, b)| vec![fmt_f64(a), fmt_f64(b)]).collect()
}

fn fit_footer(fit: Option<&FitResult>) -> Vec<(String, String)> {
    let Some(f) = fit else { return Vec::new() };
    vec![
        ("slope".into(), fmt_f64(f.slope)),
        ("intercept".into(), fmt_f64(f.intercept)),
        ("residual".into(), fmt_f64(f.residual)),
        ("window".into(), format!("[{}, {}]", fmt_f64(f.window[0]), fmt_f64(f.window[1]))),
        ("points".into(), f.points.to_string()),
    ]
}

const ILLPOSED_COLUMNS: [&str; 17] = [
    "n",
    "epsilon",
    "nu",
    "t_nu",
    "lambda_log10",
    "lambda",
    "lambda_nu_log10",
    "lambda_nu",
    "t_epsilon",
    "inflation_lower_bound",
    "identity_lambda",
    "identity_lambda_nu",
    "lambda_nu_exceeds_one",
    "growth_condition",
    "data_condition",
    "short_time_condition",
    "all_conditions",
];

fn illposed_row(r: &IllPosedReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.epsilon.clone(),
        r.nu.clone(),
        r.t_nu.clone(),
        r.lambda_log10.clone().unwrap_or_default(),
        fmt_f64(r.lambda),
        r.lambda_nu_log10.clone().unwrap_or_default(),
        fmt_f64(r.lambda_nu),
        fmt_f64(r.t_epsilon),
        fmt_f64(r.inflation_lower_bound),
        r.identity_lambda.to_string(),
        r.identity_lambda_nu.to_string(),
        r.lambda_nu_exceeds_one.to_string(),
        r.growth_condition.to_string(),
        r.data_condition.to_string(),
        r.short_time_condition.to_string(),
        r.all_conditions().to_string(),
    ]
}
