use std::fmt::Write as _;

use log::info;
use mpemba_core::davies::{spectral_decomposition, DaviesModel, LiouvillianSpectrum, Sector};
use mpemba_core::distances::{bloch_vector, trace_distance, DistanceMeasure};
use mpemba_core::evolution::{
    detect_crossover_exact, relaxation_trajectory, spectrum_fingerprint, Relaxation, StateEvolution,
};
use mpemba_core::linops::{max_abs_diff, ComplexOperator};
use mpemba_core::models::{closed_form_spectrum, two_level_analytic, two_level_model, two_level_probe};
use mpemba_core::protocol::{dress_state, plan_dressing, suppression_report, DressingMode, DressingPlan};

use crate::config::{ExperimentConfig, ModelKind};
use crate::error::CliError;
use crate::output::{num, write_atomic};

/// Overlaps at or below this size count as suppressed.
pub const SUPPRESSION_THRESHOLD: f64 = 1e-10;

struct Prepared {
    model: DaviesModel,
    spectrum: LiouvillianSpectrum,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, CliError> {
    let model = cfg.build_model()?;
    let spectrum = spectral_decomposition(&model)?;
    info!("spectrum {}", spectrum_fingerprint(&spectrum));
    Ok(Prepared { model, spectrum })
}

fn dressing(cfg: &ExperimentConfig, p: &Prepared, probe: &ComplexOperator) -> Result<(DressingPlan, String), CliError> {
    match cfg.permutation()? {
        Ok(perm) => {
            if perm.dim() != p.model.dim() {
                return Err(CliError::Config(format!(
                    "protocol.permutation has {} entries, model dimension is {}",
                    perm.dim(),
                    p.model.dim()
                )));
            }
            Ok((dress_state(probe, &p.model, perm)?, "explicit".into()))
        }
        Err(mode) => Ok((plan_dressing(probe, &p.model, mode)?, mode.name().into())),
    }
}

fn sector_fields(sector: Sector) -> (&'static str, String, String) {
    match sector {
        Sector::Population { .. } => ("population", String::new(), String::new()),
        Sector::Coherence { row, col } => ("coherence", row.to_string(), col.to_string()),
    }
}

pub fn spectrum(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let mut out = String::from("index,re_lambda,im_lambda,sector,row,col\n");
    for (k, mode) in p.spectrum.modes().iter().enumerate() {
        let (tag, row, col) = sector_fields(mode.sector);
        writeln!(out, "{k},{},{},{tag},{row},{col}", num(mode.eigenvalue.re), num(mode.eigenvalue.im)).unwrap();
    }
    let path = cfg.output.path(&cfg.output.spectrum);
    write_atomic(&path, &out)?;
    println!("wrote {} modes to {}", p.spectrum.len(), path.display());
    Ok(())
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    if cfg.protocol.require_coherence_gap {
        let slowest = p.spectrum.slowest_decaying().map(|m| m.sector);
        if !matches!(slowest, Some(Sector::Coherence { .. })) {
            return Err(CliError::Protocol("slowest decaying mode is not a coherence mode".into()));
        }
    }
    let measures = cfg.measures()?;
    let probe = cfg.probe(&p.model, &p.spectrum);
    let (plan, mode_name) = dressing(cfg, &p, &probe)?;
    let grid = cfg.grid(&p.spectrum)?;
    let traj = relaxation_trajectory(&p.spectrum, &probe, &plan.dressed_state, &grid, &measures)?;
    let relax = Relaxation::new(&p.spectrum, &probe, &plan.dressed_state)?;

    let mut csv = String::from("t");
    for m in &measures {
        write!(csv, ",{m}_plain,{m}_dressed").unwrap();
    }
    csv.push('\n');
    for (i, t) in traj.times().iter().enumerate() {
        csv.push_str(&num(*t));
        for &m in &measures {
            write!(csv, ",{},{}", num(traj.plain(m).unwrap()[i]), num(traj.dressed(m).unwrap()[i])).unwrap();
        }
        csv.push('\n');
    }

    let mut report = String::new();
    writeln!(report, "spectrum: {}", traj.fingerprint()).unwrap();
    writeln!(report, "dressing: {mode_name}").unwrap();
    writeln!(report, "permutation: {}", plan.permutation).unwrap();
    writeln!(report, "grid: {} points, t in [0, {}]", grid.len(), num(*grid.last().unwrap())).unwrap();
    for &m in &measures {
        let r = detect_crossover_exact(&traj, &relax, m);
        let value = r.t_qme.map_or_else(|| "none".to_string(), num);
        writeln!(report, "t_qme {m}: {value}").unwrap();
    }
    if let Some(agrees) = sigma_x_agreement(cfg, &p, &probe, &plan)? {
        writeln!(report, "sigma_x_all dressing equals this dressing: {agrees}").unwrap();
    }
    let diag = traj.diagnostics();
    writeln!(
        report,
        "max trace error: {}; min eigenvalue: {}",
        num(diag.max_trace_error),
        num(diag.min_eigenvalue)
    )
    .unwrap();

    write_atomic(&cfg.output.path(&cfg.output.trajectory), &csv)?;
    write_atomic(&cfg.output.path(&cfg.output.report), &report)?;
    print!("{report}");
    Ok(())
}

/// Whether bit-flip dressing gives the same state, for qubit registers.
fn sigma_x_agreement(
    cfg: &ExperimentConfig,
    p: &Prepared,
    probe: &ComplexOperator,
    plan: &DressingPlan,
) -> Result<Option<bool>, CliError> {
    if cfg.model.kind == ModelKind::TwoLevel || !p.model.dim().is_power_of_two() {
        return Ok(None);
    }
    let flip = plan_dressing(probe, &p.model, DressingMode::SigmaXAll)?;
    Ok(Some(max_abs_diff(&flip.dressed_state, &plan.dressed_state) <= 1e-10))
}

pub fn suppression(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let probe = cfg.probe(&p.model, &p.spectrum);
    let (plan, _) = dressing(cfg, &p, &probe)?;
    let plain = suppression_report(&p.spectrum, &probe, SUPPRESSION_THRESHOLD)?;
    let dressed = suppression_report(&p.spectrum, &plan.dressed_state, SUPPRESSION_THRESHOLD)?;
    let mut out = String::from("mode_index,re_lambda,im_lambda,sector,abs_overlap_plain,abs_overlap_dressed\n");
    for (a, b) in plain.iter().zip(&dressed) {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            a.index,
            num(a.eigenvalue.re),
            num(a.eigenvalue.im),
            a.sector.tag(),
            num(a.overlap.norm()),
            num(b.overlap.norm())
        )
        .unwrap();
    }
    let path = cfg.output.path(&cfg.output.suppression);
    write_atomic(&path, &out)?;
    for (name, report) in [("plain", &plain), ("dressed", &dressed)] {
        match report.iter().skip(1).find(|m| !m.suppressed) {
            Some(m) => println!(
                "{name}: slowest unsuppressed mode {} ({}, lambda = ({}, {}))",
                m.index,
                m.sector.tag(),
                num(m.eigenvalue.re),
                num(m.eigenvalue.im)
            ),
            None => println!("{name}: all non-stationary modes suppressed"),
        }
    }
    Ok(())
}

struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
}

/// Numeric two-level evolution against the closed forms. `analytic_gamma`
/// overrides the coupling used by the closed-form half.
pub fn validate(cfg: &ExperimentConfig, analytic_gamma: Option<f64>) -> Result<(), CliError> {
    if cfg.model.kind != ModelKind::TwoLevel {
        return Err(CliError::Config("validate needs model.kind = \"two_level\"".into()));
    }
    let numeric_cfg = cfg.two_level();
    let mut analytic_cfg = numeric_cfg;
    if let Some(g) = analytic_gamma {
        analytic_cfg.bath.gamma = g;
    }
    let model = two_level_model(&numeric_cfg)?;
    let spectrum = spectral_decomposition(&model)?;
    let probe = two_level_probe();
    let plan = plan_dressing(&probe, &model, DressingMode::Canonical)?;
    let plain = StateEvolution::new(&spectrum, &probe)?;
    let dressed = StateEvolution::new(&spectrum, &plan.dressed_state)?;
    let steady = spectrum.steady_state();

    let (mut bloch, mut td) = (0.0_f64, 0.0_f64);
    for i in 0..=1000 {
        let t = i as f64 * 0.01 / numeric_cfg.bath.gamma;
        let exact = two_level_analytic(&analytic_cfg, t)?;
        let (rp, rd) = (plain.state_at(t), dressed.state_at(t));
        let (bp, bd) = (bloch_vector(&rp)?, bloch_vector(&rd)?);
        for k in 0..3 {
            bloch = bloch.max((bp[k] - exact.r_plain[k]).abs()).max((bd[k] - exact.r_dressed[k]).abs());
        }
        td = td
            .max((trace_distance(&rp, &steady)? - exact.td_plain).abs())
            .max((trace_distance(&rd, &steady)? - exact.td_dressed).abs());
    }
    let closed = closed_form_spectrum(&analytic_cfg)?;
    let eigen = (0..4)
        .map(|k| (closed.eigenvalue(k) - spectrum.eigenvalue(k)).norm())
        .fold(0.0_f64, f64::max);
    let steady_err = max_abs_diff(&closed.steady_state(), &steady);
    let initial = DistanceMeasure::Td.evaluate(&plan.dressed_state, &steady)?
        - DistanceMeasure::Td.evaluate(&probe, &steady)?;

    let checks = [
        Check { name: "bloch components", residual: bloch, tolerance: 1e-9 },
        Check { name: "trace distances", residual: td, tolerance: 1e-9 },
        Check { name: "eigenvalue table", residual: eigen, tolerance: 1e-10 },
        Check { name: "steady state", residual: steady_err, tolerance: 1e-10 },
        Check { name: "dressed starts farther (TD gap)", residual: (-initial).max(0.0), tolerance: 0.0 },
    ];
    let mut failed = Vec::new();
    for c in &checks {
        let ok = c.residual <= c.tolerance;
        println!("{} {}: residual {} (tol {})", if ok { "PASS" } else { "FAIL" }, c.name, num(c.residual), num(c.tolerance));
        if !ok {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}
