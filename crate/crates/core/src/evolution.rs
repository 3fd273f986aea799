//! Time evolution under a decomposed Davies generator, relaxation
//! trajectories, and crossover detection.
//!
//! Coherences evolve as `e^{λt}` times their initial value. Populations use
//! the spectral sum `Σ_k e^{μ_k t} c_k r_k` when the population eigenbasis is
//! well conditioned. At low temperature the Gibbs weights span many decades,
//! the eigenvector entries scale like `π^{±1/2}`, and the spectral sum loses
//! all accuracy on the depleted levels; the population block is then
//! propagated by uniformization, which only adds nonnegative numbers.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::davies::{LiouvillianSpectrum, Sector};
use crate::distances::{check_density, distance_to_diagonal, DistanceMeasure};
use crate::error::{Error, Result};
use crate::linops::{hermitian_eigenvalues_unchecked, real, ComplexOperator, EigenOrder};

/// Maximum biorthonormality residual accepted by [`evolve`].
pub const BIORTHONORMALITY_TOL: f64 = 1e-8;
/// Population conditioning above which uniformization replaces the spectral sum.
pub const SPECTRAL_CONDITION_LIMIT: f64 = 1e4;
/// Differences at or below this size are not used to decide crossings.
pub const CROSSOVER_NOISE_FLOOR: f64 = 1e-11;
pub const CROSSOVER_RESIDUAL: f64 = 1e-8;
/// Slack for the monotone decay of trace distance and relative entropy.
pub const MONOTONE_SLACK: f64 = 1e-10;
pub const DEFAULT_GRID_POINTS: usize = 600;
pub const DEFAULT_GRID_START: f64 = 1e-3;
pub const DEFAULT_GRID_END: f64 = 20.0;

#[derive(Debug, Clone)]
struct Uniformization {
    /// `I + W/q`
    kernel: DMatrix<f64>,
    rate: f64,
    p0: DVector<f64>,
}

fn poisson_range(lambda: f64) -> usize {
    (lambda + 12.0 * lambda.sqrt() + 20.0).ceil() as usize
}

impl Uniformization {
    fn new(generator: &DMatrix<f64>, p0: DVector<f64>) -> Self {
        let d = generator.nrows();
        let rate = (0..d).map(|a| -generator[(a, a)]).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
        let kernel = DMatrix::identity(d, d) + generator / rate;
        Self { kernel, rate, p0 }
    }

    /// `e^{Wt}` as a Poisson series in `K` over `t/2^s` with `qt/2^s ≤ 1`,
    /// followed by `s` squarings. Every step adds nonnegative numbers.
    fn transition(&self, t: f64) -> DMatrix<f64> {
        let d = self.kernel.nrows();
        let lambda = self.rate * t;
        let squarings = if lambda > 1.0 { lambda.log2().ceil() as i32 } else { 0 };
        let small = lambda / 2f64.powi(squarings);
        let mut term = DMatrix::<f64>::identity(d, d);
        let mut weight = (-small).exp();
        let mut out = term.scale(weight);
        for k in 1..=poisson_range(small) {
            term = &self.kernel * &term;
            weight *= small / k as f64;
            out += term.scale(weight);
        }
        for _ in 0..squarings {
            out = (&out * &out).map(|v| v.max(0.0));
        }
        out
    }

    fn at(&self, t: f64) -> DVector<f64> {
        self.transition(t) * &self.p0
    }
}

/// A single initial state prepared for repeated evaluation at many times.
#[derive(Debug, Clone)]
pub struct StateEvolution<'a> {
    spectrum: &'a LiouvillianSpectrum,
    coherences: Vec<(usize, usize, Complex64, Complex64)>,
    pop_coeffs: Vec<f64>,
    pop_rates: Vec<f64>,
    initial_populations: DVector<f64>,
    uniform: Option<Uniformization>,
}

impl<'a> StateEvolution<'a> {
    /// Precomputes the expansion coefficients of `rho0`.
    pub fn new(spectrum: &'a LiouvillianSpectrum, rho0: &ComplexOperator) -> Result<Self> {
        let d = spectrum.dim();
        if rho0.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: rho0.nrows() });
        }
        let rho_energy = spectrum.to_energy_basis(rho0);
        let mut coherences = Vec::with_capacity(d * d.saturating_sub(1));
        let mut pop_rates = vec![0.0; d];
        for mode in spectrum.modes() {
            match mode.sector {
                Sector::Coherence { row, col } => {
                    coherences.push((row, col, mode.eigenvalue, rho_energy[(row, col)]));
                }
                Sector::Population { index } => pop_rates[index] = mode.eigenvalue.re,
            }
        }
        let initial_populations = DVector::from_fn(d, |a, _| rho_energy[(a, a)].re);
        let left = spectrum.population_left();
        let pop_coeffs = (0..d).map(|k| left.column(k).dot(&initial_populations)).collect();
        let uniform = (spectrum.population_conditioning() > SPECTRAL_CONDITION_LIMIT).then(|| {
            Uniformization::new(
                spectrum.population_generator(),
                initial_populations.map(|v| v.max(0.0)),
            )
        });
        Ok(Self {
            spectrum,
            coherences,
            pop_coeffs,
            pop_rates,
            initial_populations,
            uniform,
        })
    }

    /// Whether populations are propagated by uniformization.
    pub fn uses_uniformization(&self) -> bool {
        self.uniform.is_some()
    }

    pub fn populations_at(&self, t: f64) -> DVector<f64> {
        if t == 0.0 {
            return self.initial_populations.clone();
        }
        if let Some(u) = &self.uniform {
            return u.at(t);
        }
        let right = self.spectrum.population_right();
        let mut p = DVector::zeros(self.spectrum.dim());
        for (k, (&c, &mu)) in self.pop_coeffs.iter().zip(&self.pop_rates).enumerate() {
            let w = if k == 0 { c } else { c * (mu * t).exp() };
            p.axpy(w, &right.column(k), 1.0);
        }
        p
    }

    /// `U₁† ρ(t) U₁`
    pub fn energy_state_at(&self, t: f64) -> ComplexOperator {
        let d = self.spectrum.dim();
        let mut out = ComplexOperator::zeros(d, d);
        let p = self.populations_at(t);
        for a in 0..d {
            out[(a, a)] = real(p[a]);
        }
        for &(row, col, lambda, c) in &self.coherences {
            if c != Complex64::new(0.0, 0.0) {
                out[(row, col)] = c * (lambda * t).exp();
            }
        }
        out
    }

    pub fn state_at(&self, t: f64) -> ComplexOperator {
        self.spectrum.from_energy_basis(&self.energy_state_at(t))
    }
}

fn check_spectrum(spectrum: &LiouvillianSpectrum) -> Result<()> {
    let residual = spectrum.biorthonormality_residual();
    if residual > BIORTHONORMALITY_TOL {
        return Err(Error::NonConvergedSpectrum { residual });
    }
    Ok(())
}

/// `ρ(t) = R₁ + Σ_{s≥2} e^{λ_s t} Tr(L_s† ρ₀) R_s`.
pub fn evolve(spectrum: &LiouvillianSpectrum, rho0: &ComplexOperator, t: f64) -> Result<ComplexOperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    check_density(rho0)?;
    check_spectrum(spectrum)?;
    Ok(StateEvolution::new(spectrum, rho0)?.state_at(t))
}

/// Distance of `rho_energy` to the steady state for each measure.
fn distances_at(
    rho_energy: &ComplexOperator,
    log_gibbs: &[f64],
    measures: &[DistanceMeasure],
) -> Vec<f64> {
    measures
        .iter()
        .map(|&m| distance_to_diagonal(m, rho_energy, log_gibbs))
        .collect()
}

/// The plain and dressed states prepared together.
#[derive(Debug, Clone)]
pub struct Relaxation<'a> {
    spectrum: &'a LiouvillianSpectrum,
    plain: StateEvolution<'a>,
    dressed: StateEvolution<'a>,
}

impl<'a> Relaxation<'a> {
    pub fn new(
        spectrum: &'a LiouvillianSpectrum,
        rho_plain: &ComplexOperator,
        rho_dressed: &ComplexOperator,
    ) -> Result<Self> {
        check_density(rho_plain)?;
        check_density(rho_dressed)?;
        check_spectrum(spectrum)?;
        Ok(Self {
            spectrum,
            plain: StateEvolution::new(spectrum, rho_plain)?,
            dressed: StateEvolution::new(spectrum, rho_dressed)?,
        })
    }

    pub fn plain(&self) -> &StateEvolution<'a> {
        &self.plain
    }

    pub fn dressed(&self) -> &StateEvolution<'a> {
        &self.dressed
    }

    /// `(D(ρ(t), R₁), D(ρ'(t), R₁))`
    pub fn distances(&self, measure: DistanceMeasure, t: f64) -> (f64, f64) {
        let logs = self.spectrum.log_gibbs_weights();
        (
            distance_to_diagonal(measure, &self.plain.energy_state_at(t), logs),
            distance_to_diagonal(measure, &self.dressed.energy_state_at(t), logs),
        )
    }

    /// `D(ρ'(t), R₁) − D(ρ(t), R₁)`
    pub fn difference(&self, measure: DistanceMeasure, t: f64) -> f64 {
        let (p, d) = self.distances(measure, t);
        d - p
    }
}

/// Per-point sanity figures of an evolved state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CptpDiagnostics {
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

impl CptpDiagnostics {
    fn merge(self, other: Self) -> Self {
        Self {
            max_trace_error: self.max_trace_error.max(other.max_trace_error),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_trace_error <= tol && self.min_eigenvalue >= -tol
    }
}

/// Distance series for a plain and a dressed initial state on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    plain: BTreeMap<DistanceMeasure, Vec<f64>>,
    dressed: BTreeMap<DistanceMeasure, Vec<f64>>,
    fingerprint: String,
    diagnostics: CptpDiagnostics,
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid has non-finite times".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid is not strictly increasing".into()));
    }
    Ok(())
}

impl Trajectory {
    /// Builds a trajectory from precomputed series (one measure).
    pub fn from_series(times: Vec<f64>, measure: DistanceMeasure, plain: Vec<f64>, dressed: Vec<f64>) -> Result<Self> {
        check_increasing(&times)?;
        if plain.len() != times.len() || dressed.len() != times.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: plain.len().min(dressed.len()),
            });
        }
        Ok(Self {
            times,
            plain: BTreeMap::from([(measure, plain)]),
            dressed: BTreeMap::from([(measure, dressed)]),
            fingerprint: "series".into(),
            diagnostics: CptpDiagnostics::default(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn measures(&self) -> Vec<DistanceMeasure> {
        self.plain.keys().copied().collect()
    }
    pub fn plain(&self, measure: DistanceMeasure) -> Option<&[f64]> {
        self.plain.get(&measure).map(Vec::as_slice)
    }
    pub fn dressed(&self, measure: DistanceMeasure) -> Option<&[f64]> {
        self.dressed.get(&measure).map(Vec::as_slice)
    }
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
    pub fn diagnostics(&self) -> CptpDiagnostics {
        self.diagnostics
    }
}

/// Short identifier of a spectrum: dimension and slowest mode.
pub fn spectrum_fingerprint(spectrum: &LiouvillianSpectrum) -> String {
    let l2 = spectrum.slowest_decaying().map(|m| m.eigenvalue).unwrap_or_default();
    format!("d={};lambda2={:.12e}{:+.12e}i", spectrum.dim(), l2.re, l2.im)
}

fn point_diagnostics(rho_energy: &ComplexOperator) -> CptpDiagnostics {
    let tr: f64 = (0..rho_energy.nrows()).map(|a| rho_energy[(a, a)].re).sum();
    let min = hermitian_eigenvalues_unchecked(rho_energy, EigenOrder::Ascending)[0];
    CptpDiagnostics {
        max_trace_error: (tr - 1.0).abs(),
        min_eigenvalue: min,
    }
}

/// Evaluates every requested measure for both states on `grid`.
///
/// The grid must start at 0 and increase strictly. Points are evaluated in
/// parallel; the result does not depend on the evaluation order.
pub fn relaxation_trajectory(
    spectrum: &LiouvillianSpectrum,
    rho_plain: &ComplexOperator,
    rho_dressed: &ComplexOperator,
    grid: &[f64],
    measures: &[DistanceMeasure],
) -> Result<Trajectory> {
    check_increasing(grid)?;
    if grid[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("grid must start at 0, starts at {}", grid[0])));
    }
    let mut measures = measures.to_vec();
    measures.sort();
    measures.dedup();
    let relax = Relaxation::new(spectrum, rho_plain, rho_dressed)?;
    let logs = spectrum.log_gibbs_weights();
    let rows: Vec<(Vec<f64>, Vec<f64>, CptpDiagnostics)> = grid
        .par_iter()
        .map(|&t| {
            let p = relax.plain.energy_state_at(t);
            let d = relax.dressed.energy_state_at(t);
            let diag = point_diagnostics(&p).merge(point_diagnostics(&d));
            (distances_at(&p, logs, &measures), distances_at(&d, logs, &measures), diag)
        })
        .collect();
    let mut plain: BTreeMap<DistanceMeasure, Vec<f64>> = BTreeMap::new();
    let mut dressed: BTreeMap<DistanceMeasure, Vec<f64>> = BTreeMap::new();
    let mut diagnostics = CptpDiagnostics {
        max_trace_error: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    for (p, d, diag) in rows {
        for (i, m) in measures.iter().enumerate() {
            plain.entry(*m).or_default().push(p[i]);
            dressed.entry(*m).or_default().push(d[i]);
        }
        diagnostics = diagnostics.merge(diag);
    }
    if !diagnostics.within(1e-10) {
        log::warn!(
            "evolved states outside CPTP bounds: trace error {:e}, min eigenvalue {:e}",
            diagnostics.max_trace_error,
            diagnostics.min_eigenvalue
        );
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        plain,
        dressed,
        fingerprint: spectrum_fingerprint(spectrum),
        diagnostics,
    })
}

/// `t = 0` followed by `points - 1` geometric points from `start/rate` to `end/rate`.
pub fn geometric_grid(rate: f64, points: usize, start: f64, end: f64) -> Result<Vec<f64>> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidGrid(format!("relaxation rate must be > 0, got {rate}")));
    }
    if points < 2 || !(start > 0.0 && end > start) {
        return Err(Error::InvalidGrid("need at least 2 points and 0 < start < end".into()));
    }
    let n = points - 1;
    let ratio = (end / start).ln();
    let mut grid = vec![0.0];
    grid.extend((0..n).map(|i| {
        let f = if n == 1 { 1.0 } else { i as f64 / (n - 1) as f64 };
        start * (ratio * f).exp() / rate
    }));
    Ok(grid)
}

/// 600 points: `t = 0` then geometric from `10⁻³` to `20` slowest relaxation times.
pub fn default_grid(spectrum: &LiouvillianSpectrum) -> Result<Vec<f64>> {
    geometric_grid(spectrum.spectral_gap(), DEFAULT_GRID_POINTS, DEFAULT_GRID_START, DEFAULT_GRID_END)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverReport {
    pub measure: DistanceMeasure,
    /// Time after which the dressed curve stays below the plain one.
    pub t_qme: Option<f64>,
    /// Grid indices bracketing the last sign change.
    pub bracket: Option<(usize, usize)>,
    /// `|D(ρ') − D(ρ)|` at `t_qme` after refinement.
    pub residual: Option<f64>,
}

impl CrossoverReport {
    fn absent(measure: DistanceMeasure) -> Self {
        Self { measure, t_qme: None, bracket: None, residual: None }
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    // f(lo) > 0 > f(hi)
    let mut best = (lo, f(lo).abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() < best.1 || best.1.is_nan() {
            best = (mid, v.abs());
        }
        if v > 0.0 {
            lo = mid;
        } else if v < 0.0 {
            hi = mid;
        } else {
            return (mid, 0.0);
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) && best.1 <= CROSSOVER_RESIDUAL {
            break;
        }
    }
    best
}

/// Locates the last grid interval where the dressed curve drops below the
/// plain one and stays there.
///
/// With `refine`, the crossing is bisected on `refine(t) = D(ρ'(t)) − D(ρ(t))`;
/// otherwise it is linearly interpolated between the bracketing points.
pub fn detect_crossover(
    traj: &Trajectory,
    measure: DistanceMeasure,
    refine: Option<&dyn Fn(f64) -> f64>,
) -> CrossoverReport {
    let (Some(plain), Some(dressed)) = (traj.plain(measure), traj.dressed(measure)) else {
        return CrossoverReport::absent(measure);
    };
    let times = traj.times();
    let resolved: Vec<(usize, f64)> = dressed
        .iter()
        .zip(plain)
        .map(|(d, p)| d - p)
        .enumerate()
        .filter(|(_, v)| v.abs() > CROSSOVER_NOISE_FLOOR)
        .collect();
    let last_change = resolved
        .windows(2)
        .rev()
        .find(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0));
    let Some(w) = last_change else {
        return CrossoverReport::absent(measure);
    };
    let ((i, fi), (j, fj)) = (w[0], w[1]);
    if fi < 0.0 {
        return CrossoverReport::absent(measure);
    }
    let (t_qme, residual) = match refine {
        Some(f) => {
            let (t, r) = bisect(f, times[i], times[j]);
            (t, Some(r))
        }
        None => (times[i] + (times[j] - times[i]) * fi / (fi - fj), None),
    };
    CrossoverReport {
        measure,
        t_qme: Some(t_qme),
        bracket: Some((i, j)),
        residual,
    }
}

/// Crossover of a computed trajectory, refined on the exact propagator.
pub fn detect_crossover_exact(
    traj: &Trajectory,
    relaxation: &Relaxation<'_>,
    measure: DistanceMeasure,
) -> CrossoverReport {
    let f = |t: f64| relaxation.difference(measure, t);
    detect_crossover(traj, measure, Some(&f))
}

/// Largest increase between consecutive points (0 for a non-increasing series).
pub fn max_increase(series: &[f64]) -> f64 {
    series.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}
