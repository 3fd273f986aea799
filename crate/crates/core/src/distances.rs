//! Distinguishability measures between density matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linops::{
    check_square, hermitian_eigenvalues_unchecked, hermiticity_deviation, matrix_log_psd, trace, ComplexOperator, EigenOrder,
    LOG_CUTOFF,
};

/// Tolerance for accepting an input as a density matrix.
pub const DENSITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceMeasure {
    /// Hilbert-Schmidt distance
    Hsd,
    /// Quantum relative entropy `D(state ‖ reference)`
    Qre,
    /// Trace distance
    Td,
}

impl DistanceMeasure {
    pub const ALL: [DistanceMeasure; 3] = [DistanceMeasure::Hsd, DistanceMeasure::Qre, DistanceMeasure::Td];

    pub fn name(&self) -> &'static str {
        match self {
            DistanceMeasure::Hsd => "hsd",
            DistanceMeasure::Qre => "qre",
            DistanceMeasure::Td => "td",
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, DistanceMeasure::Qre)
    }

    /// Evaluates the measure `D(rho, sigma)`.
    pub fn evaluate(&self, rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<f64> {
        match self {
            DistanceMeasure::Hsd => hsd(rho, sigma),
            DistanceMeasure::Qre => qre(rho, sigma),
            DistanceMeasure::Td => trace_distance(rho, sigma),
        }
    }
}

impl fmt::Display for DistanceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hsd" => Ok(DistanceMeasure::Hsd),
            "qre" => Ok(DistanceMeasure::Qre),
            "td" => Ok(DistanceMeasure::Td),
            other => Err(Error::InvalidModel(format!("unknown distance measure '{other}'"))),
        }
    }
}

/// Checks that the matrix is a density matrix within [`DENSITY_TOL`].
pub fn check_density(rho: &ComplexOperator) -> Result<Vec<f64>> {
    check_square(rho).map_err(|e| Error::InvalidState(e.to_string()))?;
    let deviation = hermiticity_deviation(rho);
    if deviation > DENSITY_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {deviation:e})")));
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let values = hermitian_eigenvalues_unchecked(rho, EigenOrder::Descending);
    if let Some(&min) = values.last() {
        if min < -DENSITY_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} is negative")));
        }
    }
    Ok(values)
}

fn check_pair(rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<()> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            found: rho.nrows(),
        });
    }
    check_density(rho)?;
    check_density(sigma)?;
    Ok(())
}

/// `√Tr[(ρ−σ)²]`
pub fn hsd(rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok((rho - sigma).norm())
}

fn neg_entropy_of(values: &[f64]) -> f64 {
    values.iter().filter(|&&v| v > LOG_CUTOFF).map(|v| v * v.ln()).sum()
}

/// `−S(ρ) − Tr(ρ ln σ)`, natural log, `0·ln 0 = 0`.
pub fn qre(rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<f64> {
    check_pair(rho, sigma)?;
    let rho_values = hermitian_eigenvalues_unchecked(rho, EigenOrder::Descending);
    let log_sigma = matrix_log_psd(sigma)?;
    let outside = (rho * &log_sigma.kernel).trace().re;
    if outside > 1e-10 {
        return Err(Error::SupportViolation { weight: outside });
    }
    let cross = (rho * &log_sigma.log).trace().re;
    Ok((neg_entropy_of(&rho_values) - cross).max(0.0))
}

/// `½ Tr|ρ−σ|`
pub fn trace_distance(rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok(half_trace_norm(&(rho - sigma)))
}

pub(crate) fn half_trace_norm(delta: &ComplexOperator) -> f64 {
    0.5 * hermitian_eigenvalues_unchecked(delta, EigenOrder::Descending)
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
}

/// Distances from `rho_energy` (a state written in the energy eigenbasis) to
/// the diagonal reference with the given log weights.
///
/// No input validation; the relative entropy uses the exact log weights, so
/// it stays accurate when some weights underflow.
pub(crate) fn distance_to_diagonal(
    measure: DistanceMeasure,
    rho_energy: &ComplexOperator,
    log_weights: &[f64],
) -> f64 {
    let d = log_weights.len();
    match measure {
        DistanceMeasure::Hsd => {
            let mut delta = rho_energy.clone();
            for a in 0..d {
                delta[(a, a)] -= log_weights[a].exp();
            }
            delta.norm()
        }
        DistanceMeasure::Td => {
            let mut delta = rho_energy.clone();
            for a in 0..d {
                delta[(a, a)] -= log_weights[a].exp();
            }
            half_trace_norm(&delta)
        }
        DistanceMeasure::Qre => {
            let values = hermitian_eigenvalues_unchecked(rho_energy, EigenOrder::Descending);
            let cross: f64 = (0..d).map(|a| rho_energy[(a, a)].re * log_weights[a]).sum();
            (neg_entropy_of(&values) - cross).max(0.0)
        }
    }
}

/// Bloch vector `(Tr ρσx, Tr ρσy, Tr ρσz)` of a qubit state.
pub fn bloch_vector(rho: &ComplexOperator) -> Result<[f64; 3]> {
    if rho.shape() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.nrows() });
    }
    Ok([
        2.0 * rho[(1, 0)].re,
        2.0 * rho[(1, 0)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ])
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Qubit relative entropy `D(ρ_u ‖ ρ_r)` from Bloch vectors.
///
/// The `|u|·artanh|u| + ½ln(1−|u|²)` part is evaluated as `Σ p ln p` over
/// the eigenvalues `(1±|u|)/2`, which is finite up to and including `|u| = 1`.
pub fn qubit_qre_bloch(u: &[f64; 3], r_ss: &[f64; 3]) -> Result<f64> {
    let nu = norm3(u);
    if nu > 1.0 + 1e-12 {
        return Err(Error::InvalidBloch { norm: nu });
    }
    let nr = norm3(r_ss);
    if !(nr > 0.0 && nr < 1.0) {
        return Err(Error::InvalidBloch { norm: nr });
    }
    let nu = nu.min(1.0);
    let p = [(1.0 + nu) / 2.0, (1.0 - nu) / 2.0];
    let neg_entropy = neg_entropy_of(&p);
    let dot = u[0] * r_ss[0] + u[1] * r_ss[1] + u[2] * r_ss[2];
    let cross = 0.5 * ((1.0 - nr * nr) / 4.0).ln() + nr.atanh() * dot / nr;
    Ok(neg_entropy - cross)
}
