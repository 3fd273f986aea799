//! Concrete systems: a driven two-level system with closed-form relaxation,
//! and open transverse-field Ising and XXZ chains.

use nalgebra::{DMatrix, DVector};

use crate::davies::{
    build_jump_operators, BathStatistics, DaviesModel, DegeneracyPolicy, LiouvillianSpectrum, Mode, Sector,
    DEFAULT_GAP_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::linops::{
    c64, conjugate, hermitian_eigendecompose, kron, real, ComplexOperator, EigenOrder, HermitianSpectrum,
};
use crate::protocol::PermutationSpec;

/// Default largest chain length.
pub const DEFAULT_SITE_CAP: usize = 7;

/// Bath parameters shared by all models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    pub gamma: f64,
    pub temperature: f64,
    pub k_b: f64,
    pub statistics: BathStatistics,
    pub degeneracy_policy: DegeneracyPolicy,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            temperature: 1.0,
            k_b: 1.0,
            statistics: BathStatistics::Bose,
            degeneracy_policy: DegeneracyPolicy::SkipPair,
        }
    }
}

impl BathConfig {
    pub fn model(&self, spectrum: HermitianSpectrum) -> Result<DaviesModel> {
        DaviesModel::new(spectrum, self.gamma, self.temperature)?
            .with_boltzmann(self.k_b)?
            .with_statistics(self.statistics)
            .with_degeneracy_policy(self.degeneracy_policy, DEFAULT_GAP_TOLERANCE)
    }
}

/// Diagonalizes `h` (energies descending) and attaches the bath.
pub fn davies_from_hamiltonian(h: &ComplexOperator, bath: &BathConfig) -> Result<DaviesModel> {
    bath.model(hermitian_eigendecompose(h, EigenOrder::Descending)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelConfig {
    pub eps1: f64,
    pub eps2: f64,
    pub bath: BathConfig,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        Self { eps1: 1.0, eps2: 0.0, bath: BathConfig::default() }
    }
}

impl TwoLevelConfig {
    pub fn gap(&self) -> f64 {
        self.eps1 - self.eps2
    }

    fn check(&self) -> Result<()> {
        if !(self.gap() > 0.0) {
            return Err(Error::InvalidModel(format!("need eps1 > eps2, got {} and {}", self.eps1, self.eps2)));
        }
        Ok(())
    }

    /// `(ξ, χ)` for the single level pair.
    pub fn rates(&self) -> (f64, f64) {
        let beta = 1.0 / (self.bath.k_b * self.bath.temperature);
        crate::davies::transition_rates(self.gap(), self.bath.gamma, beta, self.bath.statistics)
    }

    /// `ξ + χ`; equals `γ coth(δ/2k_BT)` for a Bose bath and `γ` for a Fermi bath.
    pub fn total_rate(&self) -> f64 {
        let (xi, chi) = self.rates();
        xi + chi
    }

    /// `tanh(δ/2k_BT)`
    pub fn polarization(&self) -> f64 {
        (self.gap() / (2.0 * self.bath.k_b * self.bath.temperature)).tanh()
    }

    /// `(p₊, p₋)`, the ground and excited Gibbs weights.
    pub fn boltzmann_weights(&self) -> (f64, f64) {
        let th = self.polarization();
        ((1.0 + th) / 2.0, (1.0 - th) / 2.0)
    }
}

/// `U₁ = i(|1⟩⟨0| − |0⟩⟨1|)`
pub fn two_level_basis() -> ComplexOperator {
    DMatrix::from_row_slice(2, 2, &[real(0.0), c64(0.0, -1.0), c64(0.0, 1.0), real(0.0)])
}

/// `Λ = −i|0⟩⟨−| + |1⟩⟨+|`
pub fn two_level_lambda() -> ComplexOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c64(0.0, -h), c64(0.0, h), real(h), real(h)])
}

pub fn two_level_model(cfg: &TwoLevelConfig) -> Result<DaviesModel> {
    cfg.check()?;
    let spectrum = HermitianSpectrum::from_parts(vec![cfg.eps1, cfg.eps2], two_level_basis(), EigenOrder::Descending)?;
    cfg.bath.model(spectrum)
}

/// `Λ diag(0, 1) Λ†`, Bloch vector `(0, −1, 0)`.
pub fn two_level_probe() -> ComplexOperator {
    let lambda = two_level_lambda();
    conjugate(&lambda, &crate::linops::from_real_diagonal(&[0.0, 1.0]))
}

/// Closed-form relaxation of the two-level system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAnalytic {
    pub r_plain: [f64; 3],
    pub r_dressed: [f64; 3],
    pub r_ss: [f64; 3],
    pub td_plain: f64,
    pub td_dressed: f64,
}

pub fn two_level_analytic(cfg: &TwoLevelConfig, t: f64) -> Result<TwoLevelAnalytic> {
    cfg.check()?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let delta = cfg.gap();
    let kappa = cfg.total_rate();
    let th = cfg.polarization();
    let sech2 = 1.0 - th * th;
    let x = delta / (cfg.bath.k_b * cfg.bath.temperature);
    let half = (-0.5 * kappa * t).exp();
    let full = (-kappa * t).exp();
    let r_plain = [-half * (delta * t).sin(), -half * (delta * t).cos(), (1.0 - full) * th];
    // 2e^x/(e^x + 1) written as 2/(1 + e^{-x})
    let r_dressed = [0.0, 0.0, 2.0 * (1.0 - full) / (1.0 + (-x).exp()) - 1.0];
    let td_plain = 0.5 * half * (1.0 + full * th * th).sqrt();
    let td_dressed = full * sech2 / (2.0 * (1.0 - th));
    Ok(TwoLevelAnalytic {
        r_plain,
        r_dressed,
        r_ss: [0.0, 0.0, th],
        td_plain,
        td_dressed,
    })
}

/// The four eigenpairs of the two-level generator in closed form.
pub fn closed_form_spectrum(cfg: &TwoLevelConfig) -> Result<LiouvillianSpectrum> {
    cfg.check()?;
    let delta = cfg.gap();
    let kappa = cfg.total_rate();
    let (p_plus, p_minus) = cfg.boltzmann_weights();
    let modes = vec![
        Mode { eigenvalue: real(0.0), sector: Sector::Population { index: 0 } },
        Mode { eigenvalue: c64(-0.5 * kappa, -delta), sector: Sector::Coherence { row: 0, col: 1 } },
        Mode { eigenvalue: c64(-0.5 * kappa, delta), sector: Sector::Coherence { row: 1, col: 0 } },
        Mode { eigenvalue: real(-kappa), sector: Sector::Population { index: 1 } },
    ];
    let pop_right = DMatrix::from_row_slice(2, 2, &[p_minus, -1.0, p_plus, 1.0]);
    let pop_left = DMatrix::from_row_slice(2, 2, &[1.0, -p_plus, 1.0, p_minus]);
    let generator = DMatrix::from_row_slice(2, 2, &[-kappa * p_plus, kappa * p_minus, kappa * p_plus, -kappa * p_minus]);
    let beta = 1.0 / (cfg.bath.k_b * cfg.bath.temperature);
    let log_z = {
        let a = -beta * cfg.eps1;
        let b = -beta * cfg.eps2;
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln()
    };
    LiouvillianSpectrum::from_parts(
        two_level_basis(),
        vec![cfg.eps1, cfg.eps2],
        vec![-beta * cfg.eps1 - log_z, -beta * cfg.eps2 - log_z],
        modes,
        pop_right,
        pop_left,
        generator,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Tfi,
    Xxz,
}

/// Open chain of `sites` spins.
///
/// TFI: `−J Σ σᶻσᶻ + h Σ σˣ`; XXZ: `Σ [J(σˣσˣ + σʸσʸ) + Δ σᶻσᶻ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainConfig {
    pub kind: ChainKind,
    pub sites: usize,
    pub j: f64,
    pub h: f64,
    pub delta: f64,
    pub site_cap: usize,
}

impl SpinChainConfig {
    pub fn tfi(sites: usize, j: f64, h: f64) -> Self {
        Self { kind: ChainKind::Tfi, sites, j, h, delta: 0.0, site_cap: DEFAULT_SITE_CAP }
    }

    pub fn xxz(sites: usize, j: f64, delta: f64) -> Self {
        Self { kind: ChainKind::Xxz, sites, j, h: 0.0, delta, site_cap: DEFAULT_SITE_CAP }
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }
}

fn pauli(which: char) -> ComplexOperator {
    let z = real(0.0);
    let one = real(1.0);
    match which {
        'x' => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        'y' => DMatrix::from_row_slice(2, 2, &[z, c64(0.0, -1.0), c64(0.0, 1.0), z]),
        'z' => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => DMatrix::identity(2, 2),
    }
}

/// Tensor product with `ops` placed at the given sites (site 0 is the most
/// significant qubit) and identities elsewhere.
fn site_operator(sites: usize, ops: &[(usize, char)]) -> ComplexOperator {
    let mut out = DMatrix::identity(1, 1);
    for s in 0..sites {
        let factor = ops
            .iter()
            .find(|(site, _)| *site == s)
            .map_or_else(|| pauli('i'), |(_, w)| pauli(*w));
        out = kron(&out, &factor);
    }
    out
}

pub fn build_chain(cfg: &SpinChainConfig) -> Result<ComplexOperator> {
    if cfg.sites == 0 {
        return Err(Error::InvalidModel("chain needs at least one site".into()));
    }
    if cfg.sites > cfg.site_cap {
        return Err(Error::DimensionCap { dim: cfg.sites, cap: cfg.site_cap });
    }
    if !(cfg.j.is_finite() && cfg.h.is_finite() && cfg.delta.is_finite()) {
        return Err(Error::InvalidModel("chain couplings must be finite".into()));
    }
    let n = cfg.sites;
    let d = cfg.dim();
    let mut h = ComplexOperator::zeros(d, d);
    for s in 0..n.saturating_sub(1) {
        match cfg.kind {
            ChainKind::Tfi => {
                h -= site_operator(n, &[(s, 'z'), (s + 1, 'z')]).scale(cfg.j);
            }
            ChainKind::Xxz => {
                h += (site_operator(n, &[(s, 'x'), (s + 1, 'x')]) + site_operator(n, &[(s, 'y'), (s + 1, 'y')]))
                    .scale(cfg.j);
                h += site_operator(n, &[(s, 'z'), (s + 1, 'z')]).scale(cfg.delta);
            }
        }
    }
    if cfg.kind == ChainKind::Tfi {
        for s in 0..n {
            h += site_operator(n, &[(s, 'x')]).scale(cfg.h);
        }
    }
    Ok(h)
}

/// `U₁|φ⟩⟨φ|U₁†` with `|φ⟩` the uniform superposition of computational states.
pub fn uniform_superposition_probe(spectrum: &HermitianSpectrum) -> ComplexOperator {
    let d = spectrum.dim();
    let phi = DVector::from_element(d, real(1.0 / (d as f64).sqrt()));
    let psi = spectrum.basis() * phi;
    &psi * psi.adjoint()
}

/// Bit flip `j ↦ 2^N − 1 − j` on `N` qubits.
pub fn sigma_x_all_permutation(sites: usize) -> PermutationSpec {
    PermutationSpec::reversal(1 << sites)
}

/// Number of level pairs the degeneracy policy would skip.
pub fn skipped_pairs(model: &DaviesModel) -> Result<usize> {
    Ok(build_jump_operators(model)?.skipped.len())
}
