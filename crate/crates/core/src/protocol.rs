//! Permutation dressing of initial states, mode-overlap diagnostics, the
//! coherence classifier and the critical-angle protocol for a real,
//! Hermitian slowest left eigenmatrix.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::davies::{DaviesModel, LiouvillianSpectrum, Sector};
use crate::distances::check_density;
use crate::error::{Error, Result};
use crate::linops::{
    c64, conjugate, conjugate_inv, from_real_diagonal, hermitian_eigendecompose, hermiticity_deviation,
    hs_inner, real, trace, ComplexOperator, EigenOrder, HermitianSpectrum, HERMITIAN_TOL,
};

/// Off-diagonal magnitude below which a state counts as energy-incoherent.
pub const COHERENCE_TOL: f64 = 1e-12;
pub const DEFAULT_SUPPRESSION_THRESHOLD: f64 = 1e-10;

/// A permutation `π` of `{0, …, d-1}` with matrix `P_π = Σ_l |l⟩⟨π(l)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSpec {
    pi: Vec<usize>,
}

impl PermutationSpec {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let d = pi.len();
        let mut seen = vec![false; d];
        for &p in &pi {
            if p >= d {
                return Err(Error::InvalidPermutation(format!("index {p} out of range for dimension {d}")));
            }
            if seen[p] {
                return Err(Error::InvalidPermutation(format!("index {p} repeated")));
            }
            seen[p] = true;
        }
        Ok(Self { pi })
    }

    /// From 1-based indices.
    pub fn from_one_based(pi: &[usize]) -> Result<Self> {
        if pi.contains(&0) {
            return Err(Error::InvalidPermutation("1-based indices must be >= 1".into()));
        }
        Self::new(pi.iter().map(|p| p - 1).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self { pi: (0..dim).collect() }
    }

    /// Swaps `a` and `b`.
    pub fn transposition(dim: usize, a: usize, b: usize) -> Result<Self> {
        if a >= dim || b >= dim {
            return Err(Error::InvalidPermutation(format!("transposition ({a} {b}) out of range")));
        }
        let mut pi: Vec<usize> = (0..dim).collect();
        pi.swap(a, b);
        Ok(Self { pi })
    }

    /// `j ↦ d-1-j`; on `N` qubits this is the bit flip `σ_x^{⊗N}`.
    pub fn reversal(dim: usize) -> Self {
        Self { pi: (0..dim).rev().collect() }
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    pub fn image(&self, l: usize) -> usize {
        self.pi[l]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.pi.len()];
        for (l, &p) in self.pi.iter().enumerate() {
            inv[p] = l;
        }
        Self { pi: inv }
    }

    pub fn as_matrix(&self) -> ComplexOperator {
        let d = self.dim();
        let mut m = ComplexOperator::zeros(d, d);
        for (l, &p) in self.pi.iter().enumerate() {
            m[(l, p)] = real(1.0);
        }
        m
    }

    /// Diagonal of `P_π diag(values) P_π†`, i.e. `values[π(l)]`.
    pub fn permute_diagonal(&self, values: &[f64]) -> Vec<f64> {
        self.pi.iter().map(|&p| values[p]).collect()
    }

    pub fn is_symmetric_matrix(&self) -> bool {
        self.pi.iter().enumerate().all(|(l, &p)| self.pi[p] == l)
    }
}

impl fmt::Display for PermutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pi.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Anti-sorted pairing: the largest state eigenvalue goes on the level with
/// the smallest Gibbs weight, the second largest on the second smallest, …
///
/// Ties are broken by a stable sort on both sides.
pub fn canonical_permutation(state_eigs: &[f64], gibbs_weights: &[f64]) -> Result<PermutationSpec> {
    let d = state_eigs.len();
    if gibbs_weights.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: gibbs_weights.len() });
    }
    let mut levels: Vec<usize> = (0..d).collect();
    levels.sort_by(|&a, &b| gibbs_weights[a].total_cmp(&gibbs_weights[b]));
    let mut eigs: Vec<usize> = (0..d).collect();
    eigs.sort_by(|&a, &b| state_eigs[b].total_cmp(&state_eigs[a]));
    let mut pi = vec![0; d];
    for (level, eig) in levels.into_iter().zip(eigs) {
        pi[level] = eig;
    }
    PermutationSpec::new(pi)
}

/// How the permutation of a dressing is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DressingMode {
    /// No dressing; the dressed state is the probe itself.
    None,
    /// Anti-Gibbs pairing with `Λ` in descending eigenvalue order.
    #[default]
    Canonical,
    /// `σ_x^{⊗N}` applied to `Λ` in ascending eigenvalue order.
    SigmaXAll,
}

impl DressingMode {
    pub fn name(&self) -> &'static str {
        match self {
            DressingMode::None => "none",
            DressingMode::Canonical => "canonical",
            DressingMode::SigmaXAll => "sigma_x_all",
        }
    }
}

impl std::str::FromStr for DressingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DressingMode::None),
            "canonical" => Ok(DressingMode::Canonical),
            "sigma_x_all" => Ok(DressingMode::SigmaXAll),
            other => Err(Error::InvalidPermutation(format!("unknown permutation mode '{other}'"))),
        }
    }
}

/// A probe state with its diagonalization `ρ = Λ D Λ†` and the dressed state
/// `ρ' = U ρ U†` with `U = U₁ P_π Λ†`.
#[derive(Debug, Clone)]
pub struct DressingPlan {
    pub state_spectrum: HermitianSpectrum,
    pub permutation: PermutationSpec,
    pub dressing_unitary: ComplexOperator,
    pub dressed_state: ComplexOperator,
}

impl DressingPlan {
    /// `Λ`
    pub fn lambda(&self) -> &ComplexOperator {
        self.state_spectrum.basis()
    }

    /// Diagonal of `P_π D P_π†`, the dressed populations per energy level.
    pub fn dressed_populations(&self) -> Vec<f64> {
        self.permutation.permute_diagonal(self.state_spectrum.values())
    }
}

/// Dresses `probe` in the energy basis `basis` with `Λ` sorted per `order`.
pub fn dress_with_basis(
    probe: &ComplexOperator,
    basis: &ComplexOperator,
    permutation: PermutationSpec,
    order: EigenOrder,
) -> Result<DressingPlan> {
    check_density(probe)?;
    let d = probe.nrows();
    if basis.nrows() != d || permutation.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: permutation.dim() });
    }
    let state_spectrum = hermitian_eigendecompose(probe, order)?;
    let dressing_unitary = basis * permutation.as_matrix() * state_spectrum.basis().adjoint();
    let dressed_state = conjugate(&dressing_unitary, probe);
    // exact Hermitian form
    let dressed_state = (&dressed_state + dressed_state.adjoint()).scale(0.5);
    Ok(DressingPlan {
        state_spectrum,
        permutation,
        dressing_unitary,
        dressed_state,
    })
}

/// `Λ` in descending eigenvalue order, energies of `model`.
pub fn dress_state(probe: &ComplexOperator, model: &DaviesModel, permutation: PermutationSpec) -> Result<DressingPlan> {
    dress_with_basis(probe, model.basis(), permutation, EigenOrder::Descending)
}

/// Builds the dressing for `mode`. `DressingMode::None` returns the probe
/// unchanged with the identity permutation.
pub fn plan_dressing(probe: &ComplexOperator, model: &DaviesModel, mode: DressingMode) -> Result<DressingPlan> {
    let d = probe.nrows();
    match mode {
        DressingMode::Canonical => {
            let eigs = crate::linops::hermitian_eigenvalues(probe, EigenOrder::Descending)
                .map_err(|e| Error::InvalidState(e.to_string()))?;
            let perm = canonical_permutation(&eigs, &model.gibbs_weights())?;
            dress_state(probe, model, perm)
        }
        DressingMode::SigmaXAll => {
            if !d.is_power_of_two() {
                return Err(Error::InvalidPermutation(format!("sigma_x_all needs a qubit register, dimension is {d}")));
            }
            dress_with_basis(probe, model.basis(), PermutationSpec::reversal(d), EigenOrder::Ascending)
        }
        DressingMode::None => {
            check_density(probe)?;
            let state_spectrum = hermitian_eigendecompose(probe, EigenOrder::Descending)?;
            Ok(DressingPlan {
                state_spectrum,
                permutation: PermutationSpec::identity(d),
                dressing_unitary: crate::linops::identity(d),
                dressed_state: probe.clone(),
            })
        }
    }
}

/// `Tr(L_s† ρ)`
pub fn mode_overlap(l_s: &ComplexOperator, rho: &ComplexOperator) -> Complex64 {
    hs_inner(l_s, rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOverlap {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub sector: Sector,
    pub overlap: Complex64,
    pub suppressed: bool,
}

/// `|Tr(L_s† ρ)|` for every mode, flagged suppressed when below `threshold`.
pub fn suppression_report(
    spectrum: &LiouvillianSpectrum,
    rho: &ComplexOperator,
    threshold: f64,
) -> Result<Vec<ModeOverlap>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidModel(format!("threshold must be > 0, got {threshold}")));
    }
    if rho.nrows() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: rho.nrows() });
    }
    let rho_energy = spectrum.to_energy_basis(rho);
    Ok(spectrum
        .modes()
        .iter()
        .enumerate()
        .map(|(index, mode)| {
            let overlap = spectrum.coefficient_energy_basis(index, &rho_energy);
            ModeOverlap {
                index,
                eigenvalue: mode.eigenvalue,
                sector: mode.sector,
                overlap,
                suppressed: overlap.norm() <= threshold,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceTag {
    Incoherent,
    CoherentBlocking,
    CoherentTransparent,
}

impl CoherenceTag {
    pub fn name(&self) -> &'static str {
        match self {
            CoherenceTag::Incoherent => "incoherent",
            CoherenceTag::CoherentBlocking => "coherent_blocking",
            CoherenceTag::CoherentTransparent => "coherent_transparent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceScenario {
    pub tag: CoherenceTag,
    /// `⟨ψ_{l₀}|ρ|ψ_{k₀}⟩ = Tr(L₂ ρ)`
    pub overlap_value: Complex64,
    /// `(k₀, l₀)`, with `U₁† L₂ U₁ = |k₀⟩⟨l₀|`.
    pub support: (usize, usize),
}

/// Classifies `rho` against a slowest left eigenmatrix `U₁|k₀⟩⟨l₀|U₁†`.
pub fn classify_with_support(rho: &ComplexOperator, basis: &ComplexOperator, k0: usize, l0: usize) -> Result<CoherenceScenario> {
    let d = rho.nrows();
    if basis.nrows() != d || k0 >= d || l0 >= d || k0 == l0 {
        return Err(Error::InvalidModel(format!("invalid coherence support ({k0}, {l0})")));
    }
    let rho_energy = conjugate_inv(basis, rho);
    let mut max_off: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                max_off = max_off.max(rho_energy[(i, j)].norm());
            }
        }
    }
    let overlap_value = rho_energy[(l0, k0)];
    let tag = if max_off <= COHERENCE_TOL {
        CoherenceTag::Incoherent
    } else if overlap_value.norm() <= COHERENCE_TOL {
        CoherenceTag::CoherentTransparent
    } else {
        CoherenceTag::CoherentBlocking
    };
    Ok(CoherenceScenario { tag, overlap_value, support: (k0, l0) })
}

pub fn classify_coherence(rho: &ComplexOperator, spectrum: &LiouvillianSpectrum) -> Result<CoherenceScenario> {
    let slowest = spectrum.slowest_decaying().ok_or(Error::RealSlowestMode)?;
    match slowest.sector {
        Sector::Coherence { row, col } => classify_with_support(rho, spectrum.basis(), row, col),
        Sector::Population { .. } => Err(Error::RealSlowestMode),
    }
}

/// `arctan √|α₁/α_n|` for eigenvalues of opposite sign.
pub fn critical_angle(alpha_1: f64, alpha_n: f64) -> Result<f64> {
    if !(alpha_1 * alpha_n < 0.0) {
        return Err(Error::SameSignEigenvalues { alpha_1, alpha_n });
    }
    Ok((alpha_1 / alpha_n).abs().sqrt().atan())
}

/// Terms of the overlap `Tr(L₂ ρ')` for `V(θ) = (cos θ + i sin θ S) P`.
///
/// With `Q = P D P†` and `L' = U₁† L₂ U₁`:
/// `Tr(L₂ρ') = cos²θ Tr(L'Q) + sin²θ Tr(L' S Q S) + i sinθ cosθ Tr(L'[S, Q])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealModeTerms {
    /// `Tr(L' Q)`
    pub direct: Complex64,
    /// `Tr(L' S Q S)`
    pub swapped: Complex64,
    /// `Tr(L' [S, Q])`
    pub cross: Complex64,
    /// `Tr(S [D, P† L' P])`, the commutator written with `D` unpermuted.
    pub commutator: Complex64,
}

impl RealModeTerms {
    pub fn combine(&self, theta: f64) -> Complex64 {
        let (s, c) = theta.sin_cos();
        self.direct * (c * c) + self.swapped * (s * s) + c64(0.0, s * c) * self.cross
    }
}

#[derive(Debug, Clone)]
pub struct RealModeDressing {
    pub dressed: ComplexOperator,
    /// `Tr(L₂ ρ')`, evaluated directly.
    pub overlap: Complex64,
    pub terms: RealModeTerms,
    /// `V(θ)`
    pub v: ComplexOperator,
}

/// `ρ' = U ρ U†` with `U = U₁ V(θ) Λ†`, `V(θ) = (cos θ I + i sin θ S_π) P_π`.
pub fn real_mode_dressing(
    probe: &ComplexOperator,
    basis: &ComplexOperator,
    l2: &ComplexOperator,
    theta: f64,
    p_pi: &PermutationSpec,
    s_pi: &PermutationSpec,
) -> Result<RealModeDressing> {
    let d = probe.nrows();
    if hermiticity_deviation(l2) > HERMITIAN_TOL * l2.norm().max(1.0) {
        return Err(Error::NonHermitianL2);
    }
    if !s_pi.is_symmetric_matrix() {
        return Err(Error::InvalidPermutation("S_pi must be a symmetric permutation matrix".into()));
    }
    if p_pi.dim() != d || s_pi.dim() != d || basis.nrows() != d || l2.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: p_pi.dim() });
    }
    let state = hermitian_eigendecompose(probe, EigenOrder::Descending)
        .map_err(|e| Error::InvalidState(e.to_string()))?;
    let purity = (probe * probe).trace().re;
    if (purity - 1.0).abs() > 1e-10 || (trace(probe).re - 1.0).abs() > 1e-10 {
        return Err(Error::NonPureProbe);
    }
    let lambda = state.basis();
    let dmat = from_real_diagonal(state.values());
    let p = p_pi.as_matrix();
    let s = s_pi.as_matrix();
    let (sn, cs) = theta.sin_cos();
    let v = (crate::linops::identity(d).scale(cs) + s.map(|z| z * c64(0.0, sn))) * &p;
    let u = basis * &v * lambda.adjoint();
    let dressed = conjugate(&u, probe);
    let overlap = (l2 * &dressed).trace();

    let l_prime = conjugate_inv(basis, l2);
    let q = &p * &dmat * p.adjoint();
    let terms = RealModeTerms {
        direct: (&l_prime * &q).trace(),
        swapped: (&l_prime * &s * &q * &s).trace(),
        cross: (&l_prime * (&s * &q - &q * &s)).trace(),
        commutator: {
            let moved = p.adjoint() * &l_prime * &p;
            (&s * (&dmat * &moved - &moved * &dmat)).trace()
        },
    };
    Ok(RealModeDressing { dressed, overlap, terms, v })
}

/// Permutations for the critical-angle protocol.
///
/// `alphas` are the diagonal entries of `U₁† L₂ U₁`; `support` is the index of
/// the unit eigenvalue of `D`. `P_π` moves the support onto the largest
/// eigenvalue `α₁` and `S_π` swaps that position with the smallest `α_n`.
pub fn real_mode_permutations(alphas: &[f64], support: usize) -> Result<(PermutationSpec, PermutationSpec, f64, f64)> {
    let d = alphas.len();
    if support >= d {
        return Err(Error::InvalidPermutation(format!("support {support} out of range")));
    }
    let (i_max, &a1) = alphas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidPermutation("empty spectrum".into()))?;
    let (i_min, &an) = alphas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidPermutation("empty spectrum".into()))?;
    if !(a1 * an < 0.0) {
        return Err(Error::SameSignEigenvalues { alpha_1: a1, alpha_n: an });
    }
    let p = PermutationSpec::transposition(d, i_max, support)?;
    let s = PermutationSpec::transposition(d, i_max, i_min)?;
    Ok((p, s, a1, an))
}

/// Hermitian matrix with diagonal `alphas` in the basis `basis`.
pub fn hermitian_from_spectrum(basis: &ComplexOperator, alphas: &[f64]) -> ComplexOperator {
    conjugate(basis, &DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        alphas.len(),
        alphas.iter().map(|&a| real(a)),
    )))
}
