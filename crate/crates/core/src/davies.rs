//! Davies generators: thermal jump operators, the structured vectorized
//! generator in the energy eigenbasis, and its biorthogonal spectral
//! decomposition.
//!
//! In the energy eigenbasis the vectorized generator splits into a diagonal
//! coherence block of size `d(d-1)` and a real `d × d` population block. The
//! population block obeys detailed balance with respect to the Gibbs weights
//! `π`, so `Π^{-1/2} W Π^{1/2}` is symmetric; its orthonormal eigenvectors `v`
//! give right and left eigenvectors `Π^{1/2} v` and `Π^{-1/2} v` that are
//! biorthonormal by construction, also inside degenerate clusters.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    c64, conjugate, from_real_diagonal, identity, kron, real, sandwich, ComplexOperator, EigenOrder,
    HermitianSpectrum, SuperOperatorMatrix,
};

pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-9;
/// Largest dimension for which dense `d² × d²` matrices are assembled.
pub const DENSE_DIM_CAP: usize = 16;
/// Eigenvalues closer than this are reported as a degenerate pair.
pub const LIOUVILLIAN_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BathStatistics {
    #[default]
    Bose,
    Fermi,
}

/// What to do with a level pair whose energy gap is within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneracyPolicy {
    Error,
    #[default]
    SkipPair,
}

/// A finite system weakly coupled to a thermal bath.
#[derive(Debug, Clone)]
pub struct DaviesModel {
    spectrum: HermitianSpectrum,
    gamma: f64,
    temperature: f64,
    k_b: f64,
    statistics: BathStatistics,
    policy: DegeneracyPolicy,
    gap_tolerance: f64,
}

impl DaviesModel {
    /// Bose bath, `k_B = 1`, `skip_pair` policy with gap tolerance 1e-9.
    ///
    /// `spectrum` must hold the Hamiltonian energies in descending order.
    /// `gamma = 0` is accepted and describes the closed system.
    pub fn new(spectrum: HermitianSpectrum, gamma: f64, temperature: f64) -> Result<Self> {
        if spectrum.order() != EigenOrder::Descending {
            return Err(Error::InvalidModel("energies must be sorted descending".into()));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidModel(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidModel(format!("temperature must be > 0, got {temperature}")));
        }
        Ok(Self {
            spectrum,
            gamma,
            temperature,
            k_b: 1.0,
            statistics: BathStatistics::Bose,
            policy: DegeneracyPolicy::SkipPair,
            gap_tolerance: DEFAULT_GAP_TOLERANCE,
        })
    }

    pub fn with_statistics(mut self, statistics: BathStatistics) -> Self {
        self.statistics = statistics;
        self
    }

    pub fn with_boltzmann(mut self, k_b: f64) -> Result<Self> {
        if !(k_b.is_finite() && k_b > 0.0) {
            return Err(Error::InvalidModel(format!("k_B must be > 0, got {k_b}")));
        }
        self.k_b = k_b;
        Ok(self)
    }

    pub fn with_degeneracy_policy(mut self, policy: DegeneracyPolicy, gap_tolerance: f64) -> Result<Self> {
        if !(gap_tolerance.is_finite() && gap_tolerance >= 0.0) {
            return Err(Error::InvalidModel(format!("gap tolerance must be >= 0, got {gap_tolerance}")));
        }
        self.policy = policy;
        self.gap_tolerance = gap_tolerance;
        Ok(self)
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }
    pub fn energies(&self) -> &[f64] {
        self.spectrum.values()
    }
    pub fn basis(&self) -> &ComplexOperator {
        self.spectrum.basis()
    }
    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn k_b(&self) -> f64 {
        self.k_b
    }
    pub fn statistics(&self) -> BathStatistics {
        self.statistics
    }
    pub fn degeneracy_policy(&self) -> DegeneracyPolicy {
        self.policy
    }
    pub fn gap_tolerance(&self) -> f64 {
        self.gap_tolerance
    }

    pub fn beta(&self) -> f64 {
        1.0 / (self.k_b * self.temperature)
    }

    /// `ln(e^{-ε_l/k_BT}/Z)` per level, evaluated with log-sum-exp.
    pub fn log_gibbs_weights(&self) -> Vec<f64> {
        let beta = self.beta();
        let exps: Vec<f64> = self.energies().iter().map(|e| -beta * e).collect();
        let max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + exps.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        exps.iter().map(|x| x - log_z).collect()
    }

    pub fn gibbs_weights(&self) -> Vec<f64> {
        self.log_gibbs_weights().into_iter().map(f64::exp).collect()
    }
}

/// Downward (`xi`) and upward (`chi`) rates for an energy gap `gap > 0`.
///
/// `chi = γ / (e^{gap/k_BT} ∓ 1)`, `xi = γ ± chi` (upper sign Bose).
pub fn transition_rates(gap: f64, gamma: f64, beta: f64, statistics: BathStatistics) -> (f64, f64) {
    let x = gap * beta;
    match statistics {
        BathStatistics::Bose => {
            let chi = gamma / x.exp_m1();
            (gamma + chi, chi)
        }
        BathStatistics::Fermi => {
            let chi = gamma / (x.exp() + 1.0);
            (gamma - chi, chi)
        }
    }
}

/// One thermal level pair; `upper` has the higher energy (smaller index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpPair {
    pub upper: usize,
    pub lower: usize,
    /// rate of `upper → lower`
    pub xi: f64,
    /// rate of `lower → upper`
    pub chi: f64,
}

impl JumpPair {
    /// `√ξ U₁|lower⟩⟨upper|U₁†`
    pub fn lowering_operator(&self, basis: &ComplexOperator) -> ComplexOperator {
        outer_columns(basis, self.lower, self.upper).scale(self.xi.sqrt())
    }

    /// `√χ U₁|upper⟩⟨lower|U₁†`
    pub fn raising_operator(&self, basis: &ComplexOperator) -> ComplexOperator {
        outer_columns(basis, self.upper, self.lower).scale(self.chi.sqrt())
    }
}

fn outer_columns(basis: &ComplexOperator, a: usize, b: usize) -> ComplexOperator {
    let n = basis.nrows();
    DMatrix::from_fn(n, n, |i, j| basis[(i, a)] * basis[(j, b)].conj())
}

#[derive(Debug, Clone, Default)]
pub struct JumpOperatorSet {
    pub pairs: Vec<JumpPair>,
    /// `(upper, lower)` pairs excluded by the degeneracy policy.
    pub skipped: Vec<(usize, usize)>,
}

impl JumpOperatorSet {
    /// All jump operators, lowering then raising for each pair.
    pub fn operators(&self, basis: &ComplexOperator) -> Vec<ComplexOperator> {
        self.pairs
            .iter()
            .flat_map(|p| [p.lowering_operator(basis), p.raising_operator(basis)])
            .collect()
    }
}

pub fn build_jump_operators(model: &DaviesModel) -> Result<JumpOperatorSet> {
    let eps = model.energies();
    let d = eps.len();
    let beta = model.beta();
    let mut set = JumpOperatorSet::default();
    for upper in 0..d {
        for lower in (upper + 1)..d {
            let gap = eps[upper] - eps[lower];
            if gap <= model.gap_tolerance {
                match model.policy {
                    DegeneracyPolicy::Error => return Err(Error::DegenerateGap { upper, lower, gap }),
                    DegeneracyPolicy::SkipPair => {
                        set.skipped.push((upper, lower));
                        continue;
                    }
                }
            }
            let (xi, chi) = transition_rates(gap, model.gamma, beta, model.statistics);
            if !(xi.is_finite() && chi.is_finite()) {
                return Err(Error::SingularBoseRate { upper, lower });
            }
            set.pairs.push(JumpPair { upper, lower, xi, chi });
        }
    }
    if !set.skipped.is_empty() {
        log::warn!(
            "skipped {} degenerate level pair(s) with gap <= {:e}",
            set.skipped.len(),
            model.gap_tolerance
        );
    }
    Ok(set)
}

/// Compact form of the vectorized generator in the energy eigenbasis.
#[derive(Debug, Clone)]
pub struct XiBlocks {
    /// Diagonal of `A`: `-½ Σ(outgoing rates) - iε`.
    pub a_diagonal: Vec<Complex64>,
    /// Real `d × d` population block; entry `(a, b)` is the rate `b → a`,
    /// diagonal entries are minus the total outgoing rate.
    pub population: DMatrix<f64>,
}

impl XiBlocks {
    pub fn from_jumps(model: &DaviesModel, jumps: &JumpOperatorSet) -> Self {
        let d = model.dim();
        let mut outgoing = vec![0.0; d];
        let mut population = DMatrix::zeros(d, d);
        for p in &jumps.pairs {
            outgoing[p.upper] += p.xi;
            outgoing[p.lower] += p.chi;
            population[(p.lower, p.upper)] += p.xi;
            population[(p.upper, p.lower)] += p.chi;
        }
        for a in 0..d {
            population[(a, a)] = -outgoing[a];
        }
        let a_diagonal = outgoing
            .iter()
            .zip(model.energies())
            .map(|(&g, &e)| c64(-0.5 * g, -e))
            .collect();
        Self { a_diagonal, population }
    }

    /// Eigenvalue of the coherence `|row⟩⟨col|`: `A_row,row + conj(A_col,col)`.
    pub fn coherence_eigenvalue(&self, row: usize, col: usize) -> Complex64 {
        self.a_diagonal[row] + self.a_diagonal[col].conj()
    }
}

pub fn xi_blocks(model: &DaviesModel) -> Result<XiBlocks> {
    let jumps = build_jump_operators(model)?;
    Ok(XiBlocks::from_jumps(model, &jumps))
}

/// Dense `Ξ = A†⊗I + I⊗A + B` in the energy eigenbasis, with its parts.
#[derive(Debug, Clone)]
pub struct XiMatrices {
    pub a: ComplexOperator,
    pub b: SuperOperatorMatrix,
    pub xi: SuperOperatorMatrix,
}

pub fn build_xi(model: &DaviesModel) -> Result<XiMatrices> {
    let d = model.dim();
    if d > DENSE_DIM_CAP {
        return Err(Error::DimensionCap { dim: d, cap: DENSE_DIM_CAP });
    }
    let jumps = build_jump_operators(model)?;
    let eps = model.energies();
    let mut a = ComplexOperator::zeros(d, d);
    let mut b = SuperOperatorMatrix::zeros(d * d, d * d);
    // |m,n⟩ = |m⟩⊗|n⟩ has index m*d + n
    let pair_index = |m: usize, n: usize| m * d + n;
    for p in &jumps.pairs {
        let (m, n) = (p.upper, p.lower);
        a[(m, m)] -= real(0.5 * p.xi);
        a[(n, n)] -= real(0.5 * p.chi);
        b[(pair_index(m, m), pair_index(n, n))] += real(p.chi);
        b[(pair_index(n, n), pair_index(m, m))] += real(p.xi);
    }
    for l in 0..d {
        a[(l, l)] -= c64(0.0, eps[l]);
    }
    let id = identity(d);
    let xi = kron(&a.adjoint(), &id) + kron(&id, &a) + &b;
    Ok(XiMatrices { a, b, xi })
}

/// Dense GKSL superoperator of `-i[H,·] + Σ_j (L_j · L_j† - ½{L_j†L_j, ·})`.
pub fn lindblad_superoperator(h: &ComplexOperator, jumps: &[ComplexOperator]) -> SuperOperatorMatrix {
    let d = h.nrows();
    let id = identity(d);
    let minus_i = c64(0.0, -1.0);
    let mut sup = (sandwich(h, &id) - sandwich(&id, h)) * minus_i;
    for l in jumps {
        let ldl = l.adjoint() * l;
        sup += sandwich(l, &l.adjoint());
        sup -= (sandwich(&ldl, &id) + sandwich(&id, &ldl)).scale(0.5);
    }
    sup
}

/// Applies `-i[H,X] + Σ_j (L_j X L_j† - ½{L_j†L_j, X})` directly.
pub fn apply_lindblad(h: &ComplexOperator, jumps: &[ComplexOperator], x: &ComplexOperator) -> ComplexOperator {
    let mut out = (h * x - x * h) * c64(0.0, -1.0);
    for l in jumps {
        let ldl = l.adjoint() * l;
        out += l * x * l.adjoint();
        out -= (&ldl * x + x * &ldl).scale(0.5);
    }
    out
}

pub fn hamiltonian(model: &DaviesModel) -> ComplexOperator {
    conjugate(model.basis(), &from_real_diagonal(model.energies()))
}

/// The Davies generator applied to an operator, without vectorization.
pub fn apply_liouvillian(model: &DaviesModel, x: &ComplexOperator) -> Result<ComplexOperator> {
    let jumps = build_jump_operators(model)?;
    Ok(apply_lindblad(&hamiltonian(model), &jumps.operators(model.basis()), x))
}

/// Full `d² × d²` generator assembled from the jump operators (cross-check path).
pub fn build_liouvillian_dense(model: &DaviesModel) -> Result<SuperOperatorMatrix> {
    let d = model.dim();
    if d > DENSE_DIM_CAP {
        return Err(Error::DimensionCap { dim: d, cap: DENSE_DIM_CAP });
    }
    let jumps = build_jump_operators(model)?;
    Ok(lindblad_superoperator(&hamiltonian(model), &jumps.operators(model.basis())))
}

/// `U₁ diag(e^{-ε/k_BT}) U₁† / Z`.
pub fn steady_state_gibbs(model: &DaviesModel) -> ComplexOperator {
    conjugate(model.basis(), &from_real_diagonal(&model.gibbs_weights()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Column `index` of the population eigenvector tables.
    Population { index: usize },
    /// Eigenmatrix `U₁|row⟩⟨col|U₁†`, `row != col`.
    Coherence { row: usize, col: usize },
}

impl Sector {
    pub fn is_coherence(&self) -> bool {
        matches!(self, Sector::Coherence { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Sector::Population { .. } => "population",
            Sector::Coherence { .. } => "coherence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub eigenvalue: Complex64,
    pub sector: Sector,
}

/// Eigenvalues with paired left/right eigenmatrices, sorted by `|Re λ|`
/// ascending with the steady state first.
///
/// Eigenmatrices are stored in compact form and materialized on demand.
#[derive(Debug, Clone)]
pub struct LiouvillianSpectrum {
    basis: ComplexOperator,
    energies: Vec<f64>,
    log_gibbs: Vec<f64>,
    modes: Vec<Mode>,
    pop_right: DMatrix<f64>,
    pop_left: DMatrix<f64>,
    population_generator: DMatrix<f64>,
    degenerate_pairs: usize,
}

fn sector_rank(s: &Sector) -> u8 {
    match s {
        Sector::Population { .. } => 0,
        Sector::Coherence { .. } => 1,
    }
}

fn mode_order(a: &Mode, b: &Mode) -> Ordering {
    a.eigenvalue
        .re
        .abs()
        .total_cmp(&b.eigenvalue.re.abs())
        .then(a.eigenvalue.im.total_cmp(&b.eigenvalue.im))
        .then(sector_rank(&a.sector).cmp(&sector_rank(&b.sector)))
}

fn count_degenerate_pairs(modes: &[Mode]) -> usize {
    let mut values: Vec<Complex64> = modes.iter().map(|m| m.eigenvalue).collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut count = 0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if values[j].re - values[i].re > LIOUVILLIAN_DEGENERACY_TOL {
                break;
            }
            if (values[j] - values[i]).norm() <= LIOUVILLIAN_DEGENERACY_TOL {
                count += 1;
            }
        }
    }
    count
}

impl LiouvillianSpectrum {
    /// Assembles a spectrum from compact parts.
    ///
    /// The first mode must be the steady state. Modes are sorted here.
    pub fn from_parts(
        basis: ComplexOperator,
        energies: Vec<f64>,
        log_gibbs: Vec<f64>,
        mut modes: Vec<Mode>,
        pop_right: DMatrix<f64>,
        pop_left: DMatrix<f64>,
        population_generator: DMatrix<f64>,
    ) -> Result<Self> {
        let d = energies.len();
        let shapes_ok = basis.nrows() == d
            && basis.ncols() == d
            && log_gibbs.len() == d
            && modes.len() == d * d
            && pop_right.shape() == (d, d)
            && pop_left.shape() == (d, d)
            && population_generator.shape() == (d, d);
        if !shapes_ok {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: modes.len(),
            });
        }
        if !matches!(modes.first(), Some(Mode { sector: Sector::Population { .. }, .. })) {
            return Err(Error::InvalidModel("first mode must be the steady state".into()));
        }
        let steady = modes[0];
        let mut rest = modes.split_off(1);
        rest.sort_by(mode_order);
        let mut modes = vec![steady];
        modes.extend(rest);
        let degenerate_pairs = count_degenerate_pairs(&modes);
        if degenerate_pairs > 0 {
            log::warn!("{degenerate_pairs} pair(s) of Liouvillian eigenvalues coincide within {LIOUVILLIAN_DEGENERACY_TOL:e}");
        }
        Ok(Self {
            basis,
            energies,
            log_gibbs,
            modes,
            pop_right,
            pop_left,
            population_generator,
            degenerate_pairs,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }
    pub fn len(&self) -> usize {
        self.modes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
    pub fn eigenvalue(&self, k: usize) -> Complex64 {
        self.modes[k].eigenvalue
    }
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }
    pub fn basis(&self) -> &ComplexOperator {
        &self.basis
    }
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
    /// Exact `ln` of the Gibbs weights, in level order.
    pub fn log_gibbs_weights(&self) -> &[f64] {
        &self.log_gibbs
    }
    pub fn population_generator(&self) -> &DMatrix<f64> {
        &self.population_generator
    }
    /// Right population eigenvectors (columns), energy basis.
    pub fn population_right(&self) -> &DMatrix<f64> {
        &self.pop_right
    }
    /// Left population eigenvectors (columns), energy basis.
    pub fn population_left(&self) -> &DMatrix<f64> {
        &self.pop_left
    }
    /// Number of eigenvalue pairs that coincide within 1e-9 (diagnostic).
    pub fn degenerate_pairs(&self) -> usize {
        self.degenerate_pairs
    }

    /// The slowest decaying mode (index 1).
    pub fn slowest_decaying(&self) -> Option<&Mode> {
        self.modes.get(1)
    }

    /// `|Re λ₂|`, the inverse of the longest relaxation time.
    pub fn spectral_gap(&self) -> f64 {
        self.slowest_decaying().map_or(0.0, |m| m.eigenvalue.re.abs())
    }

    fn energy_matrix(&self, sector: Sector, left: bool) -> ComplexOperator {
        let d = self.dim();
        match sector {
            Sector::Coherence { row, col } => crate::linops::ket_bra(d, row, col),
            Sector::Population { index } => {
                let table = if left { &self.pop_left } else { &self.pop_right };
                let diag: Vec<f64> = table.column(index).iter().copied().collect();
                from_real_diagonal(&diag)
            }
        }
    }

    /// `U₁† R_k U₁`
    pub fn right_energy_basis(&self, k: usize) -> ComplexOperator {
        self.energy_matrix(self.modes[k].sector, false)
    }

    /// `U₁† L_k U₁`
    pub fn left_energy_basis(&self, k: usize) -> ComplexOperator {
        self.energy_matrix(self.modes[k].sector, true)
    }

    pub fn right_eigenmatrix(&self, k: usize) -> ComplexOperator {
        conjugate(&self.basis, &self.right_energy_basis(k))
    }

    pub fn left_eigenmatrix(&self, k: usize) -> ComplexOperator {
        conjugate(&self.basis, &self.left_energy_basis(k))
    }

    /// `R₁`
    pub fn steady_state(&self) -> ComplexOperator {
        self.right_eigenmatrix(0)
    }

    pub fn to_energy_basis(&self, x: &ComplexOperator) -> ComplexOperator {
        crate::linops::conjugate_inv(&self.basis, x)
    }

    pub fn from_energy_basis(&self, x: &ComplexOperator) -> ComplexOperator {
        conjugate(&self.basis, x)
    }

    /// `Tr(L_k† ρ)` for `rho_energy = U₁† ρ U₁`.
    pub fn coefficient_energy_basis(&self, k: usize, rho_energy: &ComplexOperator) -> Complex64 {
        match self.modes[k].sector {
            Sector::Coherence { row, col } => rho_energy[(row, col)],
            Sector::Population { index } => (0..self.dim())
                .map(|a| rho_energy[(a, a)] * self.pop_left[(a, index)])
                .sum(),
        }
    }

    /// Max deviation of `Tr(L_j† R_l)` from `δ_jl`.
    ///
    /// Coherence eigenmatrices are distinct matrix units, orthogonal to each
    /// other and to the diagonal population sector, so only the population
    /// block contributes.
    pub fn biorthonormality_residual(&self) -> f64 {
        let gram = self.pop_left.transpose() * &self.pop_right;
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `max|r| · max|l|` over the population eigenvectors; bounds the
    /// amplification of rounding errors in a spectral population sum.
    pub fn population_conditioning(&self) -> f64 {
        let max_r = self.pop_right.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_l = self.pop_left.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        max_r * max_l
    }
}

fn rate_graph_components(d: usize, jumps: &JumpOperatorSet) -> usize {
    fn root(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let mut parent: Vec<usize> = (0..d).collect();
    let mut components = d;
    for p in jumps.pairs.iter().filter(|p| p.xi > 0.0 && p.chi > 0.0) {
        let (a, b) = (root(&mut parent, p.upper), root(&mut parent, p.lower));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components
}

/// Structured spectral decomposition of the Davies generator.
///
/// Coherence eigenpairs are read off the diagonal of `Ξ`; population
/// eigenpairs come from the symmetrized population block.
pub fn spectral_decomposition(model: &DaviesModel) -> Result<LiouvillianSpectrum> {
    let jumps = build_jump_operators(model)?;
    let blocks = XiBlocks::from_jumps(model, &jumps);
    let d = model.dim();
    let w = &blocks.population;

    let scale = (0..d).map(|a| w[(a, a)].abs()).fold(1.0_f64, f64::max);
    let zero_tol = 1e-10 * scale;

    let mut sym = DMatrix::<f64>::zeros(d, d);
    for a in 0..d {
        sym[(a, a)] = w[(a, a)];
        for b in 0..d {
            if a != b {
                sym[(a, b)] = (w[(a, b)] * w[(b, a)]).sqrt();
            }
        }
    }
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    // closest to zero first
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    // Tiny uphill rates make the population kernel numerically ambiguous;
    // count connected components of the rate graph instead.
    let mut kernel_dim = rate_graph_components(d, &jumps);
    let mut coherence_modes = Vec::with_capacity(d * (d - 1));
    for row in 0..d {
        for col in 0..d {
            if row != col {
                let eigenvalue = blocks.coherence_eigenvalue(row, col);
                if eigenvalue.re == 0.0 && eigenvalue.im.abs() <= zero_tol {
                    kernel_dim += 1;
                }
                coherence_modes.push(Mode {
                    eigenvalue,
                    sector: Sector::Coherence { row, col },
                });
            }
        }
    }
    if kernel_dim != 1 {
        return Err(Error::NonUniqueSteadyState { kernel_dim });
    }

    let log_gibbs = model.log_gibbs_weights();
    if log_gibbs.iter().any(|&l| -0.5 * l > 700.0) {
        return Err(Error::PopulationRange);
    }
    let half_sqrt: Vec<f64> = log_gibbs.iter().map(|l| (0.5 * l).exp()).collect();
    let inv_half_sqrt: Vec<f64> = log_gibbs.iter().map(|l| (-0.5 * l).exp()).collect();

    let mut pop_right = DMatrix::<f64>::zeros(d, d);
    let mut pop_left = DMatrix::<f64>::zeros(d, d);
    let mut modes = Vec::with_capacity(d * d);
    for (index, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        // sign: largest component positive
        let pivot = (0..d).fold(0, |p, i| if v[i].abs() > v[p].abs() + 1e-12 { i } else { p });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for a in 0..d {
            pop_right[(a, index)] = sign * v[a] * half_sqrt[a];
            pop_left[(a, index)] = sign * v[a] * inv_half_sqrt[a];
        }
        if index == 0 {
            let total: f64 = pop_right.column(0).sum();
            for a in 0..d {
                pop_right[(a, 0)] /= total;
                pop_left[(a, 0)] *= total;
            }
        }
        modes.push(Mode {
            eigenvalue: real(eig.eigenvalues[k]),
            sector: Sector::Population { index },
        });
    }
    modes.extend(coherence_modes);

    LiouvillianSpectrum::from_parts(
        model.basis().clone(),
        model.energies().to_vec(),
        log_gibbs,
        modes,
        pop_right,
        pop_left,
        blocks.population,
    )
}
