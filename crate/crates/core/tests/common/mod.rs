#![allow(dead_code)]

use mpemba_core::linops::{c64, ComplexOperator};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix<R: Rng>(rng: &mut R, d: usize) -> ComplexOperator {
    DMatrix::from_fn(d, d, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> ComplexOperator {
    let qr = gaussian_matrix(rng, d).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| {
        let z = r[(i, i)];
        if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) }
    }));
    q * phases
}

/// Full-rank density matrix `G G† / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> ComplexOperator {
    let g = gaussian_matrix(rng, d);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = m.map(|z| z / tr);
    (&m + m.adjoint()).scale(0.5)
}

pub fn random_pure<R: Rng>(rng: &mut R, d: usize) -> ComplexOperator {
    let v = DVector::from_fn(d, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let v = &v / Complex64::new(v.norm(), 0.0);
    &v * v.adjoint()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> ComplexOperator {
    let g = gaussian_matrix(rng, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Largest distance between two spectra after greedy nearest matching.
pub fn spectrum_mismatch(expected: &[Complex64], found: &[Complex64]) -> f64 {
    if expected.len() != found.len() {
        return f64::INFINITY;
    }
    let mut left: Vec<Complex64> = found.to_vec();
    let mut worst: f64 = 0.0;
    for e in expected {
        let (k, dist) = left
            .iter()
            .enumerate()
            .map(|(k, f)| (k, (f - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        worst = worst.max(dist);
        left.swap_remove(k);
    }
    worst
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn dense_eigenvalues(m: &ComplexOperator) -> Vec<Complex64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}
