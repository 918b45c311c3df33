//! Seeded random states and unitaries for test-instance generation.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CMatrix, DensityOperator, HermitianOperator, MAX_DIM};
use crate::error::{Error, Result};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Haar-random unitary: Gram-Schmidt (applied twice) on a complex Gaussian matrix.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(
            "dim",
            format!("must be in 1..={MAX_DIM}, got {dim}"),
        ));
    }
    let mut g = gaussian_matrix(&mut rng(seed), dim, dim);
    orthonormalize_columns(&mut g);
    Ok(g)
}

/// Orthonormalizes columns in place (modified Gram-Schmidt, two passes).
pub(crate) fn orthonormalize_columns(g: &mut CMatrix) {
    for j in 0..g.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj = g.column(k).dotc(&g.column(j));
                let ck = g.column(k).into_owned();
                let mut cj = g.column_mut(j);
                cj -= ck * proj;
            }
        }
        let norm = g.column(j).norm();
        let mut cj = g.column_mut(j);
        cj /= Complex64::new(norm, 0.0);
    }
}

/// `G G^dagger / tr` for a seeded Gaussian `dim x rank` matrix `G`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(
            "dim",
            format!("must be in 1..={MAX_DIM}, got {dim}"),
        ));
    }
    if rank == 0 || rank > dim {
        return Err(Error::invalid(
            "rank",
            format!("must be in 1..={dim}, got {rank}"),
        ));
    }
    let g = gaussian_matrix(&mut rng(seed), dim, rank);
    let op = HermitianOperator::symmetrized(&g * g.adjoint());
    let tr = op.trace();
    DensityOperator::new(op.scale(1.0 / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::unitarity_defect;

    #[test]
    fn rank_one_is_pure() {
        let rho = random_density(2, 1, 11).unwrap();
        let spec = rho.operator().eig().unwrap();
        assert!(spec.eigenvalues[0].abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(
            random_density(3, 2, 5).unwrap(),
            random_density(3, 2, 5).unwrap()
        );
        assert_eq!(random_unitary(4, 5).unwrap(), random_unitary(4, 5).unwrap());
        assert_ne!(random_unitary(4, 5).unwrap(), random_unitary(4, 6).unwrap());
    }

    #[test]
    fn unitary_is_unitary() {
        for d in [1, 2, 5, 16, 64] {
            assert!(unitarity_defect(&random_unitary(d, d as u64).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let u = random_unitary(4, 3).unwrap();
        let mixed = DensityOperator::maximally_mixed(4);
        let out = mixed.evolve(&u).unwrap();
        assert!(out.operator().max_abs_diff(mixed.operator()) < 1e-14);
    }

    #[test]
    fn invalid_rank() {
        assert!(random_density(2, 3, 0).is_err());
        assert!(random_density(2, 0, 0).is_err());
        assert!(random_unitary(65, 0).is_err());
    }
}
