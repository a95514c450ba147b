//! Linear algebra on the permutation-symmetric (Dicke) subspace of N qubits.
//!
//! Basis index `k` counts excited qubits, so `J_z` is diagonal with
//! ascending eigenvalues `m_k = k - N/2`.

use nalgebra::{DMatrix, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type Vec3 = Vector3<f64>;

/// Tolerance on the norm of a freshly normalized state.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on `|n| = 1` for rotation and sensing axes.
pub const AXIS_TOL: f64 = 1e-12;

const ANTI_HERMITIAN_TOL: f64 = 1e-10;

pub(crate) fn check_unit_axis(axis: &Vec3, what: &str) -> Result<()> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
        return Err(Error::Validation(format!(
            "{what} must be a unit vector, |n| = {norm}"
        )));
    }
    Ok(())
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("N must be at least 1".into()));
    }
    Ok(())
}

/// `sqrt((j-m)(j+m+1))` for `m = k - N/2`, the `<k+1|J_+|k>` element.
#[inline]
pub fn raise_coeff(n: usize, k: usize) -> f64 {
    debug_assert!(k < n);
    (((k + 1) * (n - k)) as f64).sqrt()
}

/// Pure state of N qubits restricted to the symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
    norm_defect: f64,
}

impl DickeState {
    /// Builds a state from raw amplitudes, renormalizing them.
    ///
    /// The pre-normalization defect `| ||c|| - 1 |` is kept and available
    /// through [`DickeState::norm_defect`].
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "need N + 1 >= 2 amplitudes, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("non-finite amplitude".into()));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Validation("zero vector cannot be normalized".into()));
        }
        let mut amplitudes = amplitudes;
        for c in amplitudes.iter_mut() {
            *c /= norm;
        }
        Ok(Self {
            n_qubits: amplitudes.len() - 1,
            amplitudes,
            norm_defect: (norm - 1.0).abs(),
        })
    }

    /// `|k>` with `k` excited qubits.
    pub fn basis(n_qubits: usize, k: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if k > n_qubits {
            return Err(Error::Validation(format!("k = {k} exceeds N = {n_qubits}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_qubits + 1];
        amps[k] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    pub fn to_vector(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeState) -> Result<C64> {
        inner(self, other)
    }

    /// Applies a dense operator and renormalizes.
    pub fn evolve(&self, unitary: &CMatrix) -> Result<DickeState> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::InvalidDimension(format!(
                "operator is {}x{}, state has dimension {}",
                unitary.nrows(),
                unitary.ncols(),
                self.dim()
            )));
        }
        let out = unitary * self.to_vector();
        DickeState::from_amplitudes(out.iter().copied().collect())
    }
}

/// `sum_k conj(a_k) b_k`.
pub fn inner(a: &DickeState, b: &DickeState) -> Result<C64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch {
            left: a.n_qubits,
            right: b.n_qubits,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Dense collective operator in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveOperator {
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub jx: CollectiveOperator,
    pub jy: CollectiveOperator,
    pub jz: CollectiveOperator,
    pub jp: CollectiveOperator,
    pub jm: CollectiveOperator,
}

impl CollectiveOps {
    /// `n . J` for a real 3-vector.
    pub fn along(&self, axis: &Vec3) -> CMatrix {
        &self.jx.matrix * C64::from(axis.x)
            + &self.jy.matrix * C64::from(axis.y)
            + &self.jz.matrix * C64::from(axis.z)
    }
}

pub fn build_collective_ops(n: usize) -> Result<CollectiveOps> {
    check_qubits(n)?;
    let dim = n + 1;
    let half = n as f64 / 2.0;
    let jz = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::from(r as f64 - half)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let jp = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c + 1 {
            C64::from(raise_coeff(n, c))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * C64::from(0.5);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let wrap = |matrix| CollectiveOperator { n_qubits: n, matrix };
    Ok(CollectiveOps {
        jx: wrap(jx),
        jy: wrap(jy),
        jz: wrap(jz),
        jp: wrap(jp),
        jm: wrap(jm),
    })
}

/// `exp(G)` for anti-Hermitian `G`, through the eigendecomposition of the
/// Hermitian matrix `iG`.
pub fn unitary_exp(generator: &CMatrix) -> Result<CMatrix> {
    if !generator.is_square() {
        return Err(Error::InvalidDimension("generator must be square".into()));
    }
    let defect = (generator + generator.adjoint())
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if !defect.is_finite() || defect > ANTI_HERMITIAN_TOL {
        return Err(Error::Validation(format!(
            "generator is not anti-Hermitian (max |G + G^dag| = {defect:e})"
        )));
    }
    let mut hermitian = generator * C64::i();
    // symmetrize away rounding so the eigensolver sees an exactly Hermitian input
    hermitian = (&hermitian + hermitian.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(hermitian);
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, -l));
    let mut scaled = v.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *ph;
    }
    Ok(scaled * v.adjoint())
}

/// `exp(-i theta n.J)` on the Dicke space of `n` qubits.
pub fn rotation_unitary(n: usize, axis: &Vec3, angle: f64) -> Result<CMatrix> {
    check_qubits(n)?;
    check_unit_axis(axis, "rotation axis")?;
    let ops = build_collective_ops(n)?;
    unitary_exp(&(ops.along(axis) * C64::new(0.0, -angle)))
}

/// Largest entry of `|A - B|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `|| U^dag U - I ||_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(u.nrows(), u.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Truncated Taylor series with scaling and squaring, run to machine
    /// convergence. Independent of the eigendecomposition route.
    fn taylor_expm(g: &CMatrix) -> CMatrix {
        let norm = g.iter().map(|z| z.norm()).sum::<f64>();
        let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
        let scaled = g * C64::from(0.5_f64.powi(squarings as i32));
        let dim = g.nrows();
        let mut term = CMatrix::identity(dim, dim);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &scaled * C64::from(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn single_qubit_jz_is_half_pauli() {
        let ops = build_collective_ops(1).unwrap();
        assert_eq!(ops.jz.matrix[(0, 0)], c(-0.5));
        assert_eq!(ops.jz.matrix[(1, 1)], c(0.5));
    }

    #[test]
    fn spin_one_ladder() {
        let ops = build_collective_ops(2).unwrap();
        assert!((ops.jp.matrix[(1, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((ops.jp.matrix[(2, 1)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ops.jp.matrix[(0, 1)], c(0.0));
    }

    #[test]
    fn trace_jz_squared() {
        let ops = build_collective_ops(4).unwrap();
        let tr = (&ops.jz.matrix * &ops.jz.matrix).trace();
        assert!((tr.re - 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(matches!(
            build_collective_ops(0),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn algebra_holds_across_sizes() {
        for n in [1, 2, 3, 5, 8, 13, 32] {
            let ops = build_collective_ops(n).unwrap();
            let (x, y, z) = (&ops.jx.matrix, &ops.jy.matrix, &ops.jz.matrix);
            let comm = x * y - y * x;
            assert!(max_abs_diff(&comm, &(z * C64::i())) <= 1e-10, "N = {n}");
            for op in [x, y, z] {
                assert!(max_abs_diff(op, &op.adjoint()) <= 1e-12);
            }
            let j = n as f64 / 2.0;
            let casimir = x * x + y * y + z * z;
            let expect = CMatrix::identity(n + 1, n + 1) * c(j * (j + 1.0));
            assert!(max_abs_diff(&casimir, &expect) <= 1e-9, "N = {n}");
        }
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let u = rotation_unitary(5, &Vec3::new(0.6, 0.0, 0.8), 0.0).unwrap();
        assert!(max_abs_diff(&u, &CMatrix::identity(6, 6)) < 1e-12);
    }

    #[test]
    fn z_rotation_is_diagonal_phase() {
        let n = 6;
        let theta = 0.731;
        let u = rotation_unitary(n, &Vec3::z(), theta).unwrap();
        for k in 0..=n {
            for l in 0..=n {
                let expect = if k == l {
                    C64::from_polar(1.0, -theta * (k as f64 - n as f64 / 2.0))
                } else {
                    c(0.0)
                };
                assert!((u[(k, l)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_turn_about_z_depends_on_parity() {
        for n in 1..=7 {
            let u = rotation_unitary(n, &Vec3::z(), 2.0 * PI).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expect = CMatrix::identity(n + 1, n + 1) * c(sign);
            assert!(max_abs_diff(&u, &expect) < 1e-10, "N = {n}");
        }
    }

    #[test]
    fn rotations_compose() {
        let axis = Vec3::new(1.0, -2.0, 0.5).normalize();
        let a = rotation_unitary(7, &axis, 0.4).unwrap();
        let b = rotation_unitary(7, &axis, 1.3).unwrap();
        let ab = rotation_unitary(7, &axis, 1.7).unwrap();
        assert!(max_abs_diff(&(a * b), &ab) < 1e-10);
        assert!(unitarity_defect(&ab) < 1e-10);
    }

    #[test]
    fn non_unit_axis_rejected() {
        let err = rotation_unitary(3, &Vec3::new(1.0, 1.0, 0.0), 0.1);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_exp(&CMatrix::zeros(4, 4)).unwrap();
        assert!(max_abs_diff(&u, &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn exp_matches_rotation_on_jz() {
        let n = 5;
        let ops = build_collective_ops(n).unwrap();
        let u = unitary_exp(&(&ops.jz.matrix * C64::new(0.0, -0.9))).unwrap();
        let r = rotation_unitary(n, &Vec3::z(), 0.9).unwrap();
        assert!(max_abs_diff(&u, &r) < 1e-12);
    }

    #[test]
    fn exp_of_two_axis_generator_matches_taylor() {
        let ops = build_collective_ops(4).unwrap();
        let jp2 = &ops.jp.matrix * &ops.jp.matrix;
        let jm2 = &ops.jm.matrix * &ops.jm.matrix;
        let g = (jp2 - jm2) * c(0.1);
        let eig = unitary_exp(&g).unwrap();
        let reference = taylor_expm(&g);
        assert!(max_abs_diff(&eig, &reference) < 1e-10);
    }

    #[test]
    fn hermitian_generator_rejected() {
        let ops = build_collective_ops(3).unwrap();
        assert!(matches!(
            unitary_exp(&ops.jx.matrix),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = DickeState::basis(2, 0).unwrap();
        let b = DickeState::basis(3, 0).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn normalization_reports_defect() {
        let s = DickeState::from_amplitudes(vec![c(3.0), c(4.0)]).unwrap();
        assert!((s.norm_defect() - 4.0).abs() < 1e-15);
        assert!((s.inner(&s).unwrap().re - 1.0).abs() < NORM_TOL);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn anti_hermitian(dim: usize, seed: Vec<f64>) -> CMatrix {
            let mut g = CMatrix::zeros(dim, dim);
            let mut it = seed.into_iter().cycle();
            for r in 0..dim {
                for col in r..dim {
                    let re = it.next().unwrap();
                    let im = it.next().unwrap();
                    if r == col {
                        g[(r, r)] = C64::new(0.0, im);
                    } else {
                        g[(r, col)] = C64::new(re, im);
                        g[(col, r)] = -C64::new(re, im).conj();
                    }
                }
            }
            g
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn random_generators_give_unitaries(
                dim in 1usize..12,
                seed in proptest::collection::vec(-3.0f64..3.0, 8..40),
            ) {
                let u = unitary_exp(&anti_hermitian(dim, seed)).unwrap();
                prop_assert!(unitarity_defect(&u) <= 1e-10);
            }

            #[test]
            fn rotation_angles_add(
                n in 1usize..10,
                ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in -1.0f64..1.0,
                t1 in -4.0f64..4.0, t2 in -4.0f64..4.0,
            ) {
                let v = Vec3::new(ax, ay, az);
                prop_assume!(v.norm() > 1e-3);
                let axis = v.normalize();
                let lhs = rotation_unitary(n, &axis, t1).unwrap()
                    * rotation_unitary(n, &axis, t2).unwrap();
                let rhs = rotation_unitary(n, &axis, t1 + t2).unwrap();
                prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
            }
        }
    }
}
