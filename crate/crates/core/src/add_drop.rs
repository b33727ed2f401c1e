//! Add/drop (double-bus) ring: the 2x2 input-output transfer matrix, the
//! collective noise couplings and the noise commutators implied by unitarity.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, RingError};
use crate::linalg::Mat2;
use crate::params::{CouplerParams, RingParams};
use crate::scalar::Scalar;

/// Tolerance on the diagonal of `I - M M^dagger` before it is treated as a unitarity violation.
pub const UNITARITY_SLACK: f64 = 1e-12;
/// Smallest `|det M|` accepted by [`inverse_conjugate`].
pub const MIN_DETERMINANT: f64 = 1e-14;

/// How the round trip is divided between the two half rings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfSplit<T> {
    /// `alpha_+ = alpha_- = sqrt(alpha)`, `theta_+ = theta_- = theta / 2`.
    Symmetric,
    /// Explicit halves. `plus` runs from the first coupler to the second (the `a -> d` leg),
    /// `minus` runs back (the `b -> c` leg).
    Explicit { alpha_plus: T, theta_plus: T, alpha_minus: T, theta_minus: T },
}

/// Both couplers and the ring of an add/drop filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddDropParams<T> {
    /// Input-bus junction `(tau, kappa)`.
    pub coupler1: CouplerParams<T>,
    /// Drop-bus junction `(eta, gamma)`.
    pub coupler2: CouplerParams<T>,
    pub ring: RingParams<T>,
    pub split: HalfSplit<T>,
}

impl<T: Scalar> AddDropParams<T> {
    pub fn new(coupler1: CouplerParams<T>, coupler2: CouplerParams<T>, ring: RingParams<T>) -> Self {
        Self { coupler1, coupler2, ring, split: HalfSplit::Symmetric }
    }

    /// Real couplers `tau`, `eta` with a unit-circumference ring of amplitude `alpha`.
    pub fn real(tau: T, eta: T, alpha: T, theta: T) -> Result<Self> {
        Ok(Self::new(CouplerParams::real(tau)?, CouplerParams::real(eta)?, RingParams::from_alpha(alpha, theta)?))
    }

    /// Replaces the symmetric split; the halves must compose to the full round trip.
    pub fn with_split(mut self, alpha_plus: T, theta_plus: T, alpha_minus: T, theta_minus: T) -> Result<Self> {
        let tol = T::lit(1e-12);
        if !(alpha_plus > T::zero() && alpha_minus > T::zero()) {
            return Err(RingError::Domain("half-ring amplitudes must be positive".into()));
        }
        if (alpha_plus * alpha_minus - self.ring.alpha()).abs() > tol
            || (theta_plus + theta_minus - self.ring.theta()).abs() > tol
        {
            return Err(RingError::Domain("half-ring split does not compose to the full round trip".into()));
        }
        self.split = HalfSplit::Explicit { alpha_plus, theta_plus, alpha_minus, theta_minus };
        Ok(self)
    }

    /// `(alpha_+ e^{i theta_+}, alpha_- e^{i theta_-})`.
    pub fn half_factors(&self) -> (Complex<T>, Complex<T>) {
        match self.split {
            HalfSplit::Symmetric => {
                let h = Complex::from_polar(self.ring.alpha().sqrt(), self.ring.theta() / T::lit(2.0));
                (h, h)
            }
            HalfSplit::Explicit { alpha_plus, theta_plus, alpha_minus, theta_minus } => {
                (Complex::from_polar(alpha_plus, theta_plus), Complex::from_polar(alpha_minus, theta_minus))
            }
        }
    }
}

/// Mode transfer matrix: rows are outputs `(c, d)`, columns are inputs `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix2<T> {
    pub m: Mat2<T>,
}

impl<T: Scalar> TransferMatrix2<T> {
    pub fn a_to_c(&self) -> Complex<T> {
        self.m[(0, 0)]
    }
    pub fn b_to_c(&self) -> Complex<T> {
        self.m[(0, 1)]
    }
    pub fn a_to_d(&self) -> Complex<T> {
        self.m[(1, 0)]
    }
    pub fn b_to_d(&self) -> Complex<T> {
        self.m[(1, 1)]
    }
}

/// `A_{a->c} = (tau - eta* x)/D`, `A_{b->c} = -gamma* kappa h_-/D`,
/// `A_{a->d} = -kappa* gamma h_+/D`, `A_{b->d} = (eta - tau* x)/D`,
/// with `x = alpha e^{i theta}`, `h_+- = alpha_+- e^{i theta_+-}` and `D = 1 - tau* eta* x`.
pub fn transfer_matrix<T: Scalar>(params: &AddDropParams<T>) -> Result<TransferMatrix2<T>> {
    let (tau, kappa) = (params.coupler1.through(), params.coupler1.cross());
    let (eta, gamma) = (params.coupler2.through(), params.coupler2.cross());
    let x = params.ring.round_trip();
    let (h_plus, h_minus) = params.half_factors();
    let d = Complex::<T>::one() - tau.conj() * eta.conj() * x;
    if d.is_zero() {
        return Err(RingError::ResonantDivergence);
    }
    let inv = Complex::<T>::one() / d;
    let m = Mat2::new(
        (tau - eta.conj() * x) * inv,
        -gamma.conj() * kappa * h_minus * inv,
        -kappa.conj() * gamma * h_plus * inv,
        (eta - tau.conj() * x) * inv,
    );
    if !m.is_finite() {
        return Err(RingError::Degenerate("transfer matrix is not finite".into()));
    }
    Ok(TransferMatrix2 { m })
}

/// Coefficients of the two ring noise modes `(f_a, f_b)` in the collective noise operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCouplings<T> {
    pub f_c: [Complex<T>; 2],
    pub f_d: [Complex<T>; 2],
}

/// `F_c = -i sqrt(Gamma) (|kappa|^2 eta*, gamma* kappa)`, `F_d = -i sqrt(Gamma) (kappa* gamma, |gamma|^2 tau*)`.
pub fn noise_coupling_vectors<T: Scalar>(params: &AddDropParams<T>) -> NoiseCouplings<T> {
    let (tau, kappa) = (params.coupler1.through(), params.coupler1.cross());
    let (eta, gamma) = (params.coupler2.through(), params.coupler2.cross());
    let pre = Complex::new(T::zero(), -params.ring.loss().sqrt());
    NoiseCouplings {
        f_c: [pre * eta.conj() * kappa.norm_sqr(), pre * gamma.conj() * kappa],
        f_d: [pre * kappa.conj() * gamma, pre * tau.conj() * gamma.norm_sqr()],
    }
}

/// `[F_i, F_j^dagger]` for `i, j` in `{c, d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCommutatorMatrix<T> {
    pub comm: Mat2<T>,
}

impl<T: Scalar> NoiseCommutatorMatrix<T> {
    pub fn zero() -> Self {
        Self { comm: Mat2::zero() }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.comm[(i, j)]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [T; 2] {
        self.comm.hermitian_eigenvalues()
    }
}

/// Noise commutators inferred from canonical output commutators:
/// `[F_c,F_c^dag] = 1 - |A_ac|^2 - |A_bc|^2`, `[F_d,F_d^dag] = 1 - |A_ad|^2 - |A_bd|^2`,
/// `[F_c,F_d^dag] = -(A_ac A_ad* + A_bc A_bd*)`.
pub fn noise_commutators<T: Scalar>(tm: &TransferMatrix2<T>) -> Result<NoiseCommutatorMatrix<T>> {
    let (ac, bc, ad, bd) = (tm.a_to_c(), tm.b_to_c(), tm.a_to_d(), tm.b_to_d());
    let cc = T::one() - (ac.norm_sqr() + bc.norm_sqr());
    let dd = T::one() - (ad.norm_sqr() + bd.norm_sqr());
    let slack = T::lit(UNITARITY_SLACK);
    for v in [cc, dd] {
        if !(v >= -slack && v <= T::one() + slack) {
            return Err(RingError::UnitarityViolation { value: v.to_f64_lossy() });
        }
    }
    let cd = -(ac * ad.conj() + bc * bd.conj());
    Ok(NoiseCommutatorMatrix { comm: Mat2::new(cc.into(), cd, cd.conj(), dd.into()) })
}

/// `conj(M^{-1})`.
pub fn inverse_conjugate<T: Scalar>(m: &Mat2<T>) -> Result<Mat2<T>> {
    Ok(m.inverse(T::lit(MIN_DETERMINANT))?.conj())
}

/// `m11 m22 + m12 m21`.
pub fn permanent2<T: Scalar>(m: &Mat2<T>) -> Complex<T> {
    m.permanent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_bus::{commutator_sum_identity, ovpa_transfer};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn decoupled_first_bus() {
        let p = AddDropParams::real(1.0, 0.6, 1.0, 0.8).unwrap();
        let tm = transfer_matrix(&p).unwrap();
        assert_abs_diff_eq!(tm.a_to_c().norm(), 1.0, epsilon = 1e-15);
        assert_eq!(tm.a_to_d().norm(), 0.0);
    }

    #[test]
    fn lossless_matrix_is_unitary() {
        for theta in [-3.0, -0.5, 0.0, 1.2, 3.1] {
            let p = AddDropParams::real(0.7, 0.7, 1.0, theta).unwrap();
            assert!(transfer_matrix(&p).unwrap().m.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn single_bus_limit() {
        let lossy = RingParams::from_alpha(0.9, 0.4).unwrap();
        let first = CouplerParams::real(0.8).unwrap();
        let sb = ovpa_transfer(&first, &lossy).unwrap();
        let mut prev = f64::INFINITY;
        for g in [1e-2f64, 1e-3, 1e-4] {
            let second = CouplerParams::from_magnitude((1.0 - g * g).sqrt(), 0.0, 0.0).unwrap();
            let tm = transfer_matrix(&AddDropParams::new(first, second, lossy)).unwrap();
            let err = (tm.a_to_c() - sb.transfer).norm() + tm.b_to_c().norm();
            assert!(err < prev);
            assert!(err < 20.0 * g, "g = {g}, err = {err}");
            prev = err;
        }
        let exact = AddDropParams::new(first, CouplerParams::real(1.0).unwrap(), lossy);
        let tm = transfer_matrix(&exact).unwrap();
        assert!((tm.a_to_c() - sb.transfer).norm() < 1e-15);
        let comm = noise_commutators(&tm).unwrap();
        let noise = commutator_sum_identity(&first, &lossy).unwrap().analytic;
        assert!((comm.get(0, 0).re - noise).abs() < 1e-12);
    }

    #[test]
    fn complex_couplers_use_conjugated_denominator() {
        let first = CouplerParams::from_magnitude(0.6, 0.3, 0.1).unwrap();
        let second = CouplerParams::from_magnitude(0.8, -0.5, 0.9).unwrap();
        let ring = RingParams::from_alpha(1.0, 0.7).unwrap();
        let tm = transfer_matrix(&AddDropParams::new(first, second, ring)).unwrap();
        assert!(tm.m.unitarity_residual() < 1e-12);
    }

    #[test]
    fn noise_couplings_examples() {
        let p = AddDropParams::real(0.6, 0.7, 1.0, 0.3).unwrap();
        let n = noise_coupling_vectors(&p);
        assert!(n.f_c.iter().chain(&n.f_d).all(|z| z.norm() == 0.0));
        let p = AddDropParams::real(1.0, 0.7, 0.8, 0.3).unwrap();
        assert!(noise_coupling_vectors(&p).f_c.iter().all(|z| z.norm() == 0.0));
        let p = AddDropParams::<f64>::real(0.6, 0.7, 0.8, 0.3).unwrap();
        let n = noise_coupling_vectors(&p);
        let gamma = p.ring.loss();
        assert_abs_diff_eq!(n.f_c[0].norm(), gamma.sqrt() * 0.64 * 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(n.f_d[1].norm(), gamma.sqrt() * 0.51 * 0.6, epsilon = 1e-15);
    }

    #[test]
    fn lossless_commutators_vanish() {
        let p = AddDropParams::real(0.3, 0.9, 1.0, -1.7).unwrap();
        let comm = noise_commutators(&transfer_matrix(&p).unwrap()).unwrap();
        assert!(comm.comm.max_abs() < 1e-12);
    }

    #[test]
    fn unitarity_violation_is_reported() {
        let tm = TransferMatrix2 { m: Mat2::from_real(1.2, 0.0, 0.0, 0.5) };
        assert!(matches!(noise_commutators(&tm), Err(RingError::UnitarityViolation { .. })));
    }

    #[test]
    fn inverse_conjugate_examples() {
        assert_eq!(inverse_conjugate(&Mat2::<f64>::identity()).unwrap(), Mat2::identity());
        let p = AddDropParams::real(0.4, 0.75, 1.0, 0.9).unwrap();
        let m = transfer_matrix(&p).unwrap().m;
        assert!(inverse_conjugate(&m).unwrap().max_abs_diff(&m.transpose()) < 1e-12);
        let p = AddDropParams::real(0.4, 0.75, 0.6, 0.9).unwrap();
        let m = transfer_matrix(&p).unwrap().m;
        let big_m = inverse_conjugate(&m).unwrap();
        assert!((big_m.conj() * m).max_abs_diff(&Mat2::identity()) < 1e-12);
        assert!(inverse_conjugate(&Mat2::from_real(1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(permanent2(&Mat2::<f64>::identity()), c(1.0, 0.0));
        assert_eq!(permanent2(&Mat2::new(c(0.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(0.0, 0.0))), c(6.0, 3.0));
        let bs = Mat2::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)).scale(c(FRAC_1_SQRT_2, 0.0));
        assert!(permanent2(&bs).norm() < 1e-16);
    }

    #[test]
    fn asymmetric_split_keeps_split_independent_quantities() {
        let base = AddDropParams::real(0.55, 0.8, 0.7, 1.1).unwrap();
        let alpha: f64 = 0.7;
        let skew = base.with_split(alpha.powf(0.3), 0.2, alpha.powf(0.7), 0.9).unwrap();
        let a = transfer_matrix(&base).unwrap();
        let b = transfer_matrix(&skew).unwrap();
        assert!((a.a_to_c() - b.a_to_c()).norm() < 1e-15);
        assert!((a.b_to_d() - b.b_to_d()).norm() < 1e-15);
        assert!((a.m.det() - b.m.det()).norm() < 1e-15);
        assert!((a.b_to_c() * a.a_to_d() - b.b_to_c() * b.a_to_d()).norm() < 1e-15);
        assert!((a.a_to_d() - b.a_to_d()).norm() > 1e-3);
        assert!(base.with_split(0.5, 0.0, 0.5, 1.1).is_err());
    }

    fn params() -> impl Strategy<Value = AddDropParams<f64>> {
        (0.0f64..=1.0, 0.0f64..=1.0, 0.05f64..=1.0, -PI..PI, -3.1f64..3.1, -3.1f64..3.1).prop_map(
            |(t, e, a, th, p1, p2)| {
                AddDropParams::new(
                    CouplerParams::from_magnitude(t, p1, 0.3).unwrap(),
                    CouplerParams::from_magnitude(e, p2, -0.8).unwrap(),
                    RingParams::from_alpha(a, th).unwrap(),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn commutators_are_i_minus_mm_dagger(p in params()) {
            let Ok(tm) = transfer_matrix(&p) else { return Ok(()) };
            let comm = noise_commutators(&tm).unwrap();
            let direct = Mat2::identity() - tm.m * tm.m.adjoint();
            prop_assert!(comm.comm.max_abs_diff(&direct) < 1e-12);
            prop_assert!(comm.comm.hermiticity_residual() < 1e-15);
            prop_assert!(comm.eigenvalues()[0] >= -1e-12);
        }

        #[test]
        fn cross_terms_are_reciprocal(p in params()) {
            let Ok(tm) = transfer_matrix(&p) else { return Ok(()) };
            prop_assert!((tm.b_to_c().norm() - tm.a_to_d().norm()).abs() < 1e-12 * (1.0 + tm.a_to_d().norm()));
        }

        #[test]
        fn lossless_is_unitary(t in 0.0f64..=1.0, e in 0.0f64..=1.0, th in -PI..PI) {
            let p = AddDropParams::real(t, e, 1.0, th).unwrap();
            if let Ok(tm) = transfer_matrix(&p) {
                prop_assert!(tm.m.unitarity_residual() < 1e-12);
            }
        }
    }
}
