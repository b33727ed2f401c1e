//! Two-photon `|1_a, 1_b>` input on the add/drop ring: the sector-resolved output
//! state, reduced density matrices, coincidence probability, the region of
//! near-total destructive interference, and the one-photon-sector entropy.
//!
//! Output states are built from an emission matrix `E` with `a_i^dag -> sum_j E_ij (c_j^dag - F_j^dag)`.
//! For a lossy ring the emission matrix is `M^T`, and the environment modes it
//! pairs with have commutator Gram matrix `(M M^dag)^{-1} - I`; see
//! [`emission_matrix`] and [`dressed_noise_commutators`].

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::add_drop::{transfer_matrix, AddDropParams, NoiseCommutatorMatrix, TransferMatrix2, MIN_DETERMINANT};
use crate::error::{Result, RingError};
use crate::linalg::{Mat2, Mat3};
use crate::numerics::linspace;
use crate::params::{CouplerParams, RingParams};
use crate::scalar::Scalar;

/// Sector probability below which the one-photon density matrix is reported absent.
pub const P1_THRESHOLD: f64 = 1e-12;
/// Most negative sector probability tolerated before a consistency error.
pub const PROBABILITY_SLACK: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLIP, 0)` are treated as zero in the entropy.
pub const EIGEN_CLIP: f64 = 1e-10;
/// Threshold used for the interference region by default.
pub const DEFAULT_HOMM_THRESHOLD: f64 = 1e-3;

/// Output state of `|1_a, 1_b, 0_env>` split by the number of photons left in `(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonOutputState<T> {
    /// Coefficients of `|2,0>`, `|1,1>`, `|0,2>`.
    pub two_photon_amps: [Complex<T>; 3],
    /// `|1,0>`, `|0,1>` coefficients accompanying `F_c^dag |0>_env`.
    pub one_photon_branch_c: [Complex<T>; 2],
    /// `|1,0>`, `|0,1>` coefficients accompanying `F_d^dag |0>_env`.
    pub one_photon_branch_d: [Complex<T>; 2],
    /// Symmetric table `E` with `|Phi> = sum_ij E_ij F_i^dag F_j^dag |0>_env`.
    pub env_two_photon: Mat2<T>,
}

impl<T: Scalar> TwoPhotonOutputState<T> {
    pub fn permanent(&self) -> Complex<T> {
        self.two_photon_amps[1]
    }

    fn branches(&self) -> [[Complex<T>; 2]; 2] {
        [self.one_photon_branch_c, self.one_photon_branch_d]
    }
}

/// Builds the output state from an emission matrix.
pub fn output_state<T: Scalar>(e: &Mat2<T>) -> TwoPhotonOutputState<T> {
    let sqrt2 = T::SQRT_2();
    let two = T::lit(2.0);
    let (m11, m12, m21, m22) = (e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]);
    let perm = e.permanent();
    let half_perm = perm / two;
    TwoPhotonOutputState {
        two_photon_amps: [m11 * m21 * sqrt2, perm, m12 * m22 * sqrt2],
        one_photon_branch_c: [-(m11 * m21 * two), -perm],
        one_photon_branch_d: [-perm, -(m12 * m22 * two)],
        env_two_photon: Mat2::new(m11 * m21, half_perm, half_perm, m12 * m22),
    }
}

/// Emission matrix `M^T`: row `i` holds the output-mode amplitudes of input photon `i`.
///
/// Coincides with `conj(M^{-1})` whenever `M` is unitary.
pub fn emission_matrix<T: Scalar>(tm: &TransferMatrix2<T>) -> Mat2<T> {
    tm.m.transpose()
}

/// Commutators `(M M^dag)^{-1} - I` of the environment modes paired with [`emission_matrix`].
/// They reproduce the environment Gram matrix `I - M^dag M` of the two input photons.
pub fn dressed_noise_commutators<T: Scalar>(tm: &TransferMatrix2<T>) -> Result<NoiseCommutatorMatrix<T>> {
    let gram = tm.m * tm.m.adjoint();
    let inv = gram.inverse(T::lit(MIN_DETERMINANT).powi(2))?;
    let mut comm = inv - Mat2::identity();
    comm[(1, 0)] = (comm[(1, 0)] + comm[(0, 1)].conj()) / T::lit(2.0);
    comm[(0, 1)] = comm[(1, 0)].conj();
    comm[(0, 0)].im = T::zero();
    comm[(1, 1)].im = T::zero();
    Ok(NoiseCommutatorMatrix { comm })
}

/// Sector probabilities and normalized density matrices of the reduced system state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorDensity<T> {
    pub p0: T,
    pub p1: T,
    pub p2: T,
    /// Basis `|2,0>, |1,1>, |0,2>`; absent when `p2 = 0`.
    pub rho2: Option<Mat3<T>>,
    /// Basis `|1,0>, |0,1>`; absent when `p1 <= P1_THRESHOLD`.
    pub rho1: Option<Mat2<T>>,
}

impl<T: Scalar> SectorDensity<T> {
    /// `<1,1| rho2 |1,1>`.
    pub fn p11(&self) -> Result<T> {
        self.rho2.map(|r| r.m[1][1].re).ok_or(RingError::UndefinedProbability)
    }
}

/// `sum_ij |b_i><b_j| [F_j, F_i^dag]` over the two one-photon branches.
pub fn one_photon_unnormalized<T: Scalar>(
    state: &TwoPhotonOutputState<T>,
    comms: &NoiseCommutatorMatrix<T>,
) -> Mat2<T> {
    let br = state.branches();
    let mut rho = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            let w = comms.get(j, i);
            for r in 0..2 {
                for c in 0..2 {
                    rho[(r, c)] = rho[(r, c)] + br[i][r] * br[j][c].conj() * w;
                }
            }
        }
    }
    rho
}

/// `<Phi|Phi>` of the environment-only branch by Wick contraction.
pub fn wick_vacuum_norm<T: Scalar>(state: &TwoPhotonOutputState<T>, comms: &NoiseCommutatorMatrix<T>) -> T {
    let e = &state.env_two_photon;
    let c = |i: usize, j: usize| comms.get(i, j);
    let mut acc = Complex::<T>::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    acc = acc + e[(k, l)].conj() * e[(i, j)] * (c(k, i) * c(l, j) + c(k, j) * c(l, i));
                }
            }
        }
    }
    acc.re
}

/// Traces out the environment. `p0` follows from normalization.
pub fn reduce_density<T: Scalar>(
    state: &TwoPhotonOutputState<T>,
    comms: &NoiseCommutatorMatrix<T>,
) -> Result<SectorDensity<T>> {
    let amps = state.two_photon_amps;
    let p2 = amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let rho1_raw = one_photon_unnormalized(state, comms);
    let p1 = rho1_raw.trace().re;
    let p0 = T::one() - p1 - p2;
    let slack = T::lit(PROBABILITY_SLACK);
    for (name, p) in [("p0", p0), ("p1", p1), ("p2", p2)] {
        if !(p >= -slack) {
            return Err(RingError::Consistency(format!("{name} = {p}")));
        }
    }
    let rho2 = (p2 > T::zero()).then(|| Mat3::outer(&amps).scale(T::one() / p2));
    let rho1 = (p1 > T::lit(P1_THRESHOLD)).then(|| rho1_raw.scale(Complex::from(T::one() / p1)));
    Ok(SectorDensity { p0, p1, p2, rho2, rho1 })
}

/// Everything derived from one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAnalysis<T> {
    pub transfer: TransferMatrix2<T>,
    pub emission: Mat2<T>,
    pub comms: NoiseCommutatorMatrix<T>,
    pub state: TwoPhotonOutputState<T>,
    pub density: SectorDensity<T>,
}

/// Transfer matrix, emission matrix, environment commutators, output state and density.
pub fn analyze<T: Scalar>(params: &AddDropParams<T>) -> Result<TwoPhotonAnalysis<T>> {
    let transfer = transfer_matrix(params)?;
    let emission = emission_matrix(&transfer);
    let comms = dressed_noise_commutators(&transfer)?;
    let state = output_state(&emission);
    let density = reduce_density(&state, &comms)?;
    Ok(TwoPhotonAnalysis { transfer, emission, comms, state, density })
}

/// Closed-form coincidence ratio
/// `(Q + a^2|k|^4|g|^4 + a|k|^2|g|^2 W) / (Q + a^2|k|^4|g|^4 - a|k|^2|g|^2 W)` with
/// `Q = (|t|^2 + a^2|e|^2 - a r)(|e|^2 + a^2|t|^2 - a r)`,
/// `W = (1 + a^2) r - 2a(|t|^2 + |e|^2)` and `r = 2 Re(tau eta e^{-i theta})`.
///
/// Equals `|Perm(M) / det(M)|^2`.
pub fn p11_closed<T: Scalar>(params: &AddDropParams<T>) -> Result<T> {
    let (tau, eta) = (params.coupler1.through(), params.coupler2.through());
    let t2 = tau.norm_sqr();
    let e2 = eta.norm_sqr();
    let k2 = params.coupler1.cross().norm_sqr();
    let g2 = params.coupler2.cross().norm_sqr();
    let a = params.ring.alpha();
    let r = T::lit(2.0) * (tau * eta * Complex::from_polar(T::one(), -params.ring.theta())).re;
    let q = (t2 + a * a * e2 - a * r) * (e2 + a * a * t2 - a * r) + a * a * k2 * k2 * g2 * g2;
    let w = a * k2 * g2 * ((T::one() + a * a) * r - T::lit(2.0) * a * (t2 + e2));
    let den = q - w;
    if den == T::zero() || !den.is_finite() {
        return Err(RingError::Degenerate(format!("coincidence ratio denominator is {den}")));
    }
    Ok((q + w) / den)
}

/// `((|t|^2 + |e|^2 - r - |k|^2|g|^2) / (|t|^2 + |e|^2 - r + |k|^2|g|^2))^2`, the lossless ratio.
pub fn p11_lossless<T: Scalar>(tau: &CouplerParams<T>, eta: &CouplerParams<T>, theta: T) -> Result<T> {
    let (t, e) = (tau.through(), eta.through());
    let r = T::lit(2.0) * (t * e * Complex::from_polar(T::one(), -theta)).re;
    let base = t.norm_sqr() + e.norm_sqr() - r;
    let kg = tau.cross().norm_sqr() * eta.cross().norm_sqr();
    let den = base + kg;
    if den == T::zero() {
        return Err(RingError::Degenerate("lossless coincidence ratio denominator is 0".into()));
    }
    Ok(((base - kg) / den).powi(2))
}

/// `|1,1>` population of the normalized two-photon sector:
/// `|Perm|^2 / (2|E11 E21|^2 + |Perm|^2 + 2|E12 E22|^2)`.
pub fn p11_from_state<T: Scalar>(params: &AddDropParams<T>) -> Result<T> {
    let state = output_state(&emission_matrix(&transfer_matrix(params)?));
    let p2 = state.two_photon_amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    if !(p2 > T::zero()) {
        return Err(RingError::UndefinedProbability);
    }
    Ok(state.permanent().norm_sqr() / p2)
}

/// Unconditional coincidence probability `p2 * P11 = |Perm(M)|^2`.
pub fn coincidence_probability<T: Scalar>(params: &AddDropParams<T>) -> Result<T> {
    Ok(transfer_matrix(params)?.m.permanent().norm_sqr())
}

/// Drop-coupler magnitudes `eta` in `[0, 1]` that zero the permanent for real couplers
/// at through magnitude `tau`. For `alpha < 1` the permanent can only vanish where
/// `sin(theta) = 0`; the roots returned solve the remaining real condition
/// `eta^2 (tau^2 - 2) + eta tau (alpha + 1/alpha) cos(theta) + 1 - 2 tau^2 = 0`.
pub fn manifold_drop_couplings<T: Scalar>(tau: T, alpha: T, theta: T) -> Result<Vec<T>> {
    if !(tau >= T::zero() && tau <= T::one()) {
        return Err(RingError::Domain(format!("tau must lie in [0, 1], got {tau}")));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(RingError::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let a = tau * tau - T::lit(2.0);
    let b = tau * (alpha + T::one() / alpha) * theta.cos();
    let c = T::one() - T::lit(2.0) * tau * tau;
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return Ok(Vec::new());
    }
    let q = -(b + b.signum() * disc.sqrt()) / T::lit(2.0);
    let mut roots = vec![q / a];
    if q != T::zero() {
        roots.push(c / q);
    }
    let mut out: Vec<T> = roots.into_iter().filter(|r| *r >= T::zero() && *r <= T::one()).collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup();
    Ok(out)
}

/// Uniform axis `count` points from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis<T> {
    pub start: T,
    pub stop: T,
    pub count: usize,
}

impl<T: Scalar> GridAxis<T> {
    pub fn new(start: T, stop: T, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn values(&self) -> Vec<T> {
        linspace(self.start, self.stop, self.count)
    }
}

/// Grid over `(tau, eta, theta)` for real couplers; row-major with `theta` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HommGrid<T> {
    pub tau: GridAxis<T>,
    pub eta: GridAxis<T>,
    pub theta: GridAxis<T>,
}

impl<T: Scalar> Default for HommGrid<T> {
    fn default() -> Self {
        Self {
            tau: GridAxis::new(T::zero(), T::one(), 101),
            eta: GridAxis::new(T::zero(), T::one(), 101),
            theta: GridAxis::new(-T::PI(), T::PI(), 201),
        }
    }
}

impl<T: Scalar> HommGrid<T> {
    pub fn len(&self) -> usize {
        self.tau.count * self.eta.count * self.theta.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(RingError::Domain("grid has no points".into()));
        }
        let unit = |ax: &GridAxis<T>| ax.start >= T::zero() && ax.stop <= T::one() && ax.start <= ax.stop;
        if !unit(&self.tau) || !unit(&self.eta) {
            return Err(RingError::Domain("coupler axes must lie within [0, 1]".into()));
        }
        let pi = T::PI() * (T::one() + T::epsilon());
        if !(self.theta.start >= -pi && self.theta.stop <= pi && self.theta.start <= self.theta.stop) {
            return Err(RingError::Domain("phase axis must lie within [-pi, pi]".into()));
        }
        Ok(())
    }

    /// Evaluates `f(tau, eta, theta)` at every grid point in parallel; results are in canonical order.
    pub fn map<R: Send>(&self, f: impl Fn(T, T, T) -> R + Sync) -> Result<Vec<R>> {
        self.validate()?;
        let (taus, etas, thetas) = (self.tau.values(), self.eta.values(), self.theta.values());
        let rows: Vec<Vec<R>> = taus
            .par_iter()
            .map(|&t| {
                let mut row = Vec::with_capacity(etas.len() * thetas.len());
                for &e in &etas {
                    for &th in &thetas {
                        row.push(f(t, e, th));
                    }
                }
                row
            })
            .collect();
        Ok(rows.into_iter().flatten().collect())
    }

    /// Coordinates of the flat index `k`.
    pub fn point(&self, k: usize) -> [T; 3] {
        let nt = self.theta.count;
        let ne = self.eta.count;
        let at = |ax: &GridAxis<T>, i: usize| {
            if ax.count == 1 {
                ax.start
            } else if i + 1 == ax.count {
                ax.stop
            } else {
                ax.start + (ax.stop - ax.start) * T::lit(i as f64) / T::lit((ax.count - 1) as f64)
            }
        };
        [at(&self.tau, k / (ne * nt)), at(&self.eta, (k / nt) % ne), at(&self.theta, k % nt)]
    }
}

fn real_point<T: Scalar>(tau: T, eta: T, alpha: T, theta: T) -> Result<AddDropParams<T>> {
    Ok(AddDropParams::new(CouplerParams::real(tau)?, CouplerParams::real(eta)?, RingParams::from_alpha(alpha, theta)?))
}

/// Points of the grid where the coincidence ratio is at or below `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct HommRegion<T> {
    pub points: Vec<[T; 3]>,
    pub total: usize,
    /// Points where the ratio is undefined (zero denominator).
    pub degenerate: usize,
}

impl<T: Scalar> HommRegion<T> {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// `count / total`.
    pub fn fraction(&self) -> f64 {
        self.points.len() as f64 / self.total as f64
    }
}

/// Interference region `{P11 <= threshold}` of the closed-form ratio on a grid.
pub fn homm_region<T: Scalar>(grid: &HommGrid<T>, alpha: T, threshold: T) -> Result<HommRegion<T>> {
    RingParams::from_alpha(alpha, T::zero())?;
    let values = grid.map(|t, e, th| real_point(t, e, alpha, th).and_then(|p| p11_closed(&p)).ok())?;
    let mut points = Vec::new();
    let mut degenerate = 0;
    for (k, v) in values.iter().enumerate() {
        match v {
            Some(p) if p.is_finite() => {
                if *p <= threshold {
                    points.push(grid.point(k));
                }
            }
            _ => degenerate += 1,
        }
    }
    Ok(HommRegion { points, total: values.len(), degenerate })
}

/// Von Neumann entropy (bits) of the one-photon density matrix, in `[0, 1]`.
pub fn entropy_one_photon<T: Scalar>(rho1: Option<&Mat2<T>>) -> Result<T> {
    let rho = rho1.ok_or(RingError::NotApplicable)?;
    let clip = T::lit(EIGEN_CLIP);
    let mut s = T::zero();
    for lambda in rho.hermitian_eigenvalues() {
        if lambda < -clip {
            return Err(RingError::NegativeEigenvalue { value: lambda.to_f64_lossy() });
        }
        let lambda = lambda.min(T::one());
        if lambda > T::zero() {
            s = s - lambda * lambda.log2();
        }
    }
    Ok(s)
}

/// Entropy at every grid point; `None` where the one-photon sector is empty or undefined.
pub fn entropy_grid<T: Scalar>(grid: &HommGrid<T>, alpha: T) -> Result<Vec<Option<T>>> {
    RingParams::from_alpha(alpha, T::zero())?;
    grid.map(|t, e, th| {
        let p = real_point(t, e, alpha, th).ok()?;
        let a = analyze(&p).ok()?;
        entropy_one_photon(a.density.rho1.as_ref()).ok()
    })
}

/// Fraction of defined samples with `S >= level`, per level.
pub fn level_set_fractions<T: Scalar>(values: &[Option<T>], levels: &[T]) -> Vec<f64> {
    let defined: Vec<T> = values.iter().flatten().copied().collect();
    levels
        .iter()
        .map(|&v| {
            if defined.is_empty() {
                0.0
            } else {
                defined.iter().filter(|s| **s >= v).count() as f64 / defined.len() as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::add_drop::{inverse_conjugate, noise_commutators};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn crit(alpha: f64, theta: f64) -> AddDropParams<f64> {
        AddDropParams::<f64>::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2, alpha, theta).unwrap()
    }

    #[test]
    fn identity_emission() {
        let s = output_state(&Mat2::<f64>::identity());
        assert_eq!(s.two_photon_amps, [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let d = reduce_density(&s, &NoiseCommutatorMatrix::zero()).unwrap();
        assert_eq!((d.p0, d.p1, d.p2), (0.0, 0.0, 1.0));
        assert!(d.rho1.is_none());
        assert_eq!(d.p11().unwrap(), 1.0);
    }

    #[test]
    fn balanced_splitter_bunches() {
        let bs = Mat2::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)).scale(c(FRAC_1_SQRT_2, 0.0));
        let s = output_state(&bs);
        assert!(s.permanent().norm() < 1e-16);
        assert_abs_diff_eq!(s.two_photon_amps[0].norm(), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.two_photon_amps[2].norm(), FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn zero_permanent_kills_branch_superposition() {
        let bs = Mat2::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)).scale(c(FRAC_1_SQRT_2, 0.0));
        let s = output_state(&bs);
        assert!(s.one_photon_branch_c[1].norm() < 1e-16 && s.one_photon_branch_c[0].norm() > 0.5);
        assert!(s.one_photon_branch_d[0].norm() < 1e-16 && s.one_photon_branch_d[1].norm() > 0.5);
    }

    #[test]
    fn emission_matches_inverse_conjugate_without_loss() {
        let p = AddDropParams::<f64>::real(0.3, 0.85, 1.0, 2.1).unwrap();
        let tm = transfer_matrix(&p).unwrap();
        assert!(emission_matrix(&tm).max_abs_diff(&inverse_conjugate(&tm.m).unwrap()) < 1e-12);
        assert!(dressed_noise_commutators(&tm).unwrap().comm.max_abs() < 1e-12);
    }

    #[test]
    fn lossless_critical_dip() {
        assert_abs_diff_eq!(p11_closed(&crit(1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-12);
        let th = 0.75f64.acos();
        for t in [th, -th] {
            assert!(p11_closed(&crit(1.0, t)).unwrap() < 1e-12);
            assert!(p11_from_state(&crit(1.0, t)).unwrap() < 1e-12);
        }
        assert_abs_diff_eq!(p11_from_state(&crit(1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_ratio_is_permanent_over_determinant() {
        for (t, e, a, th) in [(0.3, 0.6, 0.8, 0.4), (0.9, 0.2, 0.5, -2.0), (0.7, 0.7, 0.95, 1.0)] {
            let p = AddDropParams::<f64>::real(t, e, a, th).unwrap();
            let m = transfer_matrix(&p).unwrap().m;
            let expected = (m.permanent() / m.det()).norm_sqr();
            assert!((p11_closed(&p).unwrap() - expected).abs() < 1e-10 * (1.0 + expected));
        }
    }

    #[test]
    fn closed_ratio_and_state_route_separate_under_loss() {
        let p = AddDropParams::<f64>::real(0.3, 0.6, 0.8, 0.4).unwrap();
        let closed = p11_closed(&p).unwrap();
        let state = p11_from_state(&p).unwrap();
        assert!((closed - state).abs() > 1e-3, "closed {closed}, state {state}");
    }

    #[test]
    fn coincidence_probability_is_p2_times_p11() {
        let p = AddDropParams::<f64>::real(0.45, 0.8, 0.85, -0.6).unwrap();
        let a = analyze(&p).unwrap();
        let joint = coincidence_probability(&p).unwrap();
        assert_abs_diff_eq!(joint, a.density.p2 * a.density.p11().unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn lossless_sectors() {
        let a = analyze(&AddDropParams::<f64>::real(0.4, 0.9, 1.0, 0.3).unwrap()).unwrap();
        assert!(a.density.p1.abs() < 1e-12);
        assert!(a.density.p0.abs() < 1e-12);
        assert!((a.density.p2 - 1.0).abs() < 1e-12);
        assert!(a.density.rho1.is_none() || a.density.p1 > P1_THRESHOLD);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_one_photon(Some(&Mat2::from_real(1.0, 0.0, 0.0, 0.0))).unwrap(), 0.0);
        assert_abs_diff_eq!(
            entropy_one_photon(Some(&Mat2::from_real(0.5, 0.0, 0.0, 0.5))).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(entropy_one_photon::<f64>(None), Err(RingError::NotApplicable));
        let bad = Mat2::from_real(1.1, 0.0, 0.0, -0.1);
        assert!(matches!(entropy_one_photon(Some(&bad)), Err(RingError::NegativeEigenvalue { .. })));
        let rounded = Mat2::from_real(1.0 + 1e-13, 0.0, 0.0, -1e-13);
        assert_eq!(entropy_one_photon(Some(&rounded)).unwrap(), 0.0);
    }

    #[test]
    fn manifold_roots_zero_the_permanent() {
        for (tau, alpha, theta) in [(0.3, 0.8, 0.0), (0.5, 0.9, PI), (FRAC_1_SQRT_2, 1.0, 0.75f64.acos())] {
            let roots = manifold_drop_couplings(tau, alpha, theta).unwrap();
            assert!(!roots.is_empty(), "{tau} {alpha} {theta}");
            for eta in roots {
                let p = AddDropParams::<f64>::real(tau, eta, alpha, theta).unwrap();
                assert!(transfer_matrix(&p).unwrap().m.permanent().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn small_grid_region() {
        let grid = HommGrid {
            tau: GridAxis::new(0.0, 1.0, 11),
            eta: GridAxis::new(0.0, 1.0, 11),
            theta: GridAxis::new(-PI, PI, 21),
        };
        let region = homm_region(&grid, 1.0, 1e-3).unwrap();
        assert_eq!(region.total, 11 * 11 * 21);
        assert!(region.count() > 0);
        let empty = HommGrid { tau: GridAxis::new(0.0, 1.0, 0), ..grid };
        assert!(homm_region(&empty, 1.0, 1e-3).is_err());
        assert_eq!(grid.point(0), [0.0, 0.0, -PI]);
        assert_eq!(grid.point(grid.len() - 1), [1.0, 1.0, PI]);
    }

    #[test]
    fn level_fractions_are_monotone() {
        let vals: Vec<Option<f64>> = (0..100).map(|k| if k % 7 == 0 { None } else { Some(k as f64 / 99.0) }).collect();
        let f = level_set_fractions(&vals, &[0.99, 0.95, 0.75, 0.5, 0.25, 0.1]);
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }

    fn lossy() -> impl Strategy<Value = AddDropParams<f64>> {
        (0.0f64..=1.0, 0.0f64..=1.0, 0.05f64..0.999, -PI..PI)
            .prop_map(|(t, e, a, th)| AddDropParams::<f64>::real(t, e, a, th).unwrap())
    }

    proptest! {
        #[test]
        fn sectors_normalize(p in lossy()) {
            let Ok(a) = analyze(&p) else { return Ok(()) };
            let d = a.density;
            prop_assert!((d.p0 + d.p1 + d.p2 - 1.0).abs() < 1e-10);
            let wick = wick_vacuum_norm(&a.state, &a.comms);
            prop_assert!((wick - d.p0).abs() < 1e-8 * (1.0 + wick.abs()));
            if let Some(r) = d.rho1 {
                prop_assert!(r.hermiticity_residual() < 1e-12);
                prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
                prop_assert!(r.hermitian_eigenvalues()[0] >= -1e-10);
                let s = entropy_one_photon(Some(&r)).unwrap();
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
            }
            if let Some(r) = d.rho2 {
                prop_assert!(r.hermiticity_residual() < 1e-12);
                prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
                prop_assert!(r.hermitian_eigenvalues()[0] >= -1e-10);
            }
        }

        #[test]
        fn closed_ratio_symmetric_in_theta(p in lossy()) {
            let flipped = AddDropParams { ring: p.ring.at_theta(-p.ring.theta()), ..p };
            if let (Ok(x), Ok(y)) = (p11_closed(&p), p11_closed(&flipped)) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn lossless_closed_matches_squared_ratio(t in 0.0f64..=1.0, e in 0.0f64..=1.0, th in -PI..PI) {
            let p = AddDropParams::<f64>::real(t, e, 1.0, th).unwrap();
            if let (Ok(x), Ok(y)) = (p11_closed(&p), p11_lossless(&p.coupler1, &p.coupler2, th)) {
                prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn lossless_routes_agree(t in 0.05f64..0.95, e in 0.05f64..0.95, th in -PI..PI) {
            let p = AddDropParams::<f64>::real(t, e, 1.0, th).unwrap();
            prop_assert!((p11_closed(&p).unwrap() - p11_from_state(&p).unwrap()).abs() < 1e-8);
        }

        #[test]
        fn permanent_zero_iff_coincidence_amplitude_zero(p in lossy()) {
            let Ok(tm) = transfer_matrix(&p) else { return Ok(()) };
            let s = output_state(&emission_matrix(&tm));
            prop_assert_eq!(s.two_photon_amps[1], tm.m.transpose().permanent());
        }

        #[test]
        fn entropy_invariant_under_row_phases(p in lossy(), phi in -PI..PI) {
            let Ok(a) = analyze(&p) else { return Ok(()) };
            let Some(r0) = a.density.rho1 else { return Ok(()) };
            let mut e = a.emission;
            let ph = Complex::from_polar(1.0, phi);
            e[(0, 0)] *= ph;
            e[(0, 1)] *= ph;
            let d = reduce_density(&output_state(&e), &a.comms).unwrap();
            let s0 = entropy_one_photon(Some(&r0)).unwrap();
            let s1 = entropy_one_photon(d.rho1.as_ref()).unwrap();
            prop_assert!((s0 - s1).abs() < 1e-12);
        }

        #[test]
        fn physical_commutators_remain_psd(p in lossy()) {
            let Ok(tm) = transfer_matrix(&p) else { return Ok(()) };
            let comm = noise_commutators(&tm).unwrap();
            prop_assert!(comm.eigenvalues()[0] >= -1e-12);
            if let Ok(d) = dressed_noise_commutators(&tm) {
                prop_assert!(d.eigenvalues()[0] >= -1e-9 * (1.0 + d.comm.max_abs()));
            }
        }
    }
}
