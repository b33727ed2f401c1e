//! Single-bus (all-through) ring: closed-form and path-sum transfer amplitudes,
//! the cavity-rate description, the rate mapping between the two, the noise
//! commutator double sum, and the classical multi-resonance reflection model.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, RingError};
use crate::numerics::logspace;
use crate::params::{geometric_tail_bound, truncation_order, CouplerParams, RingParams, MAX_SERIES_TERMS};
use crate::scalar::Scalar;

/// Output amplitude `A_{a->c}` and the accompanying noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBusResponse<T> {
    pub transfer: Complex<T>,
    pub noise_power: T,
}

impl<T: Scalar> SingleBusResponse<T> {
    /// `|A|^2 + noise_power - 1`.
    pub fn power_residual(&self) -> T {
        self.transfer.norm_sqr() + self.noise_power - T::one()
    }
}

/// `1 - alpha^2` computed from the distributed loss so it vanishes exactly without loss.
fn one_minus_alpha_sq<T: Scalar>(ring: &RingParams<T>) -> T {
    -(-ring.loss() * ring.circumference()).exp_m1()
}

fn loop_denominator<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>) -> Result<Complex<T>> {
    let d = Complex::<T>::one() - coupler.through().conj() * ring.round_trip();
    if d.is_zero() {
        return Err(RingError::ResonantDivergence);
    }
    Ok(d)
}

/// Closed-form transfer `(tau - alpha e^{i theta}) / (1 - tau* alpha e^{i theta})`.
pub fn ovpa_transfer<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>) -> Result<SingleBusResponse<T>> {
    let d = loop_denominator(coupler, ring)?;
    let transfer = (coupler.through() - ring.round_trip()) / d;
    let noise_power = coupler.cross().norm_sqr() * one_minus_alpha_sq(ring) / d.norm_sqr();
    Ok(SingleBusResponse { transfer, noise_power })
}

/// Path sum `tau - |kappa|^2 alpha e^{i theta} sum_{n=0}^{n_max} (tau* alpha e^{i theta})^n`.
pub fn ovpa_transfer_series<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>, n_max: usize) -> Complex<T> {
    let x = ring.round_trip();
    let step = coupler.through().conj() * x;
    let mut term = Complex::<T>::one();
    let mut acc = Complex::<T>::zero();
    for _ in 0..=n_max {
        acc = acc + term;
        term = term * step;
    }
    coupler.through() - x * acc * coupler.cross().norm_sqr()
}

/// Bound on `|series(n_max) - closed form|`: `|kappa|^2 alpha |tau alpha|^{n+1} / (1 - |tau alpha|)`.
pub fn series_tail_bound<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>, n_max: usize) -> T {
    let alpha = ring.alpha();
    coupler.cross().norm_sqr() * alpha * geometric_tail_bound(coupler.through().norm() * alpha, n_max)
}

/// Path sum truncated at the first order whose tail bound is below `tolerance`.
pub fn ovpa_transfer_series_auto<T: Scalar>(
    coupler: &CouplerParams<T>,
    ring: &RingParams<T>,
    tolerance: T,
) -> Result<(Complex<T>, usize)> {
    let alpha = ring.alpha();
    let n = truncation_order(
        coupler.through().norm() * alpha,
        coupler.cross().norm_sqr() * alpha,
        tolerance,
        MAX_SERIES_TERMS,
    )?;
    Ok((ovpa_transfer_series(coupler, ring, n), n))
}

/// Fields just inside the ring at the coupler entry (`a_P`) and exit (`a_Q`) for unit input.
pub fn rabus_internal_fields<T: Scalar>(
    coupler: &CouplerParams<T>,
    ring: &RingParams<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let d = loop_denominator(coupler, ring)?;
    let a_p = -coupler.cross().conj() / d;
    Ok((a_p, a_p * ring.round_trip()))
}

/// Cavity decay rates and round-trip time of the single-mode description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinRates<T> {
    pub gamma_c: T,
    pub gamma_int: T,
    pub round_trip_time: T,
}

impl<T: Scalar> LangevinRates<T> {
    pub fn new(gamma_c: T, gamma_int: T, round_trip_time: T) -> Result<Self> {
        if !(gamma_c >= T::zero() && gamma_int >= T::zero()) {
            return Err(RingError::Domain(format!("rates must be non-negative, got {gamma_c}, {gamma_int}")));
        }
        if !(round_trip_time > T::zero()) {
            return Err(RingError::Domain(format!("round-trip time must be positive, got {round_trip_time}")));
        }
        Ok(Self { gamma_c, gamma_int, round_trip_time })
    }

    pub fn gamma_plus(&self) -> T {
        (self.gamma_c + self.gamma_int) / T::lit(2.0)
    }

    pub fn gamma_minus(&self) -> T {
        (self.gamma_c - self.gamma_int) / T::lit(2.0)
    }
}

/// Transfer `(g- + i delta)/(g+ - i delta)` and noise power `g_c g_int / (g+^2 + delta^2)`.
pub fn langevin_transfer<T: Scalar>(rates: &LangevinRates<T>, delta: T) -> Result<SingleBusResponse<T>> {
    let gp = rates.gamma_plus();
    if gp == T::zero() && delta == T::zero() {
        return Err(RingError::UndefinedPoint);
    }
    let denom = Complex::new(gp, -delta);
    let transfer = Complex::new(rates.gamma_minus(), delta) / denom;
    let noise_power = rates.gamma_c * rates.gamma_int / (gp * gp + delta * delta);
    Ok(SingleBusResponse { transfer, noise_power })
}

/// Coefficients of the input field and the internal noise field in the intracavity mode.
pub fn langevin_internal_coefficients<T: Scalar>(rates: &LangevinRates<T>, delta: T) -> Result<[Complex<T>; 2]> {
    let gp = rates.gamma_plus();
    if gp == T::zero() && delta == T::zero() {
        return Err(RingError::UndefinedPoint);
    }
    let inv = Complex::<T>::one() / Complex::new(gp, -delta);
    Ok([inv * rates.gamma_c.sqrt(), inv * rates.gamma_int.sqrt()])
}

/// Both algebraic forms of the rate mapping, in units of `1/T_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedRates<T> {
    pub rates: LangevinRates<T>,
    /// `gamma_plus T_R` from the `(1 - alpha|tau|)` form.
    pub gamma_plus_tr: T,
    /// `gamma_minus T_R` from the `(alpha - |tau|)` form.
    pub gamma_minus_tr: T,
}

impl<T: Scalar> MatchedRates<T> {
    /// Largest disagreement between the two forms, in units of `1/T_R`.
    pub fn form_mismatch(&self) -> T {
        let tr = self.rates.round_trip_time;
        let dp = (self.rates.gamma_plus() * tr - self.gamma_plus_tr).abs();
        let dm = (self.rates.gamma_minus() * tr - self.gamma_minus_tr).abs();
        dp.max(dm)
    }
}

/// Cavity rates reproducing the near-resonance power transfer of a ring with
/// through magnitude `|tau|` and round-trip amplitude `alpha`.
pub fn match_rates<T: Scalar>(tau_abs: T, alpha: T, round_trip_time: T) -> Result<MatchedRates<T>> {
    if !(tau_abs > T::zero() && tau_abs <= T::one()) {
        return Err(RingError::Domain(format!("|tau| must lie in (0, 1], got {tau_abs}")));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(RingError::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let root = (alpha * tau_abs).sqrt();
    let gamma_c_tr = (T::one() + alpha) * (T::one() - tau_abs) / root;
    let gamma_int_tr = (T::one() - alpha) * (T::one() + tau_abs) / root;
    let rates = LangevinRates::new(gamma_c_tr / round_trip_time, gamma_int_tr / round_trip_time, round_trip_time)?;
    Ok(MatchedRates {
        rates,
        gamma_plus_tr: (T::one() - alpha * tau_abs) / root,
        gamma_minus_tr: (alpha - tau_abs) / root,
    })
}

/// One row of the power comparison; powers are `P T_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerComparisonRow<T> {
    pub delta: T,
    pub ovpa: T,
    pub langevin: T,
}

impl<T: Scalar> PowerComparisonRow<T> {
    pub fn abs_difference(&self) -> T {
        (self.ovpa - self.langevin).abs()
    }

    pub fn relative_difference(&self) -> T {
        self.abs_difference() / self.langevin.abs()
    }
}

/// Compares `|A|^2` of the closed form, evaluated at `theta = theta_tau + T_R delta`,
/// with the Lorentzian `(g-^2 + delta^2)/(g+^2 + delta^2)` of the matched rates.
pub fn power_ratio_comparison<T: Scalar>(
    coupler: &CouplerParams<T>,
    ring: &RingParams<T>,
    round_trip_time: T,
    deltas: &[T],
) -> Result<Vec<PowerComparisonRow<T>>> {
    let tau = coupler.through();
    let matched = match_rates(tau.norm(), ring.alpha(), round_trip_time)?;
    let (gp, gm) = (matched.rates.gamma_plus(), matched.rates.gamma_minus());
    deltas
        .iter()
        .map(|&delta| {
            let theta = tau.arg() + round_trip_time * delta;
            let ovpa = ovpa_transfer(coupler, &ring.at_theta(theta))?.transfer.norm_sqr();
            let d2 = delta * delta;
            Ok(PowerComparisonRow { delta, ovpa, langevin: (gm * gm + d2) / (gp * gp + d2) })
        })
        .collect()
}

/// Detunings whose magnitudes `|delta T_R|` are log-spaced over `[1e-4, pi]`,
/// `per_sign` of each sign, ascending.
pub fn detuning_grid<T: Scalar>(per_sign: usize, round_trip_time: T) -> Vec<T> {
    let mags = logspace(T::lit(1e-4), T::PI(), per_sign);
    let mut out: Vec<T> = mags.iter().rev().map(|m| -*m / round_trip_time).collect();
    out.extend(mags.iter().map(|m| *m / round_trip_time));
    out
}

/// Noise power two ways: `|kappa|^2 (1 - alpha^2)/|1 - |tau| alpha e^{i theta'}|^2`
/// and `1 - |A|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorSum<T> {
    pub analytic: T,
    pub closed: T,
}

pub fn commutator_sum_identity<T: Scalar>(
    coupler: &CouplerParams<T>,
    ring: &RingParams<T>,
) -> Result<CommutatorSum<T>> {
    let tau = coupler.through();
    let theta_prime = ring.theta() - tau.arg();
    let d = Complex::<T>::one() - Complex::from_polar(tau.norm() * ring.alpha(), theta_prime);
    if d.is_zero() {
        return Err(RingError::ResonantDivergence);
    }
    let analytic = coupler.cross().norm_sqr() * one_minus_alpha_sq(ring) / d.norm_sqr();
    let closed = T::one() - ovpa_transfer(coupler, ring)?.transfer.norm_sqr();
    Ok(CommutatorSum { analytic, closed })
}

/// Precomputed factors for the double sum over circulation numbers.
struct InmTable<T> {
    kappa4: T,
    p: Vec<Complex<T>>,
    q: Vec<Complex<T>>,
    decay: Vec<T>,
    noise: Vec<T>,
}

impl<T: Scalar> InmTable<T> {
    fn new(coupler: &CouplerParams<T>, ring: &RingParams<T>, n: usize) -> Self {
        let tau = coupler.through();
        let phase = Complex::from_polar(T::one(), ring.theta());
        let gl = ring.loss() * ring.circumference();
        let powers = |step: Complex<T>| {
            let mut v = Vec::with_capacity(n + 1);
            let mut acc = Complex::<T>::one();
            for _ in 0..=n {
                v.push(acc);
                acc = acc * step;
            }
            v
        };
        Self {
            kappa4: coupler.cross().norm_sqr().powi(2),
            p: powers(tau.conj() * phase),
            q: powers(tau * phase.conj()),
            decay: (0..=n).map(|k| (-gl * T::lit(k as f64) / T::lit(2.0)).exp()).collect(),
            noise: (0..=n).map(|k| -(-gl * T::lit((k + 1) as f64)).exp_m1()).collect(),
        }
    }

    fn term(&self, n: usize, m: usize) -> Complex<T> {
        self.p[n] * self.q[m] * (self.kappa4 * self.decay[n.abs_diff(m)] * self.noise[n.min(m)])
    }
}

/// `I_{n,m} = Gamma |kappa|^4 (tau*)^n tau^m e^{i theta (n-m)} int_0^{min} e^{-Gamma(...)}`
/// with the overlap integral in closed form.
pub fn inm_term<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>, n: usize, m: usize) -> Complex<T> {
    InmTable::new(coupler, ring, n.max(m)).term(n, m)
}

/// `sum_{n<=n_max, m<=m_max} I_{n,m}`, pairing `I_{m,n} = I_{n,m}*` where both lie in range.
pub fn inm_bruteforce<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>, n_max: usize, m_max: usize) -> T {
    if ring.loss() == T::zero() {
        return T::zero();
    }
    let table = InmTable::new(coupler, ring, n_max.max(m_max));
    let two = T::lit(2.0);
    let mut diagonal = T::zero();
    let mut paired = T::zero();
    let mut unpaired = Complex::<T>::zero();
    for n in 0..=n_max {
        for m in 0..=m_max {
            match n.cmp(&m) {
                std::cmp::Ordering::Equal => diagonal = diagonal + table.term(n, m).re,
                std::cmp::Ordering::Greater if n <= m_max => paired = paired + table.term(n, m).re,
                std::cmp::Ordering::Less if m <= n_max => {}
                _ => unpaired = unpaired + table.term(n, m),
            }
        }
    }
    diagonal + two * paired + unpaired.re
}

/// `|kappa|^4 sum_{n=0}^{n_max} |tau|^{2n} (1 - alpha^{2(n+1)})`.
pub fn inm_diagonal_sum<T: Scalar>(coupler: &CouplerParams<T>, ring: &RingParams<T>, n_max: usize) -> T {
    let table = InmTable::new(coupler, ring, n_max);
    (0..=n_max).fold(T::zero(), |acc, n| acc + table.term(n, n).re)
}

/// Bound on the omitted part of the square double sum at order `n`:
/// `2 (1 + |tau|)^2 |tau|^{n+1}`.
pub fn inm_truncation_bound<T: Scalar>(tau_abs: T, n: usize) -> T {
    let one = T::one();
    T::lit(2.0) * (one + tau_abs).powi(2) * tau_abs.powi((n + 1).min(i32::MAX as usize) as i32)
}

/// Cap on the automatic double-sum order; the cost grows quadratically.
pub const MAX_DOUBLE_SUM_ORDER: usize = 20_000;

/// Square double sum at the smallest order whose bound is below `tolerance`.
pub fn inm_bruteforce_auto<T: Scalar>(
    coupler: &CouplerParams<T>,
    ring: &RingParams<T>,
    tolerance: T,
) -> Result<(T, usize)> {
    let tau_abs = coupler.through().norm();
    if coupler.cross().norm_sqr() == T::zero() || ring.loss() == T::zero() {
        return Ok((T::zero(), 0));
    }
    let scale = T::lit(2.0) * (T::one() + tau_abs).powi(2) * (T::one() - tau_abs);
    let n = truncation_order(tau_abs, scale, tolerance, MAX_DOUBLE_SUM_ORDER)?;
    Ok((inm_bruteforce(coupler, ring, n, n), n))
}

/// One resonance of the classical multi-mode reflection model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSpec<T> {
    pub omega_0: T,
    pub gamma_c: T,
    pub gamma_int: T,
}

impl<T: Scalar> ResonanceSpec<T> {
    pub fn new(omega_0: T, gamma_c: T, gamma_int: T) -> Result<Self> {
        if !(gamma_c >= T::zero() && gamma_int >= T::zero()) {
            return Err(RingError::Domain(format!("rates must be non-negative, got {gamma_c}, {gamma_int}")));
        }
        if !omega_0.is_finite() {
            return Err(RingError::Domain("resonance frequency must be finite".into()));
        }
        Ok(Self { omega_0, gamma_c, gamma_int })
    }

    fn lossless(&self) -> Self {
        Self { gamma_int: T::zero(), ..*self }
    }
}

/// Complex Lorentzian `gamma_c / ((gamma_c + gamma_int)/2 - i (omega - omega_0))`.
pub fn lorentzian<T: Scalar>(res: &ResonanceSpec<T>, omega: T) -> Complex<T> {
    let gp = (res.gamma_c + res.gamma_int) / T::lit(2.0);
    Complex::from(res.gamma_c) / Complex::new(gp, -(omega - res.omega_0))
}

/// Reflection coefficient `c_in + sum_j L_j`. A lone resonance uses the exact
/// `(g- + i delta)/(g+ - i delta)`; several resonances take `c_in` from the
/// lossless quadratic of the same resonances.
pub fn haus_reflection<T: Scalar>(resonances: &[ResonanceSpec<T>], omega: T) -> Result<Complex<T>> {
    match resonances {
        [] => Err(RingError::Domain("resonance list is empty".into())),
        [res] => {
            let rates = LangevinRates::new(res.gamma_c, res.gamma_int, T::one())?;
            Ok(langevin_transfer(&rates, omega - res.omega_0)?.transfer)
        }
        _ => {
            let lossless: Vec<_> = resonances.iter().map(ResonanceSpec::lossless).collect();
            let c_in = solve_cin(&lossless, omega)?;
            let sum = resonances.iter().fold(Complex::<T>::zero(), |acc, r| acc + lorentzian(r, omega));
            Ok(sum + c_in)
        }
    }
}

/// Real `c_in` making `|c_in + sum_j L_j| = 1` for lossless resonances:
/// `c^2 + S c + (S + X - 1) = 0` with `S = sum |L_j|^2`, `X = 2 sum_{j<k} Re(L_j L_k*)`.
/// Returns the root nearer `-1`.
pub fn solve_cin<T: Scalar>(resonances: &[ResonanceSpec<T>], omega: T) -> Result<T> {
    if resonances.is_empty() {
        return Err(RingError::Domain("resonance list is empty".into()));
    }
    if resonances.iter().any(|r| r.gamma_int != T::zero()) {
        return Err(RingError::Domain("boundary coefficient requires lossless resonances".into()));
    }
    let ls: Vec<_> = resonances.iter().map(|r| lorentzian(r, omega)).collect();
    let s = ls.iter().fold(T::zero(), |acc, l| acc + l.norm_sqr());
    let mut x = T::zero();
    for j in 0..ls.len() {
        for k in j + 1..ls.len() {
            x = x + (ls[j] * ls[k].conj()).re;
        }
    }
    x = x * T::lit(2.0);
    if x == T::zero() {
        return Ok(-T::one());
    }
    let disc = (s - T::lit(2.0)).powi(2) - T::lit(4.0) * x;
    if disc < T::zero() {
        return Err(RingError::NoRealRoot { discriminant: disc.to_f64_lossy() });
    }
    let q = -(s + disc.sqrt()) / T::lit(2.0);
    let c0 = s + x - T::one();
    let roots = [q, if q == T::zero() { T::zero() } else { c0 / q }];
    let near = |c: T| (c + T::one()).abs();
    Ok(if near(roots[0]) <= near(roots[1]) { roots[0] } else { roots[1] })
}
