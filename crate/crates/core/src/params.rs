//! Coupler and ring parameter types, round-trip loss and the geometric-series
//! helpers that every path-sum in the crate reduces to.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, RingError};
use crate::scalar::Scalar;

/// Complex mode amplitude. Modulus and phase come from `norm()` and `arg()`.
pub type ComplexAmplitude<T> = Complex<T>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Through/cross amplitudes of one bus-ring junction.
///
/// The junction acts as the beam splitter `[[t, k], [-k*, t*]]` mapping
/// (bus in, ring exit) onto (bus out, ring entry). The through amplitude `t`
/// carries the bus straight past the ring; `k` couples the ring into the bus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams<T> {
    through: Complex<T>,
    cross: Complex<T>,
}

impl<T: Scalar> CouplerParams<T> {
    /// Builds a coupler from explicit amplitudes, checking `|t|^2 + |k|^2 = 1`.
    pub fn new(through: Complex<T>, cross: Complex<T>) -> Result<Self> {
        let excess = through.norm_sqr() + cross.norm_sqr() - T::one();
        if !(excess.abs() <= T::power_tolerance()) {
            return Err(RingError::Domain(format!("coupler does not conserve power: |t|^2 + |k|^2 - 1 = {excess}")));
        }
        Ok(Self { through, cross })
    }

    /// Builds a coupler from the through magnitude and the two amplitude phases.
    pub fn from_magnitude(through: T, through_phase: T, cross_phase: T) -> Result<Self> {
        if !(through >= T::zero() && through <= T::one()) {
            return Err(RingError::Domain(format!("through magnitude {through} outside [0, 1]")));
        }
        let cross = (T::one() - through * through).max(T::zero()).sqrt();
        Ok(Self {
            through: Complex::from_polar(through, through_phase),
            cross: Complex::from_polar(cross, cross_phase),
        })
    }

    /// Real through amplitude `t` with real cross amplitude `sqrt(1 - t^2)`.
    pub fn real(through: T) -> Result<Self> {
        Self::from_magnitude(through, T::zero(), T::zero())
    }

    #[inline]
    pub fn through(&self) -> Complex<T> {
        self.through
    }

    #[inline]
    pub fn cross(&self) -> Complex<T> {
        self.cross
    }

    /// `|t|^2 + |k|^2 - 1`.
    pub fn power_residual(&self) -> T {
        self.through.norm_sqr() + self.cross.norm_sqr() - T::one()
    }
}

/// How the round-trip phase is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundTripPhase<T> {
    /// Propagation constant in rad/m; the round-trip phase is `beta * L`.
    Propagation(T),
    /// Round-trip phase in radians.
    Direct(T),
}

/// Ring of circumference `L` (m) with distributed amplitude loss `Gamma` (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams<T> {
    circumference: T,
    loss: T,
    phase: RoundTripPhase<T>,
}

impl<T: Scalar> RingParams<T> {
    fn validated(circumference: T, loss: T, phase: RoundTripPhase<T>) -> Result<Self> {
        if !(circumference > T::zero() && circumference.is_finite()) {
            return Err(RingError::Domain(format!("circumference must be positive, got {circumference}")));
        }
        if !(loss >= T::zero() && loss.is_finite()) {
            return Err(RingError::Domain(format!("loss must be non-negative, got {loss}")));
        }
        let value = match phase {
            RoundTripPhase::Propagation(v) | RoundTripPhase::Direct(v) => v,
        };
        if !value.is_finite() {
            return Err(RingError::Domain("round-trip phase must be finite".into()));
        }
        Ok(Self { circumference, loss, phase })
    }

    pub fn with_beta(circumference: T, loss: T, beta: T) -> Result<Self> {
        Self::validated(circumference, loss, RoundTripPhase::Propagation(beta))
    }

    pub fn with_theta(circumference: T, loss: T, theta: T) -> Result<Self> {
        Self::validated(circumference, loss, RoundTripPhase::Direct(theta))
    }

    /// Constant-index dispersion: `beta = n * omega / c`.
    pub fn from_dispersion(circumference: T, loss: T, index: T, omega: T) -> Result<Self> {
        Self::with_beta(circumference, loss, propagation_constant(index, omega))
    }

    /// Unit-circumference ring with the given round-trip amplitude `alpha` and phase.
    pub fn from_alpha(alpha: T, theta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(RingError::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let loss = if alpha == T::one() { T::zero() } else { -T::lit(2.0) * alpha.ln() };
        Self::with_theta(T::one(), loss, theta)
    }

    /// Same ring with the round-trip phase replaced.
    pub fn at_theta(&self, theta: T) -> Self {
        Self { phase: RoundTripPhase::Direct(theta), ..*self }
    }

    #[inline]
    pub fn circumference(&self) -> T {
        self.circumference
    }

    /// Distributed loss `Gamma`.
    #[inline]
    pub fn loss(&self) -> T {
        self.loss
    }

    pub fn phase_spec(&self) -> RoundTripPhase<T> {
        self.phase
    }

    /// Round-trip amplitude `exp(-Gamma L / 2)`.
    pub fn alpha(&self) -> T {
        (-self.loss * self.circumference / T::lit(2.0)).exp()
    }

    /// Round-trip phase.
    pub fn theta(&self) -> T {
        match self.phase {
            RoundTripPhase::Propagation(beta) => beta * self.circumference,
            RoundTripPhase::Direct(theta) => theta,
        }
    }

    /// Round-trip propagation factor `alpha * exp(i theta)`.
    pub fn round_trip(&self) -> Complex<T> {
        Complex::from_polar(self.alpha(), self.theta())
    }
}

/// `beta = n omega / c` for a dispersionless medium.
pub fn propagation_constant<T: Scalar>(index: T, omega: T) -> T {
    index * omega / T::lit(SPEED_OF_LIGHT)
}

/// Round-trip amplitude loss `exp(-Gamma L / 2)`.
pub fn alpha_from_loss<T: Scalar>(loss: T, length: T) -> Result<T> {
    if !(loss >= T::zero()) {
        return Err(RingError::Domain(format!("loss must be non-negative, got {loss}")));
    }
    if !(length > T::zero()) {
        return Err(RingError::Domain(format!("length must be positive, got {length}")));
    }
    Ok((-loss * length / T::lit(2.0)).exp())
}

/// `sum_{n>=0} x^n = 1 / (1 - x)` for `|x| < 1`.
pub fn geometric_sum<T: Scalar>(x: Complex<T>) -> Result<Complex<T>> {
    let modulus = x.norm();
    if !(modulus < T::one()) {
        return Err(RingError::Divergent { modulus: modulus.to_f64_lossy() });
    }
    Ok(Complex::<T>::one() / (Complex::<T>::one() - x))
}

/// `sum_{n=0}^{n_max} x^n`, summed term by term.
pub fn geometric_sum_truncated<T: Scalar>(x: Complex<T>, n_max: usize) -> Complex<T> {
    let mut term = Complex::<T>::one();
    let mut acc = Complex::<T>::zero();
    for _ in 0..=n_max {
        acc = acc + term;
        term = term * x;
    }
    acc
}

/// Bound on the omitted tail `|x|^{n+1} / (1 - |x|)` after summing through `n_max`.
pub fn geometric_tail_bound<T: Scalar>(modulus: T, n_max: usize) -> T {
    if modulus >= T::one() {
        return T::infinity();
    }
    modulus.powi((n_max + 1).min(i32::MAX as usize) as i32) / (T::one() - modulus)
}

/// Default cap on series truncation orders.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Smallest `n_max` with `scale * |x|^{n_max+1} / (1 - |x|) < tolerance`, capped at `cap`.
pub fn truncation_order<T: Scalar>(modulus: T, scale: T, tolerance: T, cap: usize) -> Result<usize> {
    if modulus >= T::one() {
        return Err(RingError::Divergent { modulus: modulus.to_f64_lossy() });
    }
    if modulus == T::zero() || scale == T::zero() {
        return Ok(0);
    }
    // |x|^{n+1} < tol (1 - |x|) / scale
    let target = (tolerance * (T::one() - modulus) / scale).ln() / modulus.ln() - T::one();
    let needed = target.max(T::zero()).ceil();
    let needed_f = needed.to_f64_lossy();
    if !(needed_f <= cap as f64) {
        return Err(RingError::TruncationInsufficient { needed: needed_f, cap });
    }
    let mut n = needed_f as usize;
    while n < cap && scale * geometric_tail_bound(modulus, n) >= tolerance {
        n += 1;
    }
    Ok(n)
}
