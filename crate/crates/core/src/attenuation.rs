//! Traveling-wave attenuation as a chain of weak beam splitters, its continuum
//! limit, and the commutator-preservation checks built on it.

use num_complex::Complex;

use crate::error::{Result, RingError};
use crate::numerics::{simpson, simpson_panels};
use crate::scalar::Scalar;

/// Error target for the Simpson evaluation of the noise integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-11;
const QUADRATURE_PANEL_CAP: usize = 50_000_000;

fn check_loss_length<T: Scalar>(loss: T, length: T) -> Result<()> {
    if !(loss >= T::zero() && loss.is_finite()) {
        return Err(RingError::Domain(format!("loss must be non-negative, got {loss}")));
    }
    if !(length > T::zero() && length.is_finite()) {
        return Err(RingError::Domain(format!("length must be positive, got {length}")));
    }
    Ok(())
}

/// `N` identical beam splitters spread over a length `L` of lossy guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterChain<T> {
    pub n_splitters: usize,
    pub loss: T,
    pub length: T,
    pub beta: T,
}

impl<T: Scalar> BeamSplitterChain<T> {
    pub fn new(n_splitters: usize, loss: T, length: T, beta: T) -> Result<Self> {
        check_loss_length(loss, length)?;
        if n_splitters == 0 {
            return Err(RingError::Domain("chain needs at least one splitter".into()));
        }
        let chain = Self { n_splitters, loss, length, beta };
        let loss_length = loss * length;
        if loss_length > T::lit(n_splitters as f64) {
            return Err(RingError::ReflectivityOutOfRange {
                splitters: n_splitters,
                loss_length: loss_length.to_f64_lossy(),
            });
        }
        Ok(chain)
    }

    /// Per-splitter reflectivity `|R|^2 = Gamma L / N`.
    pub fn reflectivity(&self) -> T {
        self.loss * self.length / T::lit(self.n_splitters as f64)
    }

    /// Per-splitter transmission `T = sqrt(1 - |R|^2) exp(i beta L / N)`.
    pub fn splitter_transmission(&self) -> Complex<T> {
        let n = T::lit(self.n_splitters as f64);
        Complex::from_polar((T::one() - self.reflectivity()).sqrt(), self.beta * self.length / n)
    }
}

/// `T^N` for the chain. Its squared modulus tends to `exp(-Gamma L)` as `N` grows.
pub fn discrete_transmission<T: Scalar>(chain: &BeamSplitterChain<T>) -> Result<Complex<T>> {
    let chain = BeamSplitterChain::new(chain.n_splitters, chain.loss, chain.length, chain.beta)?;
    let n = T::lit(chain.n_splitters as f64);
    let modulus = (n / T::lit(2.0) * (-chain.reflectivity()).ln_1p()).exp();
    Ok(Complex::from_polar(modulus, chain.beta * chain.length))
}

/// `|T^N|^2 + |R|^2 sum_{r=1}^{N} |T|^{2(N-r)}`, summed splitter by splitter. Equals 1.
pub fn discrete_commutator_coefficient<T: Scalar>(chain: &BeamSplitterChain<T>) -> Result<T> {
    let chain = BeamSplitterChain::new(chain.n_splitters, chain.loss, chain.length, chain.beta)?;
    let r2 = chain.reflectivity();
    let t2 = T::one() - r2;
    let mut noise = T::zero();
    let mut weight = T::one();
    for _ in 0..chain.n_splitters {
        noise = noise + r2 * weight;
        weight = weight * t2;
    }
    Ok(weight + noise)
}

/// Analytic and quadrature evaluations of the continuum commutator coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorCoefficient<T> {
    pub analytic: T,
    pub quadrature: T,
    pub panels: usize,
}

/// `exp(-Gamma L) + Gamma int_0^L exp(-Gamma z) dz`, both in closed form and by Simpson's rule.
pub fn continuum_commutator_coefficient<T: Scalar>(loss: T, length: T) -> Result<CommutatorCoefficient<T>> {
    check_loss_length(loss, length)?;
    let panels = simpson_panels(length, loss.powi(5), T::lit(QUADRATURE_TOLERANCE), QUADRATURE_PANEL_CAP)?;
    Ok(CommutatorCoefficient {
        analytic: continuum_commutator_analytic(loss, length),
        quadrature: continuum_commutator_quadrature(loss, length, panels)?,
        panels,
    })
}

/// Closed-form coefficient `exp(-Gamma L) + (1 - exp(-Gamma L))`.
pub fn continuum_commutator_analytic<T: Scalar>(loss: T, length: T) -> T {
    let x = loss * length;
    (-x).exp() - (-x).exp_m1()
}

/// Coefficient with the noise integral done by composite Simpson with a fixed panel count.
pub fn continuum_commutator_quadrature<T: Scalar>(loss: T, length: T, panels: usize) -> Result<T> {
    check_loss_length(loss, length)?;
    let integral = simpson(|z: T| loss * (-loss * z).exp(), T::zero(), length, panels);
    Ok((-loss * length).exp() + integral)
}

/// One uniform stretch of lossy guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSegment<T> {
    pub length: T,
    pub loss: T,
    pub beta: T,
}

impl<T: Scalar> LossSegment<T> {
    pub fn new(length: T, loss: T, beta: T) -> Result<Self> {
        check_loss_length(loss, length)?;
        Ok(Self { length, loss, beta })
    }
}

/// Commutator coefficient of a concatenation of segments. Each segment's noise is
/// attenuated by every segment after it; the total equals 1.
pub fn piecewise_commutator_coefficient<T: Scalar>(segments: &[LossSegment<T>]) -> Result<T> {
    if segments.is_empty() {
        return Err(RingError::Domain("segment list is empty".into()));
    }
    for s in segments {
        check_loss_length(s.loss, s.length)?;
    }
    let mut tail = T::one();
    let mut noise = T::zero();
    for s in segments.iter().rev() {
        let x = s.loss * s.length;
        noise = noise + tail * -(-x).exp_m1();
        tail = tail * (-x).exp();
    }
    Ok(tail + noise)
}

/// Total field transmission `exp(i beta L - Gamma L / 2)` of a segment list.
pub fn propagation_factor<T: Scalar>(segments: &[LossSegment<T>]) -> Complex<T> {
    let (log_mod, phase) = segments
        .iter()
        .fold((T::zero(), T::zero()), |(m, p), s| (m - s.loss * s.length / T::lit(2.0), p + s.beta * s.length));
    Complex::from_polar(log_mod.exp(), phase)
}

/// Langevin noise amplitude `sqrt(1 - exp(-Gamma L))`.
pub fn langevin_noise_norm<T: Scalar>(loss: T, length: T) -> Result<T> {
    check_loss_length(loss, length)?;
    Ok((-(-loss * length).exp_m1()).sqrt())
}
