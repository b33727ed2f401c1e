//! Randomized identity audit over every model.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ringsim_core::add_drop::{noise_commutators, transfer_matrix, AddDropParams};
use ringsim_core::attenuation::{continuum_commutator_coefficient, piecewise_commutator_coefficient, LossSegment};
use ringsim_core::hom::{analyze, entropy_one_photon, p11_closed, p11_from_state, wick_vacuum_norm};
use ringsim_core::single_bus::{
    commutator_sum_identity, inm_bruteforce, match_rates, ovpa_transfer, ovpa_transfer_series, series_tail_bound,
};
use ringsim_core::{CouplerParams, Mat2, RingError, RingParams};

use crate::format::{format_number, Cell, Table};

type C = Complex<f64>;

/// Outcome for one identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub seed: u64,
    pub records: Vec<AuditRecord>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.records.iter().filter(|r| !r.passed).map(|r| r.name).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["identity[name]", "samples[1]", "max_residual[1]", "tolerance[1]", "pass[bool]"]);
        for r in &self.records {
            t.push(vec![
                Cell::Text(r.name),
                r.samples.into(),
                r.max_residual.into(),
                r.tolerance.into(),
                Cell::Bool(r.passed),
            ]);
        }
        t
    }

    /// One line per identity.
    pub fn lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                format!(
                    "{} {} samples={} max_residual={} tolerance={}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.samples,
                    format_number(r.max_residual),
                    format_number(r.tolerance)
                )
            })
            .collect()
    }
}

struct Identity {
    name: &'static str,
    tolerance: f64,
    eval: fn(&mut ChaCha8Rng) -> Result<f64, RingError>,
}

const MAX_DRAWS: usize = 64;

const IDENTITIES: &[Identity] = &[
    Identity { name: "single_bus.power_conservation", tolerance: 1e-12, eval: power_conservation },
    Identity { name: "single_bus.commutator_sum", tolerance: 1e-12, eval: commutator_sum },
    Identity { name: "single_bus.series_tail_bound", tolerance: 1e-12, eval: series_tail },
    Identity { name: "single_bus.double_sum_oracle", tolerance: 1e-8, eval: double_sum },
    Identity { name: "single_bus.rate_forms", tolerance: 1e-12, eval: rate_forms },
    Identity { name: "attenuation.continuum_unitarity", tolerance: 1e-10, eval: continuum },
    Identity { name: "attenuation.piecewise_unitarity", tolerance: 1e-10, eval: piecewise },
    Identity { name: "add_drop.network_transfer", tolerance: 1e-12, eval: network_transfer },
    Identity { name: "add_drop.noise_commutator_network", tolerance: 1e-12, eval: noise_network },
    Identity { name: "add_drop.noise_commutator_psd", tolerance: 1e-12, eval: noise_psd },
    Identity { name: "add_drop.lossless_unitarity", tolerance: 1e-12, eval: lossless_unitarity },
    Identity { name: "hom.sector_normalization", tolerance: 1e-10, eval: sector_normalization },
    Identity { name: "hom.density_matrices", tolerance: 1e-10, eval: density_matrices },
    Identity { name: "hom.vacuum_wick", tolerance: 1e-8, eval: vacuum_wick },
    Identity { name: "hom.vacuum_environment_gram", tolerance: 1e-8, eval: vacuum_gram },
    Identity { name: "hom.p11_dual_route_lossless", tolerance: 1e-8, eval: p11_dual_route },
    Identity { name: "hom.p11_permanent_ratio", tolerance: 1e-10, eval: p11_permanent_ratio },
    Identity { name: "hom.entropy_bounds", tolerance: 1e-12, eval: entropy_bounds },
];

/// Runs every identity on `samples` random parameter points drawn from `seed`.
pub fn run_audit(seed: u64, samples: usize) -> AuditReport {
    let records = IDENTITIES
        .par_iter()
        .enumerate()
        .map(|(k, id)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut max_residual = 0.0_f64;
            for _ in 0..samples {
                let r = (0..MAX_DRAWS).find_map(|_| (id.eval)(&mut rng).ok()).unwrap_or(f64::INFINITY);
                max_residual = if r.is_nan() { f64::INFINITY } else { max_residual.max(r.abs()) };
            }
            AuditRecord {
                name: id.name,
                samples,
                max_residual,
                tolerance: id.tolerance,
                passed: max_residual <= id.tolerance,
            }
        })
        .collect();
    AuditReport { seed, records }
}

fn phase(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

fn coupler(rng: &mut ChaCha8Rng, max: f64) -> Result<CouplerParams<f64>, RingError> {
    let t = rng.gen_range(0.0..max);
    CouplerParams::from_magnitude(t, phase(rng), phase(rng))
}

fn ring(rng: &mut ChaCha8Rng, alpha_min: f64) -> Result<RingParams<f64>, RingError> {
    let alpha = rng.gen_range(alpha_min..=1.0);
    RingParams::from_alpha(alpha, phase(rng))
}

fn add_drop_point(rng: &mut ChaCha8Rng, alpha_min: f64) -> Result<AddDropParams<f64>, RingError> {
    Ok(AddDropParams::new(coupler(rng, 1.0)?, coupler(rng, 1.0)?, ring(rng, alpha_min)?))
}

fn power_conservation(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let (c, r) = (coupler(rng, 1.0)?, ring(rng, 0.0)?);
    Ok(ovpa_transfer(&c, &r)?.power_residual())
}

fn bounded_pair(rng: &mut ChaCha8Rng, limit: f64) -> Result<(CouplerParams<f64>, RingParams<f64>), RingError> {
    let (c, r) = (coupler(rng, 1.0)?, ring(rng, 0.0)?);
    if c.through().norm() * r.alpha() > limit {
        return Err(RingError::Domain("outside sampling region".into()));
    }
    Ok((c, r))
}

fn commutator_sum(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let (c, r) = bounded_pair(rng, 0.99)?;
    let s = commutator_sum_identity(&c, &r)?;
    Ok(s.analytic - s.closed)
}

fn series_tail(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let (c, r) = bounded_pair(rng, 0.99)?;
    let n = rng.gen_range(0..200);
    let err = (ovpa_transfer_series(&c, &r, n) - ovpa_transfer(&c, &r)?.transfer).norm();
    Ok((err - series_tail_bound(&c, &r, n)).max(0.0))
}

fn double_sum(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let c = coupler(rng, 0.9)?;
    let r = ring(rng, 0.0)?;
    Ok(inm_bruteforce(&c, &r, 200, 200) - commutator_sum_identity(&c, &r)?.closed)
}

fn rate_forms(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let tau = rng.gen_range(1e-3..=1.0);
    let alpha = rng.gen_range(1e-3..=1.0);
    Ok(match_rates(tau, alpha, rng.gen_range(0.1..10.0))?.form_mismatch())
}

fn continuum(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let c = continuum_commutator_coefficient::<f64>(rng.gen_range(0.0..3.0), rng.gen_range(0.01..3.0))?;
    Ok((c.analytic - 1.0).abs().max((c.quadrature - 1.0).abs()))
}

fn piecewise(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let segments = (0..5)
        .map(|_| LossSegment::new(rng.gen_range(0.01..2.0), rng.gen_range(0.0..3.0), rng.gen_range(-10.0..10.0)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(piecewise_commutator_coefficient(&segments)? - 1.0)
}

/// Full scattering matrix of the add/drop ring written as a lossless network, with
/// each half of the ring a partially transmitting element fed by its own environment
/// mode. Rows are outputs `(c, d)`, columns are inputs `(a, b, e_plus, e_minus)`.
pub fn network_outputs(params: &AddDropParams<f64>) -> Result<[[C; 4]; 2], RingError> {
    let (tau, kappa) = (params.coupler1.through(), params.coupler1.cross());
    let (eta, gamma) = (params.coupler2.through(), params.coupler2.cross());
    let (hp, hm) = params.half_factors();
    let leak = |h: C| (1.0 - h.norm_sqr()).max(0.0).sqrt();
    let (np, nm) = (leak(hp), leak(hm));
    // Field leaving coupler 1 into the ring, r, and leaving coupler 2 into the ring, s:
    // r = -kappa* a + tau* (hm s + nm e_m),  s = -gamma* b + eta* (hp r + np e_p).
    let d = C::new(1.0, 0.0) - tau.conj() * eta.conj() * hp * hm;
    if d.norm() == 0.0 {
        return Err(RingError::ResonantDivergence);
    }
    let solve = |src_r: C, src_s: C| {
        // r = src_r + tau* hm s, s = src_s + eta* hp r
        let r = (src_r + tau.conj() * hm * src_s) / d;
        let s = src_s + eta.conj() * hp * r;
        (r, s)
    };
    let zero = C::new(0.0, 0.0);
    let mut out = [[zero; 4]; 2];
    let sources = [
        (-kappa.conj(), zero, C::new(1.0, 0.0), zero, zero, zero),
        (zero, -gamma.conj(), zero, C::new(1.0, 0.0), zero, zero),
        (zero, eta.conj() * np, zero, zero, C::new(np, 0.0), zero),
        (tau.conj() * nm, zero, zero, zero, zero, C::new(nm, 0.0)),
    ];
    for (k, (src_r, src_s, a, b, ep, em)) in sources.into_iter().enumerate() {
        let (r, s) = solve(src_r, src_s);
        // Ring field arriving at coupler 1 and at coupler 2.
        let at1 = hm * s + em;
        let at2 = hp * r + ep;
        out[0][k] = tau * a + kappa * at1;
        out[1][k] = eta * b + gamma * at2;
    }
    Ok(out)
}

/// `[F_i, F_j^dag] = sum_k U_ik U_jk*` over the environment columns of [`network_outputs`].
pub fn network_noise_commutators(params: &AddDropParams<f64>) -> Result<Mat2<f64>, RingError> {
    let u = network_outputs(params)?;
    let g = |i: usize, j: usize| u[i][2] * u[j][2].conj() + u[i][3] * u[j][3].conj();
    Ok(Mat2::new(g(0, 0), g(0, 1), g(1, 0), g(1, 1)))
}

fn network_transfer(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = add_drop_point(rng, 0.0)?;
    let m = transfer_matrix(&p)?.m;
    let u = network_outputs(&p)?;
    let direct = Mat2::new(u[0][0], u[0][1], u[1][0], u[1][1]);
    let scale = 1.0 + m.max_abs();
    let unit = (0..2).map(|i| (u[i].iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    Ok((m.max_abs_diff(&direct) / scale).max(unit))
}

fn noise_network(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = add_drop_point(rng, 0.0)?;
    let nc = noise_commutators(&transfer_matrix(&p)?)?;
    Ok(nc.comm.max_abs_diff(&network_noise_commutators(&p)?))
}

fn noise_psd(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = add_drop_point(rng, 0.0)?;
    let ev = noise_commutators(&transfer_matrix(&p)?)?.eigenvalues();
    Ok((-ev[0]).max(ev[1] - 1.0).max(0.0))
}

fn lossless_unitarity(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = AddDropParams::new(coupler(rng, 0.999)?, coupler(rng, 0.999)?, RingParams::from_alpha(1.0, phase(rng))?);
    let tm = transfer_matrix(&p)?;
    Ok(tm.m.unitarity_residual().max(noise_commutators(&tm)?.comm.max_abs()))
}

fn sector_normalization(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let d = analyze(&add_drop_point(rng, 0.05)?)?.density;
    let negative = (-d.p0).max(-d.p1).max(-d.p2).max(0.0);
    Ok((d.p0 + d.p1 + d.p2 - 1.0).abs().max(negative))
}

fn density_matrices(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let d = analyze(&add_drop_point(rng, 0.05)?)?.density;
    let mut worst = 0.0_f64;
    if let Some(r) = d.rho1 {
        let ev = r.hermitian_eigenvalues();
        worst = worst.max(r.hermiticity_residual()).max((r.trace() - 1.0).norm()).max(-ev[0]);
    }
    if let Some(r) = d.rho2 {
        let ev = r.hermitian_eigenvalues();
        worst = worst.max(r.hermiticity_residual()).max((r.trace() - 1.0).norm()).max(-ev[0]);
    }
    Ok(worst)
}

fn vacuum_wick(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let a = analyze(&add_drop_point(rng, 0.05)?)?;
    Ok(wick_vacuum_norm(&a.state, &a.comms) - a.density.p0)
}

/// `p0` from the environment Gram matrix `G = I - M^dag M` of the two input photons.
fn vacuum_gram(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = add_drop_point(rng, 0.05)?;
    let a = analyze(&p)?;
    let m = a.transfer.m;
    let g = Mat2::identity() - m.adjoint() * m;
    let p0 = (g[(0, 0)] * g[(1, 1)] + g[(0, 1)] * g[(1, 0)]).re;
    Ok(p0 - a.density.p0)
}

fn p11_dual_route(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = AddDropParams::new(coupler(rng, 1.0)?, coupler(rng, 1.0)?, RingParams::from_alpha(1.0, phase(rng))?);
    Ok(p11_closed(&p)? - p11_from_state(&p)?)
}

fn p11_permanent_ratio(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let p = add_drop_point(rng, 0.05)?;
    let m = transfer_matrix(&p)?.m;
    let ratio = (m.permanent() / m.det()).norm_sqr();
    Ok((p11_closed(&p)? - ratio) / ratio.max(1.0))
}

fn entropy_bounds(rng: &mut ChaCha8Rng) -> Result<f64, RingError> {
    let d = analyze(&add_drop_point(rng, 0.05)?)?.density;
    let s = entropy_one_photon(d.rho1.as_ref())?;
    Ok((-s).max(s - 1.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_report_is_well_formed() {
        let r = run_audit(7, 1);
        assert_eq!(r.records.len(), IDENTITIES.len());
        assert!(r.records.iter().all(|x| x.samples == 1 && x.max_residual.is_finite()));
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(r.to_table().rows.len(), IDENTITIES.len());
    }

    #[test]
    fn report_is_deterministic_and_verdicts_seed_independent() {
        let a = run_audit(1, 50);
        assert_eq!(a, run_audit(1, 50));
        let b = run_audit(2, 50);
        let verdicts = |r: &AuditReport| r.records.iter().map(|x| x.passed).collect::<Vec<_>>();
        assert_eq!(verdicts(&a), verdicts(&b));
        assert!(a.passed(), "{:?}", a.lines());
    }

    #[test]
    fn network_matches_single_bus_noise_when_drop_is_decoupled() {
        for (tau, alpha, theta) in [(0.3, 0.9, 0.2), (0.8, 0.5, -1.0), (0.0, 0.99, 3.0)] {
            let p = AddDropParams::real(tau, 1.0, alpha, theta).unwrap();
            let nc = network_noise_commutators(&p).unwrap();
            let single =
                ovpa_transfer(&CouplerParams::real(tau).unwrap(), &RingParams::from_alpha(alpha, theta).unwrap())
                    .unwrap()
                    .noise_power;
            assert!((nc[(0, 0)].re - single).abs() < 1e-14);
        }
    }
}
