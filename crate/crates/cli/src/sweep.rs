//! Parameter sweeps for each output mode.

use rayon::prelude::*;
use ringsim_core::add_drop::{noise_commutators, transfer_matrix, AddDropParams};
use ringsim_core::attenuation::{discrete_commutator_coefficient, discrete_transmission, BeamSplitterChain};
use ringsim_core::hom::{
    coincidence_probability, entropy_grid, level_set_fractions, p11_closed, p11_from_state, GridAxis, HommGrid,
};
use ringsim_core::single_bus::{detuning_grid, ovpa_transfer, power_ratio_comparison};
use ringsim_core::{CouplerParams, RingParams};

use crate::config::{Mode, SweepConfig};
use crate::error::{CliError, Result};
use crate::format::{format_number, Cell, Table};

/// Evaluates the sweep described by `cfg` on the current rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Table> {
    match cfg.mode {
        Mode::SingleBus => single_bus(cfg),
        Mode::LangevinCompare => langevin_compare(cfg),
        Mode::AttenuationChain => attenuation_chain(cfg),
        Mode::AddDrop => add_drop(cfg),
        Mode::HommGrid => homm_grid(cfg),
        Mode::CriticalDip => critical_dip(cfg),
        Mode::EntropyGrid => entropy(cfg),
        Mode::Audit => {
            let report = crate::audit::run_audit(cfg.u64("seed"), cfg.usize("samples"));
            Ok(report.to_table())
        }
    }
}

fn axis(cfg: &SweepConfig, name: &str) -> Vec<f64> {
    let (start, stop, count) = cfg.range(name);
    GridAxis::new(start, stop, count).values()
}

fn grid(cfg: &SweepConfig) -> HommGrid<f64> {
    let ax = |name| {
        let (start, stop, count) = cfg.range(name);
        GridAxis::new(start, stop, count)
    };
    HommGrid { tau: ax("tau"), eta: ax("eta"), theta: ax("theta") }
}

fn single_bus(cfg: &SweepConfig) -> Result<Table> {
    let coupler = CouplerParams::from_magnitude(cfg.f64("tau"), cfg.f64("tau_phase"), cfg.f64("kappa_phase"))?;
    let ring = RingParams::from_alpha(cfg.f64("alpha"), 0.0)?;
    let mut table = Table::new([
        "theta[rad]",
        "transfer_re[1]",
        "transfer_im[1]",
        "transmission[1]",
        "noise_power[1]",
        "power_residual[1]",
    ]);
    let rows: Vec<Vec<Cell>> = axis(cfg, "theta")
        .par_iter()
        .map(|&theta| match ovpa_transfer(&coupler, &ring.at_theta(theta)) {
            Ok(r) => vec![
                theta.into(),
                r.transfer.re.into(),
                r.transfer.im.into(),
                r.transfer.norm_sqr().into(),
                r.noise_power.into(),
                r.power_residual().into(),
            ],
            Err(_) => missing_after(theta, 5),
        })
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn missing_after(x: f64, n: usize) -> Vec<Cell> {
    let mut row = vec![Cell::from(x)];
    row.extend(std::iter::repeat_n(Cell::Missing, n));
    row
}

fn langevin_compare(cfg: &SweepConfig) -> Result<Table> {
    let tr = cfg.f64("round_trip_time");
    let coupler = CouplerParams::real(cfg.f64("tau"))?;
    let ring = RingParams::from_alpha(cfg.f64("alpha"), 0.0)?;
    let deltas = detuning_grid(cfg.usize("per_sign"), tr);
    let rows = power_ratio_comparison(&coupler, &ring, tr, &deltas)?;
    let mut table = Table::new([
        "delta_tr[rad]",
        "delta[rad/s]",
        "p_ovpa[1]",
        "p_langevin[1]",
        "abs_difference[1]",
        "relative_difference[1]",
    ]);
    for r in rows {
        table.push(vec![
            (r.delta * tr).into(),
            r.delta.into(),
            r.ovpa.into(),
            r.langevin.into(),
            r.abs_difference().into(),
            r.relative_difference().into(),
        ]);
    }
    Ok(table)
}

/// `count` integers log-spaced from `start` to `stop`, rounded, duplicates dropped.
pub fn log_counts(start: usize, stop: usize, count: usize) -> Vec<usize> {
    if count == 1 || start == stop {
        return vec![start];
    }
    let ratio = stop as f64 / start as f64;
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                (start as f64 * ratio.powf(i as f64 / (count - 1) as f64)).round() as usize
            }
        })
        .collect();
    out.dedup();
    out
}

fn attenuation_chain(cfg: &SweepConfig) -> Result<Table> {
    let (loss, length, beta) = (cfg.f64("loss"), cfg.f64("length"), cfg.f64("beta"));
    let ns = log_counts(cfg.usize("n_start"), cfg.usize("n_stop"), cfg.usize("n_count"));
    let limit = (-loss * length).exp();
    let rows: Vec<Result<Vec<Cell>>> = ns
        .par_iter()
        .map(|&n| {
            let chain =
                BeamSplitterChain::new(n, loss, length, beta).map_err(|e| CliError::field("n_start", e.to_string()))?;
            let t2 = discrete_transmission(&chain)?.norm_sqr();
            let err = t2 - limit;
            Ok(vec![
                n.into(),
                t2.into(),
                limit.into(),
                err.abs().into(),
                (n as f64 * err.abs()).into(),
                discrete_commutator_coefficient(&chain)?.into(),
            ])
        })
        .collect();
    let mut table = Table::new([
        "n[1]",
        "transmission[1]",
        "continuum_limit[1]",
        "abs_error[1]",
        "n_times_error[1]",
        "commutator[1]",
    ]);
    for r in rows {
        table.push(r?);
    }
    Ok(table)
}

fn add_drop(cfg: &SweepConfig) -> Result<Table> {
    let (tau, eta, alpha) = (cfg.f64("tau"), cfg.f64("eta"), cfg.f64("alpha"));
    AddDropParams::real(tau, eta, alpha, 0.0)?;
    let mut table = Table::new([
        "theta[rad]",
        "power_a_to_c[1]",
        "power_b_to_c[1]",
        "power_a_to_d[1]",
        "power_b_to_d[1]",
        "noise_cc[1]",
        "noise_dd[1]",
        "noise_cd_re[1]",
        "noise_cd_im[1]",
        "p11[1]",
        "coincidence[1]",
    ]);
    let rows: Vec<Vec<Cell>> = axis(cfg, "theta")
        .par_iter()
        .map(|&theta| {
            let row = || -> ringsim_core::Result<Vec<Cell>> {
                let p = AddDropParams::real(tau, eta, alpha, theta)?;
                let tm = transfer_matrix(&p)?;
                let nc = noise_commutators(&tm)?;
                Ok(vec![
                    theta.into(),
                    tm.a_to_c().norm_sqr().into(),
                    tm.b_to_c().norm_sqr().into(),
                    tm.a_to_d().norm_sqr().into(),
                    tm.b_to_d().norm_sqr().into(),
                    nc.get(0, 0).re.into(),
                    nc.get(1, 1).re.into(),
                    nc.get(0, 1).re.into(),
                    nc.get(0, 1).im.into(),
                    p11_closed(&p).ok().into(),
                    coincidence_probability(&p).ok().into(),
                ])
            };
            row().unwrap_or_else(|_| missing_after(theta, 10))
        })
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn homm_grid(cfg: &SweepConfig) -> Result<Table> {
    let (alpha, threshold) = (cfg.f64("alpha"), cfg.f64("threshold"));
    let g = grid(cfg);
    let values = g.map(|t, e, th| AddDropParams::real(t, e, alpha, th).and_then(|p| p11_closed(&p)).ok())?;
    let mut table = Table::new(["tau[1]", "eta[1]", "theta[rad]", "p11[1]"]);
    for (k, v) in values.iter().enumerate() {
        if let Some(p) = v.filter(|p| p.is_finite() && *p <= threshold) {
            let [t, e, th] = g.point(k);
            table.push(vec![t.into(), e.into(), th.into(), p.into()]);
        }
    }
    Ok(table)
}

fn critical_dip(cfg: &SweepConfig) -> Result<Table> {
    let (tau, eta) = (cfg.f64("tau"), cfg.f64("eta"));
    let alphas = cfg.list("alphas");
    let route = cfg.str("route");
    let name = if route == "coincidence" { "coincidence" } else { "p11" };
    let mut columns = vec!["theta[rad]".to_string()];
    columns.extend(alphas.iter().map(|a| format!("{name}[alpha={}]", format_number(*a))));
    let eval = |p: &AddDropParams<f64>| match route {
        "state" => p11_from_state(p),
        "coincidence" => coincidence_probability(p),
        _ => p11_closed(p),
    };
    let rows: Vec<Vec<Cell>> = axis(cfg, "theta")
        .par_iter()
        .map(|&theta| {
            let mut row = vec![Cell::from(theta)];
            for &alpha in &alphas {
                let v = AddDropParams::real(tau, eta, alpha, theta).and_then(|p| eval(&p)).ok();
                row.push(v.into());
            }
            row
        })
        .collect();
    let mut table = Table::new(columns);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn entropy(cfg: &SweepConfig) -> Result<Table> {
    let g = grid(cfg);
    let alphas = cfg.list("alphas");
    if cfg.str("emit") == "points" {
        let mut table = Table::new(["alpha[1]", "tau[1]", "eta[1]", "theta[rad]", "entropy[bit]"]);
        for &alpha in &alphas {
            for (k, s) in entropy_grid(&g, alpha)?.into_iter().enumerate() {
                let [t, e, th] = g.point(k);
                table.push(vec![alpha.into(), t.into(), e.into(), th.into(), s.into()]);
            }
        }
        return Ok(table);
    }
    let levels = cfg.list("levels");
    let mut table = Table::new(["alpha[1]", "level[bit]", "fraction[1]", "defined[1]", "total[1]"]);
    for &alpha in &alphas {
        let values = entropy_grid(&g, alpha)?;
        let defined = values.iter().flatten().count();
        for (level, frac) in levels.iter().zip(level_set_fractions(&values, &levels)) {
            table.push(vec![alpha.into(), (*level).into(), frac.into(), defined.into(), values.len().into()]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigSources;

    fn load(mode: Mode, sets: &[&str]) -> SweepConfig {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        SweepConfig::load(mode, ConfigSources { sets: &sets, ..Default::default() }).unwrap()
    }

    #[test]
    fn log_counts_cover_endpoints() {
        assert_eq!(log_counts(100, 100_000, 4), vec![100, 1000, 10_000, 100_000]);
        assert_eq!(log_counts(1, 3, 10), vec![1, 2, 3]);
        assert_eq!(log_counts(7, 9, 1), vec![7]);
    }

    #[test]
    fn every_mode_produces_rows() {
        let small = ["tau_count=5", "eta_count=5", "theta_count=9"];
        for (mode, sets) in [
            (Mode::SingleBus, &["theta_count=11"][..]),
            (Mode::LangevinCompare, &["per_sign=4"][..]),
            (Mode::AttenuationChain, &["n_stop=1000", "n_count=3"][..]),
            (Mode::AddDrop, &["theta_count=11"][..]),
            (Mode::HommGrid, &["tau_count=5", "eta_count=5", "theta_count=9", "threshold=0.5"][..]),
            (Mode::CriticalDip, &["theta_count=11"][..]),
            (Mode::EntropyGrid, &small[..]),
            (Mode::Audit, &["samples=2"][..]),
        ] {
            let t = run_sweep(&load(mode, sets)).unwrap();
            assert!(!t.rows.is_empty(), "{mode}");
            assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{mode}");
            assert!(t.columns.iter().all(|c| c.contains('[')), "{mode}: {:?}", t.columns);
        }
    }

    #[test]
    fn critical_dip_columns_follow_alphas() {
        let t = run_sweep(&load(Mode::CriticalDip, &["theta_count=3"])).unwrap();
        assert_eq!(t.columns, ["theta[rad]", "p11[alpha=1]", "p11[alpha=0.95]", "p11[alpha=0.75]", "p11[alpha=0.5]"]);
        let Cell::Num(p) = t.rows[1][1] else { panic!() };
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_rejects_too_few_splitters() {
        let cfg = load(Mode::AttenuationChain, &["loss=50", "n_start=10", "n_stop=100"]);
        assert!(matches!(run_sweep(&cfg), Err(CliError::Config { .. })));
    }
}
