//! Monte Carlo engine against independent closed-form oracles.

use uplink_core::mcsim::{run_trials, sample_realization, SimulationConfig, UserSampling};
use uplink_core::params::{make_params, outage_probability};
use uplink_core::usercount::{pmf_range, pmf_voronoi};
use uplink_core::{NetworkParams, RawParams};

fn params(lambda_bs_per_km2: f64) -> NetworkParams {
    make_params(&RawParams { lambda_bs_per_km2, ..RawParams::default() }).unwrap()
}

#[test]
fn isolated_single_user_cells_follow_noise_only_ccdf() {
    // Cells ~30 km apart see no measurable interference, so a lone user has
    // SINR = hρ/σ² and P(SINR > θ) = e^{-θσ²/ρ}.
    let p = params(0.001);
    let outcomes = run_trials(&p, &SimulationConfig::new(6_000, 17)).unwrap();
    let lone: Vec<f64> =
        outcomes.iter().filter(|o| o.measured && o.involved == 1).map(|o| o.sinr_scheduled.unwrap()).collect();
    assert!(lone.len() > 1_500, "{}", lone.len());
    for theta in [1.0, 30.0, 100.0, 300.0] {
        let want = (-theta * p.noise_power() / p.rho_target()).exp();
        let got = lone.iter().filter(|&&s| s > theta).count() as f64 / lone.len() as f64;
        assert!(
            (got - want).abs() < 0.01 + 3.0 * (want * (1.0 - want) / lone.len() as f64).sqrt(),
            "θ={theta}: {got} vs {want}"
        );
    }
}

#[test]
fn uncovered_user_fraction_matches_outage_probability() {
    let p = params(20.0);
    let cfg = SimulationConfig { sampling: UserSampling::FullWindow, ..SimulationConfig::new(2_000, 3) };
    let (mut users, mut uncovered) = (0u64, 0u64);
    for t in 0..cfg.trials {
        let r = sample_realization(&p, &cfg, t).unwrap();
        // Users within R of the window edge would see a truncated BS field.
        let inner = r.window_radius - p.achievable_radius();
        for (u, x) in r.user_points.iter().enumerate() {
            if x[0].hypot(x[1]) <= inner {
                users += 1;
                uncovered += u64::from(!r.involved[u]);
            }
        }
    }
    let frac = uncovered as f64 / users as f64;
    assert!((frac - outage_probability(&p)).abs() < 0.01, "{frac} vs {}", outage_probability(&p));
    assert!((outage_probability(&p) - 0.0604).abs() < 5e-4);
}

fn total_variation(empirical: &[f64], model: impl Fn(u32) -> f64) -> f64 {
    let n_max = empirical.len() as u32 + 200;
    (0..n_max).map(|n| (empirical.get(n as usize).copied().unwrap_or(0.0) - model(n)).abs()).sum::<f64>() / 2.0
}

#[test]
fn measured_cell_user_counts_match_valid_model() {
    let cfg = SimulationConfig::new(10_000, 8);
    let p = params(20.0);
    let h = uplink_core::mcsim::user_count_from_outcomes(&run_trials(&p, &cfg).unwrap()).unwrap();
    let tv = total_variation(h.probabilities(), |n| pmf_voronoi(n, &p).unwrap());
    assert!(tv < 0.03, "Voronoi-cell model at 20/km²: TV {tv}");

    let p = params(0.2);
    let h = uplink_core::mcsim::user_count_from_outcomes(&run_trials(&p, &cfg).unwrap()).unwrap();
    let tv = total_variation(h.probabilities(), |n| pmf_range(n, &p));
    assert!(tv < 0.03, "achievable-range model at 0.2/km²: TV {tv}");
}

#[test]
fn both_sampling_modes_agree() {
    let p = params(2.0);
    let thetas = [0.1, 1.0, 10.0];
    let a = SimulationConfig::new(4_000, 21);
    let b = SimulationConfig { sampling: UserSampling::FullWindow, ..a };
    let ca = uplink_core::mcsim::empirical_ccdf(&p, &a, &thetas).unwrap();
    let cb = uplink_core::mcsim::empirical_ccdf(&p, &b, &thetas).unwrap();
    for (x, y) in ca.points.iter().zip(&cb.points) {
        assert!((x.1 - y.1).abs() < 0.04, "{x:?} vs {y:?}");
    }
}

#[test]
fn doubling_the_window_changes_the_ccdf_within_noise() {
    let p = params(20.0);
    let thetas = [0.1, 0.3, 1.0, 3.0, 10.0];
    let base = SimulationConfig::new(4_000, 5);
    let wide = SimulationConfig { window_radius: Some(2.0 * uplink_core::mcsim::default_window(&p)), ..base };
    let a = uplink_core::mcsim::empirical_ccdf(&p, &base, &thetas).unwrap();
    let b = uplink_core::mcsim::empirical_ccdf(&p, &wide, &thetas).unwrap();
    let (sa, sb) = (a.stderr.unwrap(), b.stderr.unwrap());
    for i in 0..thetas.len() {
        let gap = (a.points[i].1 - b.points[i].1).abs();
        let se = sa[i].hypot(sb[i]);
        assert!(gap < 2.0 * se, "theta {}: gap {gap} vs 2se {}", thetas[i], 2.0 * se);
    }
}

#[test]
fn empty_network_yields_no_coverage() {
    let p = make_params(&RawParams { lambda_ue_per_km2: 0.0, ..RawParams::default() }).unwrap();
    let c = uplink_core::mcsim::empirical_ccdf(&p, &SimulationConfig::new(200, 1), &[0.01, 1.0]).unwrap();
    assert!(c.probabilities().all(|v| v == 0.0));
}
