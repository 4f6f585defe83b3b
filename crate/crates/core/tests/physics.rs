mod common;

use common::{compare, oracle, random_scenario, rel_err, rng, run_module, OracleInputs};
use mec_offload::cost::{CostModel, CostWeights};
use mec_offload::edge_exec::{access_rates, evaluate_edge, PlacementRecord, Pricing};
use mec_offload::local_exec::local_energy;
use mec_offload::workload::{channel_gain, link_rate, Channel};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn module_matches_oracle_on_random_slots() {
    let mut r = rng(2024);
    let channel = Channel::default();
    let mut worst = 0.0f64;
    for _ in 0..1500 {
        let s = random_scenario(&mut r);
        let alpha = r.random_range(0.1..2.0);
        let beta = r.random_range(0.01..1.0);
        let (a, b) = (r.random::<f64>(), r.random::<f64>());
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let omega = [lo, hi - lo, 1.0 - hi];
        let model = CostModel {
            weights: CostWeights {
                delay: omega[0],
                energy: omega[1],
                charge: omega[2],
            },
            normalization: None,
        };
        let placement = PlacementRecord::route(&s.infra, s.infra.access_station(), s.hosts.clone()).unwrap();
        let m = run_module(&s, &placement, &channel, Pricing { alpha, beta }, &model);
        let o = oracle(&OracleInputs {
            task: &s.task,
            x: s.x,
            md: &s.md,
            infra: &s.infra,
            channel: &channel,
            placement: &placement,
            alpha,
            beta,
            omega,
        });
        for (name, e) in compare(&m, &o) {
            assert!(e <= 1e-9, "{name} relative error {e} (x = {})", s.x);
            worst = worst.max(e);
        }
    }
    assert!(worst <= 1e-9);
}

#[test]
fn gain_and_rate_examples() {
    let ch = Channel::default();
    assert!(rel_err(channel_gain(100.0, &ch).unwrap(), 1e-3) < 1e-15);
    assert!(rel_err(channel_gain(200.0, &ch).unwrap(), 1.25e-4) < 1e-12);
    assert!(channel_gain(0.0, &ch).is_err());
    let rate = link_rate(0.5, 1e-4, &ch);
    assert!(rel_err(rate, 20e6 * 51f64.log2()) < 1e-12);
    assert!((rate - 1.1345e8).abs() / 1.1345e8 < 1e-4);
    assert_eq!(link_rate(0.5, 0.0, &ch), 0.0);
    let wide = Channel {
        bandwidth_hz: 40e6,
        ..ch.clone()
    };
    assert!(rel_err(link_rate(0.5, 1e-4, &wide), 2.0 * rate) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delay_is_the_slower_branch(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_scenario(&mut r);
        let placement = PlacementRecord::route(&s.infra, s.infra.access_station(), s.hosts.clone()).unwrap();
        let m = run_module(&s, &placement, &Channel::default(), Pricing::default(), &CostModel::default());
        prop_assert!(m.dc >= m.dl && m.dc >= m.edge.edge_delay);
        prop_assert!(m.dc == m.dl || m.dc == m.edge.edge_delay);
        prop_assert!(m.edge.usage_charge >= 0.0 && m.ec >= 0.0);
        if s.x == 0.0 {
            prop_assert_eq!(m.edge.edge_delay, 0.0);
            prop_assert_eq!(m.edge.edge_energy, 0.0);
            prop_assert_eq!(m.edge.usage_charge, 0.0);
        }
        if s.x == 1.0 {
            prop_assert_eq!(m.dl, 0.0);
            prop_assert_eq!(m.el, 0.0);
        }
    }

    #[test]
    fn edge_terms_scale_linearly_in_ratio(seed in any::<u64>(), x in 0.05f64..0.95) {
        let mut r = rng(seed);
        let s = random_scenario(&mut r);
        let placement = PlacementRecord::route(&s.infra, s.infra.access_station(), s.hosts.clone()).unwrap();
        let rates = access_rates(&s.infra, placement.access_station, &Channel::default(), &s.md).unwrap();
        let a = evaluate_edge(&s.task, x, &placement, rates, &s.infra, &s.md, Pricing::default());
        let b = evaluate_edge(&s.task, x / 2.0, &placement, rates, &s.infra, &s.md, Pricing::default());
        prop_assert!(rel_err(2.0 * b.transmission_delay, a.transmission_delay) < 1e-12);
        prop_assert!(rel_err(2.0 * b.processing_delay, a.processing_delay) < 1e-12);
        prop_assert!(rel_err(2.0 * b.usage_charge, a.usage_charge) < 1e-12);
        prop_assert!(rel_err(2.0 * b.edge_energy, a.edge_energy) < 1e-12);
    }

    #[test]
    fn local_energy_linear_in_local_share(seed in any::<u64>(), x in 0.0f64..0.9) {
        let mut r = rng(seed);
        let s = random_scenario(&mut r);
        let full = local_energy(&s.task, x, &s.md).unwrap();
        let half = local_energy(&s.task, 1.0 - (1.0 - x) / 2.0, &s.md).unwrap();
        prop_assert!(rel_err(2.0 * half, full) < 1e-12);
    }
}
