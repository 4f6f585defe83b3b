use mec_offload::orchestrator::{evaluate_policy, run_cell, Agents, Cell, ExperimentConfig, Scheme, Setup};

fn small(scheme: Scheme, episodes: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.run.scheme = scheme;
    cfg.run.episodes = episodes;
    cfg.run.slots = 20;
    cfg.run.eval_episodes = 2;
    cfg.td3.batch_size = 8;
    cfg.ddqn.batch_size = 8;
    cfg
}

fn cell(scheme: Scheme, seed: u64) -> Cell {
    Cell { scheme, cp_md: 0.6, seed }
}

#[test]
fn transition_counts_for_one_episode() {
    let cfg = small(Scheme::Cdadrl, 1);
    let (log, _) = run_cell(&cfg, cell(Scheme::Cdadrl, 3), None).unwrap();
    let slots = &log.training[0].slots;
    assert_eq!(slots.len(), 20);
    assert_eq!(log.md_transitions, 20);
    let expect: usize = slots.iter().filter(|s| s.x > 0.0).map(|s| s.hosts.len()).sum();
    assert_eq!(log.ei_transitions, expect);
    for s in slots {
        assert_eq!(s.stage_rewards.len(), s.hosts.len());
        if s.x == 0.0 {
            assert!(s.hosts.is_empty());
        }
    }
}

#[test]
fn same_seed_same_logs() {
    let cfg = small(Scheme::Cdadrl, 3);
    let (a, ga) = run_cell(&cfg, cell(Scheme::Cdadrl, 11), None).unwrap();
    let (b, gb) = run_cell(&cfg, cell(Scheme::Cdadrl, 11), None).unwrap();
    assert_eq!(a.training, b.training);
    assert_eq!(a.evaluation, b.evaluation);
    assert_eq!(ga.fingerprint(), gb.fingerprint());
    let (c, _) = run_cell(&cfg, cell(Scheme::Cdadrl, 12), None).unwrap();
    assert_ne!(a.training, c.training);
}

#[test]
fn frozen_agents_on_repeated_workload_give_constant_reward() {
    let mut cfg = small(Scheme::Cdadrl, 4);
    cfg.run.learning = false;
    cfg.run.repeat_workload = true;
    let (log, _) = run_cell(&cfg, cell(Scheme::Cdadrl, 5), None).unwrap();
    let first = log.training[0].cumulative_reward();
    for ep in &log.training {
        assert_eq!(ep.cumulative_reward(), first);
    }
}

#[test]
fn binary_offloads_half_the_time() {
    let cfg = small(Scheme::Binary, 500);
    let (log, _) = run_cell(&cfg, cell(Scheme::Binary, 2), None).unwrap();
    let xs: Vec<f64> = log.training.iter().flat_map(|e| e.slots.iter().map(|s| s.x)).collect();
    assert_eq!(xs.len(), 10_000);
    assert!(xs.iter().all(|&x| x == 0.0 || x == 1.0));
    let frac = xs.iter().filter(|&&x| x == 0.0).count() as f64 / xs.len() as f64;
    let sigma = (0.25f64 / xs.len() as f64).sqrt();
    assert!((frac - 0.5).abs() <= 3.0 * sigma, "local fraction {frac}");
}

#[test]
fn evaluation_leaves_agents_untouched_and_repeats() {
    let cfg = small(Scheme::Cdadrl, 2);
    let c = cell(Scheme::Cdadrl, 7);
    let (_, agents) = run_cell(&cfg, c, None).unwrap();
    let setup = Setup::new(&cfg, c.cp_md, c.seed).unwrap();
    let before = agents.fingerprint();
    let a = evaluate_policy(&agents, &setup, c, 3).unwrap();
    assert_eq!(agents.fingerprint(), before);
    let b = evaluate_policy(&agents, &setup, c, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn local_only_never_touches_the_edge() {
    let cfg = small(Scheme::Local, 3);
    let (log, agents) = run_cell(&cfg, cell(Scheme::Local, 1), None).unwrap();
    assert!(agents.ratio.is_none() && agents.placement.is_none());
    assert_eq!(log.ei_transitions, 0);
    for s in log.training.iter().chain(&log.evaluation).flat_map(|e| &e.slots) {
        assert_eq!(s.x, 0.0);
        assert_eq!((s.edge_delay, s.usage_charge), (0.0, 0.0));
        assert_eq!(s.execution_delay, s.local_delay);
    }
}

#[test]
fn every_scheme_builds_the_agents_it_needs() {
    let cfg = small(Scheme::Cdadrl, 1);
    let setup = Setup::new(&cfg, 1.0, 0).unwrap();
    for s in Scheme::ALL {
        let a = Agents::new(s, &cfg, &setup, 0);
        assert_eq!(a.ratio.is_some(), s.continuous_mode().is_some(), "{s}");
        assert_eq!(a.placement.is_some(), s.discrete_mode().is_some(), "{s}");
    }
}
