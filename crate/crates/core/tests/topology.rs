mod common;

use common::{bfs_hops, rng};
use mec_offload::range::ValueRange;
use mec_offload::topology::{
    build_infrastructure, BaseStation, EdgeInfrastructure, ReservationRequest, RoutePath, RouteWeight, TopologyConfig,
    WiredLink,
};
use mec_offload::{Constraint, Error};
use proptest::prelude::*;
use rand::Rng;

fn station(id: usize, cap: f64) -> BaseStation {
    BaseStation {
        id,
        compute_capacity_total: cap,
        compute_available: cap,
        tx_power: 1.0,
        distance_to_md: 100.0 + id as f64,
    }
}

fn link(a: usize, b: usize, bw: f64) -> WiredLink {
    WiredLink {
        endpoints: (a, b),
        bandwidth_total: bw,
        bandwidth_available: bw,
    }
}

fn line() -> EdgeInfrastructure {
    EdgeInfrastructure::new(
        vec![station(0, 4.0), station(1, 2.5), station(2, 4.0)],
        vec![link(0, 1, 40.0), link(1, 2, 25.0)],
        RouteWeight::Hops,
    )
    .unwrap()
}

/// Cheapest simple-path cost by exhaustive enumeration.
fn brute_force(infra: &EdgeInfrastructure, src: usize, dst: usize, weight: &dyn Fn(usize) -> f64) -> f64 {
    fn go(
        infra: &EdgeInfrastructure,
        u: usize,
        dst: usize,
        seen: &mut Vec<bool>,
        acc: f64,
        weight: &dyn Fn(usize) -> f64,
        best: &mut f64,
    ) {
        if u == dst {
            *best = best.min(acc);
            return;
        }
        for (li, l) in infra.links.iter().enumerate() {
            let v = match l.endpoints {
                (a, b) if a == u => b,
                (a, b) if b == u => a,
                _ => continue,
            };
            if !seen[v] {
                seen[v] = true;
                go(infra, v, dst, seen, acc + weight(li), weight, best);
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; infra.station_count()];
    seen[src] = true;
    let mut best = f64::INFINITY;
    go(infra, src, dst, &mut seen, 0.0, weight, &mut best);
    best
}

fn assert_valid_path(infra: &EdgeInfrastructure, p: &RoutePath, src: usize, dst: usize) {
    if src == dst {
        assert!(p.is_empty() && p.stations.is_empty());
        return;
    }
    assert_eq!(p.stations.first(), Some(&src));
    assert_eq!(p.stations.last(), Some(&dst));
    assert_eq!(p.stations.len(), p.links.len() + 1);
    for (i, &l) in p.links.iter().enumerate() {
        let (a, b) = infra.links[l].endpoints;
        let (u, v) = (p.stations[i], p.stations[i + 1]);
        assert!((a, b) == (u, v) || (a, b) == (v, u));
    }
}

#[test]
fn line_graph_path() {
    let g = line();
    let p = g.shortest_path(0, 2).unwrap();
    assert_eq!(p.stations, vec![0, 1, 2]);
    assert_eq!(p.links, vec![0, 1]);
    assert!(g.shortest_path(1, 1).unwrap().is_empty());
    assert_eq!(g.path_min_bandwidth(&p), 25.0);
    assert_eq!(g.path_min_bandwidth(&RoutePath::default()), f64::INFINITY);
    assert_eq!(g.path_min_bandwidth(&g.shortest_path(0, 1).unwrap()), 40.0);
}

#[test]
fn ranges_respected_and_degenerate_range_constant() {
    let cfg = TopologyConfig::default();
    let g = build_infrastructure(&cfg, &mut rng(3)).unwrap();
    assert_eq!(g.station_count(), 10);
    assert!(g.stations.iter().all(|s| (2.0..=6.0).contains(&s.compute_capacity_total)));
    assert!(g.links.iter().all(|l| (20.0..=100.0).contains(&l.bandwidth_total)));
    let flat = TopologyConfig {
        compute_ghz: ValueRange::constant(4.0),
        ..cfg.clone()
    };
    let g = build_infrastructure(&flat, &mut rng(3)).unwrap();
    assert!(g.stations.iter().all(|s| s.compute_capacity_total == 4.0));
    assert_eq!(build_infrastructure(&cfg, &mut rng(9)).unwrap(), build_infrastructure(&cfg, &mut rng(9)).unwrap());
}

#[test]
fn reservation_examples() {
    let mut g = line();
    let before = g.clone();
    let zero = ReservationRequest {
        compute: vec![(1, 0.0)],
        bandwidth: vec![],
    };
    let r = g.reserve(&zero).unwrap();
    assert_eq!(g.stations, before.stations);
    g.release_slot(&r).unwrap();

    let too_big = ReservationRequest {
        compute: vec![(0, 1.0), (1, 3.0)],
        bandwidth: vec![],
    };
    match g.reserve(&too_big) {
        Err(Error::Infeasible { constraint, .. }) => assert_eq!(constraint, Constraint::C5),
        other => panic!("expected C5, got {other:?}"),
    }
    assert_eq!(g, before);

    let two = ReservationRequest {
        compute: vec![(1, 1.0), (1, 1.0)],
        bandwidth: vec![],
    };
    let r = g.reserve(&two).unwrap();
    assert!((g.stations[1].compute_available - 0.5).abs() < 1e-12);
    g.release_slot(&r).unwrap();
    assert_eq!(g, before);

    let path = g.shortest_path(0, 1).unwrap();
    let mixed = ReservationRequest {
        compute: vec![(2, 0.5)],
        bandwidth: vec![(path, 5.0)],
    };
    let r = g.reserve(&mixed).unwrap();
    assert_eq!(g.links[0].bandwidth_available, 35.0);
    assert_eq!(g.stations[2].compute_available, 3.5);
    g.release_slot(&r).unwrap();
    assert_eq!(g, before);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hop_paths_match_bfs(seed in any::<u64>(), n in 2usize..9) {
        let cfg = TopologyConfig { stations: n, ..TopologyConfig::default() };
        let g = build_infrastructure(&cfg, &mut rng(seed)).unwrap();
        for src in 0..n {
            for dst in 0..n {
                let p = g.shortest_path(src, dst).unwrap();
                assert_valid_path(&g, &p, src, dst);
                prop_assert_eq!(Some(p.hops()), bfs_hops(&g, src, dst));
            }
        }
    }

    #[test]
    fn weighted_paths_match_enumeration(seed in any::<u64>(), n in 2usize..7) {
        let cfg = TopologyConfig {
            stations: n,
            routing: RouteWeight::InverseBandwidth,
            ..TopologyConfig::default()
        };
        let g = build_infrastructure(&cfg, &mut rng(seed)).unwrap();
        let w = |l: usize| 1.0 / g.links[l].bandwidth_total;
        for src in 0..n {
            for dst in 0..n {
                let p = g.shortest_path(src, dst).unwrap();
                assert_valid_path(&g, &p, src, dst);
                let cost: f64 = p.links.iter().map(|&l| w(l)).sum();
                let best = brute_force(&g, src, dst, &w);
                prop_assert!((cost - best).abs() <= 1e-12 * best.max(1.0));
            }
        }
    }

    #[test]
    fn release_restores_ledger_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut g = build_infrastructure(&TopologyConfig::default(), &mut r).unwrap();
        let original = g.clone();
        let mut receipts = Vec::new();
        for _ in 0..r.random_range(1..6) {
            let a = r.random_range(0..g.station_count());
            let b = r.random_range(0..g.station_count());
            let req = ReservationRequest {
                compute: vec![(a, r.random_range(0.0..1.5))],
                bandwidth: vec![(g.shortest_path(a, b).unwrap(), r.random_range(0.0..15.0))],
            };
            if let Ok(rc) = g.reserve(&req) {
                receipts.push(rc);
            }
        }
        for s in &g.stations {
            prop_assert!(s.compute_available >= 0.0 && s.compute_available <= s.compute_capacity_total);
        }
        while let Some(rc) = receipts.pop() {
            g.release_slot(&rc).unwrap();
        }
        prop_assert_eq!(g, original);
    }
}
