//! Shared scenario generators and a from-scratch evaluation of the slot physics.
#![allow(dead_code)]

use mec_offload::cost::{task_cost, CostModel};
use mec_offload::edge_exec::{access_rates, evaluate_edge, EdgeOutcome, PlacementRecord, Pricing};
use mec_offload::local_exec::{local_delay, local_energy, partition_into_groups, MobileDevice};
use mec_offload::topology::{build_infrastructure, EdgeInfrastructure, TopologyConfig};
use mec_offload::workload::{generate_task, Channel, Task, WorkloadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn device(cp: f64) -> MobileDevice {
    MobileDevice {
        compute_capacity: cp,
        tx_power: 0.5,
        rx_power: 0.1,
        capacitance_coefficient: 1e-26,
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }
}

/// One randomly drawn slot: infrastructure, task, ratio and hosts.
pub struct Scenario {
    pub infra: EdgeInfrastructure,
    pub task: Task,
    pub x: f64,
    pub hosts: Vec<usize>,
    pub md: MobileDevice,
}

pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    let topo = TopologyConfig {
        stations: rng.random_range(2..=12),
        ..TopologyConfig::default()
    };
    let infra = build_infrastructure(&topo, rng).expect("default topology is buildable");
    let task = generate_task(&WorkloadConfig::default(), 0, rng);
    let x = match rng.random_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random::<f64>(),
    };
    let hosts = (0..task.chain.len())
        .map(|_| rng.random_range(0..infra.station_count()))
        .collect();
    let md = device(rng.random_range(0.6..=1.6));
    Scenario {
        infra,
        task,
        x,
        hosts,
        md,
    }
}

/// Every quantity of one slot, evaluated term by term from the model definitions.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub dl: f64,
    pub el: f64,
    pub dt: f64,
    pub dp_e: f64,
    pub de: f64,
    pub eu: f64,
    pub ed: f64,
    pub ee: f64,
    pub uc: f64,
    pub dc: f64,
    pub ec: f64,
    pub cost: f64,
}

pub struct OracleInputs<'a> {
    pub task: &'a Task,
    pub x: f64,
    pub md: &'a MobileDevice,
    pub infra: &'a EdgeInfrastructure,
    pub channel: &'a Channel,
    pub placement: &'a PlacementRecord,
    pub alpha: f64,
    pub beta: f64,
    pub omega: [f64; 3],
}

pub fn oracle(inp: &OracleInputs) -> Oracle {
    let t = inp.task;
    let x = inp.x;
    let n = t.chain.vnfs.len();
    let d = t.input_bits;
    let c = t.cycles_per_bit;
    let cp: Vec<f64> = t.chain.vnfs.iter().map(|v| v.compute_demand).collect();
    let di: Vec<f64> = t.chain.vnfs.iter().map(|v| v.instantiation_delay).collect();
    let xi: Vec<f64> = t.chain.vnfs.iter().map(|v| v.output_ratio).collect();
    // xi_prev[i] = output ratio of VNF i-1, 1 for the first VNF
    let xi_prev: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { xi[i - 1] }).collect();

    // Local: greedy consecutive groups under the device budget.
    let mut groups: Vec<Vec<usize>> = vec![vec![]];
    let mut budget = 0.0;
    for i in 0..n {
        let last = groups.last_mut().unwrap();
        if !last.is_empty() && budget + cp[i] > inp.md.compute_capacity {
            groups.push(vec![i]);
            budget = cp[i];
        } else {
            last.push(i);
            budget += cp[i];
        }
    }
    let dl = if x == 1.0 {
        0.0
    } else {
        let mut total = 0.0;
        for g in &groups {
            let mut inst: f64 = 0.0;
            for &i in g {
                inst = inst.max(di[i]);
            }
            total += inst;
            for &i in g {
                total += xi_prev[i] * (1.0 - x) * d * c / (cp[i] * 1e9);
            }
        }
        total
    };
    let kappa = inp.md.capacitance_coefficient;
    let mut el = 0.0;
    if x != 1.0 {
        for i in 0..n {
            el += xi_prev[i] * (1.0 - x) * d * c * kappa * (cp[i] * 1e9) * (cp[i] * 1e9);
        }
    }

    // Radio rates.
    let ch = inp.channel;
    let bs = &inp.infra.stations[inp.placement.access_station];
    let g = ch.gain_reference * (bs.distance_to_md / 100.0).powf(-ch.pathloss_exponent);
    let r_up = ch.bandwidth_hz * (1.0 + inp.md.tx_power * g / ch.noise_power).ln() / std::f64::consts::LN_2;
    let r_down = ch.bandwidth_hz * (1.0 + bs.tx_power * g / ch.noise_power).ln() / std::f64::consts::LN_2;

    let xi_n = xi[n - 1];
    let hop_time = |links: &[usize], bits: f64| -> f64 {
        let mut s = 0.0;
        for &l in links {
            s += bits / (inp.infra.links[l].bandwidth_available * 1e6);
        }
        s
    };
    let mut dt = x * d / r_up;
    dt += hop_time(&inp.placement.segments[0].links, x * d);
    for i in 0..n - 1 {
        dt += xi[i] * x * d / (t.chain.inter_vnf_bandwidth[i] * 1e6);
    }
    dt += hop_time(&inp.placement.segments[n].links, xi_n * x * d);
    dt += xi_n * x * d / r_down;

    let mut dp_e = 0.0;
    let mut uc = 0.0;
    for i in 0..n {
        let busy = xi_prev[i] * x * d * c / (cp[i] * 1e9);
        dp_e += busy;
        uc += busy * (-inp.alpha).exp() * (cp[i].exp() - 1.0) * inp.beta;
    }
    let di_max = di.iter().cloned().fold(0.0, f64::max);
    let de = if x == 0.0 { 0.0 } else { di_max + dt + dp_e };
    let eu = x * d / r_up * inp.md.tx_power;
    let ed = xi_n * x * d / r_down * inp.md.rx_power;
    let ee = eu + ed;
    let dc = if dl > de { dl } else { de };
    let ec = el + ee;
    let cost = inp.omega[0] * dc + inp.omega[1] * ec + inp.omega[2] * uc;
    Oracle {
        dl,
        el,
        dt,
        dp_e,
        de,
        eu,
        ed,
        ee,
        uc,
        dc,
        ec,
        cost,
    }
}

/// Breadth-first hop distance.
pub fn bfs_hops(infra: &EdgeInfrastructure, src: usize, dst: usize) -> Option<usize> {
    let n = infra.station_count();
    let mut dist = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for l in &infra.links {
            let (a, b) = l.endpoints;
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (dist[dst] != usize::MAX).then_some(dist[dst])
}

/// Module-side quantities of one slot.
pub struct Module {
    pub dl: f64,
    pub el: f64,
    pub edge: EdgeOutcome,
    pub dc: f64,
    pub ec: f64,
    pub cost: f64,
}

pub fn run_module(s: &Scenario, placement: &PlacementRecord, channel: &Channel, pricing: Pricing, model: &CostModel) -> Module {
    let partition = partition_into_groups(&s.task.chain, &s.md).unwrap();
    let dl = local_delay(&s.task, s.x, &partition).unwrap();
    let el = local_energy(&s.task, s.x, &s.md).unwrap();
    let edge = if s.x > 0.0 {
        let rates = access_rates(&s.infra, placement.access_station, channel, &s.md).unwrap();
        evaluate_edge(&s.task, s.x, placement, rates, &s.infra, &s.md, pricing)
    } else {
        EdgeOutcome::default()
    };
    let r = task_cost(dl, el, edge.edge_delay, edge.edge_energy, edge.usage_charge, model);
    Module {
        dl,
        el,
        edge,
        dc: r.execution_delay,
        ec: r.md_energy,
        cost: r.cost,
    }
}

/// Relative error of every module quantity against the oracle.
pub fn compare(m: &Module, o: &Oracle) -> Vec<(&'static str, f64)> {
    vec![
        ("DL", rel_err(m.dl, o.dl)),
        ("EL", rel_err(m.el, o.el)),
        ("DT", rel_err(m.edge.transmission_delay, o.dt)),
        ("DP_E", rel_err(m.edge.processing_delay, o.dp_e)),
        ("DE", rel_err(m.edge.edge_delay, o.de)),
        ("EU", rel_err(m.edge.upload_energy, o.eu)),
        ("ED", rel_err(m.edge.download_energy, o.ed)),
        ("EE", rel_err(m.edge.edge_energy, o.ee)),
        ("UC", rel_err(m.edge.usage_charge, o.uc)),
        ("DC", rel_err(m.dc, o.dc)),
        ("EC", rel_err(m.ec, o.ec)),
        ("Cost", rel_err(m.cost, o.cost)),
    ]
}
