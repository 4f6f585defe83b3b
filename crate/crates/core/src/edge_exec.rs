//! Remote execution of the offloaded share: transmission, processing at the edge,
//! device-side radio energy and the usage charge for rented compute.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_exec::MobileDevice;
use crate::topology::{
    EdgeInfrastructure, ReservationReceipt, ReservationRequest, RoutePath,
};
use crate::workload::{channel_gain, link_rate, Channel, Task, BPS_PER_MBPS};

/// Where each VNF runs plus the routes the data takes between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub hosts: Vec<usize>,
    pub access_station: usize,
    /// `[access -> host_0, host_0 -> host_1, ..., host_{N-1} -> access]`
    pub segments: Vec<RoutePath>,
}

impl PlacementRecord {
    pub fn route(infra: &EdgeInfrastructure, access_station: usize, hosts: Vec<usize>) -> Result<Self> {
        if hosts.is_empty() {
            return Err(Error::usage("placement needs at least one host"));
        }
        let mut stops = Vec::with_capacity(hosts.len() + 2);
        stops.push(access_station);
        stops.extend_from_slice(&hosts);
        stops.push(access_station);
        let segments = stops
            .windows(2)
            .map(|w| infra.shortest_path(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hosts,
            access_station,
            segments,
        })
    }

    pub fn first_segment(&self) -> &RoutePath {
        &self.segments[0]
    }

    pub fn last_segment(&self) -> &RoutePath {
        self.segments.last().expect("segments always has N+1 entries")
    }

    /// Path between the hosts of VNF `i` and VNF `i + 1` (0-based).
    pub fn inter_segment(&self, i: usize) -> &RoutePath {
        &self.segments[i + 1]
    }

    /// Compute for every VNF on its host plus each inter-VNF flow on its path.
    pub fn reservation_request(&self, task: &Task) -> ReservationRequest {
        let chain = &task.chain;
        ReservationRequest {
            compute: self
                .hosts
                .iter()
                .zip(&chain.vnfs)
                .map(|(&h, v)| (h, v.compute_demand))
                .collect(),
            bandwidth: chain
                .inter_vnf_bandwidth
                .iter()
                .enumerate()
                .map(|(i, &br)| (self.inter_segment(i).clone(), br))
                .collect(),
        }
    }
}

pub fn reserve_slot_resources(
    infra: &mut EdgeInfrastructure,
    placement: &PlacementRecord,
    task: &Task,
) -> Result<ReservationReceipt> {
    infra.reserve(&placement.reservation_request(task))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRates {
    /// bits/s
    pub up: f64,
    /// bits/s
    pub down: f64,
}

/// Uplink and downlink rates between the device and `access_station`. The same
/// distance-based gain is used in both directions.
pub fn access_rates(
    infra: &EdgeInfrastructure,
    access_station: usize,
    channel: &Channel,
    md: &MobileDevice,
) -> Result<LinkRates> {
    let bs = &infra.stations[access_station];
    let gain = channel_gain(bs.distance_to_md, channel)?;
    Ok(LinkRates {
        up: link_rate(md.tx_power, gain, channel),
        down: link_rate(bs.tx_power, gain, channel),
    })
}

/// Unit-time price coefficients of the usage charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pricing {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Pricing {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.1,
        }
    }
}

/// Total transmission delay (s): uplink, wired hops to the first host, inter-VNF
/// flows, wired hops back from the last host, downlink.
///
/// Wired hops at the ends divide by each link's available bandwidth; inter-VNF
/// flows divide by the flow's required bandwidth and are charged even when both
/// VNFs share a host.
pub fn transmission_delay(
    task: &Task,
    x: f64,
    placement: &PlacementRecord,
    rates: LinkRates,
    infra: &EdgeInfrastructure,
) -> f64 {
    let sent = x * task.input_bits;
    let result = task.chain.last_output_ratio() * sent;
    let wired = |path: &RoutePath, bits: f64| -> f64 {
        path.links
            .iter()
            .map(|&l| bits / (infra.links[l].bandwidth_available * BPS_PER_MBPS))
            .sum()
    };
    let uplink = sent / rates.up;
    let to_first = wired(placement.first_segment(), sent);
    let between: f64 = task
        .chain
        .inter_vnf_bandwidth
        .iter()
        .enumerate()
        .map(|(i, &br)| task.chain.vnfs[i].output_ratio * sent / (br * BPS_PER_MBPS))
        .sum();
    let from_last = wired(placement.last_segment(), result);
    let downlink = result / rates.down;
    uplink + to_first + between + from_last + downlink
}

/// Processing delay of the offloaded data across the chain (s).
pub fn edge_processing_delay(task: &Task, x: f64) -> f64 {
    let cycles = x * task.cycles();
    task.chain
        .vnfs
        .iter()
        .enumerate()
        .map(|(i, v)| task.chain.input_ratio(i) * cycles / v.compute_hz())
        .sum()
}

pub fn edge_delay(instantiation: f64, transmission: f64, processing: f64) -> f64 {
    instantiation + transmission + processing
}

/// Device-side radio energy for the offloaded share (J).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEnergy {
    pub upload: f64,
    pub download: f64,
}

impl EdgeEnergy {
    pub fn total(&self) -> f64 {
        self.upload + self.download
    }
}

pub fn edge_energy(task: &Task, x: f64, rates: LinkRates, md: &MobileDevice) -> EdgeEnergy {
    let sent = x * task.input_bits;
    EdgeEnergy {
        upload: sent / rates.up * md.tx_power,
        download: task.chain.last_output_ratio() * sent / rates.down * md.rx_power,
    }
}

/// Price per second of holding `compute_ghz` at the edge.
pub fn unit_price(compute_ghz: f64, pricing: Pricing) -> f64 {
    (-pricing.alpha).exp() * compute_ghz.exp_m1() * pricing.beta
}

/// Charge for running the offloaded share: each VNF's busy time times its price.
pub fn usage_charge(task: &Task, x: f64, pricing: Pricing) -> f64 {
    let cycles = x * task.cycles();
    task.chain
        .vnfs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let busy = task.chain.input_ratio(i) * cycles / v.compute_hz();
            busy * unit_price(v.compute_demand, pricing)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EdgeOutcome {
    pub transmission_delay: f64,
    pub processing_delay: f64,
    pub instantiation_delay: f64,
    pub edge_delay: f64,
    pub upload_energy: f64,
    pub download_energy: f64,
    pub edge_energy: f64,
    pub usage_charge: f64,
}

/// Everything the edge side reports back for a placed, offloaded task.
pub fn evaluate_edge(
    task: &Task,
    x: f64,
    placement: &PlacementRecord,
    rates: LinkRates,
    infra: &EdgeInfrastructure,
    md: &MobileDevice,
    pricing: Pricing,
) -> EdgeOutcome {
    let dt = transmission_delay(task, x, placement, rates, infra);
    let dp = edge_processing_delay(task, x);
    let di = task.chain.instantiation_delay();
    let energy = edge_energy(task, x, rates, md);
    EdgeOutcome {
        transmission_delay: dt,
        processing_delay: dp,
        instantiation_delay: di,
        edge_delay: edge_delay(di, dt, dp),
        upload_energy: energy.upload,
        download_energy: energy.download,
        edge_energy: energy.total(),
        usage_charge: usage_charge(task, x, pricing),
    }
}
