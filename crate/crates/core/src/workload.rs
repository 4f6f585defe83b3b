//! Per-slot task generation and the wireless channel model.
//!
//! Units used throughout the crate: 1 Kb = 1000 bits, 1 GHz = 1e9 cycles/s,
//! 1 Mbps = 1e6 bits/s.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::range::{CountRange, ValueRange};

pub const BITS_PER_KB: f64 = 1e3;
pub const HZ_PER_GHZ: f64 = 1e9;
pub const BPS_PER_MBPS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VnfSpec {
    /// 1-based position in the chain.
    pub index_in_chain: usize,
    /// GHz
    pub compute_demand: f64,
    /// s
    pub instantiation_delay: f64,
    /// Output data of this VNF relative to the task input size.
    pub output_ratio: f64,
}

impl VnfSpec {
    pub fn compute_hz(&self) -> f64 {
        self.compute_demand * HZ_PER_GHZ
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceChain {
    pub vnfs: Vec<VnfSpec>,
    /// Mbps between consecutive VNFs; one shorter than `vnfs`.
    pub inter_vnf_bandwidth: Vec<f64>,
}

impl ServiceChain {
    pub fn len(&self) -> usize {
        self.vnfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vnfs.is_empty()
    }

    /// Output ratio of the VNF *before* 0-based position `i`; 1 for the first VNF.
    pub fn input_ratio(&self, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.vnfs[i - 1].output_ratio
        }
    }

    pub fn last_output_ratio(&self) -> f64 {
        self.vnfs.last().map_or(1.0, |v| v.output_ratio)
    }

    /// Largest instantiation delay in the chain.
    pub fn instantiation_delay(&self) -> f64 {
        self.vnfs
            .iter()
            .map(|v| v.instantiation_delay)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub chain: ServiceChain,
    pub input_bits: f64,
    pub cycles_per_bit: f64,
    /// s
    pub deadline: f64,
    pub slot: usize,
}

impl Task {
    /// Total cycles needed to push the whole input through one VNF at ratio 1.
    pub fn cycles(&self) -> f64 {
        self.input_bits * self.cycles_per_bit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadConfig {
    pub input_kbits: ValueRange,
    pub cycles_per_bit: ValueRange,
    pub vnf_count: CountRange,
    pub vnf_compute_ghz: ValueRange,
    pub inter_vnf_mbps: ValueRange,
    pub output_ratio: ValueRange,
    pub deadline_s: ValueRange,
    pub instantiation_delay_s: ValueRange,
    /// Mobile device compute capacity (GHz).
    pub md_compute_ghz: f64,
    /// Largest device capacity any sweep will use; feature normalisation bound.
    pub md_compute_max_ghz: f64,
    /// Effective switched capacitance of the device chip.
    pub capacitance: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self {
            input_kbits: ValueRange::new(800.0, 1000.0),
            cycles_per_bit: ValueRange::new(800.0, 1000.0),
            vnf_count: CountRange::new(3, 5),
            vnf_compute_ghz: ValueRange::new(0.1, 0.5),
            inter_vnf_mbps: ValueRange::new(5.0, 10.0),
            output_ratio: ValueRange::new(0.5, 1.5),
            deadline_s: ValueRange::new(20.0, 35.0),
            instantiation_delay_s: ValueRange::new(0.05, 0.15),
            md_compute_ghz: 0.6,
            md_compute_max_ghz: 1.6,
            capacitance: 1e-26,
        }
    }
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<()> {
        self.input_kbits.validate_positive("workload.input_kbits")?;
        self.cycles_per_bit.validate_positive("workload.cycles_per_bit")?;
        self.vnf_count.validate("workload.vnf_count")?;
        if self.vnf_count.min == 0 {
            return Err(Error::config("workload.vnf_count must be at least 1"));
        }
        self.vnf_compute_ghz.validate_positive("workload.vnf_compute_ghz")?;
        self.inter_vnf_mbps.validate_positive("workload.inter_vnf_mbps")?;
        self.output_ratio.validate_positive("workload.output_ratio")?;
        self.deadline_s.validate_positive("workload.deadline_s")?;
        self.instantiation_delay_s.validate("workload.instantiation_delay_s")?;
        if self.instantiation_delay_s.min < 0.0 {
            return Err(Error::config("workload.instantiation_delay_s must be non-negative"));
        }
        if !(self.md_compute_ghz > 0.0) || !(self.capacitance > 0.0) {
            return Err(Error::config(
                "workload.md_compute_ghz and workload.capacitance must be positive",
            ));
        }
        if self.md_compute_max_ghz < self.md_compute_ghz {
            return Err(Error::config(
                "workload.md_compute_max_ghz must be at least md_compute_ghz",
            ));
        }
        Ok(())
    }
}

/// Draw the task for `slot`. All randomness comes from `rng`.
pub fn generate_task<R: Rng + ?Sized>(config: &WorkloadConfig, slot: usize, rng: &mut R) -> Task {
    let n = config.vnf_count.sample(rng);
    let vnfs = (0..n)
        .map(|i| VnfSpec {
            index_in_chain: i + 1,
            compute_demand: config.vnf_compute_ghz.sample(rng),
            instantiation_delay: config.instantiation_delay_s.sample(rng),
            output_ratio: config.output_ratio.sample(rng),
        })
        .collect();
    let inter_vnf_bandwidth = (1..n).map(|_| config.inter_vnf_mbps.sample(rng)).collect();
    Task {
        chain: ServiceChain {
            vnfs,
            inter_vnf_bandwidth,
        },
        input_bits: config.input_kbits.sample(rng) * BITS_PER_KB,
        cycles_per_bit: config.cycles_per_bit.sample(rng),
        deadline: config.deadline_s.sample(rng),
        slot,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Channel {
    /// Hz
    pub bandwidth_hz: f64,
    /// W
    pub noise_power: f64,
    /// W
    pub md_tx_power: f64,
    /// W
    pub md_rx_power: f64,
    /// Gain at the 100 m reference distance.
    pub gain_reference: f64,
    pub pathloss_exponent: f64,
}

impl Default for Channel {
    fn default() -> Self {
        Self {
            bandwidth_hz: 20e6,
            noise_power: 1e-6,
            md_tx_power: 0.5,
            md_rx_power: 0.1,
            gain_reference: 1e-3,
            pathloss_exponent: 3.0,
        }
    }
}

impl Channel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_power", self.noise_power),
            ("md_tx_power", self.md_tx_power),
            ("md_rx_power", self.md_rx_power),
            ("gain_reference", self.gain_reference),
            ("pathloss_exponent", self.pathloss_exponent),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("channel.{name} must be positive")));
            }
        }
        Ok(())
    }
}

pub const REFERENCE_DISTANCE_M: f64 = 100.0;

/// Log-distance path-loss gain.
pub fn channel_gain(distance_m: f64, ch: &Channel) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::Domain(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(ch.gain_reference * (distance_m / REFERENCE_DISTANCE_M).powf(-ch.pathloss_exponent))
}

/// Shannon capacity in bits/s.
pub fn link_rate(tx_power: f64, gain: f64, ch: &Channel) -> f64 {
    ch.bandwidth_hz * (1.0 + tx_power * gain / ch.noise_power).log2()
}
