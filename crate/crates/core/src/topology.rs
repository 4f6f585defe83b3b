//! Edge infrastructure graph: base stations joined by wired links, shortest-path
//! routing between stations, and the per-slot compute/bandwidth ledger.
//!
//! Availability is never updated by subtract-then-add. Each station and link keeps
//! the list of outstanding holds (keyed by receipt id) and its available amount is
//! recomputed as `total - sum(holds)` in id order, so releasing a receipt restores
//! the exact bits the ledger had before the matching reservation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Constraint, Error, Result};
use crate::range::ValueRange;

/// Link weight used by [`EdgeInfrastructure::shortest_path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteWeight {
    #[default]
    Hops,
    /// `1 / bandwidth_total`, so fatter links are preferred.
    InverseBandwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub stations: usize,
    /// Probability that any given pair of stations is wired together.
    pub edge_probability: f64,
    pub compute_ghz: ValueRange,
    pub bandwidth_mbps: ValueRange,
    pub distance_m: ValueRange,
    pub bs_tx_power_w: ValueRange,
    pub routing: RouteWeight,
    /// Generator attempts before giving up on a connected graph.
    pub max_attempts: usize,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            stations: 10,
            edge_probability: 0.4,
            compute_ghz: ValueRange::new(2.0, 6.0),
            bandwidth_mbps: ValueRange::new(20.0, 100.0),
            distance_m: ValueRange::new(100.0, 800.0),
            bs_tx_power_w: ValueRange::new(1.0, 2.0),
            routing: RouteWeight::Hops,
            max_attempts: 1000,
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stations == 0 {
            return Err(Error::config("topology.stations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(Error::config("topology.edge_probability must lie in [0, 1]"));
        }
        if self.stations > 1 && self.edge_probability == 0.0 {
            return Err(Error::config(
                "topology.edge_probability of 0 can never give a connected graph",
            ));
        }
        self.compute_ghz.validate("topology.compute_ghz")?;
        if self.compute_ghz.min < 0.0 {
            return Err(Error::config("topology.compute_ghz must be non-negative"));
        }
        self.bandwidth_mbps.validate_positive("topology.bandwidth_mbps")?;
        self.distance_m.validate_positive("topology.distance_m")?;
        self.bs_tx_power_w.validate_positive("topology.bs_tx_power_w")?;
        if self.max_attempts == 0 {
            return Err(Error::config("topology.max_attempts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    /// GHz
    pub compute_capacity_total: f64,
    /// GHz
    pub compute_available: f64,
    /// W
    pub tx_power: f64,
    /// m
    pub distance_to_md: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiredLink {
    pub endpoints: (usize, usize),
    /// Mbps
    pub bandwidth_total: f64,
    /// Mbps
    pub bandwidth_available: f64,
}

impl WiredLink {
    pub fn other(&self, station: usize) -> usize {
        if self.endpoints.0 == station {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }
}

/// Station and link sequence of a route. Empty when source equals destination.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoutePath {
    pub stations: Vec<usize>,
    pub links: Vec<usize>,
}

impl RoutePath {
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

/// What a single reservation asks for. Demands on the same station or link are summed
/// before the feasibility check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReservationRequest {
    /// (station, GHz)
    pub compute: Vec<(usize, f64)>,
    /// (path, Mbps); the demand is held on every link of the path.
    pub bandwidth: Vec<(RoutePath, f64)>,
}

impl ReservationRequest {
    pub fn is_empty(&self) -> bool {
        self.compute.is_empty() && self.bandwidth.is_empty()
    }
}

/// Proof of a successful reservation; hand it back to
/// [`EdgeInfrastructure::release_slot`].
#[derive(Debug, PartialEq)]
pub struct ReservationReceipt {
    id: u64,
    pub compute: Vec<(usize, f64)>,
    pub bandwidth: Vec<(usize, f64)>,
}

impl ReservationReceipt {
    pub fn id(&self) -> u64 {
        self.id
    }
}

#[derive(Debug, Clone, Default)]
struct Holds {
    stations: Vec<Vec<(u64, f64)>>,
    links: Vec<Vec<(u64, f64)>>,
    outstanding: BTreeSet<u64>,
    next_id: u64,
}

// Receipt ids are bookkeeping; two ledgers holding the same amounts are equal.
impl PartialEq for Holds {
    fn eq(&self, other: &Self) -> bool {
        self.stations == other.stations
            && self.links == other.links
            && self.outstanding == other.outstanding
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInfrastructure {
    pub stations: Vec<BaseStation>,
    pub links: Vec<WiredLink>,
    /// station id -> incident link indices, ascending
    pub adjacency: Vec<Vec<usize>>,
    pub routing: RouteWeight,
    holds: Holds,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    routing: RouteWeight,
    stations: Vec<BaseStation>,
    links: Vec<WiredLink>,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Random connected infrastructure per `config`. Edges are drawn independently per
/// station pair and the draw is repeated until the graph is connected.
pub fn build_infrastructure<R: Rng + ?Sized>(
    config: &TopologyConfig,
    rng: &mut R,
) -> Result<EdgeInfrastructure> {
    config.validate()?;
    let n = config.stations;
    let mut edges = None;
    for _ in 0..config.max_attempts {
        let mut candidate = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.random_bool(config.edge_probability) {
                    candidate.push((a, b));
                }
            }
        }
        if is_connected(n, &candidate) {
            edges = Some(candidate);
            break;
        }
    }
    let edges = edges.ok_or_else(|| {
        Error::config(format!(
            "no connected graph after {} attempts (edge_probability {})",
            config.max_attempts, config.edge_probability
        ))
    })?;

    let stations = (0..n)
        .map(|id| {
            let cap = config.compute_ghz.sample(rng);
            BaseStation {
                id,
                compute_capacity_total: cap,
                compute_available: cap,
                tx_power: config.bs_tx_power_w.sample(rng),
                distance_to_md: config.distance_m.sample(rng),
            }
        })
        .collect();
    let links = edges
        .into_iter()
        .map(|endpoints| {
            let bw = config.bandwidth_mbps.sample(rng);
            WiredLink {
                endpoints,
                bandwidth_total: bw,
                bandwidth_available: bw,
            }
        })
        .collect();
    EdgeInfrastructure::new(stations, links, config.routing)
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

impl EdgeInfrastructure {
    /// Assemble an infrastructure from explicit parts. Station ids must be `0..n` in
    /// order and the graph must be connected.
    pub fn new(
        stations: Vec<BaseStation>,
        links: Vec<WiredLink>,
        routing: RouteWeight,
    ) -> Result<Self> {
        let n = stations.len();
        if n == 0 {
            return Err(Error::config("infrastructure needs at least one station"));
        }
        for (i, s) in stations.iter().enumerate() {
            if s.id != i {
                return Err(Error::config(format!("station at index {i} has id {}", s.id)));
            }
            if !(s.compute_capacity_total >= 0.0) || s.distance_to_md <= 0.0 {
                return Err(Error::config(format!("station {i} has invalid attributes")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (li, l) in links.iter().enumerate() {
            let (a, b) = l.endpoints;
            if a == b || a >= n || b >= n {
                return Err(Error::config(format!("link {li} has invalid endpoints {a}-{b}")));
            }
            if !(l.bandwidth_total > 0.0) {
                return Err(Error::config(format!("link {li} has non-positive bandwidth")));
            }
            adjacency[a].push(li);
            adjacency[b].push(li);
        }
        let pairs: Vec<_> = links.iter().map(|l| l.endpoints).collect();
        if !is_connected(n, &pairs) {
            return Err(Error::config("infrastructure graph is not connected"));
        }
        let holds = Holds {
            stations: vec![Vec::new(); n],
            links: vec![Vec::new(); links.len()],
            ..Holds::default()
        };
        let mut infra = Self {
            stations,
            links,
            adjacency,
            routing,
            holds,
        };
        for s in 0..n {
            infra.refresh_station(s);
        }
        for l in 0..infra.links.len() {
            infra.refresh_link(l);
        }
        Ok(infra)
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// The station closest to the mobile device (lowest id on ties).
    pub fn access_station(&self) -> usize {
        self.stations
            .iter()
            .min_by(|a, b| a.distance_to_md.total_cmp(&b.distance_to_md))
            .map(|s| s.id)
            .unwrap_or(0)
    }

    fn link_weight(&self, link: usize) -> f64 {
        match self.routing {
            RouteWeight::Hops => 1.0,
            RouteWeight::InverseBandwidth => 1.0 / self.links[link].bandwidth_total,
        }
    }

    /// Dijkstra from `src` to `dst` under the configured link weights.
    pub fn shortest_path(&self, src: usize, dst: usize) -> Result<RoutePath> {
        let n = self.stations.len();
        if src >= n || dst >= n {
            return Err(Error::usage(format!(
                "station id out of range ({src} or {dst}, have {n})"
            )));
        }
        if src == dst {
            return Ok(RoutePath::default());
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Frontier { dist: 0.0, node: src });
        while let Some(Frontier { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == dst {
                break;
            }
            for &li in &self.adjacency[u] {
                let v = self.links[li].other(u);
                let nd = d + self.link_weight(li);
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = Some((u, li));
                    heap.push(Frontier { dist: nd, node: v });
                }
            }
        }
        if dist[dst].is_infinite() {
            return Err(Error::Unreachable { src, dst });
        }
        let mut stations = vec![dst];
        let mut links = Vec::new();
        let mut cur = dst;
        while let Some((p, li)) = prev[cur] {
            links.push(li);
            stations.push(p);
            cur = p;
        }
        stations.reverse();
        links.reverse();
        Ok(RoutePath { stations, links })
    }

    /// Smallest available bandwidth along `path` (Mbps); `+inf` for an empty path.
    pub fn path_min_bandwidth(&self, path: &RoutePath) -> f64 {
        path.links
            .iter()
            .map(|&l| self.links[l].bandwidth_available)
            .fold(f64::INFINITY, f64::min)
    }

    fn refresh_station(&mut self, s: usize) {
        let held: f64 = self.holds.stations[s].iter().map(|&(_, v)| v).sum();
        let st = &mut self.stations[s];
        st.compute_available = (st.compute_capacity_total - held).max(0.0);
    }

    fn refresh_link(&mut self, l: usize) {
        let held: f64 = self.holds.links[l].iter().map(|&(_, v)| v).sum();
        let link = &mut self.links[l];
        link.bandwidth_available = (link.bandwidth_total - held).max(0.0);
    }

    /// Reserve every demand in `request` or nothing at all.
    pub fn reserve(&mut self, request: &ReservationRequest) -> Result<ReservationReceipt> {
        let n = self.stations.len();
        let mut compute: BTreeMap<usize, f64> = BTreeMap::new();
        for &(s, ghz) in &request.compute {
            if s >= n {
                return Err(Error::Infeasible {
                    constraint: Constraint::C2,
                    detail: format!("station {s} does not exist"),
                });
            }
            if !(ghz >= 0.0) {
                return Err(Error::usage(format!("negative compute demand {ghz}")));
            }
            *compute.entry(s).or_default() += ghz;
        }
        let mut bandwidth: BTreeMap<usize, f64> = BTreeMap::new();
        for (path, mbps) in &request.bandwidth {
            if !(*mbps >= 0.0) {
                return Err(Error::usage(format!("negative bandwidth demand {mbps}")));
            }
            for &l in &path.links {
                if l >= self.links.len() {
                    return Err(Error::usage(format!("link {l} does not exist")));
                }
                *bandwidth.entry(l).or_default() += *mbps;
            }
        }
        for (&s, &ghz) in &compute {
            let avail = self.stations[s].compute_available;
            if ghz > avail {
                return Err(Error::Infeasible {
                    constraint: Constraint::C5,
                    detail: format!("station {s}: need {ghz} GHz, {avail} GHz available"),
                });
            }
        }
        for (&l, &mbps) in &bandwidth {
            let avail = self.links[l].bandwidth_available;
            if mbps > avail {
                return Err(Error::Infeasible {
                    constraint: Constraint::C6,
                    detail: format!("link {l}: need {mbps} Mbps, {avail} Mbps available"),
                });
            }
        }

        let id = self.holds.next_id;
        self.holds.next_id += 1;
        self.holds.outstanding.insert(id);
        for (&s, &ghz) in &compute {
            self.holds.stations[s].push((id, ghz));
            self.refresh_station(s);
        }
        for (&l, &mbps) in &bandwidth {
            self.holds.links[l].push((id, mbps));
            self.refresh_link(l);
        }
        Ok(ReservationReceipt {
            id,
            compute: compute.into_iter().collect(),
            bandwidth: bandwidth.into_iter().collect(),
        })
    }

    /// Return everything held by `receipt`. Releasing the same receipt twice is a
    /// usage error.
    pub fn release_slot(&mut self, receipt: &ReservationReceipt) -> Result<()> {
        if !self.holds.outstanding.remove(&receipt.id) {
            return Err(Error::usage(format!(
                "reservation {} is not outstanding (already released?)",
                receipt.id
            )));
        }
        for &(s, _) in &receipt.compute {
            self.holds.stations[s].retain(|&(id, _)| id != receipt.id);
            self.refresh_station(s);
        }
        for &(l, _) in &receipt.bandwidth {
            self.holds.links[l].retain(|&(id, _)| id != receipt.id);
            self.refresh_link(l);
        }
        Ok(())
    }

    pub fn outstanding_reservations(&self) -> usize {
        self.holds.outstanding.len()
    }

    /// Plain-text (TOML) snapshot of stations, links and routing weights.
    pub fn to_snapshot(&self) -> String {
        let snap = Snapshot {
            routing: self.routing,
            stations: self.stations.clone(),
            links: self.links.clone(),
        };
        toml::to_string(&snap).expect("topology snapshot is always representable")
    }

    /// Rebuild from [`to_snapshot`](Self::to_snapshot) output. The ledger starts empty,
    /// so availabilities are reset to totals.
    pub fn from_snapshot(text: &str) -> Result<Self> {
        let snap: Snapshot =
            toml::from_str(text).map_err(|e| Error::config(format!("topology snapshot: {e}")))?;
        Self::new(snap.stations, snap.links, snap.routing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn station(id: usize, cap: f64) -> BaseStation {
        BaseStation {
            id,
            compute_capacity_total: cap,
            compute_available: cap,
            tx_power: 1.5,
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

    fn line3() -> EdgeInfrastructure {
        EdgeInfrastructure::new(
            vec![station(0, 4.0), station(1, 2.5), station(2, 2.0)],
            vec![link(0, 1, 40.0), link(1, 2, 25.0)],
            RouteWeight::Hops,
        )
        .unwrap()
    }

    #[test]
    fn table_config_ranges_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = TopologyConfig::default();
        for _ in 0..20 {
            let infra = build_infrastructure(&cfg, &mut rng).unwrap();
            assert_eq!(infra.station_count(), 10);
            for s in &infra.stations {
                assert!((2.0..=6.0).contains(&s.compute_capacity_total));
                assert!((100.0..=800.0).contains(&s.distance_to_md));
                assert!((1.0..=2.0).contains(&s.tx_power));
            }
            for l in &infra.links {
                assert!((20.0..=100.0).contains(&l.bandwidth_total));
                assert_ne!(l.endpoints.0, l.endpoints.1);
            }
        }
    }

    #[test]
    fn degenerate_capacity_range() {
        let cfg = TopologyConfig {
            compute_ghz: ValueRange::constant(4.0),
            ..TopologyConfig::default()
        };
        let infra = build_infrastructure(&cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(infra.stations.iter().all(|s| s.compute_capacity_total == 4.0));
    }

    #[test]
    fn same_seed_same_graph() {
        let cfg = TopologyConfig::default();
        let a = build_infrastructure(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = build_infrastructure(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad = TopologyConfig {
            compute_ghz: ValueRange::new(6.0, 2.0),
            ..TopologyConfig::default()
        };
        assert!(matches!(build_infrastructure(&bad, &mut rng), Err(Error::Config(_))));
        let bad = TopologyConfig {
            edge_probability: 0.0,
            ..TopologyConfig::default()
        };
        assert!(matches!(build_infrastructure(&bad, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn line_graph_route() {
        let infra = line3();
        let p = infra.shortest_path(0, 2).unwrap();
        assert_eq!(p.stations, vec![0, 1, 2]);
        assert_eq!(p.links, vec![0, 1]);
        assert!(infra.shortest_path(1, 1).unwrap().is_empty());
        assert!(infra.shortest_path(1, 1).unwrap().stations.is_empty());
        assert!(infra.shortest_path(0, 7).is_err());
    }

    #[test]
    fn min_bandwidth() {
        let infra = EdgeInfrastructure::new(
            (0..4).map(|i| station(i, 3.0)).collect(),
            vec![link(0, 1, 40.0), link(1, 2, 25.0), link(2, 3, 90.0)],
            RouteWeight::Hops,
        )
        .unwrap();
        let p = infra.shortest_path(0, 3).unwrap();
        assert_eq!(infra.path_min_bandwidth(&p), 25.0);
        assert_eq!(infra.path_min_bandwidth(&RoutePath::default()), f64::INFINITY);
        let single = infra.shortest_path(2, 3).unwrap();
        assert_eq!(infra.path_min_bandwidth(&single), 90.0);
    }

    #[test]
    fn zero_demand_leaves_ledger() {
        let mut infra = line3();
        let before = infra.clone();
        let r = infra
            .reserve(&ReservationRequest {
                compute: vec![(0, 0.0), (2, 0.0)],
                bandwidth: vec![],
            })
            .unwrap();
        assert_eq!(infra.stations, before.stations);
        infra.release_slot(&r).unwrap();
        assert_eq!(infra, before);
    }

    #[test]
    fn infeasible_compute_is_all_or_nothing() {
        let mut infra = line3();
        let before = infra.clone();
        let path = infra.shortest_path(0, 1).unwrap();
        let err = infra
            .reserve(&ReservationRequest {
                compute: vec![(0, 1.0), (2, 3.0)],
                bandwidth: vec![(path, 5.0)],
            })
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                constraint: Constraint::C5,
                ..
            }
        ));
        assert_eq!(infra, before);
    }

    #[test]
    fn infeasible_bandwidth_names_c6() {
        let mut infra = line3();
        let path = infra.shortest_path(0, 2).unwrap();
        let err = infra
            .reserve(&ReservationRequest {
                compute: vec![],
                bandwidth: vec![(path, 30.0)],
            })
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                constraint: Constraint::C6,
                ..
            }
        ));
    }

    #[test]
    fn co_located_demands_sum() {
        let mut infra = line3();
        infra
            .reserve(&ReservationRequest {
                compute: vec![(1, 1.0), (1, 1.0)],
                bandwidth: vec![],
            })
            .unwrap();
        assert_eq!(infra.stations[1].compute_available, 0.5);
    }

    #[test]
    fn reserve_release_round_trip() {
        let mut infra = line3();
        let before = infra.clone();
        let path = infra.shortest_path(0, 1).unwrap();
        let r = infra
            .reserve(&ReservationRequest {
                compute: vec![(0, 0.5)],
                bandwidth: vec![(path, 5.0)],
            })
            .unwrap();
        assert_eq!(infra.stations[0].compute_available, 3.5);
        assert_eq!(infra.links[0].bandwidth_available, 35.0);
        infra.release_slot(&r).unwrap();
        assert_eq!(infra, before);
        assert!(matches!(infra.release_slot(&r), Err(Error::Usage(_))));
    }

    #[test]
    fn empty_receipt_release_is_noop() {
        let mut infra = line3();
        let before = infra.clone();
        let r = infra.reserve(&ReservationRequest::default()).unwrap();
        infra.release_slot(&r).unwrap();
        assert_eq!(infra, before);
    }

    #[test]
    fn snapshot_round_trip() {
        let infra =
            build_infrastructure(&TopologyConfig::default(), &mut ChaCha8Rng::seed_from_u64(5))
                .unwrap();
        let text = infra.to_snapshot();
        assert!(text.contains("[[stations]]"));
        let back = EdgeInfrastructure::from_snapshot(&text).unwrap();
        assert_eq!(back, infra);
    }

    #[test]
    fn inverse_bandwidth_prefers_fat_links() {
        // 0-1-2 thin direct vs 0-3-4-2 fat detour
        let infra = EdgeInfrastructure::new(
            (0..5).map(|i| station(i, 3.0)).collect(),
            vec![
                link(0, 1, 20.0),
                link(1, 2, 20.0),
                link(0, 3, 100.0),
                link(3, 4, 100.0),
                link(4, 2, 100.0),
            ],
            RouteWeight::InverseBandwidth,
        )
        .unwrap();
        assert_eq!(infra.shortest_path(0, 2).unwrap().stations, vec![0, 3, 4, 2]);
    }
}
