//! Discrete-event simulator for a tandem of FIFO constant-rate links fed by a
//! packetized through flow and optional per-node cross flows. Produces the
//! empirical end-to-end delay CCDF (and per-node backlog CCDFs) that the
//! analytical bounds are sandwiched against.
//!
//! A packet keeps its size at every node it traverses; cross packets leave
//! the tandem after their node. The event queue is keyed by
//! `(time, node, sequence)` with deterministic tie-breaking, so a run is
//! bit-reproducible for a given seed.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::trace::PacketTrace;

/// Packet generator feeding the tandem.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    /// Evenly spaced arrivals at `lambda_pps`, i.i.d. Pareto sizes.
    Pareto { lambda_pps: f64, min_packet_bytes: f64, alpha: f64 },
    /// Replay recorded arrivals.
    Replay(PacketTrace),
}

impl SourceSpec {
    /// Long-run offered load in bits/s (sample mean for a replay).
    pub fn mean_rate_bps(&self) -> f64 {
        match self {
            SourceSpec::Pareto { lambda_pps, min_packet_bytes, alpha } => {
                lambda_pps * min_packet_bytes * 8.0 * alpha / (alpha - 1.0)
            }
            SourceSpec::Replay(trace) => trace.mean_rate_bps(None),
        }
    }
}

/// Tandem configuration: `nodes` identical-rate FIFO links in series.
#[derive(Debug, Clone)]
pub struct TandemConfig {
    pub nodes: usize,
    pub capacity_bps: f64,
    pub source: SourceSpec,
    /// Per-node cross flows (empty, or one entry per node).
    pub cross: Vec<Option<SourceSpec>>,
    /// Through packets excluded from the statistics (initial transient).
    pub warmup_packets: usize,
    pub seed: u64,
    /// Record per-node backlog samples at departure epochs.
    pub record_backlog: bool,
}

impl TandemConfig {
    pub fn new(nodes: usize, capacity_bps: f64, source: SourceSpec, seed: u64) -> Self {
        Self {
            nodes,
            capacity_bps,
            source,
            cross: Vec::new(),
            warmup_packets: 0,
            seed,
            record_backlog: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 1 {
            return Err(Error::InvalidArgument("tandem needs at least one node".into()));
        }
        if !(self.capacity_bps > 0.0) {
            return Err(Error::InvalidArgument("capacity must be positive".into()));
        }
        if !self.cross.is_empty() && self.cross.len() != self.nodes {
            return Err(Error::InvalidArgument(
                "cross-source list must have one entry per node".into(),
            ));
        }
        // long-run stability applies to generator sources; a replay is finite
        // and always drains, so short bursty traces stay admissible
        for node in 0..self.nodes {
            let mut load = 0.0;
            if matches!(self.source, SourceSpec::Pareto { .. }) {
                load += self.source.mean_rate_bps();
            }
            if let Some(Some(c @ SourceSpec::Pareto { .. })) = self.cross.get(node) {
                load += c.mean_rate_bps();
            }
            let util = load / self.capacity_bps;
            if util >= 1.0 {
                return Err(Error::Unstable { node, utilization: util });
            }
        }
        Ok(())
    }
}

/// Empirical CCDF with exceedance counts. Points backed by fewer than 100
/// samples are flagged unreliable: long heavy-tailed runs still lack events
/// deep in the tail.
#[derive(Debug, Clone)]
pub struct CcdfEstimate {
    samples_sorted: Vec<f64>,
}

/// One CCDF step: value, exceedance probability, exceedance count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint {
    pub value: f64,
    pub prob: f64,
    pub count: usize,
    pub reliable: bool,
}

impl CcdfEstimate {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty sample set".into()));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { samples_sorted: samples })
    }

    pub fn sample_count(&self) -> usize {
        self.samples_sorted.len()
    }

    /// Smallest ε at which quantile estimates still rest on 100 samples.
    pub fn max_reliable_eps(&self) -> f64 {
        100.0 / self.samples_sorted.len() as f64
    }

    /// Empirical `P(W > w)`.
    pub fn prob_above(&self, w: f64) -> f64 {
        let idx = self.samples_sorted.partition_point(|&x| x <= w);
        (self.samples_sorted.len() - idx) as f64 / self.samples_sorted.len() as f64
    }

    /// Smallest sample `w` with `P(W > w) <= eps`.
    pub fn quantile(&self, eps: f64) -> f64 {
        let n = self.samples_sorted.len();
        let idx = ((n as f64) - 1.0 - eps * n as f64).ceil().max(0.0) as usize;
        self.samples_sorted[idx.min(n - 1)]
    }

    /// Distinct CCDF steps.
    pub fn points(&self) -> Vec<CcdfPoint> {
        let n = self.samples_sorted.len();
        let mut out: Vec<CcdfPoint> = Vec::new();
        for (i, &x) in self.samples_sorted.iter().enumerate() {
            let count = n - i - 1;
            let point = CcdfPoint {
                value: x,
                prob: count as f64 / n as f64,
                count,
                reliable: count >= 100,
            };
            if let Some(last) = out.last_mut() {
                if last.value == x {
                    *last = point;
                    continue;
                }
            }
            out.push(point);
        }
        out
    }
}

/// Empirical CCDF of a nonempty sample set (exceedance counts attached,
/// deep-tail points flagged unreliable).
pub fn ccdf(samples: &[f64]) -> Result<CcdfEstimate> {
    CcdfEstimate::from_samples(samples.to_vec())
}

/// Simulation output: end-to-end through-flow delays and, when requested,
/// per-node backlog samples taken at departure epochs.
#[derive(Debug)]
pub struct TandemResult {
    pub delays: CcdfEstimate,
    /// Post-warmup end-to-end delays in through-packet order.
    pub per_packet_delays: Vec<f64>,
    pub backlog_bytes: Vec<Option<CcdfEstimate>>,
    /// Total bytes offered to node 0 by the through flow (conservation checks).
    pub through_bytes: f64,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    size_bytes: f64,
    /// Index into the through-delay accounting, or `usize::MAX` for cross.
    through_idx: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrival(usize),
    Completion,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    node: usize,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for the max-heap: earliest (time, node, seq) first
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

enum GeneratorKind {
    Pareto { rng: ChaCha12Rng, lambda_pps: f64, min_packet_bytes: f64, alpha: f64 },
    Replay(std::vec::IntoIter<(f64, f64)>),
}

struct Generator {
    kind: GeneratorKind,
    next_idx: usize,
}

impl Generator {
    fn new(spec: SourceSpec, seed: u64, stream: u64) -> Self {
        let kind = match spec {
            SourceSpec::Pareto { lambda_pps, min_packet_bytes, alpha } => {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                GeneratorKind::Pareto { rng, lambda_pps, min_packet_bytes, alpha }
            }
            SourceSpec::Replay(trace) => {
                let records: Vec<(f64, f64)> =
                    trace.records().map(|(t, s)| (t as f64 / 1e9, s)).collect();
                GeneratorKind::Replay(records.into_iter())
            }
        };
        Self { kind, next_idx: 0 }
    }

    /// Next (arrival time in seconds, size in bytes).
    fn next_packet(&mut self, limit: Option<usize>) -> Option<(f64, f64)> {
        if let Some(limit) = limit {
            if self.next_idx >= limit {
                return None;
            }
        }
        let i = self.next_idx;
        self.next_idx += 1;
        match &mut self.kind {
            GeneratorKind::Pareto { rng, lambda_pps, min_packet_bytes, alpha } => {
                let t = i as f64 / *lambda_pps;
                let u: f64 = rng.gen();
                let size = *min_packet_bytes * (1.0 - u).powf(-1.0 / *alpha);
                Some((t, size))
            }
            GeneratorKind::Replay(it) => it.next(),
        }
    }
}

struct NodeState {
    queue: VecDeque<Packet>,
    busy: bool,
    backlog_bytes: f64,
    backlog_samples: Vec<f64>,
}

/// Run the tandem for `n_packets` through packets. Statistics exclude the
/// first `warmup_packets` through packets; the run is deterministic in the
/// seed.
pub fn run_tandem(cfg: &TandemConfig, n_packets: usize) -> Result<TandemResult> {
    cfg.validate()?;
    if n_packets < 1 {
        return Err(Error::InvalidArgument("need at least one packet".into()));
    }
    if n_packets <= cfg.warmup_packets {
        return Err(Error::InvalidArgument(format!(
            "packet count {n_packets} must exceed the warmup prefix {}",
            cfg.warmup_packets
        )));
    }

    let mut through = Generator::new(cfg.source.clone(), cfg.seed, 0);
    let mut cross: Vec<Option<Generator>> = (0..cfg.nodes)
        .map(|n| {
            cfg.cross
                .get(n)
                .and_then(|c| c.clone())
                .map(|spec| Generator::new(spec, cfg.seed, 1 + n as u64))
        })
        .collect();

    let mut nodes: Vec<NodeState> = (0..cfg.nodes)
        .map(|_| NodeState {
            queue: VecDeque::new(),
            busy: false,
            backlog_bytes: 0.0,
            backlog_samples: Vec::new(),
        })
        .collect();

    let mut heap: BinaryHeap<Event> = BinaryHeap::new();
    let mut packets: Vec<Packet> = Vec::new();
    let mut seq = 0u64;
    let mut schedule = |heap: &mut BinaryHeap<Event>, time: f64, node: usize, kind: EventKind| {
        heap.push(Event { time, node, seq, kind });
        seq += 1;
    };

    let mut arrivals = vec![0.0f64; n_packets];
    let mut departures = vec![0.0f64; n_packets];
    let mut departed = 0usize;
    let mut through_bytes = 0.0;

    // seed the lazily chained generators
    if let Some((t, size)) = through.next_packet(Some(n_packets)) {
        through_bytes += size;
        arrivals[0] = t;
        packets.push(Packet { size_bytes: size, through_idx: 0 });
        schedule(&mut heap, t, 0, EventKind::Arrival(0));
    }
    for node in 0..cfg.nodes {
        if let Some(gen) = cross[node].as_mut() {
            if let Some((t, size)) = gen.next_packet(None) {
                packets.push(Packet { size_bytes: size, through_idx: usize::MAX });
                schedule(&mut heap, t, node, EventKind::Arrival(packets.len() - 1));
            }
        }
    }

    let mut in_service: Vec<Option<Packet>> = vec![None; cfg.nodes];

    while let Some(ev) = heap.pop() {
        match ev.kind {
            EventKind::Arrival(pkt_idx) => {
                let pkt = packets[pkt_idx];
                // chain the next packet of the source that produced this one
                if ev.node == 0 && pkt.through_idx != usize::MAX {
                    let next_idx = pkt.through_idx + 1;
                    if next_idx < n_packets {
                        if let Some((t, size)) = through.next_packet(Some(n_packets)) {
                            through_bytes += size;
                            arrivals[next_idx] = t;
                            packets.push(Packet {
                                size_bytes: size,
                                through_idx: next_idx,
                            });
                            schedule(&mut heap, t, 0, EventKind::Arrival(packets.len() - 1));
                        }
                    }
                } else if pkt.through_idx == usize::MAX {
                    if let Some(gen) = cross[ev.node].as_mut() {
                        if let Some((t, size)) = gen.next_packet(None) {
                            packets.push(Packet {
                                size_bytes: size,
                                through_idx: usize::MAX,
                            });
                            schedule(&mut heap, t, ev.node, EventKind::Arrival(packets.len() - 1));
                        }
                    }
                }

                let state = &mut nodes[ev.node];
                state.backlog_bytes += pkt.size_bytes;
                if state.busy {
                    state.queue.push_back(pkt);
                } else {
                    state.busy = true;
                    in_service[ev.node] = Some(pkt);
                    let done = ev.time + pkt.size_bytes * 8.0 / cfg.capacity_bps;
                    schedule(&mut heap, done, ev.node, EventKind::Completion);
                }
            }
            EventKind::Completion => {
                let node = ev.node;
                let pkt = in_service[node].take().expect("completion without service");
                nodes[node].backlog_bytes -= pkt.size_bytes;
                if cfg.record_backlog {
                    let b = nodes[node].backlog_bytes.max(0.0);
                    nodes[node].backlog_samples.push(b);
                }
                if let Some(next) = nodes[node].queue.pop_front() {
                    in_service[node] = Some(next);
                    let done = ev.time + next.size_bytes * 8.0 / cfg.capacity_bps;
                    schedule(&mut heap, done, node, EventKind::Completion);
                } else {
                    nodes[node].busy = false;
                }
                if pkt.through_idx != usize::MAX {
                    if node + 1 < cfg.nodes {
                        packets.push(pkt);
                        schedule(
                            &mut heap,
                            ev.time,
                            node + 1,
                            EventKind::Arrival(packets.len() - 1),
                        );
                    } else {
                        departures[pkt.through_idx] = ev.time;
                        departed += 1;
                        if departed == n_packets {
                            break;
                        }
                    }
                }
            }
        }
    }

    if departed != n_packets {
        return Err(Error::InvalidArgument(format!(
            "simulation drained early: {departed} of {n_packets} through packets departed"
        )));
    }

    let delays: Vec<f64> = (cfg.warmup_packets..n_packets)
        .map(|i| departures[i] - arrivals[i])
        .collect();
    let backlog = nodes
        .into_iter()
        .map(|n| {
            if cfg.record_backlog && !n.backlog_samples.is_empty() {
                CcdfEstimate::from_samples(n.backlog_samples).ok()
            } else {
                None
            }
        })
        .collect();

    Ok(TandemResult {
        delays: CcdfEstimate::from_samples(delays.clone())?,
        per_packet_delays: delays,
        backlog_bytes: backlog,
        through_bytes,
    })
}
