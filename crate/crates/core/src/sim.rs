//! The simulated network: nodes, ports and the event handlers that move
//! frames between them and drive the PTP applications.

use log::{debug, warn};
use rand::Rng;
use thiserror::Error;

use crate::clock::{Clock, ClockError, DriftKind, DriftModel, LocalTime};
use crate::engine::{EngineError, RunStats, Scheduler};
use crate::net::{
    shortest_path_tables, Direction, EnqueueOutcome, Frame, Link, NodeId, Payload, PortQueue,
    QueueMode, RoutingTable, TrafficClass,
};
use crate::ptp::{
    MasterStateMachine, MessageKind, PtpError, PtpMessage, SlaveConfig, SlaveStateMachine,
    SyncAction,
};
use crate::rng::{RngFactory, RngStream};
use crate::stats::StatsCollector;
use crate::time::SimTime;
use crate::traffic::TrafficFlow;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error("invalid topology: {0}")]
    Topology(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Master,
    Slave,
    Router,
    Generator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub name: String,
    pub kind: NodeKind,
}

/// A link between an upper (master side) and lower node. Frames sent by the
/// upper node travel `Direction::Down`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub upper: NodeId,
    pub lower: NodeId,
    pub link: Link,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Topology {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
}

impl Topology {
    pub fn add_node(&mut self, name: impl Into<String>, kind: NodeKind) -> NodeId {
        self.nodes.push(NodeSpec {
            name: name.into(),
            kind,
        });
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn connect(&mut self, upper: NodeId, lower: NodeId, link: Link) {
        self.links.push(LinkSpec { upper, lower, link });
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .map(|i| NodeId(i as u32))
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].name
    }

    pub fn of_kind(&self, kind: NodeKind) -> Vec<NodeId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == kind)
            .map(|(i, _)| NodeId(i as u32))
            .collect()
    }
}

/// How clocks of one node class are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSpec {
    pub kind: DriftKind,
    /// Initial drift is uniform in `±max_drift`; also the random-walk clamp.
    pub max_drift: f64,
    pub walk_sigma: f64,
    pub walk_interval: SimTime,
    pub jitter_max: SimTime,
    /// Initial phase is uniform in `±max_initial_offset`.
    pub max_initial_offset: SimTime,
}

impl ClockSpec {
    pub fn perfect() -> Self {
        ClockSpec {
            kind: DriftKind::Constant,
            max_drift: 0.0,
            walk_sigma: 0.0,
            walk_interval: SimTime::ZERO,
            jitter_max: SimTime::ZERO,
            max_initial_offset: SimTime::ZERO,
        }
    }

    pub fn constant_ppm(max_ppm: f64) -> Self {
        ClockSpec {
            max_drift: max_ppm * 1e-6,
            ..Self::perfect()
        }
    }

    fn instantiate(&self, drift_rng: &mut RngStream, phase_rng: &mut RngStream) -> Result<Clock, ClockError> {
        let drift = if self.max_drift > 0.0 {
            drift_rng.random_range(-self.max_drift..=self.max_drift)
        } else {
            0.0
        };
        let max_phase = self.max_initial_offset.as_ps() as i64;
        let phase = if max_phase > 0 {
            phase_rng.random_range(-max_phase..=max_phase)
        } else {
            0
        };
        let model = match self.kind {
            DriftKind::Constant => DriftModel {
                drift_bound: self.max_drift,
                ..DriftModel::constant(drift)
            },
            DriftKind::RandomWalk => {
                DriftModel::random_walk(drift, self.walk_sigma, self.walk_interval, self.max_drift)
            }
        };
        Ok(Clock::new(model, phase)?.with_jitter(self.jitter_max))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Sync cycles and background emissions start strictly before this time;
    /// `run` stops here.
    pub duration: SimTime,
    pub queue_mode: QueueMode,
    pub queue_capacity: Option<usize>,
    pub hop_delay: SimTime,
    /// Extra fixed router dwell per travel direction `[down, up]`.
    pub injected_residence: [SimTime; 2],
    pub transparent_clock: bool,
    pub sync_interval: SimTime,
    pub slave: SlaveConfig,
    pub sample_interval: Option<SimTime>,
    pub master_clock: ClockSpec,
    pub slave_clock: ClockSpec,
    pub router_clock: ClockSpec,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            duration: SimTime::from_secs(60),
            queue_mode: QueueMode::Fifo,
            queue_capacity: None,
            hop_delay: SimTime::from_us(5),
            injected_residence: [SimTime::ZERO; 2],
            transparent_clock: false,
            sync_interval: SimTime::from_ms(200),
            slave: SlaveConfig::default(),
            sample_interval: Some(SimTime::from_ms(100)),
            master_clock: ClockSpec::constant_ppm(25.0),
            slave_clock: ClockSpec::constant_ppm(25.0),
            router_clock: ClockSpec::constant_ppm(25.0),
        }
    }
}

/// What kind of frame a trace entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameTag {
    Ptp(MessageKind),
    Background,
    Probe,
}

impl FrameTag {
    fn of(frame: &Frame) -> Self {
        match &frame.payload {
            Payload::Ptp(m) => FrameTag::Ptp(m.kind),
            Payload::Background => FrameTag::Background,
            Payload::Probe => FrameTag::Probe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracePoint {
    /// Frame handed to an egress port.
    Enqueue,
    /// First bit leaves the port.
    TxStart,
    /// Last bit arrives at the node.
    Arrive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub t: SimTime,
    pub node: NodeId,
    pub point: TracePoint,
    pub frame_id: u64,
    pub tag: FrameTag,
    pub src: NodeId,
    pub dst: NodeId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameCounters {
    pub injected: [u64; 2],
    pub delivered: [u64; 2],
    pub dropped: [u64; 2],
    pub probes: u64,
}

impl FrameCounters {
    pub fn in_flight(&self, class: TrafficClass) -> u64 {
        let i = class.index();
        self.injected[i] - self.delivered[i] - self.dropped[i]
    }
}

#[derive(Debug)]
pub enum Event {
    SyncTimer,
    TxDone(usize),
    Arrive {
        node: NodeId,
        dir: Direction,
        frame: Frame,
    },
    Forward {
        node: NodeId,
        frame: Frame,
    },
    Emit {
        flow: usize,
        size_bytes: u32,
    },
    DriftStep(NodeId),
    Sample,
    Timeout {
        slave: NodeId,
        seq: u16,
    },
}

struct Port {
    node: NodeId,
    peer: NodeId,
    link: usize,
    dir: Direction,
    queue: PortQueue,
}

enum App {
    Master(MasterStateMachine),
    Slave(SlaveStateMachine),
    Router,
    Generator,
}

struct NodeRt {
    clock: Clock,
    ports: Vec<usize>,
    routes: RoutingTable,
    drift_rng: RngStream,
    jitter_rng: RngStream,
    app: App,
}

struct World {
    topo: Topology,
    params: SimParams,
    nodes: Vec<NodeRt>,
    ports: Vec<Port>,
    flows: Vec<TrafficFlow>,
    flow_rngs: Vec<RngStream>,
    master: NodeId,
    slaves: Vec<NodeId>,
    stats: StatsCollector,
    counters: FrameCounters,
    next_frame_id: u64,
    trace: Option<Vec<TraceEntry>>,
}

/// Result of a finished run.
pub struct RunResult {
    pub stats: StatsCollector,
    pub counters: FrameCounters,
    pub engine: RunStats,
    pub topology: Topology,
    pub slaves: Vec<NodeId>,
    pub trace: Vec<TraceEntry>,
    /// Frames still waiting in egress queues at the end of the run.
    pub queued: [u64; 2],
    pub slave_sw_offsets: Vec<i64>,
}

pub struct Simulation {
    sched: Scheduler<Event>,
    world: World,
}

impl Simulation {
    pub fn new(
        topo: Topology,
        params: SimParams,
        flows: Vec<TrafficFlow>,
        root_seed: u64,
    ) -> Result<Self, SimError> {
        let masters = topo.of_kind(NodeKind::Master);
        let [master] = masters.as_slice() else {
            return Err(SimError::Topology(format!(
                "exactly one master required, found {}",
                masters.len()
            )));
        };
        let slaves = topo.of_kind(NodeKind::Slave);
        if slaves.is_empty() {
            return Err(SimError::Topology("no slaves".into()));
        }

        let mut rngs = RngFactory::new(root_seed);
        let mut ports = Vec::new();
        let mut adjacency: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); topo.nodes.len()];
        let mut node_ports: Vec<Vec<usize>> = vec![Vec::new(); topo.nodes.len()];
        for (li, l) in topo.links.iter().enumerate() {
            for (node, peer, dir) in [
                (l.upper, l.lower, Direction::Down),
                (l.lower, l.upper, Direction::Up),
            ] {
                let mode = match topo.nodes[node.index()].kind {
                    NodeKind::Router => params.queue_mode,
                    _ => QueueMode::Fifo,
                };
                let capacity = match topo.nodes[node.index()].kind {
                    NodeKind::Router => params.queue_capacity,
                    _ => None,
                };
                let local = node_ports[node.index()].len();
                adjacency[node.index()].push((peer, local));
                node_ports[node.index()].push(ports.len());
                ports.push(Port {
                    node,
                    peer,
                    link: li,
                    dir,
                    queue: PortQueue::new(mode, capacity),
                });
            }
        }
        let tables = shortest_path_tables(&adjacency);

        let mut nodes = Vec::with_capacity(topo.nodes.len());
        for ((spec, routes), ports) in topo.nodes.iter().zip(tables).zip(node_ports) {
            let mut drift_rng = rngs.stream(&format!("drift:{}", spec.name))?;
            let mut phase_rng = rngs.stream(&format!("phase:{}", spec.name))?;
            let jitter_rng = rngs.stream(&format!("jitter:{}", spec.name))?;
            let (clock_spec, app) = match spec.kind {
                NodeKind::Master => (
                    &params.master_clock,
                    App::Master(MasterStateMachine::new(
                        params.slave.two_step,
                        params.slave.asymm_algo,
                        params.slave.probe_size,
                    )),
                ),
                NodeKind::Slave => (
                    &params.slave_clock,
                    App::Slave(SlaveStateMachine::new(params.slave.clone())),
                ),
                NodeKind::Router => (&params.router_clock, App::Router),
                NodeKind::Generator => (&params.router_clock, App::Generator),
            };
            let clock = match spec.kind {
                NodeKind::Generator => Clock::perfect(),
                _ => clock_spec.instantiate(&mut drift_rng, &mut phase_rng)?,
            };
            nodes.push(NodeRt {
                clock,
                ports,
                routes,
                drift_rng,
                jitter_rng,
                app,
            });
        }

        let mut flow_rngs = Vec::with_capacity(flows.len());
        for f in &flows {
            flow_rngs.push(rngs.stream(&format!("traffic:{}", f.name))?);
        }

        let mut world = World {
            topo,
            params,
            nodes,
            ports,
            flows,
            flow_rngs,
            master: *master,
            slaves,
            stats: StatsCollector::new(),
            counters: FrameCounters::default(),
            next_frame_id: 0,
            trace: None,
        };
        let mut sched = Scheduler::new();
        world.prime(&mut sched)?;
        Ok(Simulation { sched, world })
    }

    /// Records every enqueue, transmission start and arrival.
    pub fn enable_trace(&mut self) {
        self.world.trace = Some(Vec::new());
    }

    pub fn run(self) -> Result<RunResult, SimError> {
        let until = self.world.params.duration;
        self.run_until(until)
    }

    pub fn run_until(mut self, until: SimTime) -> Result<RunResult, SimError> {
        let world = &mut self.world;
        let engine = self.sched.run(until, |s, e| world.handle(s, e))?;
        let World {
            topo,
            nodes,
            ports,
            slaves,
            stats,
            counters,
            trace,
            ..
        } = self.world;
        let mut queued = [0u64; 2];
        for p in &ports {
            queued[0] += p.queue.queued(TrafficClass::High) as u64;
            queued[1] += p.queue.queued(TrafficClass::Low) as u64;
        }
        let slave_sw_offsets = slaves.iter().map(|s| nodes[s.index()].clock.sw_offset()).collect();
        Ok(RunResult {
            stats,
            counters,
            engine,
            topology: topo,
            slaves,
            trace: trace.unwrap_or_default(),
            queued,
            slave_sw_offsets,
        })
    }
}

impl World {
    fn prime(&mut self, sched: &mut Scheduler<Event>) -> Result<(), SimError> {
        if self.params.sync_interval < self.params.duration {
            sched.schedule(self.params.sync_interval, Event::SyncTimer)?;
        }
        if let Some(iv) = self.params.sample_interval {
            sched.schedule(iv, Event::Sample)?;
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(t) = n.clock.next_walk_boundary(SimTime::ZERO) {
                sched.schedule(t, Event::DriftStep(NodeId(i as u32)))?;
            }
        }
        for i in 0..self.flows.len() {
            if let Some(next) = self.flows[i].next_packet(&mut self.flow_rngs[i]) {
                if next.delta < self.params.duration {
                    sched.schedule(
                        next.delta,
                        Event::Emit {
                            flow: i,
                            size_bytes: next.size_bytes,
                        },
                    )?;
                }
            }
        }
        Ok(())
    }

    fn handle(&mut self, sched: &mut Scheduler<Event>, event: Event) -> Result<(), SimError> {
        match event {
            Event::SyncTimer => self.on_sync_timer(sched),
            Event::TxDone(port) => self.on_tx_done(sched, port),
            Event::Arrive { node, dir, frame } => self.on_arrive(sched, node, dir, frame),
            Event::Forward { node, frame } => {
                self.forward(sched, node, frame)?;
                Ok(())
            }
            Event::Emit { flow, size_bytes } => self.on_emit(sched, flow, size_bytes),
            Event::DriftStep(node) => {
                let now = sched.now();
                let n = &mut self.nodes[node.index()];
                n.clock.step_drift(now, &mut n.drift_rng)?;
                if let Some(next) = n.clock.next_walk_boundary(now) {
                    sched.schedule(next, Event::DriftStep(node))?;
                }
                Ok(())
            }
            Event::Sample => {
                for i in 0..self.slaves.len() {
                    self.sample(sched.now(), self.slaves[i])?;
                }
                if let Some(iv) = self.params.sample_interval {
                    sched.schedule_in(iv, Event::Sample);
                }
                Ok(())
            }
            Event::Timeout { slave, seq } => {
                if let App::Slave(s) = &mut self.nodes[slave.index()].app {
                    if s.on_timeout(seq) {
                        debug!("{} exchange {seq} timed out", self.topo.name(slave));
                        self.stats.add_timeout();
                    }
                }
                Ok(())
            }
        }
    }

    fn trace(&mut self, t: SimTime, node: NodeId, point: TracePoint, frame: &Frame) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry {
                t,
                node,
                point,
                frame_id: frame.id,
                tag: FrameTag::of(frame),
                src: frame.src,
                dst: frame.dst,
            });
        }
    }

    fn new_frame(&mut self, src: NodeId, dst: NodeId, size: u32, payload: Payload) -> Frame {
        let id = self.next_frame_id;
        self.next_frame_id += 1;
        Frame::new(id, src, dst, size, payload)
    }

    fn sw_timestamp(&mut self, node: NodeId, t: SimTime) -> Result<LocalTime, SimError> {
        let n = &mut self.nodes[node.index()];
        Ok(n.clock.sw_read(t, &mut n.jitter_rng)?)
    }

    fn sample(&mut self, t: SimTime, slave: NodeId) -> Result<(), SimError> {
        let master = self.nodes[self.master.index()].clock.sw_read_exact(t)?;
        let local = self.nodes[slave.index()].clock.sw_read_exact(t)?;
        self.stats
            .record_error(t, slave, local - master, local - t.as_ps() as i64);
        Ok(())
    }

    /// Injects a frame originated by `node`.
    fn originate(&mut self, sched: &mut Scheduler<Event>, node: NodeId, frame: Frame) -> Result<(), SimError> {
        self.counters.injected[frame.class.index()] += 1;
        if matches!(frame.payload, Payload::Probe) {
            self.counters.probes += 1;
        }
        self.forward(sched, node, frame)
    }

    fn forward(&mut self, sched: &mut Scheduler<Event>, node: NodeId, frame: Frame) -> Result<(), SimError> {
        let n = &self.nodes[node.index()];
        let Some(local) = n.routes.route(frame.dst) else {
            warn!(
                "{}: no route to {}, dropping frame {}",
                self.topo.name(node),
                frame.dst,
                frame.id
            );
            self.counters.dropped[frame.class.index()] += 1;
            return Ok(());
        };
        let port = n.ports[local];
        self.enqueue(sched, port, frame)
    }

    fn enqueue(&mut self, sched: &mut Scheduler<Event>, port: usize, frame: Frame) -> Result<(), SimError> {
        let now = sched.now();
        self.trace(now, self.ports[port].node, TracePoint::Enqueue, &frame);
        match self.ports[port].queue.enqueue(frame) {
            EnqueueOutcome::TransmitNow(f) => self.begin_tx(sched, port, f),
            EnqueueOutcome::Queued => Ok(()),
            EnqueueOutcome::Dropped(f) => {
                if f.ptp_kind().is_some() {
                    warn!("queue overflow at {}: dropped PTP frame {}", self.topo.name(self.ports[port].node), f.id);
                }
                self.counters.dropped[f.class.index()] += 1;
                Ok(())
            }
        }
    }

    fn begin_tx(&mut self, sched: &mut Scheduler<Event>, port: usize, mut frame: Frame) -> Result<(), SimError> {
        let now = sched.now();
        let (node, peer, dir, link) = {
            let p = &self.ports[port];
            (p.node, p.peer, p.dir, p.link)
        };
        let tx = self.topo.links[link].link.transmit(frame.size_bytes, now, dir);
        self.ports[port].queue.start_transmission(tx.tx_end);
        let follow_up = self.on_tx_start(now, node, &mut frame)?;
        self.trace(now, node, TracePoint::TxStart, &frame);
        sched.schedule(tx.tx_end, Event::TxDone(port))?;
        sched.schedule(tx.arrival, Event::Arrive { node: peer, dir, frame })?;
        if let Some(f) = follow_up {
            self.counters.injected[f.class.index()] += 1;
            self.enqueue(sched, port, f)?;
        }
        Ok(())
    }

    /// Egress timestamping. Returns a Follow_up to send after a two-step Sync.
    fn on_tx_start(&mut self, now: SimTime, node: NodeId, frame: &mut Frame) -> Result<Option<Frame>, SimError> {
        let Some(kind) = frame.ptp_kind() else {
            return Ok(None);
        };
        match &self.nodes[node.index()].app {
            App::Router => {
                if let Some(stamp) = frame.ingress_stamp.take() {
                    let out = self.nodes[node.index()].clock.hw_read(now)?;
                    if let Some(m) = frame.ptp_message_mut() {
                        m.correction += out - stamp;
                    }
                }
                Ok(None)
            }
            App::Master(m) if kind == MessageKind::Sync => {
                let two_step = m.two_step();
                let t1 = self.sw_timestamp(node, now)?;
                let msg = frame.ptp_message_mut().expect("ptp frame");
                if !two_step {
                    msg.origin_ts = t1;
                    return Ok(None);
                }
                let fu = PtpMessage::follow_up(msg.seq_id, t1);
                let (src, dst, size) = (frame.src, frame.dst, frame.size_bytes);
                Ok(Some(self.new_frame(src, dst, size, Payload::Ptp(fu))))
            }
            App::Slave(_) if kind == MessageKind::DelayReq => {
                let t3 = self.sw_timestamp(node, now)?;
                let seq = frame.ptp_message().expect("ptp frame").seq_id;
                if let App::Slave(s) = &mut self.nodes[node.index()].app {
                    if let Err(e) = s.on_delay_req_egress(seq, t3) {
                        debug!("{}: {e}", self.topo.name(node));
                    }
                }
                Ok(None)
            }
            _ => Ok(None),
        }
    }

    fn on_tx_done(&mut self, sched: &mut Scheduler<Event>, port: usize) -> Result<(), SimError> {
        let q = &mut self.ports[port].queue;
        q.finish_transmission();
        if let Some(next) = q.dequeue_next() {
            self.begin_tx(sched, port, next)?;
        }
        Ok(())
    }

    fn on_arrive(&mut self, sched: &mut Scheduler<Event>, node: NodeId, dir: Direction, mut frame: Frame) -> Result<(), SimError> {
        let now = sched.now();
        self.trace(now, node, TracePoint::Arrive, &frame);
        if let App::Router = self.nodes[node.index()].app {
            if self.params.transparent_clock && frame.ptp_kind().is_some_and(|k| k.is_event()) {
                frame.ingress_stamp = Some(self.nodes[node.index()].clock.hw_read(now)?);
            }
            let extra = match dir {
                Direction::Down => self.params.injected_residence[0],
                Direction::Up => self.params.injected_residence[1],
            };
            sched.schedule_in(self.params.hop_delay + extra, Event::Forward { node, frame });
            return Ok(());
        }
        if frame.dst != node {
            debug!("{} received frame for {}, dropping", self.topo.name(node), frame.dst);
            self.counters.dropped[frame.class.index()] += 1;
            return Ok(());
        }
        self.counters.delivered[frame.class.index()] += 1;
        let Payload::Ptp(msg) = frame.payload else {
            return Ok(());
        };
        match self.nodes[node.index()].app {
            App::Master(_) => self.master_receive(sched, node, frame.src, msg),
            App::Slave(_) => self.slave_receive(sched, node, msg),
            _ => Ok(()),
        }
    }

    fn on_sync_timer(&mut self, sched: &mut Scheduler<Event>) -> Result<(), SimError> {
        let now = sched.now();
        let master = self.master;
        let seq = match &mut self.nodes[master.index()].app {
            App::Master(m) => m.next_sync_seq(),
            _ => unreachable!("master node runs the master app"),
        };
        for i in 0..self.slaves.len() {
            let slave = self.slaves[i];
            let extra = match &mut self.nodes[master.index()].app {
                App::Master(m) => m.frames_before(MessageKind::Sync),
                _ => unreachable!(),
            };
            for size in extra {
                let probe = self.new_frame(master, slave, size, Payload::Probe);
                self.originate(sched, master, probe)?;
            }
            let estimate = self.sw_timestamp(master, now)?;
            let sync = self.new_frame(
                master,
                slave,
                crate::net::PTP_FRAME_BYTES,
                Payload::Ptp(PtpMessage::sync(seq, estimate)),
            );
            self.originate(sched, master, sync)?;
        }
        let next = now + self.params.sync_interval;
        if next < self.params.duration {
            sched.schedule(next, Event::SyncTimer)?;
        }
        Ok(())
    }

    fn master_receive(&mut self, sched: &mut Scheduler<Event>, master: NodeId, from: NodeId, msg: PtpMessage) -> Result<(), SimError> {
        if msg.kind != MessageKind::DelayReq {
            return Ok(());
        }
        let t4 = self.sw_timestamp(master, sched.now())?;
        let resp = match &self.nodes[master.index()].app {
            App::Master(m) => m.on_delay_req(&msg, t4),
            _ => unreachable!(),
        };
        match resp {
            Ok(resp) => {
                let f = self.new_frame(master, from, crate::net::PTP_FRAME_BYTES, Payload::Ptp(resp));
                self.originate(sched, master, f)
            }
            Err(e) => {
                debug!("master: {e}");
                Ok(())
            }
        }
    }

    fn slave_receive(&mut self, sched: &mut Scheduler<Event>, slave: NodeId, msg: PtpMessage) -> Result<(), SimError> {
        let now = sched.now();
        match msg.kind {
            MessageKind::Sync => {
                let t2 = self.sw_timestamp(slave, now)?;
                let App::Slave(s) = &mut self.nodes[slave.index()].app else {
                    unreachable!()
                };
                let timeout = s.config().exchange_timeout;
                match s.on_sync(&msg, t2) {
                    Ok(action) => {
                        sched.schedule_in(timeout, Event::Timeout { slave, seq: msg.seq_id });
                        if let SyncAction::SendDelayReq(seq) = action {
                            self.send_delay_req(sched, slave, seq)?;
                        }
                    }
                    Err(e) => debug!("{}: {e}", self.topo.name(slave)),
                }
                Ok(())
            }
            MessageKind::FollowUp => {
                let App::Slave(s) = &mut self.nodes[slave.index()].app else {
                    unreachable!()
                };
                match s.on_follow_up(&msg) {
                    Ok(seq) => self.send_delay_req(sched, slave, seq),
                    Err(e) => {
                        debug!("{}: {e}", self.topo.name(slave));
                        Ok(())
                    }
                }
            }
            MessageKind::DelayResp => {
                let App::Slave(s) = &mut self.nodes[slave.index()].app else {
                    unreachable!()
                };
                match s.on_delay_resp(&msg) {
                    Ok(theta) => {
                        self.nodes[slave.index()].clock.apply_offset(theta);
                        self.stats.exchange_completed(slave, now);
                        self.sample(now, slave)
                    }
                    Err(PtpError::NoMatchingRecord { .. }) => Ok(()),
                    Err(e) => {
                        debug!("{}: {e}", self.topo.name(slave));
                        Ok(())
                    }
                }
            }
            MessageKind::DelayReq => Ok(()),
        }
    }

    fn send_delay_req(&mut self, sched: &mut Scheduler<Event>, slave: NodeId, seq: u16) -> Result<(), SimError> {
        let master = self.master;
        let extra = match &mut self.nodes[slave.index()].app {
            App::Slave(s) => s.frames_before(MessageKind::DelayReq),
            _ => unreachable!(),
        };
        for size in extra {
            let probe = self.new_frame(slave, master, size, Payload::Probe);
            self.originate(sched, slave, probe)?;
        }
        let req = self.new_frame(
            slave,
            master,
            crate::net::PTP_FRAME_BYTES,
            Payload::Ptp(PtpMessage::delay_req(seq)),
        );
        self.originate(sched, slave, req)
    }

    fn on_emit(&mut self, sched: &mut Scheduler<Event>, flow: usize, size_bytes: u32) -> Result<(), SimError> {
        let (src, dst) = (self.flows[flow].src, self.flows[flow].dst);
        let frame = self.new_frame(src, dst, size_bytes, Payload::Background);
        self.originate(sched, src, frame)?;
        if let Some(next) = self.flows[flow].next_packet(&mut self.flow_rngs[flow]) {
            let at = sched.now() + next.delta;
            if at < self.params.duration {
                sched.schedule(
                    at,
                    Event::Emit {
                        flow,
                        size_bytes: next.size_bytes,
                    },
                )?;
            }
        }
        Ok(())
    }
}
