//! Round-based Reno sender over a path with independent per-segment loss.
//!
//! One round is one RTT. At the start of a round the sender transmits
//! `min(cwnd, rwnd, BDP)` bytes: pending retransmissions first, then new data
//! in SMSS-sized segments (the last one may be short). Every segment is lost
//! independently with probability `p`. The receiver ACKs each arriving
//! segment in order:
//!
//! - segments ahead of the first loss produce new ACKs;
//! - segments behind it produce duplicate ACKs.
//!
//! Three duplicate ACKs trigger fast retransmit. When fewer than three
//! segments survive behind the first loss, the loss is only detected by the
//! retransmission timer, which costs [`RTO_ROUNDS`] silent rounds before
//! slow start resumes. Fast recovery lasts one round: the retransmission
//! leads the next round, and its ACK deflates the window. If that
//! retransmission is lost again the sender falls back to the timer.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LossKind, LossResponse, Phase, RenoState, UNBOUNDED_RWND};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Silent rounds charged for a retransmission timeout.
pub const RTO_ROUNDS: u64 = 2;

/// Largest window a scaled TCP receiver can advertise (2^30 bytes). Bounds
/// a round even when neither rwnd nor a bottleneck does.
pub const MAX_WINDOW: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub smss: u64,
    /// Seconds per round.
    pub rtt: f64,
    /// Independent per-segment loss probability.
    pub loss_p: f64,
    /// Optional bottleneck in bits/s; caps each round at one bandwidth-delay product.
    pub bottleneck: Option<f64>,
    /// Number of rounds to simulate, timer waits included.
    pub duration: u64,
    pub seed: u64,
    /// Receiver window in bytes; [`UNBOUNDED_RWND`] for none.
    pub rwnd: u64,
}

impl PathConfig {
    pub fn new(smss: u64, rtt: f64, loss_p: f64, duration: u64, seed: u64) -> Self {
        PathConfig {
            smss,
            rtt,
            loss_p,
            bottleneck: None,
            duration,
            seed,
            rwnd: UNBOUNDED_RWND,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.smss == 0 {
            return Err(Error::domain("smss", 0.0, "(0, inf) bytes"));
        }
        if !(self.rtt > 0.0 && self.rtt.is_finite()) {
            return Err(Error::domain("rtt", self.rtt, "(0, inf) seconds"));
        }
        if !(self.loss_p >= 0.0 && self.loss_p < 1.0) {
            return Err(Error::domain("loss probability", self.loss_p, "[0, 1)"));
        }
        if self.duration == 0 {
            return Err(Error::domain("duration", 0.0, "[1, inf) rounds"));
        }
        if self.rwnd == 0 {
            return Err(Error::domain("rwnd", 0.0, "(0, inf) bytes"));
        }
        if let Some(b) = self.bottleneck {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::domain("bottleneck", b, "(0, inf) bits/s"));
            }
        }
        Ok(())
    }

    /// Largest number of bytes one round may carry, before cwnd/rwnd.
    fn round_cap(&self) -> f64 {
        let window = MAX_WINDOW as f64;
        match self.bottleneck {
            Some(b) => (b * self.rtt / 8.0).clamp(1.0, window),
            None => window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    None,
    FastRetransmit,
    Timeout,
    RtoWait,
}

impl TraceEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceEvent::None => "none",
            TraceEvent::FastRetransmit => "fast_retransmit",
            TraceEvent::Timeout => "timeout",
            TraceEvent::RtoWait => "rto_wait",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub round: u64,
    /// Congestion window at the start of the round.
    pub cwnd: f64,
    /// Bytes transmitted in the round.
    pub sent: u64,
    /// Loss reaction that ended the round, if any.
    pub event: TraceEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub round: u64,
    pub response: LossResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub rounds: u64,
    pub rtt: f64,
    /// Bytes that reached the receiver, each byte counted once.
    pub delivered: u64,
    /// `8 · delivered / (rounds · rtt)`.
    pub throughput: f64,
    pub retransmits: u64,
    pub timeouts: u64,
    pub segments_sent: u64,
    pub segments_lost: u64,
    pub cwnd_trace: Vec<TracePoint>,
    pub loss_events: Vec<LossRecord>,
}

impl TraceSummary {
    /// Mean number of segments transmitted per loss; `None` without losses.
    pub fn segments_per_loss(&self) -> Option<f64> {
        (self.segments_lost > 0).then(|| self.segments_sent as f64 / self.segments_lost as f64)
    }
}

struct Sender {
    config: PathConfig,
    state: RenoState,
    rng: StreamRng,
    pending: VecDeque<u64>,
    idle_rounds: u64,
    summary: TraceSummary,
}

impl Sender {
    fn new(config: PathConfig) -> Result<Self> {
        config.validate()?;
        Ok(Sender {
            config,
            state: RenoState::new(config.smss, config.rwnd)?,
            rng: rng::substream(config.seed, 0),
            pending: VecDeque::new(),
            idle_rounds: 0,
            summary: TraceSummary {
                rounds: config.duration,
                rtt: config.rtt,
                delivered: 0,
                throughput: 0.0,
                retransmits: 0,
                timeouts: 0,
                segments_sent: 0,
                segments_lost: 0,
                cwnd_trace: Vec::with_capacity(config.duration.min(1 << 20) as usize),
                loss_events: Vec::new(),
            },
        })
    }

    /// Bytes the sender may have in flight right now. While recovering, the
    /// window the sender will hold once the retransmission is ACKed.
    fn window_bytes(&self) -> u64 {
        let cwnd = match self.state.phase() {
            Phase::FastRecovery => self.state.ssthresh(),
            _ => self.state.cwnd(),
        };
        let bytes = cwnd
            .min(self.state.rwnd() as f64)
            .min(self.config.round_cap())
            .floor();
        (bytes as u64).max(1)
    }

    /// Segment sizes for this round, pending retransmissions first.
    fn fill_round(&mut self) -> Vec<u64> {
        let budget = self.window_bytes();
        let mut used = 0u64;
        let mut segments = Vec::new();
        while let Some(&bytes) = self.pending.front() {
            if used > 0 && used + bytes > budget {
                break;
            }
            self.pending.pop_front();
            used += bytes;
            segments.push(bytes);
        }
        while used < budget {
            let bytes = self.config.smss.min(budget - used);
            used += bytes;
            segments.push(bytes);
        }
        segments
    }

    fn step(&mut self, round: u64) {
        let cwnd = self.state.cwnd();
        if self.idle_rounds > 0 {
            self.idle_rounds -= 1;
            self.summary.cwnd_trace.push(TracePoint {
                round,
                cwnd,
                sent: 0,
                event: TraceEvent::RtoWait,
            });
            return;
        }

        let segments = self.fill_round();
        let sent: u64 = segments.iter().sum();
        self.state.flight_size = sent;

        let mut lost = Vec::new();
        let mut fast_retransmit = None;
        for &bytes in &segments {
            self.summary.segments_sent += 1;
            if self.config.loss_p > 0.0 && self.rng.random::<f64>() < self.config.loss_p {
                self.summary.segments_lost += 1;
                lost.push(bytes);
                continue;
            }
            self.summary.delivered += bytes;
            if lost.is_empty() {
                self.state.on_ack(bytes);
                self.clock_out();
            } else if let Some(response) = self.state.on_dup_ack() {
                fast_retransmit = Some(response);
            }
        }

        let mut event = TraceEvent::None;
        if !lost.is_empty() {
            self.summary.retransmits += lost.len() as u64;
            self.pending.extend(lost);
            let response = match fast_retransmit {
                Some(r) => {
                    event = TraceEvent::FastRetransmit;
                    r
                }
                None => {
                    // Too few duplicate ACKs, or the recovery retransmission
                    // itself was lost.
                    event = TraceEvent::Timeout;
                    self.idle_rounds = RTO_ROUNDS;
                    self.summary.timeouts += 1;
                    self.state.on_timeout()
                }
            };
            self.summary
                .loss_events
                .push(LossRecord { round, response });
        }
        self.summary.cwnd_trace.push(TracePoint {
            round,
            cwnd,
            sent,
            event,
        });
    }

    /// Each new ACK releases fresh data, keeping the outstanding amount at
    /// the current send window.
    fn clock_out(&mut self) {
        let window = self
            .state
            .send_window()
            .min(self.config.round_cap())
            .floor() as u64;
        self.state.flight_size = self.state.flight_size.max(window);
    }

    fn finish(mut self) -> TraceSummary {
        let elapsed = self.config.duration as f64 * self.config.rtt;
        self.summary.throughput = 8.0 * self.summary.delivered as f64 / elapsed;
        self.summary
    }
}

/// Simulates one connection for `config.duration` rounds.
pub fn run(config: &PathConfig) -> Result<TraceSummary> {
    let mut sender = Sender::new(*config)?;
    for round in 0..config.duration {
        sender.step(round);
    }
    Ok(sender.finish())
}

/// Runs `config` once per seed, in parallel, returning results in seed order.
pub fn run_many(config: &PathConfig, seeds: &[u64]) -> Result<Vec<TraceSummary>> {
    config.validate()?;
    seeds
        .par_iter()
        .map(|&seed| run(&PathConfig { seed, ..*config }))
        .collect()
}

/// Writes `round,cwnd_bytes,event` rows.
pub fn write_trace_csv<W: Write>(summary: &TraceSummary, mut out: W) -> io::Result<()> {
    writeln!(out, "round,cwnd_bytes,event")?;
    for point in &summary.cwnd_trace {
        writeln!(
            out,
            "{},{},{}",
            point.round,
            point.cwnd,
            point.event.as_str()
        )?;
    }
    out.flush()
}

impl From<LossKind> for TraceEvent {
    fn from(kind: LossKind) -> Self {
        match kind {
            LossKind::FastRetransmit => TraceEvent::FastRetransmit,
            LossKind::Timeout => TraceEvent::Timeout,
        }
    }
}
