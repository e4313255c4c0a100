//! Reno congestion control.
//!
//! [`RenoState`] applies the sender-side rules one event at a time: slow
//! start, congestion avoidance, fast retransmit / fast recovery on the third
//! duplicate ACK, and the retransmission-timeout reset. [`sim`] drives those
//! rules over a lossy path, one RTT per round.

pub mod sim;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sim::{
    run, run_many, write_trace_csv, PathConfig, TraceEvent, TracePoint, TraceSummary, MAX_WINDOW,
};

/// `rwnd` value meaning "no receiver limit".
pub const UNBOUNDED_RWND: u64 = u64::MAX;

/// Duplicate ACKs that trigger fast retransmit.
pub const DUP_ACK_THRESHOLD: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    FastRetransmit,
    Timeout,
}

/// What the sender did in response to a detected loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossResponse {
    pub kind: LossKind,
    /// Outstanding bytes when the loss was detected.
    pub flight_size: u64,
    pub smss: u64,
    /// Threshold after the reaction.
    pub ssthresh: f64,
    /// Window after the reaction.
    pub cwnd: f64,
}

impl LossResponse {
    /// `max(FlightSize / 2, 2 · SMSS)`.
    pub fn expected_ssthresh(&self) -> f64 {
        halved_threshold(self.flight_size, self.smss)
    }
}

fn halved_threshold(flight_size: u64, smss: u64) -> f64 {
    (flight_size as f64 / 2.0).max(2.0 * smss as f64)
}

/// Initial congestion window in bytes for a sender MSS of `smss` bytes.
pub fn initial_window(smss: u64) -> Result<u64> {
    match smss {
        0 => Err(Error::domain("smss", 0.0, "(0, inf) bytes")),
        s if s > 2190 => Ok(2 * s),
        s if s > 1095 => Ok(3 * s),
        s => Ok(4 * s),
    }
}

/// Sender congestion state. Byte counts are `f64` where the rules produce
/// fractions (congestion avoidance adds `SMSS²/cwnd` per ACK).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenoState {
    cwnd: f64,
    ssthresh: f64,
    smss: u64,
    rwnd: u64,
    flight_size: u64,
    dup_acks: u32,
    phase: Phase,
    timeouts: u64,
}

impl RenoState {
    /// Fresh connection: `cwnd = IW`, `ssthresh = rwnd`.
    pub fn new(smss: u64, rwnd: u64) -> Result<Self> {
        let iw = initial_window(smss)?;
        Self::from_parts(smss, rwnd, iw as f64, rwnd as f64)
    }

    /// State at an arbitrary point outside fast recovery.
    pub fn from_parts(smss: u64, rwnd: u64, cwnd: f64, ssthresh: f64) -> Result<Self> {
        if smss == 0 {
            return Err(Error::domain("smss", 0.0, "(0, inf) bytes"));
        }
        if !(cwnd >= smss as f64 && cwnd.is_finite()) {
            return Err(Error::domain("cwnd", cwnd, "[SMSS, inf) bytes"));
        }
        if ssthresh.is_nan() || ssthresh <= 0.0 {
            return Err(Error::domain("ssthresh", ssthresh, "(0, inf) bytes"));
        }
        let mut state = RenoState {
            cwnd,
            ssthresh,
            smss,
            rwnd,
            flight_size: 0,
            dup_acks: 0,
            phase: Phase::SlowStart,
            timeouts: 0,
        };
        state.reselect_phase();
        Ok(state)
    }

    pub fn with_flight_size(mut self, flight_size: u64) -> Self {
        self.flight_size = flight_size;
        self
    }

    pub fn cwnd(&self) -> f64 {
        self.cwnd
    }

    pub fn ssthresh(&self) -> f64 {
        self.ssthresh
    }

    pub fn smss(&self) -> u64 {
        self.smss
    }

    pub fn rwnd(&self) -> u64 {
        self.rwnd
    }

    pub fn flight_size(&self) -> u64 {
        self.flight_size
    }

    pub fn dup_acks(&self) -> u32 {
        self.dup_acks
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn timeouts(&self) -> u64 {
        self.timeouts
    }

    /// `min(cwnd, rwnd)`: the most the sender may have outstanding.
    pub fn send_window(&self) -> f64 {
        self.cwnd.min(self.rwnd as f64)
    }

    // A tie between cwnd and ssthresh goes to congestion avoidance.
    fn reselect_phase(&mut self) {
        self.phase = if self.cwnd < self.ssthresh {
            Phase::SlowStart
        } else {
            Phase::CongestionAvoidance
        };
    }

    /// An ACK acknowledging `newly_acked` new bytes.
    pub fn on_ack(&mut self, newly_acked: u64) {
        let smss = self.smss as f64;
        match self.phase {
            Phase::FastRecovery => {
                // Recovery ends: deflate the window inflated by dup ACKs.
                self.cwnd = self.ssthresh.max(smss);
            }
            Phase::SlowStart => {
                self.cwnd += newly_acked.min(self.smss) as f64;
            }
            Phase::CongestionAvoidance => {
                if newly_acked > 0 {
                    self.cwnd += smss * smss / self.cwnd;
                }
            }
        }
        self.dup_acks = 0;
        self.flight_size = self.flight_size.saturating_sub(newly_acked);
        self.reselect_phase();
    }

    /// A duplicate ACK. Returns the loss reaction when this one triggers
    /// fast retransmit.
    pub fn on_dup_ack(&mut self) -> Option<LossResponse> {
        self.dup_acks = self.dup_acks.saturating_add(1);
        let smss = self.smss as f64;
        if self.phase == Phase::FastRecovery {
            self.cwnd += smss;
            return None;
        }
        if self.dup_acks != DUP_ACK_THRESHOLD {
            return None;
        }
        self.ssthresh = halved_threshold(self.flight_size, self.smss);
        self.cwnd = self.ssthresh + f64::from(DUP_ACK_THRESHOLD) * smss;
        self.phase = Phase::FastRecovery;
        Some(self.response(LossKind::FastRetransmit))
    }

    /// Retransmission timer expiry.
    pub fn on_timeout(&mut self) -> LossResponse {
        self.ssthresh = halved_threshold(self.flight_size, self.smss);
        self.cwnd = self.smss as f64;
        self.dup_acks = 0;
        self.timeouts += 1;
        self.reselect_phase();
        self.response(LossKind::Timeout)
    }

    fn response(&self, kind: LossKind) -> LossResponse {
        LossResponse {
            kind,
            flight_size: self.flight_size,
            smss: self.smss,
            ssthresh: self.ssthresh,
            cwnd: self.cwnd,
        }
    }
}
