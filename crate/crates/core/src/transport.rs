//! TCP/UDP over IPv4: per-frame application bytes, goodput, window-limited
//! throughput and the loss-based throughput model `MSS·√(3/2) / (RTT·√p)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ether::{self, FrameSpec, LinkRate};

pub const IPV4_HEADER: u32 = 20;
pub const TCP_HEADER: u32 = 20;
pub const UDP_HEADER: u32 = 8;
/// TCP timestamp option, padded to a 4-byte boundary.
pub const TCP_TIMESTAMPS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Tcp,
    Udp,
}

/// Encapsulation of application data inside the Ethernet payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportSpec {
    pub protocol: Protocol,
    /// TCP option bytes; ignored for UDP.
    pub tcp_options: u32,
}

impl TransportSpec {
    pub const fn tcp() -> Self {
        TransportSpec {
            protocol: Protocol::Tcp,
            tcp_options: 0,
        }
    }

    pub const fn tcp_with_timestamps() -> Self {
        TransportSpec {
            protocol: Protocol::Tcp,
            tcp_options: TCP_TIMESTAMPS,
        }
    }

    pub const fn udp() -> Self {
        TransportSpec {
            protocol: Protocol::Udp,
            tcp_options: 0,
        }
    }

    /// IPv4 plus transport header bytes.
    pub fn header_bytes(&self) -> u32 {
        match self.protocol {
            Protocol::Tcp => IPV4_HEADER + TCP_HEADER + self.tcp_options,
            Protocol::Udp => IPV4_HEADER + UDP_HEADER,
        }
    }

    /// Application bytes carried by an Ethernet payload of `payload` bytes.
    pub fn app_bytes(&self, payload: u32) -> Result<u32> {
        let needed = self.header_bytes();
        payload
            .checked_sub(needed)
            .ok_or(Error::HeadersExceedPayload { needed, payload })
    }
}

/// Application bits/s of a saturated link.
pub fn transport_goodput(link: LinkRate, frame: &FrameSpec, spec: &TransportSpec) -> Result<f64> {
    let app = spec.app_bytes(frame.payload())?;
    let fps = ether::max_frames_per_second(link, frame).exact;
    Ok(fps * f64::from(app) * 8.0)
}

/// `8 · window / rtt`, with `window` in bytes and `rtt` in seconds.
pub fn window_throughput(window: f64, rtt: f64) -> Result<f64> {
    if !(rtt > 0.0 && rtt.is_finite()) {
        return Err(Error::domain("rtt", rtt, "(0, inf) seconds"));
    }
    if !(window >= 0.0 && window.is_finite()) {
        return Err(Error::domain("window", window, "[0, inf) bytes"));
    }
    Ok(8.0 * window / rtt)
}

/// Peak congestion window, in segments, of the periodic-loss sawtooth:
/// `W = √(8 / 3p)`.
pub fn mathis_window(loss: f64) -> Result<f64> {
    check_loss(loss)?;
    Ok((8.0 / (3.0 * loss)).sqrt())
}

/// Path parameters of the loss-based throughput model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathModel {
    /// Bytes per segment.
    pub mss: f64,
    /// Seconds.
    pub rtt: f64,
    /// Per-packet loss probability.
    pub loss: f64,
    /// Bytes; only used by window-limited estimates.
    pub window: f64,
}

impl PathModel {
    pub fn new(mss: f64, rtt: f64, loss: f64) -> Result<Self> {
        if !(mss > 0.0 && mss.is_finite()) {
            return Err(Error::domain("mss", mss, "(0, inf) bytes"));
        }
        if !(rtt > 0.0 && rtt.is_finite()) {
            return Err(Error::domain("rtt", rtt, "(0, inf) seconds"));
        }
        check_loss(loss)?;
        Ok(PathModel {
            mss,
            rtt,
            loss,
            window: 0.0,
        })
    }

    pub fn with_window(self, window: f64) -> Self {
        PathModel { window, ..self }
    }
}

/// Loss-limited TCP throughput in bits/s: `8 · MSS · √(3/2) / (RTT · √p)`.
pub fn mathis_throughput(path: &PathModel) -> f64 {
    8.0 * path.mss * 1.5f64.sqrt() / (path.rtt * path.loss.sqrt())
}

fn check_loss(loss: f64) -> Result<()> {
    if !(loss > 0.0 && loss < 1.0) {
        return Err(Error::domain("loss probability", loss, "(0, 1)"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn goodput(payload: u32, spec: TransportSpec) -> f64 {
        let link = LinkRate::new(1e9).unwrap();
        transport_goodput(link, &FrameSpec::new(payload, 0).unwrap(), &spec).unwrap()
    }

    #[test]
    fn app_bytes_ranges() {
        assert_eq!(TransportSpec::tcp().app_bytes(46).unwrap(), 6);
        assert_eq!(TransportSpec::tcp().app_bytes(1500).unwrap(), 1460);
        assert_eq!(
            TransportSpec::tcp_with_timestamps()
                .app_bytes(1500)
                .unwrap(),
            1448
        );
        assert_eq!(TransportSpec::udp().app_bytes(46).unwrap(), 18);
        assert_eq!(TransportSpec::udp().app_bytes(1500).unwrap(), 1472);
    }

    #[test]
    fn headers_exceeding_payload() {
        assert_eq!(
            TransportSpec::tcp_with_timestamps().app_bytes(46),
            Err(Error::HeadersExceedPayload {
                needed: 52,
                payload: 46
            })
        );
    }

    #[test]
    fn goodput_table() {
        let cases = [
            (46, TransportSpec::tcp(), 71e6),
            (1500, TransportSpec::tcp_with_timestamps(), 941e6),
            (1500, TransportSpec::tcp(), 949e6),
            (46, TransportSpec::udp(), 214e6),
            (1500, TransportSpec::udp(), 957e6),
        ];
        for (payload, spec, want) in cases {
            let got = goodput(payload, spec);
            assert!((got - want).abs() <= 1e6, "{payload} {spec:?}: {got}");
        }
    }

    #[test]
    fn window_limited() {
        assert_eq!(window_throughput(65_535.0, 0.1).unwrap(), 5_242_800.0);
        assert_eq!(window_throughput(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(window_throughput(1234.0, 1.0).unwrap(), 8.0 * 1234.0);
        assert!(window_throughput(1.0, 0.0).is_err());
        assert!(window_throughput(1.0, -1.0).is_err());
    }

    #[test]
    fn sawtooth_window() {
        assert!((mathis_window(0.01).unwrap() - 16.33).abs() < 0.01);
        assert!((mathis_window(2.0 / 3.0).unwrap() - 2.0).abs() < 1e-15);
        let w = mathis_window(0.02).unwrap();
        assert!((mathis_window(0.005).unwrap() - 2.0 * w).abs() < 1e-12);
        for bad in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(mathis_window(bad).is_err());
        }
    }

    #[test]
    fn loss_limited_throughput() {
        let path = PathModel::new(1460.0, 0.1, 0.01).unwrap();
        let t = mathis_throughput(&path);
        assert!((t - 1_430_502.01).abs() < 0.01, "{t}");
        let rare = PathModel::new(1460.0, 0.1, 1e-4).unwrap();
        assert!((mathis_throughput(&rare) - 10.0 * t).abs() < 1e-6);
        let quad = PathModel::new(1460.0, 0.1, 0.04).unwrap();
        assert!((mathis_throughput(&quad) - t / 2.0).abs() < 1e-6);
    }

    #[test]
    fn path_validation() {
        assert!(PathModel::new(0.0, 0.1, 0.01).is_err());
        assert!(PathModel::new(1460.0, 0.0, 0.01).is_err());
        assert!(PathModel::new(1460.0, 0.1, 1.0).is_err());
    }
}
