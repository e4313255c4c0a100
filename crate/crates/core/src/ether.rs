//! Ethernet frame sizes, frame rates and goodput.
//!
//! Byte accounting per frame on the wire:
//!
//! | field                 | bytes    |
//! |-----------------------|----------|
//! | inter-frame gap       | 12       |
//! | preamble + SFD        | 8        |
//! | destination / source  | 6 + 6    |
//! | EtherType / length    | 2        |
//! | 802.1Q tag (each)     | 4        |
//! | payload               | 46..1500 |
//! | FCS (CRC)             | 4        |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IFG: u32 = 12;
pub const PREAMBLE_SFD: u32 = 8;
pub const MAC_ADDR: u32 = 6;
pub const ETHERTYPE: u32 = 2;
pub const CRC: u32 = 4;
pub const VLAN_TAG: u32 = 4;

pub const MIN_PAYLOAD: u32 = 46;
pub const MAX_PAYLOAD: u32 = 1500;
pub const MAX_JUMBO_PAYLOAD: u32 = 9000;
pub const MAX_VLAN_TAGS: u32 = 2;

/// Fixed per-frame cost of an untagged frame: 38 bytes.
pub const FRAME_OVERHEAD: u32 = IFG + PREAMBLE_SFD + 2 * MAC_ADDR + ETHERTYPE + CRC;
/// MAC header of an untagged frame: 14 bytes.
pub const MAC_HEADER: u32 = 2 * MAC_ADDR + ETHERTYPE;

/// Anatomy of one Ethernet frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    payload: u32,
    vlan_tags: u32,
    jumbo: bool,
}

impl FrameSpec {
    /// A standard frame: 46..=1500 payload bytes.
    pub fn new(payload: u32, vlan_tags: u32) -> Result<Self> {
        Self::build(payload, vlan_tags, false)
    }

    /// A frame allowed to carry up to 9000 payload bytes.
    pub fn jumbo(payload: u32, vlan_tags: u32) -> Result<Self> {
        Self::build(payload, vlan_tags, true)
    }

    fn build(payload: u32, vlan_tags: u32, jumbo: bool) -> Result<Self> {
        if payload < MIN_PAYLOAD {
            return Err(Error::Undersized { payload });
        }
        if payload > MAX_JUMBO_PAYLOAD {
            return Err(Error::Oversized { payload });
        }
        if payload > MAX_PAYLOAD && !jumbo {
            return Err(Error::JumboRequired { payload });
        }
        if vlan_tags > MAX_VLAN_TAGS {
            return Err(Error::TooManyTags { tags: vlan_tags });
        }
        Ok(FrameSpec {
            payload,
            vlan_tags,
            jumbo,
        })
    }

    pub fn payload(&self) -> u32 {
        self.payload
    }

    pub fn vlan_tags(&self) -> u32 {
        self.vlan_tags
    }

    pub fn is_jumbo(&self) -> bool {
        self.jumbo
    }

    /// Bytes the frame occupies on the wire, gap and preamble included.
    pub fn physical_size(&self) -> u32 {
        self.payload + FRAME_OVERHEAD + VLAN_TAG * self.vlan_tags
    }

    /// Bytes counted as delivered: MAC header, tags and payload, plus the FCS
    /// when `include_crc` is set. Gap and preamble never count.
    pub fn counted_size(&self, include_crc: bool) -> u32 {
        let crc = if include_crc { CRC } else { 0 };
        MAC_HEADER + VLAN_TAG * self.vlan_tags + self.payload + crc
    }
}

/// Line rate of an interface in bits/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LinkRate(f64);

impl LinkRate {
    pub fn new(bits_per_second: f64) -> Result<Self> {
        if !(bits_per_second > 0.0 && bits_per_second.is_finite()) {
            return Err(Error::domain(
                "link rate",
                bits_per_second,
                "(0, inf) bits/s",
            ));
        }
        Ok(LinkRate(bits_per_second))
    }

    pub fn bits_per_second(&self) -> f64 {
        self.0
    }
}

/// Frame rate of a saturated link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRate {
    /// Unfloored quotient, used for goodput.
    pub exact: f64,
    /// Whole frames per second, used for display.
    pub whole: u64,
}

/// Physical size of a standard (or, above 1500 bytes, jumbo) frame.
pub fn frame_physical_size(payload: u32, vlan_tags: u32) -> Result<u32> {
    let spec = if payload > MAX_PAYLOAD {
        FrameSpec::jumbo(payload, vlan_tags)?
    } else {
        FrameSpec::new(payload, vlan_tags)?
    };
    Ok(spec.physical_size())
}

pub fn max_frames_per_second(link: LinkRate, frame: &FrameSpec) -> FrameRate {
    let exact = link.0 / (8.0 * f64::from(frame.physical_size()));
    FrameRate {
        exact,
        whole: exact.floor() as u64,
    }
}

/// Useful bits/s of a saturated link carrying `frame`-sized frames.
pub fn ethernet_goodput(link: LinkRate, frame: &FrameSpec, include_crc: bool) -> f64 {
    let fps = max_frames_per_second(link, frame).exact;
    fps * 8.0 * f64::from(frame.counted_size(include_crc))
}
