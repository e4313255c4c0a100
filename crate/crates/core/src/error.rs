use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Input-domain failures raised by the arithmetic modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the valid domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("payload of {payload} bytes is below the 46-byte Ethernet minimum")]
    Undersized { payload: u32 },
    #[error("payload of {payload} bytes exceeds 1500 bytes and jumbo frames are not enabled")]
    JumboRequired { payload: u32 },
    #[error("payload of {payload} bytes exceeds the 9000-byte jumbo limit")]
    Oversized { payload: u32 },
    #[error("{tags} VLAN tags requested, at most 2 are supported")]
    TooManyTags { tags: u32 },
    #[error("headers need {needed} bytes but the Ethernet payload is only {payload} bytes")]
    HeadersExceedPayload { needed: u32, payload: u32 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}
