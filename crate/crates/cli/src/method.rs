use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Out-component algorithms selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Event graph swept with one sketch per event.
    EgHll,
    /// Exact bit matrix.
    Matrix,
    /// Forward sketch bank; reports the mean size only.
    MatrixHll,
    /// Reversed sketch bank; per-node sizes.
    MatrixRevHll,
    /// Fusion over `K` hashed networks.
    Hashed,
    /// As `hashed`, with the hash pipelines run concurrently.
    HashedParallel,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::EgHll,
        Method::Matrix,
        Method::MatrixHll,
        Method::MatrixRevHll,
        Method::Hashed,
        Method::HashedParallel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::EgHll => "eg_hll",
            Method::Matrix => "matrix",
            Method::MatrixHll => "matrix_hll",
            Method::MatrixRevHll => "matrix_rev_hll",
            Method::Hashed => "hashed",
            Method::HashedParallel => "hashed_parallel",
        }
    }

    pub fn uses_sketches(self) -> bool {
        matches!(self, Method::EgHll | Method::MatrixHll | Method::MatrixRevHll)
    }

    pub fn uses_hashing(self) -> bool {
        matches!(self, Method::Hashed | Method::HashedParallel)
    }

    /// Whether the method yields a size for every node rather than just the mean.
    pub fn per_node(self) -> bool {
        self != Method::MatrixHll
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                CliError::Usage(format!("unknown method {s:?}; expected one of {}", known.join(", ")))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert_eq!("bogus".parse::<Method>().unwrap_err().exit_code(), 2);
    }
}
