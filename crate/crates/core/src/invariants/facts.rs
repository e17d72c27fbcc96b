use std::fmt;

use serde::{Serialize, Serializer};

/// Number of ends of a finitely generated group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndCount {
    Zero,
    Two,
    One,
    Inf,
    Unknown,
}

impl EndCount {
    pub fn is_known(self) -> bool {
        self != EndCount::Unknown
    }

    /// Known to be infinite (any end count other than zero).
    pub fn is_infinite(self) -> bool {
        matches!(self, EndCount::One | EndCount::Two | EndCount::Inf)
    }

    pub fn parse(text: &str) -> Option<Self> {
        Some(match text.trim().to_ascii_uppercase().as_str() {
            "0" | "ZERO" => EndCount::Zero,
            "1" | "ONE" => EndCount::One,
            "2" | "TWO" => EndCount::Two,
            "INF" | "∞" => EndCount::Inf,
            "UNKNOWN" => EndCount::Unknown,
            _ => return None,
        })
    }
}

impl fmt::Display for EndCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndCount::Zero => "ZERO",
            EndCount::Two => "TWO",
            EndCount::One => "ONE",
            EndCount::Inf => "INF",
            EndCount::Unknown => "UNKNOWN",
        })
    }
}

/// Three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriState {
    True,
    False,
    Unknown,
}

impl TriState {
    pub fn is_known(self) -> bool {
        self != TriState::Unknown
    }
}

impl From<bool> for TriState {
    fn from(b: bool) -> Self {
        if b {
            TriState::True
        } else {
            TriState::False
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::True => "TRUE",
            TriState::False => "FALSE",
            TriState::Unknown => "UNKNOWN",
        })
    }
}

/// Boundary number together with the derived rank of `H^2(G; ZG)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PNumber {
    P0,
    P1,
    P2,
    PInf,
    Unknown,
}

impl PNumber {
    /// Rank of `H^2(G; ZG)`: one less than the boundary number, zero for `P0`.
    pub fn h2rank(self) -> H2Rank {
        match self {
            PNumber::P0 => H2Rank::Zero,
            PNumber::P1 => H2Rank::Zero,
            PNumber::P2 => H2Rank::One,
            PNumber::PInf => H2Rank::Inf,
            PNumber::Unknown => H2Rank::Unknown,
        }
    }
}

impl fmt::Display for PNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PNumber::P0 => "P0",
            PNumber::P1 => "P1",
            PNumber::P2 => "P2",
            PNumber::PInf => "PINF",
            PNumber::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum H2Rank {
    Zero,
    One,
    Inf,
    Unknown,
}

impl H2Rank {
    pub fn is_known(self) -> bool {
        self != H2Rank::Unknown
    }
}

impl fmt::Display for H2Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            H2Rank::Zero => "0",
            H2Rank::One => "1",
            H2Rank::Inf => "INF",
            H2Rank::Unknown => "UNKNOWN",
        })
    }
}

macro_rules! serialize_as_display {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

serialize_as_display!(EndCount, TriState, PNumber, H2Rank);
