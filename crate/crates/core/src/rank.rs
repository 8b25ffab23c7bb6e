use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// Position in the rank hierarchy: the naturals (and -1 for arc tips),
/// then the arrow rank, then omega.
///
/// The derived order is the intended one: every `Finite(n)` precedes
/// `ArrowOmega`, which precedes `Omega`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankTag {
    Finite(i64),
    ArrowOmega,
    Omega,
}

pub fn rank_compare(a: RankTag, b: RankTag) -> Ordering {
    a.cmp(&b)
}

impl RankTag {
    pub const ZERO: RankTag = RankTag::Finite(0);

    pub fn finite(self) -> Option<i64> {
        match self {
            RankTag::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// The rank of the ditips that vertices of this rank are made of.
    pub fn member_rank(self) -> Option<RankTag> {
        match self {
            RankTag::Finite(n) if n >= 0 => Some(RankTag::Finite(n - 1)),
            RankTag::Finite(_) => None,
            RankTag::ArrowOmega => None,
            RankTag::Omega => Some(RankTag::ArrowOmega),
        }
    }

    /// The rank of the vertices built by partitioning ditips of this rank.
    pub fn vertex_rank_above(self) -> Option<RankTag> {
        match self {
            RankTag::Finite(n) if n >= -1 => Some(RankTag::Finite(n + 1)),
            RankTag::ArrowOmega => Some(RankTag::Omega),
            _ => None,
        }
    }

    pub fn is_vertex_rank(self) -> bool {
        matches!(self, RankTag::Finite(n) if n >= 0) || self == RankTag::Omega
    }

    pub fn is_tip_rank(self) -> bool {
        matches!(self, RankTag::Finite(n) if n >= -1) || self == RankTag::ArrowOmega
    }

    pub fn is_digraph_rank(self) -> bool {
        !matches!(self, RankTag::Finite(n) if n < 0)
    }
}

impl fmt::Display for RankTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankTag::Finite(n) => write!(f, "{n}"),
            RankTag::ArrowOmega => f.write_str("arrow"),
            RankTag::Omega => f.write_str("omega"),
        }
    }
}

impl Serialize for RankTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RankTag::Finite(n) => s.serialize_i64(*n),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rank `{0}` (expected an integer >= -1, `arrow` or `omega`)")]
pub struct ParseRankError(pub String);

impl FromStr for RankTag {
    type Err = ParseRankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arrow" => Ok(RankTag::ArrowOmega),
            "omega" => Ok(RankTag::Omega),
            _ => match s.parse::<i64>() {
                Ok(n) if n >= -1 => Ok(RankTag::Finite(n)),
                _ => Err(ParseRankError(s.to_string())),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<RankTag> {
        let mut v: Vec<RankTag> = (-1..6).map(RankTag::Finite).collect();
        v.push(RankTag::Finite(1_000_000));
        v.push(RankTag::ArrowOmega);
        v.push(RankTag::Omega);
        v
    }

    #[test]
    fn examples() {
        use RankTag::*;
        assert_eq!(rank_compare(Finite(3), Finite(3)), Ordering::Equal);
        assert_eq!(rank_compare(Finite(1_000_000), ArrowOmega), Ordering::Less);
        assert_eq!(rank_compare(ArrowOmega, Omega), Ordering::Less);
    }

    #[test]
    fn total_order_exhaustive() {
        let s = sample();
        for &a in &s {
            for &b in &s {
                let ab = rank_compare(a, b);
                assert_eq!(ab, rank_compare(b, a).reverse());
                if ab == Ordering::Equal {
                    assert_eq!(a, b);
                }
                for &c in &s {
                    if ab != Ordering::Greater && rank_compare(b, c) != Ordering::Greater {
                        assert_ne!(rank_compare(a, c), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn member_ranks() {
        assert_eq!(RankTag::Finite(0).member_rank(), Some(RankTag::Finite(-1)));
        assert_eq!(RankTag::Omega.member_rank(), Some(RankTag::ArrowOmega));
        assert_eq!(RankTag::ArrowOmega.member_rank(), None);
        assert_eq!(RankTag::ArrowOmega.vertex_rank_above(), Some(RankTag::Omega));
        assert!(!RankTag::ArrowOmega.is_vertex_rank());
        assert!(!RankTag::Finite(-1).is_digraph_rank());
    }

    #[test]
    fn parse_display() {
        for r in sample() {
            assert_eq!(r.to_string().parse::<RankTag>().unwrap(), r);
        }
        assert!("-2".parse::<RankTag>().is_err());
        assert!("w".parse::<RankTag>().is_err());
    }
}
