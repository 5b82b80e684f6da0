//! The interval domain of unsharp values, in exact rational arithmetic.
//!
//! Closed intervals ordered by reverse inclusion: `x ⊑ y` means `x ⊇ y`,
//! i.e. `y` is a sharper value than `x`. Degenerate intervals `[a, a]`
//! sit at the top and play the role of the real numbers. The lifted
//! variant adds a least element below everything, read as the whole
//! real line.
//!
//! Way-below is strict containment in the interior, so no interval is
//! compact: the domain is continuous but has an empty compact basis.
//! The rational intervals themselves form a countable basis, which is
//! why every value handled here has exact rational endpoints.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("invalid interval: lo {0} > hi {1}")]
    Invalid(Rat, Rat),
    #[error("family is not directed: {0} and {1} are disjoint")]
    NotDirected(RatInterval, RatInterval),
    #[error("family has no common point, so no supremum")]
    Unbounded,
    #[error("empty family has no supremum here")]
    EmptyFamily,
}

/// A closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::Invalid(lo, hi));
        }
        Ok(RatInterval { lo, hi })
    }

    /// `[q, q]`, the image of a real number at the top of the domain.
    pub fn point(q: Rat) -> Self {
        RatInterval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// The information order: reverse inclusion.
    pub fn leq(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Way-below: strict containment in the interior.
    pub fn way_below(&self, other: &RatInterval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    /// Membership of `self` in the basic Scott-open determined by
    /// `witness = [a, b]`, i.e. `self ⊆ (a, b)`.
    pub fn in_scott_basic(&self, witness: &RatInterval) -> bool {
        witness.lo < self.lo && self.hi < witness.hi
    }

    pub fn intersects(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Greatest lower bound: the smallest closed interval containing both.
    pub fn meet(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `[q, q]`.
pub fn embed_real(q: Rat) -> RatInterval {
    RatInterval::point(q)
}

/// Supremum of a finite directed family, given by intersection.
/// Directedness of a finite interval family reduces to pairwise
/// nonempty intersection, which is what is checked.
pub fn sup_directed(family: &[RatInterval]) -> Result<RatInterval, IntervalError> {
    if family.is_empty() {
        return Err(IntervalError::EmptyFamily);
    }
    for (k, x) in family.iter().enumerate() {
        for y in &family[k + 1..] {
            if !x.intersects(y) {
                return Err(IntervalError::NotDirected(x.clone(), y.clone()));
            }
        }
    }
    intersection(family).ok_or(IntervalError::Unbounded)
}

/// Supremum of a finite family with a common point. Same intersection
/// formula, justified by almost-bounded completeness rather than
/// directedness.
pub fn sup_bounded(family: &[RatInterval]) -> Result<RatInterval, IntervalError> {
    if family.is_empty() {
        return Err(IntervalError::EmptyFamily);
    }
    intersection(family).ok_or(IntervalError::Unbounded)
}

fn intersection(family: &[RatInterval]) -> Option<RatInterval> {
    let lo = family.iter().map(|x| x.lo.clone()).max().unwrap();
    let hi = family.iter().map(|x| x.hi.clone()).min().unwrap();
    RatInterval::new(lo, hi).ok()
}

/// Greatest lower bound of a nonempty family (the convex hull).
pub fn meet_all(family: &[RatInterval]) -> Result<RatInterval, IntervalError> {
    let first = family.first().ok_or(IntervalError::EmptyFamily)?.clone();
    Ok(family[1..].iter().fold(first, |acc, x| acc.meet(x)))
}

/// The interval domain with a least element adjoined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IrBot {
    Bot,
    Iv(RatInterval),
}

impl IrBot {
    pub fn leq(&self, other: &IrBot) -> bool {
        match (self, other) {
            (IrBot::Bot, _) => true,
            (IrBot::Iv(_), IrBot::Bot) => false,
            (IrBot::Iv(x), IrBot::Iv(y)) => x.leq(y),
        }
    }

    /// The least element is way below everything, itself included, so
    /// it is the one compact element of the lifted domain.
    pub fn way_below(&self, other: &IrBot) -> bool {
        match (self, other) {
            (IrBot::Bot, _) => true,
            (IrBot::Iv(_), IrBot::Bot) => false,
            (IrBot::Iv(x), IrBot::Iv(y)) => x.way_below(y),
        }
    }

    pub fn meet(&self, other: &IrBot) -> IrBot {
        match (self, other) {
            (IrBot::Bot, _) | (_, IrBot::Bot) => IrBot::Bot,
            (IrBot::Iv(x), IrBot::Iv(y)) => IrBot::Iv(x.meet(y)),
        }
    }
}

/// Supremum of any family with an upper bound; the least element is
/// neutral, and a family of bare least elements has supremum ⊥. This is
/// where the lifted domain is bounded complete rather than merely
/// almost so.
pub fn sup_bounded_lifted(family: &[IrBot]) -> Result<IrBot, IntervalError> {
    let proper: Vec<RatInterval> = family
        .iter()
        .filter_map(|x| match x {
            IrBot::Bot => None,
            IrBot::Iv(iv) => Some(iv.clone()),
        })
        .collect();
    if proper.is_empty() {
        return Ok(IrBot::Bot);
    }
    sup_bounded(&proper).map(IrBot::Iv)
}

pub fn sup_directed_lifted(family: &[IrBot]) -> Result<IrBot, IntervalError> {
    if family.is_empty() {
        return Err(IntervalError::EmptyFamily);
    }
    let proper: Vec<RatInterval> = family
        .iter()
        .filter_map(|x| match x {
            IrBot::Bot => None,
            IrBot::Iv(iv) => Some(iv.clone()),
        })
        .collect();
    if proper.is_empty() {
        return Ok(IrBot::Bot);
    }
    sup_directed(&proper).map(IrBot::Iv)
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    lo: Rat,
    hi: Rat,
}

#[derive(Serialize, Deserialize)]
struct BotJson {
    bot: bool,
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IntervalJson {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = IntervalJson::deserialize(deserializer)?;
        RatInterval::new(raw.lo, raw.hi).map_err(D::Error::custom)
    }
}

impl Serialize for IrBot {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            IrBot::Bot => BotJson { bot: true }.serialize(serializer),
            IrBot::Iv(iv) => iv.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for IrBot {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        if let Some(obj) = value.as_object() {
            if obj.contains_key("bot") {
                let b: BotJson = serde_json::from_value(value).map_err(D::Error::custom)?;
                if !b.bot {
                    return Err(D::Error::custom("\"bot\" must be true when present"));
                }
                return Ok(IrBot::Bot);
            }
        }
        let iv: RatInterval = serde_json::from_value(value).map_err(D::Error::custom)?;
        Ok(IrBot::Iv(iv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> RatInterval {
        RatInterval::new(Rat::from_int(lo), Rat::from_int(hi)).unwrap()
    }

    fn ivr(l: (i64, i64), h: (i64, i64)) -> RatInterval {
        RatInterval::new(Rat::new(l.0, l.1), Rat::new(h.0, h.1)).unwrap()
    }

    #[test]
    fn order_is_reverse_inclusion() {
        assert!(iv(0, 2).leq(&iv(1, 2)));
        assert!(!iv(0, 1).leq(&iv(2, 3)));
        // points are maximal: nothing strictly above
        let p = embed_real(Rat::from_int(1));
        assert!(iv(0, 2).leq(&p));
        assert!(p.leq(&p));
        assert!(!p.leq(&iv(0, 2)));
    }

    #[test]
    fn way_below_is_strict_interior_containment() {
        assert!(iv(0, 3).way_below(&iv(1, 2)));
        assert!(!iv(0, 2).way_below(&iv(0, 1))); // left endpoint not strict
        let p = embed_real(Rat::from_int(1));
        assert!(!p.way_below(&p)); // no compact elements in IR
        assert!(!p.way_below(&iv(0, 2)));
    }

    #[test]
    fn directed_sup_is_intersection() {
        let fam = vec![iv(0, 3), iv(1, 3), ivr((1, 1), (5, 2))];
        assert_eq!(sup_directed(&fam).unwrap(), ivr((1, 1), (5, 2)));
        assert_eq!(sup_directed(&[iv(0, 1)]).unwrap(), iv(0, 1));
        assert!(matches!(
            sup_directed(&[iv(0, 1), iv(2, 3)]),
            Err(IntervalError::NotDirected(_, _))
        ));
    }

    #[test]
    fn bounded_sup_examples() {
        assert_eq!(sup_bounded(&[iv(0, 2), iv(1, 3)]).unwrap(), iv(1, 2));
        assert_eq!(sup_bounded(&[iv(1, 1), iv(0, 2)]).unwrap(), iv(1, 1));
        assert!(matches!(
            sup_bounded(&[iv(0, 1), iv(2, 3)]),
            Err(IntervalError::Unbounded)
        ));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(iv(0, 1).meet(&iv(2, 3)), iv(0, 3));
        assert_eq!(iv(0, 3).meet(&iv(1, 2)), iv(0, 3));
        let x = iv(4, 7);
        assert_eq!(x.meet(&x), x);
        assert!(x.meet(&iv(0, 1)).leq(&x));
    }

    #[test]
    fn meet_all_is_the_convex_hull() {
        let family = vec![iv(0, 1), iv(2, 3), iv(-1, 0)];
        assert_eq!(meet_all(&family).unwrap(), iv(-1, 3));
        for member in &family {
            assert!(meet_all(&family).unwrap().leq(member));
        }
        assert!(matches!(meet_all(&[]), Err(IntervalError::EmptyFamily)));
    }

    #[test]
    fn scott_basic_membership() {
        assert!(iv(1, 2).in_scott_basic(&iv(0, 3)));
        assert!(!iv(0, 2).in_scott_basic(&iv(0, 3))); // boundary fails
                                                      // on points this recovers the open interval (a, b)
        let q = embed_real(Rat::new(1, 2));
        assert!(q.in_scott_basic(&iv(0, 1)));
        assert!(!embed_real(Rat::from_int(0)).in_scott_basic(&iv(0, 1)));
    }

    #[test]
    fn lifted_order_and_way_below() {
        let b = IrBot::Bot;
        let x = IrBot::Iv(iv(0, 1));
        assert!(b.leq(&x));
        assert!(!x.leq(&b));
        assert!(b.way_below(&x));
        assert!(b.way_below(&b)); // bottom is compact
        assert_eq!(sup_bounded_lifted(&[b.clone(), x.clone()]).unwrap(), x);
        assert_eq!(sup_bounded_lifted(&[b.clone(), b.clone()]).unwrap(), b);
        assert_eq!(b.meet(&x), b);
    }

    #[test]
    fn json_round_trip() {
        let x = ivr((1, 3), (5, 2));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"lo":"1/3","hi":"5/2"}"#);
        assert_eq!(serde_json::from_str::<RatInterval>(&s).unwrap(), x);
        let bot: IrBot = serde_json::from_str(r#"{"bot":true}"#).unwrap();
        assert_eq!(bot, IrBot::Bot);
        let y: RatInterval = serde_json::from_str(r#"{"lo":"0.25","hi":1}"#).unwrap();
        assert_eq!(
            y,
            RatInterval::new(Rat::new(1, 4), Rat::from_int(1)).unwrap()
        );
        assert!(serde_json::from_str::<RatInterval>(r#"{"lo":"2","hi":"1"}"#).is_err());
    }
}
