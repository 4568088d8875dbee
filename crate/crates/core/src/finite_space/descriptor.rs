use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, Rational, SubsetMask};
use crate::{Error, Result};

/// An interval of the real line with rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let iv = Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        iv.validate()?;
        Ok(iv)
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, true)
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x,
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed)) {
            return Err(Error::invalid(format!("malformed interval {self}")));
        }
        Ok(())
    }

    pub fn contains(&self, x: Rational) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A resolution-independent description of a subset of the line, realised on
/// a concrete space by [`FiniteMetricSpace::realize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetDescriptor {
    Empty,
    Whole,
    /// Union of intervals.
    Intervals(Vec<Interval>),
    /// Explicit hex mask; only meaningful for a space of matching size.
    Mask(String),
}

impl SetDescriptor {
    pub fn interval(iv: Interval) -> Self {
        SetDescriptor::Intervals(vec![iv])
    }

    /// True when the described continuum set is open in the line topology
    /// (every interval open, or the empty/whole set).
    pub fn is_open(&self) -> bool {
        match self {
            SetDescriptor::Empty | SetDescriptor::Whole => true,
            SetDescriptor::Intervals(ivs) => ivs.iter().all(Interval::is_open),
            SetDescriptor::Mask(_) => false,
        }
    }
}

pub(super) fn realize(space: &FiniteMetricSpace, desc: &SetDescriptor) -> Result<SubsetMask> {
    let n = space.len();
    match desc {
        SetDescriptor::Empty => Ok(SubsetMask::empty(n)),
        SetDescriptor::Whole => Ok(SubsetMask::full(n)),
        SetDescriptor::Mask(hex) => SubsetMask::from_hex(n, hex),
        SetDescriptor::Intervals(ivs) => {
            let coords = space.coordinates().ok_or_else(|| {
                Error::invalid("interval descriptors need a space with coordinates")
            })?;
            let (lo, hi) = space.coordinate_range().expect("nonempty space");
            for iv in ivs {
                iv.validate()?;
                if iv.lo < lo || iv.hi > hi {
                    return Err(Error::invalid(format!(
                        "interval {iv} leaves the coordinate range [{lo}, {hi}]"
                    )));
                }
            }
            Ok(SubsetMask::from_indices(
                n,
                (0..n).filter(|&i| ivs.iter().any(|iv| iv.contains(coords[i]))),
            ))
        }
    }
}

// Serialized forms:
//   "empty" | "whole"
//   ["(", lo_num, lo_den, hi_num, hi_den, "]"]          single interval
//   [["[", 0, 1, 1, 4, ")"], ["(", 1, 2, 1, 1, "]"]]   union
//   { mask = "0x1f" }

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(6))?;
        seq.serialize_element(if self.lo_closed { "[" } else { "(" })?;
        seq.serialize_element(self.lo.numer())?;
        seq.serialize_element(self.lo.denom())?;
        seq.serialize_element(self.hi.numer())?;
        seq.serialize_element(self.hi.denom())?;
        seq.serialize_element(if self.hi_closed { "]" } else { ")" })?;
        seq.end()
    }
}

impl Serialize for SetDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SetDescriptor::Empty => s.serialize_str("empty"),
            SetDescriptor::Whole => s.serialize_str("whole"),
            SetDescriptor::Intervals(ivs) => ivs.serialize(s),
            SetDescriptor::Mask(hex) => {
                let mut st = s.serialize_struct("Mask", 1)?;
                st.serialize_field("mask", hex)?;
                st.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Token {
    Str(String),
    Int(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskForm {
    mask: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDescriptor {
    Word(String),
    Single(Vec<Token>),
    Union(Vec<Vec<Token>>),
    Mask(MaskForm),
}

fn interval_from_tokens(tokens: Vec<Token>) -> std::result::Result<Interval, String> {
    let [l, a, b, c, d, r]: [Token; 6] = tokens
        .try_into()
        .map_err(|_| "an interval needs 6 elements: open, num, den, num, den, close".to_string())?;
    let bracket = |t: Token, open: &str, closed: &str| match t {
        Token::Str(s) if s == open => Ok(false),
        Token::Str(s) if s == closed => Ok(true),
        _ => Err(format!("expected {open:?} or {closed:?}")),
    };
    let int = |t: Token| match t {
        Token::Int(v) => Ok(v),
        Token::Str(s) => Err(format!("expected an integer, found {s:?}")),
    };
    let lo_closed = bracket(l, "(", "[")?;
    let hi_closed = bracket(r, ")", "]")?;
    let (a, b, c, d) = (int(a)?, int(b)?, int(c)?, int(d)?);
    if b == 0 || d == 0 {
        return Err("zero denominator".into());
    }
    Interval::new(Rational::new(a, b), Rational::new(c, d), lo_closed, hi_closed)
        .map_err(|e| e.to_string())
}

impl<'de> Deserialize<'de> for SetDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawDescriptor::deserialize(d)? {
            RawDescriptor::Word(w) => match w.as_str() {
                "empty" => Ok(SetDescriptor::Empty),
                "whole" => Ok(SetDescriptor::Whole),
                other => Err(de::Error::custom(format!("unknown set descriptor {other:?}"))),
            },
            RawDescriptor::Single(tokens) => interval_from_tokens(tokens)
                .map(SetDescriptor::interval)
                .map_err(de::Error::custom),
            RawDescriptor::Union(list) => list
                .into_iter()
                .map(interval_from_tokens)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(SetDescriptor::Intervals)
                .map_err(de::Error::custom),
            RawDescriptor::Mask(m) => Ok(SetDescriptor::Mask(m.mask)),
        }
    }
}
