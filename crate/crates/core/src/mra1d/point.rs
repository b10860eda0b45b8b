//! Exact point locations with one-sided limits.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Builds `num/den` as a canonical rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` text form used by the dumps.
pub fn rat_text(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// True when the denominator is a power of two, i.e. the location can fall
/// on a cell interface of some dyadic mesh.
pub fn is_dyadic(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    d.is_one()
}

/// Which one-sided limit a point stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Interior,
    Right,
}

impl Side {
    pub fn suffix(self) -> &'static str {
        match self {
            Side::Left => "-",
            Side::Right => "+",
            Side::Interior => "",
        }
    }
}

/// A rational location in `[0,1]` carrying a left/right limit tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SidedPoint {
    pub location: Rational,
    pub side: Side,
}

impl SidedPoint {
    /// Builds a point, deriving `Interior` for non-dyadic locations.
    ///
    /// Dyadic locations must carry an explicit side; `0` has to be a right
    /// limit and `1` a left limit.
    pub fn new(location: Rational, side: Side) -> crate::Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        if location < zero || location > one {
            return Err(crate::Error::Construction(format!(
                "point {} outside [0,1]",
                rat_text(&location)
            )));
        }
        let side = if is_dyadic(&location) {
            match side {
                Side::Interior => {
                    return Err(crate::Error::Construction(format!(
                        "dyadic point {} needs a left/right tag",
                        rat_text(&location)
                    )))
                }
                s => s,
            }
        } else {
            Side::Interior
        };
        if (location == zero && side == Side::Left) || (location == one && side == Side::Right) {
            return Err(crate::Error::Construction(format!(
                "point {}{} lies outside the unit cell",
                rat_text(&location),
                side.suffix()
            )));
        }
        Ok(Self { location, side })
    }

    pub fn right(num: i64, den: i64) -> Self {
        Self::new(rat(num, den), Side::Right).expect("valid right-limit point")
    }

    pub fn left(num: i64, den: i64) -> Self {
        Self::new(rat(num, den), Side::Left).expect("valid left-limit point")
    }

    pub fn interior(num: i64, den: i64) -> Self {
        Self::new(rat(num, den), Side::Interior).expect("valid interior point")
    }

    /// `(shift + self) * scale`, keeping the side tag.
    pub fn affine(&self, shift: &Rational, scale: &Rational) -> SidedPoint {
        SidedPoint {
            location: (shift + &self.location) * scale,
            side: self.side,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.location)
    }

    pub fn coord(&self) -> Coord {
        Coord {
            x: self.to_f64(),
            side: self.side,
        }
    }
}

impl PartialOrd for SidedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SidedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.location
            .cmp(&other.location)
            .then(self.side.cmp(&other.side))
    }
}

impl fmt::Display for SidedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.denom().is_one() {
            write!(f, "{}{}", self.location.numer(), self.side.suffix())
        } else {
            write!(
                f,
                "{}/{}{}",
                self.location.numer(),
                self.location.denom(),
                self.side.suffix()
            )
        }
    }
}

/// Floating-point coordinate with a side tag, as handed to samplers and
/// evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub x: f64,
    pub side: Side,
}

impl Coord {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            side: Side::Interior,
        }
    }

    pub fn sided(x: f64, side: Side) -> Self {
        Self { x, side }
    }

    /// True when the coordinate is strictly above `threshold`, reading an
    /// exact hit through the side tag.
    pub fn above(&self, threshold: f64) -> bool {
        if self.x == threshold {
            self.side == Side::Right
        } else {
            self.x > threshold
        }
    }
}

/// Locates the mesh cell of width `2^-level` containing `x`.
///
/// Returns the cell index and the local coordinate in `[0,1]`. An exact hit on
/// an interface goes to the right-hand cell unless the side is `Left` (or the
/// point is `1`).
pub fn locate(x: f64, side: Side, level: u32) -> (u64, f64) {
    let cells = 1u64 << level;
    let t = x * cells as f64;
    let mut c = t.floor();
    if side == Side::Left && t == c && c > 0.0 {
        c -= 1.0;
    }
    let mut ci = if c < 0.0 { 0 } else { c as u64 };
    if ci >= cells {
        ci = cells - 1;
    }
    (ci, t - ci as f64)
}

/// Whether a local coordinate `u ∈ [0,1]` belongs to the left half `(0,1/2)`.
pub fn in_left_half(u: f64, side: Side) -> bool {
    if u == 0.5 {
        side == Side::Left
    } else {
        u < 0.5
    }
}
