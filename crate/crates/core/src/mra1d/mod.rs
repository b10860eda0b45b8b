//! One-dimensional nested point families and multiwavelet bases.

mod family;
mod lemma;
mod point;
mod poly;

pub use family::{
    BasisKind, FamilySpec, Half, NestedFamily, Norms, SlotOrigin, Wavelet, CATALOGUE,
};
pub use lemma::{enumerate_anchor_sets, lemma1_count, MAX_ENUMERATION_P};
pub use point::{
    in_left_half, is_dyadic, locate, rat, rat_text, rat_to_f64, Coord, Rational, Side, SidedPoint,
};
pub use poly::{horner, l1_norm_on, linf_norm_on, real_roots_in, Polynomial1D};
