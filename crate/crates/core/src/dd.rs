//! Double-double helpers on top of `twofloat`.
//!
//! `twofloat` 0.8 computes the residual of its reciprocal without a fused
//! multiply-add, so `/` and `recip` between two `TwoFloat`s are only accurate
//! to about one `f64` ulp. Division here refines the quotient against an
//! exact remainder instead.

use twofloat::TwoFloat;

#[inline]
pub(crate) fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// `a / b` to double-double accuracy.
pub(crate) fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r1 = a - b * q1;
    let q2 = r1.hi() / b.hi();
    let r2 = r1 - b * q2;
    let q3 = r2.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

pub(crate) fn recip(b: TwoFloat) -> TwoFloat {
    div(dd(1.0), b)
}
