//! Arithmetic on [`Rational`] with as few full-length gcds as possible.
//!
//! The operator impls of `num-rational` reduce every result from scratch:
//! a product costs three gcds, a sum two. The functions here use the
//! classical shortcuts (cross-cancellation for products and quotients,
//! Knuth's `gcd(b, d)` trick for sums) and the Lehmer gcd, and they are what
//! the solvers use in their inner loops.

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::Rational;

fn gcd_int(a: &BigInt, b: &BigInt) -> BigUint {
    gcd(a.magnitude(), b.magnitude())
}

fn divide(x: &BigInt, g: &BigUint) -> BigInt {
    if g.is_one() {
        x.clone()
    } else {
        x / BigInt::from_biguint(Sign::Plus, g.clone())
    }
}

/// `n/d` from coprime `n` and `d` of either sign.
fn normalized(n: BigInt, d: BigInt) -> Rational {
    if d.is_negative() {
        Rational::new_raw(-n, -d)
    } else {
        Rational::new_raw(n, d)
    }
}

/// `(a/b)·(c/d)` with the numerators and denominators given separately.
fn product(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Rational {
    if a.is_zero() || c.is_zero() {
        return Rational::zero();
    }
    let g1 = gcd_int(a, d);
    let g2 = gcd_int(c, b);
    normalized(divide(a, &g1) * divide(c, &g2), divide(b, &g2) * divide(d, &g1))
}

pub fn mul(x: &Rational, y: &Rational) -> Rational {
    product(x.numer(), x.denom(), y.numer(), y.denom())
}

/// `x / y`; panics if `y` is zero.
pub fn div(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    product(x.numer(), x.denom(), y.denom(), y.numer())
}

pub fn add(x: &Rational, y: &Rational) -> Rational {
    if x.is_zero() {
        return y.clone();
    }
    if y.is_zero() {
        return x.clone();
    }
    let (a, b, c, d) = (x.numer(), x.denom(), y.numer(), y.denom());
    let g = gcd(b.magnitude(), d.magnitude());
    if g.is_one() {
        // b and d coprime: the result is already in lowest terms
        return Rational::new_raw(a * d + c * b, b * d);
    }
    let b_g = divide(b, &g);
    let d_g = divide(d, &g);
    let t = a * &d_g + c * &b_g;
    if t.is_zero() {
        return Rational::zero();
    }
    let g2 = gcd(t.magnitude(), &g);
    Rational::new_raw(divide(&t, &g2), b_g * divide(d, &g2))
}

pub fn sub(x: &Rational, y: &Rational) -> Rational {
    add(x, &-y)
}

/// `acc -= x·y`.
pub fn sub_mul(acc: &mut Rational, x: &Rational, y: &Rational) {
    if x.is_zero() || y.is_zero() {
        return;
    }
    let p = mul(x, y);
    *acc = add(acc, &-p);
}

/// `acc += x·y`.
pub fn add_mul(acc: &mut Rational, x: &Rational, y: &Rational) {
    if x.is_zero() || y.is_zero() {
        return;
    }
    let p = mul(x, y);
    *acc = add(acc, &p);
}

/// Compares `n1/d1` with `n2/d2` for positive `d1`, `d2` without forming
/// either quotient.
pub fn cmp_fractions(n1: &Rational, d1: &Rational, n2: &Rational, d2: &Rational) -> Ordering {
    debug_assert!(d1.is_positive() && d2.is_positive());
    // with n = a/b and d = p/q, n1/d1 < n2/d2 iff a1·q1·p2·b2 < a2·q2·p1·b1
    let left = n1.numer() * d1.denom() * d2.numer() * n2.denom();
    let right = n2.numer() * d2.denom() * d1.numer() * n1.denom();
    left.cmp(&right)
}
