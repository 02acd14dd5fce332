//! Lehmer's gcd on machine words.
//!
//! `num-bigint` computes gcds with the binary algorithm, which spends one
//! full-length shift or subtraction per bit. Lehmer's method simulates about
//! thirty Euclidean steps at a time on the leading 62 bits and applies them
//! to the full numbers in a single pass, which pays off from a few hundred
//! bits on.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Width of the leading window. Cofactors stay below `2^WINDOW`, so a limb
/// times a cofactor fits in `u128` with room for the carry.
const WINDOW: u64 = 62;

pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_one() || b.is_one() {
        return BigUint::one();
    }
    let mut u = a.to_u64_digits();
    let mut v = b.to_u64_digits();
    if less(&u, &v) {
        core::mem::swap(&mut u, &mut v);
    }
    let mut next_u = Vec::with_capacity(u.len());
    let mut next_v = Vec::with_capacity(u.len());
    loop {
        if v.is_empty() {
            return from_limbs(&u);
        }
        if u.len() <= 2 {
            return BigUint::from(gcd_u128(to_u128(&u), to_u128(&v)));
        }
        let shift = bit_length(&u) - WINDOW;
        let (ca, cb, cc, cd) = cofactors(window(&u, shift), window(&v, shift));
        if cb == 0 {
            // the leading words did not determine a quotient: one full step
            let r = from_limbs(&u) % from_limbs(&v);
            u = core::mem::replace(&mut v, r.to_u64_digits());
        } else {
            combine(&u, &v, ca, cb, &mut next_u);
            combine(&u, &v, cc, cd, &mut next_v);
            core::mem::swap(&mut u, &mut next_u);
            core::mem::swap(&mut v, &mut next_v);
        }
    }
}

/// Runs Euclid on the leading words `x >= y` for as long as the quotient is
/// certain, returning the cofactors `(a, b, c, d)` of the new pair
/// `(a·u + b·v, c·u + d·v)`. `b == 0` means no step was certain.
fn cofactors(mut x: i64, mut y: i64) -> (i64, i64, i64, i64) {
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    while y + c != 0 && y + d != 0 {
        let q = (x + a) / (y + c);
        if q != (x + b) / (y + d) {
            break;
        }
        (a, c) = (c, a - q * c);
        (b, d) = (d, b - q * d);
        (x, y) = (y, x - q * y);
    }
    (a, b, c, d)
}

/// `out = a·u + b·v` where the cofactors have opposite signs (or one is
/// zero) and the result is known to be non-negative.
fn combine(u: &[u64], v: &[u64], a: i64, b: i64, out: &mut Vec<u64>) {
    let (plus, minus, p, m) = if b <= 0 {
        (u, v, a as u64, b.unsigned_abs())
    } else {
        (v, u, b as u64, a.unsigned_abs())
    };
    out.clear();
    let (mut carry_plus, mut carry_minus, mut borrow) = (0u128, 0u128, false);
    for i in 0..u.len() {
        let x = limb(plus, i) as u128 * p as u128 + carry_plus;
        let y = limb(minus, i) as u128 * m as u128 + carry_minus;
        let (diff, b1) = (x as u64).overflowing_sub(y as u64);
        let (diff, b2) = diff.overflowing_sub(borrow as u64);
        out.push(diff);
        borrow = b1 || b2;
        carry_plus = x >> 64;
        carry_minus = y >> 64;
    }
    trim(out);
}

fn limb(x: &[u64], i: usize) -> u64 {
    x.get(i).copied().unwrap_or(0)
}

fn trim(x: &mut Vec<u64>) {
    while x.last() == Some(&0) {
        x.pop();
    }
}

fn less(a: &[u64], b: &[u64]) -> bool {
    if a.len() != b.len() {
        return a.len() < b.len();
    }
    a.iter().rev().cmp(b.iter().rev()).is_lt()
}

fn bit_length(x: &[u64]) -> u64 {
    let top = x[x.len() - 1];
    64 * (x.len() as u64 - 1) + u64::from(64 - top.leading_zeros())
}

/// `WINDOW` bits of `x` starting at bit `shift`.
fn window(x: &[u64], shift: u64) -> i64 {
    let i = (shift / 64) as usize;
    let joined = (limb(x, i + 1) as u128) << 64 | limb(x, i) as u128;
    ((joined >> (shift % 64)) & ((1u128 << WINDOW) - 1)) as i64
}

fn to_u128(x: &[u64]) -> u128 {
    (limb(x, 1) as u128) << 64 | limb(x, 0) as u128
}

fn gcd_u128(mut x: u128, mut y: u128) -> u128 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

fn from_limbs(x: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(2 * x.len());
    for &w in x {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    BigUint::new(digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn big(words: &[u64]) -> BigUint {
        from_limbs(words)
    }

    #[test]
    fn agrees_with_binary_gcd() {
        // a deterministic spread of sizes, common factors and length gaps
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for round in 0..400 {
            let words = |n: usize, next: &mut dyn FnMut() -> u64| -> BigUint {
                big(&(0..n).map(|_| next()).collect::<Vec<_>>())
            };
            let common = words(round % 7, &mut next);
            let a = words(1 + round % 13, &mut next) * &common;
            let b = words(1 + (round / 3) % 11, &mut next) * &common;
            assert_eq!(gcd(&a, &b), a.gcd(&b), "round {round}");
        }
    }

    #[test]
    fn edge_cases() {
        let x = big(&[5, 7, 9]);
        assert_eq!(gcd(&x, &BigUint::zero()), x);
        assert_eq!(gcd(&BigUint::zero(), &x), x);
        assert_eq!(gcd(&x, &x), x);
        assert_eq!(gcd(&x, &BigUint::one()), BigUint::one());
        let p = BigUint::from(2u32).pow(521u32) - 1u32;
        let q = BigUint::from(2u32).pow(607u32) - 1u32;
        assert_eq!(gcd(&(&p * &q), &(&p * 3u32)), p);
        // consecutive Fibonacci numbers take the longest remainder sequence
        let (mut f, mut g) = (BigUint::one(), BigUint::one());
        for _ in 0..2000 {
            (f, g) = (g.clone(), f + g);
        }
        assert_eq!(gcd(&f, &g), BigUint::one());
    }
}
