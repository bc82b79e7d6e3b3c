//! Arithmetic in `F_p` for word-sized primes.

use crate::error::{Error, Result};

/// Largest supported characteristic; keeps products inside `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if p > MAX_PRIME {
        return Err(Error::Unsupported(format!("prime {p} exceeds {MAX_PRIME}")));
    }
    Ok(())
}

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

#[inline]
pub fn neg(a: u64, p: u64) -> u64 {
    (p - a) % p
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero element.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero");
    pow(a, p - 2, p)
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce_i64(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

pub fn is_square(a: u64, p: u64) -> bool {
    let a = a % p;
    a == 0 || p == 2 || pow(a, (p - 1) / 2, p) == 1
}

/// A square root of `a`, if one exists (Tonelli–Shanks).
pub fn sqrt(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if !is_square(a, p) {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| !is_square(z, p))
        .expect("odd prime has a nonsquare");
    let mut m = s;
    let mut c = pow(z, q, p);
    let mut t = pow(a, q, p);
    let mut r = pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt, p);
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b, p);
        t = mul(t, c, p);
        r = mul(r, b, p);
    }
    Some(r)
}

/// The smallest nonsquare in `F_p^×` (p odd).
pub fn least_nonsquare(p: u64) -> u64 {
    (2..p).find(|&z| !is_square(z, p)).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(check_prime(4).is_err());
        assert!(check_prime(7).is_ok());
    }

    #[test]
    fn square_roots_agree_with_brute_force() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 97, 101] {
            for a in 0..p {
                let brute = (0..p).any(|x| x * x % p == a);
                assert_eq!(is_square(a, p), brute, "p={p} a={a}");
                match sqrt(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!(!brute),
                }
            }
            for a in 1..p {
                assert_eq!(mul(a, inv(a, p), p), 1);
            }
        }
    }

    #[test]
    fn minus_one_mod_three_is_not_a_square() {
        assert!(!is_square(2, 3));
        assert_eq!(least_nonsquare(3), 2);
        assert_eq!(least_nonsquare(7), 3);
    }
}
