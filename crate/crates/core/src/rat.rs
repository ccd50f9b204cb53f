//! Exact rational coefficients: thin helpers around `num::BigRational`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// Exact factorial as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut out = BigInt::one();
    for k in 2..=n as u64 {
        out *= k;
    }
    Rat::from_integer(out)
}

/// Binomial coefficient with integer arguments, zero when k > n.
pub fn binomial(n: u64, k: u64) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    Rat::from_integer(out)
}

/// Falling factorial (a)_m = a(a-1)...(a-m+1) over the rationals.
pub fn falling(a: &Rat, m: u32) -> Rat {
    let mut out = Rat::one();
    for i in 0..m as i64 {
        out *= a - rat(i);
    }
    out
}

/// r^e for non-negative e.
pub fn pow(r: &Rat, e: u32) -> Rat {
    let mut out = Rat::one();
    for _ in 0..e {
        out *= r.clone();
    }
    out
}

/// Canonical text form: "n" for integers, "n/d" otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// True if the rational is a (possibly negative) integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}
