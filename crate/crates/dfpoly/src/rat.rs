//! Exact rational scalars and small vector helpers shared by every module.
//!
//! All geometry and all invariants are computed over `BigRational`; floating
//! point exists only in the Monte-Carlo oracle.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type Int = BigInt;

/// Rational from a pair of machine integers. Panics on q = 0 (test/construction helper).
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from(Int::from(p))
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&p| rat_int(p)).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&p| Int::from(p)).collect()
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

/// Parses "p" or "p/q" with q > 0.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("malformed rational {s:?} (expected \"p\" or \"p/q\" with q > 0)"));
    let s = s.trim();
    let (ps, qs) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let p: Int = ps.trim().parse().map_err(|_| bad())?;
    let q: Int = match qs {
        Some(q) => q.trim().parse().map_err(|_| bad())?,
        None => Int::one(),
    };
    if q.sign() != Sign::Plus {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

/// Canonical exact rendering: "p" when the denominator is 1, else "p/q" with q > 0.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_rat_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(format_rat).collect();
    format!("({})", parts.join(", "))
}

/// Exact decimal rendering to `sig` significant digits (display only).
/// Rounding is half away from zero on the exact value, so the output is
/// deterministic and independent of any floating-point path.
pub fn decimal_string(x: &Rat, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let p = x.numer().abs();
    let q = x.denom().clone();
    // k = number of digits before the decimal point (may be <= 0): 10^(k-1) <= p/q < 10^k.
    let ten = Int::from(10);
    let mut k: i64 = 0;
    let mut scaled_q = q.clone();
    if p >= q {
        while p >= scaled_q {
            scaled_q *= &ten;
            k += 1;
        }
    } else {
        let mut scaled_p = p.clone();
        while scaled_p < q {
            scaled_p *= &ten;
            k -= 1;
        }
        k += 1;
    }
    // digits = round(p * 10^(sig - k) / q), an integer with exactly `sig` digits
    // (one more if rounding overflows, handled below).
    let shift = sig as i64 - k;
    let (num, den) = if shift >= 0 {
        (p * ten.pow(shift as u32), q)
    } else {
        (p, q * ten.pow((-shift) as u32))
    };
    let (quot, rem) = num.div_rem(&den);
    let mut digits = if &rem * Int::from(2) >= den { quot + Int::one() } else { quot };
    let cap = ten.pow(sig as u32);
    if digits == cap {
        digits = ten.pow(sig as u32 - 1);
        k += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);
    let body = if k <= 0 {
        let zeros: String = std::iter::repeat('0').take((-k) as usize).collect();
        format!("0.{zeros}{ds}")
    } else if (k as usize) < sig {
        format!("{}.{}", &ds[..k as usize], &ds[k as usize..])
    } else {
        let zeros: String = std::iter::repeat('0').take(k as usize - sig).collect();
        format!("{ds}{zeros}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Duality pairing of an integer covector with a rational point.
pub fn dot_int_rat(a: &[Int], x: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), x.len());
    let mut acc = Rat::zero();
    for (ai, xi) in a.iter().zip(x) {
        acc += Rat::from(ai.clone()) * xi;
    }
    acc
}

pub fn dot_rat(a: &[Rat], x: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), x.len());
    let mut acc = Rat::zero();
    for (ai, xi) in a.iter().zip(x) {
        acc += ai * xi;
    }
    acc
}

pub fn int_to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|a| Rat::from(a.clone())).collect()
}

/// Scales a rational covector to a primitive integer covector pointing the same
/// way. Returns the primitive vector g and the positive rational s with
/// cov = s * g, so the constraint cov.x >= h becomes g.x >= h/s.
/// None when the covector is zero.
pub fn primitivize(cov: &[Rat]) -> Option<(Vec<Int>, Rat)> {
    if cov.iter().all(|c| c.is_zero()) {
        return None;
    }
    let mut lcm = Int::one();
    for c in cov {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<Int> = cov.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut g = Int::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    let prim: Vec<Int> = ints.iter().map(|v| v / &g).collect();
    // cov = (g / lcm) * prim
    let scale = Rat::new(g, lcm);
    Some((prim, scale))
}

/// True when every entry is an integer.
pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.denom().is_one())
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!(parse_rat("3").unwrap(), rat_int(3));
        assert_eq!(parse_rat("-7/2").unwrap(), rat(-7, 2));
        assert_eq!(parse_rat(" 6/4 ").unwrap(), rat(3, 2));
    }

    #[test]
    fn parse_rejects_nonpositive_denominators() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1/-2").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rat(&rat(6, 4)), "3/2");
        assert_eq!(format_rat(&rat(-8, 2)), "-4");
        assert_eq!(format_rat(&Rat::zero()), "0");
    }

    #[test]
    fn decimal_rendering_12_digits() {
        assert_eq!(decimal_string(&rat(32, 3), 12), "10.6666666667");
        assert_eq!(decimal_string(&rat(1, 4), 12), "0.250000000000");
        assert_eq!(decimal_string(&rat_int(3), 12), "3.00000000000");
        assert_eq!(decimal_string(&rat(-1, 3), 12), "-0.333333333333");
        assert_eq!(decimal_string(&Rat::zero(), 12), "0");
        assert_eq!(decimal_string(&rat(999999999999999, 1000), 12), "1000000000000");
    }

    #[test]
    fn primitivize_scales_to_integer_gcd_one() {
        let (g, s) = primitivize(&[rat(4, 3), rat(-2, 3)]).unwrap();
        assert_eq!(g, int_vec(&[2, -1]));
        assert_eq!(s, rat(2, 3));
        assert!(primitivize(&[Rat::zero(), Rat::zero()]).is_none());
        // the scale factor is always positive, so constraint directions survive
        let (g, s) = primitivize(&[rat_int(-6), rat_int(-9)]).unwrap();
        assert_eq!(g, int_vec(&[-2, -3]));
        assert_eq!(s, rat_int(3));
    }
}
