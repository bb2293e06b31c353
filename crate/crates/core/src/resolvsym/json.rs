//! JSON form of polynomials:
//! `[{"coeff": [re, im], "factors": [{"z": [re, im], "f": [..]}, ..]}, ..]`.
//!
//! Numbers may be JSON numbers (read as exact decimals) or strings "p/q".

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::poly::{cq, Poly, CQ, Q};
use crate::error::{Error, Result};

fn parse_decimal(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("invalid number '{s}'"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let all: String = format!("{int}{frac}");
    let n: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Q::from_integer(n);
    if shift >= 0 {
        r *= Q::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= Q::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Parses "p/q", an integer or a decimal literal.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid numerator in '{s}'")))?;
        let den: BigInt = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid denominator in '{s}'")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Q::new(num, den));
    }
    parse_decimal(s)
}

pub fn rational_from_json(v: &Value) -> Result<Q> {
    match v {
        Value::Number(n) => parse_decimal(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn complex_from_json(v: &Value) -> Result<CQ> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            Ok(cq(rational_from_json(&a[0])?, rational_from_json(&a[1])?))
        }
        Value::Number(_) | Value::String(_) => Ok(cq(rational_from_json(v)?, Q::zero())),
        other => Err(Error::Parse(format!("expected [re, im], got {other}"))),
    }
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field '{key}'")))
}

pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let terms = v
        .as_array()
        .ok_or_else(|| Error::Parse("polynomial must be an array of terms".into()))?;
    let mut p = Poly::zero();
    for t in terms {
        let coeff = complex_from_json(field(t, "coeff")?)?;
        let factors = field(t, "factors")?
            .as_array()
            .ok_or_else(|| Error::Parse("'factors' must be an array".into()))?;
        let mut raw = Vec::with_capacity(factors.len());
        for fac in factors {
            let z = complex_from_json(field(fac, "z")?)?;
            let f = field(fac, "f")?
                .as_array()
                .ok_or_else(|| Error::Parse("'f' must be an array".into()))?
                .iter()
                .map(rational_from_json)
                .collect::<Result<Vec<Q>>>()?;
            raw.push((z, f));
        }
        p = p.add(&Poly::monomial(coeff, raw)?);
    }
    Ok(p)
}

pub fn poly_from_str(s: &str) -> Result<Poly> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    poly_from_json(&v)
}

fn rational_to_json(x: &Q, exact: bool) -> Value {
    if exact {
        if x.denom().is_one() {
            Value::String(x.numer().to_string())
        } else {
            Value::String(format!("{}/{}", x.numer(), x.denom()))
        }
    } else {
        json!(x.to_f64().unwrap_or(f64::NAN))
    }
}

/// Serializes with exact "p/q" strings or with floats.
pub fn poly_to_json(p: &Poly, exact: bool) -> Value {
    let c = |z: &CQ| {
        json!([
            rational_to_json(&z.re, exact),
            rational_to_json(&z.im, exact)
        ])
    };
    Value::Array(
        p.terms()
            .map(|(fs, coeff)| {
                let factors: Vec<Value> = fs
                    .iter()
                    .map(|g| json!({"z": c(&g.z()), "f": g.f.iter().map(|x| rational_to_json(x, exact)).collect::<Vec<_>>()}))
                    .collect();
                json!({"coeff": c(coeff), "factors": factors})
            })
            .collect(),
    )
}
