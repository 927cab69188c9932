//! Round-trippable JSON form of scalars, with a 30-digit decimal shadow.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::{AlgNum, NumError, PiPoly, QPoly, Scalar, Vec3};

const SHADOW_DIGITS: usize = 30;

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

fn parse_rat(v: &Value) -> Result<BigRational, NumError> {
    let s = v.as_str().ok_or_else(|| NumError::Parse("expected a rational string".into()))?;
    let bad = || NumError::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p.trim().parse().map_err(|_| bad())?, q))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    let decimal = s.to_decimal(SHADOW_DIGITS);
    match s {
        Scalar::Rational(r) => json!({"kind": "rational", "value": rat_str(r), "decimal": decimal}),
        Scalar::Algebraic(a) => {
            let f = a.field();
            let iv = f.isolating_interval();
            json!({
                "kind": "algebraic",
                "minpoly": f.minpoly().coeffs().iter().map(rat_str).collect::<Vec<_>>(),
                "interval": [rat_str(&iv.lo), rat_str(&iv.hi)],
                "coeffs": a.coeffs().coeffs().iter().map(rat_str).collect::<Vec<_>>(),
                "decimal": decimal,
            })
        }
        Scalar::IntervalReal(p) => json!({
            "kind": "interval_real",
            "pi_coeffs": p.coeffs().iter().map(scalar_to_json).collect::<Vec<_>>(),
            "decimal": decimal,
        }),
    }
}

fn rat_list(v: &Value, key: &str) -> Result<Vec<BigRational>, NumError> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| NumError::Parse(format!("missing array '{key}'")))?
        .iter()
        .map(parse_rat)
        .collect()
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar, NumError> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| NumError::Parse("missing 'kind'".into()))?;
    match kind {
        "rational" => Ok(Scalar::Rational(parse_rat(v.get("value").unwrap_or(&Value::Null))?)),
        "algebraic" => {
            let minpoly = QPoly::new(rat_list(v, "minpoly")?);
            let iv = rat_list(v, "interval")?;
            if iv.len() != 2 {
                return Err(NumError::Parse("interval needs two endpoints".into()));
            }
            let theta = Scalar::algebraic(&minpoly, &iv[0], &iv[1])?;
            let Scalar::Algebraic(theta) = theta else {
                return Err(NumError::InvalidAlgebraic("minimal polynomial has a rational root there".into()));
            };
            let coeffs = QPoly::new(rat_list(v, "coeffs")?);
            Ok(Scalar::from_alg(AlgNum::new(theta.field().clone(), coeffs)))
        }
        "interval_real" => {
            let c = v
                .get("pi_coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| NumError::Parse("missing 'pi_coeffs'".into()))?
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            let c = super::unify_fields(&c)?;
            if c.iter().any(|x| !x.is_exact()) {
                return Err(NumError::Parse("nested pi coefficients".into()));
            }
            Ok(PiPoly { c }.normalize())
        }
        other => Err(NumError::Parse(format!("unknown scalar kind '{other}'"))),
    }
}

pub fn vec3_to_json(v: &Vec3) -> Value {
    Value::Array(v.0.iter().map(scalar_to_json).collect())
}

pub fn vec3_from_json(v: &Value) -> Result<Vec3, NumError> {
    let a = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| NumError::Parse("expected 3 scalars".into()))?;
    Vec3::new(scalar_from_json(&a[0])?, scalar_from_json(&a[1])?, scalar_from_json(&a[2])?)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_scalar, Bindings};
    use super::*;

    #[test]
    fn round_trip_all_kinds() {
        for text in ["-7/3", "1+sqrt(13)", "sqrt(13)+sqrt(17)", "2*pi - 98*root(10,3) + 208", "pi^2/3 + 1/2"] {
            let s = parse_scalar(text, &Bindings::new()).unwrap();
            let j = scalar_to_json(&s);
            let back = scalar_from_json(&j).unwrap();
            assert_eq!(back, s, "{text}");
            assert_eq!(j["kind"], s.kind());
        }
        let s = parse_scalar("sqrt(2)", &Bindings::new()).unwrap();
        let j = scalar_to_json(&s);
        assert!(j["decimal"].as_str().unwrap().starts_with("1.4142135623730950488016887242"));
    }
}
