//! JSON documents for lattices, spaces, neighbors and the K3 data.
//!
//! Integers are written as JSON numbers when they fit in 64 bits and as
//! decimal strings otherwise; both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fp::FpQuadSpace;
use crate::hecke::{MinimalPair, PolarizedK3Lattice};
use crate::lattice::QuadLattice;
use crate::linalg::IntMatrix;
use crate::padic::PLattice;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(perr(format!("non-integer number {n}")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| perr(format!("not an integer: {s:?}"))),
        other => Err(perr(format!("expected integer, got {other}"))),
    }
}

fn u64_from_json(v: &Value, what: &str) -> Result<u64> {
    int_from_json(v)?
        .to_u64()
        .ok_or_else(|| perr(format!("{what} must be a nonnegative 64-bit integer")))
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| perr("expected an array of integers"))?
        .iter()
        .map(int_from_json)
        .collect()
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_to_json(r)).collect())
}

/// Row-major array of rows, all of equal length.
pub fn matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| perr("expected a matrix (array of rows)"))?;
    let rows: Vec<Vec<BigInt>> = rows.iter().map(vector_from_json).collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(perr("matrix rows have different lengths"));
    }
    IntMatrix::from_big_rows(rows, cols)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| perr(format!("missing field `{key}`")))
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| perr("expected a JSON object"))
}

pub fn lattice_to_json(l: &QuadLattice) -> Value {
    json!({ "rank": l.rank(), "half_gram": matrix_to_json(l.half_gram()) })
}

pub fn lattice_from_json(v: &Value) -> Result<QuadLattice> {
    let obj = object(v)?;
    let rank = u64_from_json(field(obj, "rank")?, "rank")? as usize;
    let h = matrix_from_json(field(obj, "half_gram")?)?;
    if h.rows() != rank || (rank > 0 && h.cols() != rank) {
        return Err(perr(format!(
            "half_gram must be {rank}×{rank}, got {}×{}",
            h.rows(),
            h.cols()
        )));
    }
    if rank == 0 {
        return QuadLattice::new(IntMatrix::zeros(0, 0));
    }
    if !h.is_upper_triangular() {
        return Err(perr("half_gram must be upper triangular"));
    }
    QuadLattice::new(h)
}

pub fn space_to_json(s: &FpQuadSpace) -> Value {
    json!({ "p": s.p(), "dim": s.dim(), "half_gram": s.half_gram() })
}

pub fn space_from_json(v: &Value) -> Result<FpQuadSpace> {
    let obj = object(v)?;
    let p = u64_from_json(field(obj, "p")?, "p")?;
    let dim = u64_from_json(field(obj, "dim")?, "dim")? as usize;
    let h = matrix_from_json(field(obj, "half_gram")?)?;
    if h.rows() != dim || (dim > 0 && h.cols() != dim) {
        return Err(perr("half_gram has the wrong shape"));
    }
    let pb = BigInt::from(p);
    let rows = h
        .to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let m = ((x % &pb) + &pb) % &pb;
                    m.to_u64().ok_or_else(|| perr("entry out of range"))
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FpQuadSpace::new(p, rows)
}

pub fn plattice_to_json(l: &PLattice) -> Value {
    json!({
        "ambient": lattice_to_json(l.ambient()),
        "p": l.p(),
        "power": l.power(),
        "numerator": matrix_to_json(l.numerator()),
    })
}

pub fn plattice_from_json(v: &Value) -> Result<PLattice> {
    let obj = object(v)?;
    let ambient = lattice_from_json(field(obj, "ambient")?)?;
    let p = u64_from_json(field(obj, "p")?, "p")?;
    let power = u64_from_json(field(obj, "power")?, "power")?;
    let power = u32::try_from(power).map_err(|_| perr("power out of range"))?;
    let num = matrix_from_json(field(obj, "numerator")?)?;
    PLattice::new(ambient, p, power, &num)
}

pub fn minimal_pair_to_json(m: &MinimalPair) -> Value {
    json!({
        "lambda": lattice_to_json(m.lambda()),
        "tilde_basis": matrix_to_json(m.tilde_basis()),
        "p": m.p(),
    })
}

/// `p` may be omitted and supplied by the caller.
pub fn minimal_pair_from_json(v: &Value, default_p: Option<u64>) -> Result<MinimalPair> {
    let obj = object(v)?;
    let lambda = lattice_from_json(field(obj, "lambda")?)?;
    let tilde = matrix_from_json(field(obj, "tilde_basis")?)?;
    let p = match obj.get("p") {
        Some(p) => u64_from_json(p, "p")?,
        None => default_p.ok_or_else(|| perr("missing field `p`"))?,
    };
    MinimalPair::new(lambda, &tilde, p)
}

pub fn k3_to_json(k: &PolarizedK3Lattice) -> Value {
    json!({
        "lattice": lattice_to_json(&k.lattice),
        "xi": vector_to_json(&k.xi),
    })
}

pub fn k3_from_json(v: &Value) -> Result<PolarizedK3Lattice> {
    let obj = object(v)?;
    let out = PolarizedK3Lattice {
        lattice: lattice_from_json(field(obj, "lattice")?)?,
        xi: vector_from_json(field(obj, "xi")?)?,
    };
    out.validate()?;
    Ok(out)
}

/// An embedding matrix: either a bare matrix or `{"embedding": matrix}`.
pub fn embedding_from_json(v: &Value) -> Result<IntMatrix> {
    match v {
        Value::Object(obj) => matrix_from_json(field(obj, "embedding")?),
        other => matrix_from_json(other),
    }
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(e.to_string()))
}

/// Parse a lattice document, or failing JSON, a standard lattice expression.
pub fn parse_lattice(text: &str) -> Result<QuadLattice> {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => lattice_from_json(&v),
        Err(_) => crate::lattice::standard_lattice(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        for l in [
            QuadLattice::k3(),
            QuadLattice::rank1(-7).unwrap(),
            QuadLattice::hyperbolic(),
        ] {
            let v = lattice_to_json(&l);
            assert_eq!(lattice_from_json(&v).unwrap(), l);
            let text = serde_json::to_string(&v).unwrap();
            assert_eq!(parse_lattice(&text).unwrap(), l);
        }
    }

    #[test]
    fn big_integers_round_trip() {
        let x: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(int_to_json(&x), Value::String(x.to_string()));
        assert_eq!(int_from_json(&int_to_json(&x)).unwrap(), x);
        assert!(int_from_json(&json!(1.5)).is_err());
        assert_eq!(
            int_from_json(&json!(u64::MAX)).unwrap(),
            BigInt::from(u64::MAX)
        );
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_lattice(r#"{"rank": 2, "half_gram": [[0,1],[1,0]]}"#).is_err());
        assert!(parse_lattice(r#"{"rank": 3, "half_gram": [[0,1],[0,0]]}"#).is_err());
        assert!(parse_lattice(r#"{"rank": 2, "half_gram": [[0,1],[0]]}"#).is_err());
        assert!(parse_lattice("nonsense").is_err());
        assert_eq!(
            parse_lattice("H⊥H").unwrap(),
            QuadLattice::hyperbolic_sum(2)
        );
    }

    #[test]
    fn neighbor_and_pair_round_trip() {
        let n = QuadLattice::hyperbolic_sum(2);
        for nb in crate::padic::enumerate_neighbors(&n, 3, 1000).unwrap() {
            let v = plattice_to_json(&nb.lattice);
            assert_eq!(plattice_from_json(&v).unwrap(), nb.lattice);
        }
        let lam = QuadLattice::rank1(2).unwrap();
        for pair in crate::hecke::enumerate_index_p_sublattices(&lam, 3, 100).unwrap() {
            let v = minimal_pair_to_json(&pair);
            assert_eq!(minimal_pair_from_json(&v, None).unwrap(), pair);
        }
        let k = crate::hecke::k3_isogeny(2, 3).unwrap();
        assert_eq!(k3_from_json(&k3_to_json(&k)).unwrap(), k);
        let s = FpQuadSpace::hyperbolic(5, 2).unwrap();
        assert_eq!(space_from_json(&space_to_json(&s)).unwrap(), s);
    }
}
