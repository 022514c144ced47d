//! JSON encodings.
//!
//! * Matrix: `n` rows of `n` entries, or a flat row-major list of `n²`
//!   entries. An entry is a number or `[re, im]`.
//! * Family: `{"n", "m", "members": [matrix, …]}`.
//! * Field: `{"space": {"dim", "points"} | {"coords"}, "n", "m",
//!   "families": [[matrix, …], …]}` with one member list per grid point.
//! * Doubly stochastic matrix: `{"n", "entries"}` or a bare nested array.
//! * Certificate: `{"construction", "residual", "weights", "unitaries"}`.
//! * Mixture field: `{"space", "weights", "cells", "middles", "left",
//!   "right", "residual", "epsilon"}`.
//!
//! Decoding errors name the offending location, e.g. `$.members[1][0]`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{DSField, GridSpace, MatrixField, MixtureField};
use crate::finite::{Certificate, Construction, DoublyStochastic, ProbabilityVector, UnitaryMixture};
use crate::linalg::{AbelianFamily, ComplexMatrix, Unitary, C64};
use crate::tolerance::Tolerances;

/// Deviation from unitarity accepted when decoding stored unitaries.
const DECODED_UNITARY_SLACK: f64 = 1e-8;

/// A decoded or freshly built field certificate.
#[derive(Debug, Clone)]
pub struct FieldCertificate {
    pub mixture: MixtureField,
    pub residual: f64,
    pub epsilon: Option<f64>,
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn fail<T>(path: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Parse(format!("at {path}: {msg}")))
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<(&'a Value, String)> {
    let Some(obj) = v.as_object() else {
        return fail(path, "expected an object");
    };
    match obj.get(key) {
        Some(x) => Ok((x, format!("{path}.{key}"))),
        None => fail(path, format!("missing field \"{key}\"")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a [Value]> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => fail(path, "expected an array"),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => fail(path, "expected a finite number"),
    }
}

fn count(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(x) if x <= 1 << 16 => Ok(x as usize),
        _ => fail(path, "expected a nonnegative integer"),
    }
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn entry(v: &Value, path: &str) -> Result<C64> {
    if let Some(pair) = v.as_array() {
        if pair.len() != 2 {
            return fail(path, "expected [re, im]");
        }
        return Ok(C64::new(
            number(&pair[0], &format!("{path}[0]"))?,
            number(&pair[1], &format!("{path}[1]"))?,
        ));
    }
    Ok(C64::new(number(v, path)?, 0.0))
}

fn is_entry(v: &Value) -> bool {
    v.is_number() || v.as_array().is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_number))
}

/// An `n × n` matrix, nested or flat row-major.
fn matrix(v: &Value, n: usize, path: &str) -> Result<ComplexMatrix> {
    let items = array(v, path)?;
    let flat = items.len() == n * n && items.iter().all(is_entry);
    let mut entries = Vec::with_capacity(n * n);
    if flat {
        for (k, x) in items.iter().enumerate() {
            entries.push(entry(x, &format!("{path}[{k}]"))?);
        }
    } else {
        if items.len() != n {
            return fail(path, format!("expected {n} rows or {} entries, found {}", n * n, items.len()));
        }
        for (i, row) in items.iter().enumerate() {
            let rpath = format!("{path}[{i}]");
            let row = array(row, &rpath)?;
            if row.len() != n {
                return fail(&rpath, format!("expected {n} entries, found {}", row.len()));
            }
            for (j, x) in row.iter().enumerate() {
                entries.push(entry(x, &format!("{rpath}[{j}]"))?);
            }
        }
    }
    ComplexMatrix::from_row_major(n, n, &entries)
}

fn encode_matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.n_rows())
            .map(|i| {
                Value::Array(
                    (0..m.n_cols())
                        .map(|j| {
                            let z = m.get(i, j);
                            json!([z.re, z.im])
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn members(v: &Value, n: usize, m: usize, path: &str) -> Result<Vec<ComplexMatrix>> {
    let items = array(v, path)?;
    if items.len() != m {
        return fail(path, format!("expected {m} members, found {}", items.len()));
    }
    items
        .iter()
        .enumerate()
        .map(|(j, x)| matrix(x, n, &format!("{path}[{j}]")))
        .collect()
}

fn family_from(v: &Value, path: &str, tol: &Tolerances) -> Result<AbelianFamily> {
    let (nv, np) = field(v, path, "n")?;
    let (mv, mp) = field(v, path, "m")?;
    let n = count(nv, &np)?;
    let m = count(mv, &mp)?;
    if n == 0 || m == 0 {
        return fail(path, "n and m must be positive");
    }
    let (list, lp) = field(v, path, "members")?;
    AbelianFamily::with_tolerances(members(list, n, m, &lp)?, tol)
}

pub fn parse_family(text: &str) -> Result<AbelianFamily> {
    parse_family_with(text, &Tolerances::default())
}

pub fn parse_family_with(text: &str, tol: &Tolerances) -> Result<AbelianFamily> {
    family_from(&parse_value(text)?, "$", tol)
}

pub fn encode_family(f: &AbelianFamily) -> String {
    let v = json!({
        "n": f.n(),
        "m": f.m(),
        "members": f.members().iter().map(encode_matrix).collect::<Vec<_>>(),
    });
    pretty(&v)
}

fn space_from(v: &Value, path: &str) -> Result<GridSpace> {
    if let Ok((coords, cp)) = field(v, path, "coords") {
        return GridSpace::line(numbers(coords, &cp)?);
    }
    let (dv, dp) = field(v, path, "dim")?;
    let dim = count(dv, &dp)?;
    let (pv, pp) = field(v, path, "points")?;
    let points = array(pv, &pp)?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ppath = format!("{pp}[{i}]");
            if dim == 1 && p.is_number() {
                Ok(vec![number(p, &ppath)?])
            } else {
                numbers(p, &ppath)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GridSpace::new(dim, points)
}

fn encode_space(s: &GridSpace) -> Value {
    json!({ "dim": s.dim(), "points": s.points() })
}

pub fn parse_field(text: &str) -> Result<MatrixField> {
    parse_field_with(text, &Tolerances::default())
}

pub fn parse_field_with(text: &str, tol: &Tolerances) -> Result<MatrixField> {
    let v = parse_value(text)?;
    let (sv, sp) = field(&v, "$", "space")?;
    let space = space_from(sv, &sp)?;
    let n = count(field(&v, "$", "n")?.0, "$.n")?;
    let m = count(field(&v, "$", "m")?.0, "$.m")?;
    if n == 0 || m == 0 {
        return fail("$", "n and m must be positive");
    }
    let (fv, fp) = field(&v, "$", "families")?;
    let items = array(fv, &fp)?;
    if items.len() != space.len() {
        return fail(&fp, format!("expected {} families, found {}", space.len(), items.len()));
    }
    let families = items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{fp}[{i}]");
            AbelianFamily::with_tolerances(members(x, n, m, &p)?, tol)
                .map_err(|e| Error::Parse(format!("at {p}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixField::new(space, families)
}

pub fn encode_field(f: &MatrixField) -> String {
    let v = json!({
        "space": encode_space(f.space()),
        "n": f.n(),
        "m": f.m(),
        "families": f
            .families()
            .iter()
            .map(|fam| fam.members().iter().map(encode_matrix).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    pretty(&v)
}

fn ds_from(v: &Value, path: &str) -> Result<DoublyStochastic> {
    let (rows_v, rows_p, n) = if v.is_object() {
        let (nv, np) = field(v, path, "n")?;
        let n = count(nv, &np)?;
        let (ev, ep) = field(v, path, "entries")?;
        (ev, ep, n)
    } else {
        let n = array(v, path)?.len();
        (v, path.to_string(), n)
    };
    if n == 0 {
        return fail(path, "empty matrix");
    }
    let rows = array(rows_v, &rows_p)?;
    let flat = rows.len() == n * n && rows.iter().all(Value::is_number);
    let rows: Vec<Vec<f64>> = if flat && n > 1 {
        let all = numbers(rows_v, &rows_p)?;
        all.chunks(n).map(<[f64]>::to_vec).collect()
    } else {
        if rows.len() != n {
            return fail(&rows_p, format!("expected {n} rows, found {}", rows.len()));
        }
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                let rp = format!("{rows_p}[{i}]");
                let r = numbers(r, &rp)?;
                if r.len() != n {
                    return fail(&rp, format!("expected {n} entries, found {}", r.len()));
                }
                Ok(r)
            })
            .collect::<Result<_>>()?
    };
    DoublyStochastic::from_rows(&rows)
}

pub fn parse_ds(text: &str) -> Result<DoublyStochastic> {
    ds_from(&parse_value(text)?, "$")
}

pub fn encode_ds(x: &DoublyStochastic) -> String {
    pretty(&json!({ "n": x.n(), "entries": x.rows() }))
}

pub fn encode_ds_field(x: &DSField) -> String {
    pretty(&json!({
        "space": encode_space(x.space()),
        "matrices": x.matrices().iter().map(DoublyStochastic::rows).collect::<Vec<_>>(),
    }))
}

pub fn parse_ds_field(text: &str) -> Result<DSField> {
    let v = parse_value(text)?;
    let (sv, sp) = field(&v, "$", "space")?;
    let space = space_from(sv, &sp)?;
    let (mv, mp) = field(&v, "$", "matrices")?;
    let matrices = array(mv, &mp)?
        .iter()
        .enumerate()
        .map(|(i, x)| ds_from(x, &format!("{mp}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    DSField::new(space, matrices)
}

fn unitary(v: &Value, n: usize, path: &str) -> Result<Unitary> {
    Unitary::with_tolerance(matrix(v, n, path)?, DECODED_UNITARY_SLACK)
        .map_err(|e| Error::Parse(format!("at {path}: {e}")))
}

fn unitaries(v: &Value, n: usize, path: &str) -> Result<Vec<Unitary>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| unitary(x, n, &format!("{path}[{i}]")))
        .collect()
}

/// Side of the first unitary in a list, read from its row count.
fn first_dim(v: &Value, path: &str) -> Result<usize> {
    let first = array(v, path)?.first().map(|u| array(u, &format!("{path}[0]")));
    match first {
        Some(Ok(rows)) if !rows.is_empty() => {
            let len = rows.len();
            let root = (len as f64).sqrt().round() as usize;
            if rows.iter().all(is_entry) && root * root == len {
                Ok(root)
            } else {
                Ok(len)
            }
        }
        Some(Err(e)) => Err(e),
        _ => fail(path, "expected a nonempty list of matrices"),
    }
}

fn weights(v: &Value, path: &str) -> Result<ProbabilityVector> {
    ProbabilityVector::new(numbers(v, path)?).map_err(|e| Error::Parse(format!("at {path}: {e}")))
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let v = parse_value(text)?;
    let (cv, cp) = field(&v, "$", "construction")?;
    let construction = match cv.as_str().and_then(Construction::parse) {
        Some(c) => c,
        None => return fail(&cp, "expected \"birkhoff\", \"ttransform\" or \"direct-sum\""),
    };
    let (rv, rp) = field(&v, "$", "residual")?;
    let residual = number(rv, &rp)?;
    let (wv, wp) = field(&v, "$", "weights")?;
    let weights = weights(wv, &wp)?;
    let (uv, up) = field(&v, "$", "unitaries")?;
    let n = first_dim(uv, &up)?;
    let us = unitaries(uv, n, &up)?;
    Ok(Certificate {
        mixture: UnitaryMixture::new(weights, us)?,
        residual,
        construction,
    })
}

pub fn encode_certificate(c: &Certificate) -> String {
    let v = json!({
        "construction": c.construction.as_str(),
        "residual": c.residual,
        "weights": c.mixture.weights().weights(),
        "unitaries": c.mixture.unitaries().iter().map(|u| encode_matrix(u.matrix())).collect::<Vec<_>>(),
    });
    pretty(&v)
}

pub fn parse_field_certificate(text: &str) -> Result<FieldCertificate> {
    let v = parse_value(text)?;
    let (sv, sp) = field(&v, "$", "space")?;
    let space = space_from(sv, &sp)?;
    let (wv, wp) = field(&v, "$", "weights")?;
    let weights = weights(wv, &wp)?;
    let (cv, cp) = field(&v, "$", "cells")?;
    let cells = array(cv, &cp)?
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let p = format!("{cp}[{c}]");
            array(cell, &p)?
                .iter()
                .enumerate()
                .map(|(k, i)| count(i, &format!("{p}[{k}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (lv, lp) = field(&v, "$", "left")?;
    let n = first_dim(lv, &lp)?;
    let left = unitaries(lv, n, &lp)?;
    let (rv, rp) = field(&v, "$", "right")?;
    let right = unitaries(rv, n, &rp)?;
    let (mv, mp) = field(&v, "$", "middles")?;
    let middles = array(mv, &mp)?
        .iter()
        .enumerate()
        .map(|(c, ms)| unitaries(ms, n, &format!("{mp}[{c}]")))
        .collect::<Result<Vec<_>>>()?;
    let (resv, resp) = field(&v, "$", "residual")?;
    let residual = number(resv, &resp)?;
    let epsilon = match v.get("epsilon") {
        None | Some(Value::Null) => None,
        Some(e) => Some(number(e, "$.epsilon")?),
    };
    Ok(FieldCertificate {
        mixture: MixtureField::new(space, weights, cells, middles, left, right)?,
        residual,
        epsilon,
    })
}

pub fn encode_field_certificate(c: &FieldCertificate) -> String {
    let mix = &c.mixture;
    let list = |us: &[Unitary]| us.iter().map(|u| encode_matrix(u.matrix())).collect::<Vec<_>>();
    let mut obj = Map::new();
    obj.insert("space".into(), encode_space(mix.space()));
    obj.insert("weights".into(), json!(mix.weights().weights()));
    obj.insert("cells".into(), json!(mix.cells()));
    obj.insert(
        "middles".into(),
        Value::Array(mix.middles().iter().map(|ms| Value::Array(list(ms))).collect()),
    );
    obj.insert("left".into(), Value::Array(list(mix.left())));
    obj.insert("right".into(), Value::Array(list(mix.right())));
    obj.insert("residual".into(), json!(c.residual));
    obj.insert("epsilon".into(), c.epsilon.map_or(Value::Null, |e| json!(e)));
    pretty(&Value::Object(obj))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
