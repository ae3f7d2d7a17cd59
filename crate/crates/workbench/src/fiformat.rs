//! JSON format for FI-module presentations.
//!
//! ```json
//! {
//!   "N": 2,
//!   "groups": { "": {"ngens": 1, "relations": []}, "1": ..., "1,2": ... },
//!   "step_maps": { "->1": [[1]], "1->1,2": [[1]], ... },
//!   "transpositions": { "1,2:1": [[1]] }
//! }
//! ```
//!
//! Subset keys list elements ascending, comma separated; the empty set is
//! `""`. A relation is a vector of length `ngens`. Maps are row-major
//! integer matrices, or `{"rows": r, "cols": c, "entries": [[i, j, v], ..]}`
//! with zero-based indices for large sparse maps. Entries must fit in `i64`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use workbench_core::fimod::{self, FGAbelian, FIModulePresentation, Subset};
use workbench_core::sparse::SpMat;

use crate::error::CliError;

/// Maps with more entries than this are written in sparse form.
const DENSE_LIMIT: usize = 4096;

fn perr(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

pub fn subset_key(s: Subset) -> String {
    fimod::elements(s).iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_subset(key: &str, n: usize) -> Result<Subset, CliError> {
    if key.is_empty() {
        return Ok(0);
    }
    let mut out: Subset = 0;
    let mut last = 0;
    for part in key.split(',') {
        let e: usize = part.parse().map_err(|_| perr(format!("bad subset key {:?}", key)))?;
        if e <= last || e > n {
            return Err(perr(format!("subset key {:?} must be increasing within 1..{}", key, n)));
        }
        last = e;
        out |= 1 << (e - 1);
    }
    Ok(out)
}

fn entry(v: &Value) -> Result<BigInt, CliError> {
    v.as_i64().map(BigInt::from).ok_or_else(|| perr(format!("matrix entry {} is not a 64-bit integer", v)))
}

fn parse_matrix(v: &Value, rows: usize, cols: usize, what: &str) -> Result<SpMat, CliError> {
    let shape_err = || perr(format!("{} must be a {}x{} matrix", what, rows, cols));
    if let Some(obj) = v.as_object() {
        let r = obj.get("rows").and_then(Value::as_u64);
        let c = obj.get("cols").and_then(Value::as_u64);
        if r != Some(rows as u64) || c != Some(cols as u64) {
            return Err(shape_err());
        }
        let entries = obj.get("entries").and_then(Value::as_array).ok_or_else(shape_err)?;
        let mut trip = Vec::with_capacity(entries.len());
        for e in entries {
            let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(shape_err)?;
            let i = t[0].as_u64().ok_or_else(shape_err)? as usize;
            let j = t[1].as_u64().ok_or_else(shape_err)? as usize;
            trip.push((i, j, entry(&t[2])?));
        }
        return SpMat::from_triplets(rows, cols, trip).map_err(|_| shape_err());
    }
    let rs = v.as_array().ok_or_else(shape_err)?;
    if rs.len() != rows {
        return Err(shape_err());
    }
    let mut trip = Vec::new();
    for (i, r) in rs.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == cols).ok_or_else(shape_err)?;
        for (j, x) in r.iter().enumerate() {
            let x = entry(x)?;
            if x != BigInt::from(0) {
                trip.push((i, j, x));
            }
        }
    }
    SpMat::from_triplets(rows, cols, trip).map_err(|_| shape_err())
}

fn small(x: &BigInt) -> Result<i64, CliError> {
    x.to_i64().ok_or_else(|| CliError::Io(format!("entry {} does not fit the file format", x)))
}

fn write_matrix(m: &SpMat) -> Result<Value, CliError> {
    if m.rows() * m.cols() > DENSE_LIMIT {
        let mut entries = Vec::with_capacity(m.nnz());
        for j in 0..m.cols() {
            for (i, x) in m.column(j) {
                entries.push((*i, j, small(x)?));
            }
        }
        entries.sort_unstable();
        let entries: Vec<Value> = entries.into_iter().map(|(i, j, x)| json!([i, j, x])).collect();
        return Ok(json!({"rows": m.rows(), "cols": m.cols(), "entries": entries}));
    }
    let mut rows = vec![vec![0i64; m.cols()]; m.rows()];
    for j in 0..m.cols() {
        for (i, x) in m.column(j) {
            rows[*i][j] = small(x)?;
        }
    }
    Ok(json!(rows))
}

pub fn to_json(m: &FIModulePresentation) -> Result<Value, CliError> {
    let n = m.ambient();
    let mut groups = Map::new();
    for s in fimod::all_subsets(n) {
        let g = m.group(s);
        let rel = g.relations();
        let mut rels = Vec::with_capacity(rel.cols());
        for j in 0..rel.cols() {
            let mut v = vec![0i64; g.ngens()];
            for (i, x) in rel.column(j) {
                v[*i] = small(x)?;
            }
            rels.push(json!(v));
        }
        groups.insert(subset_key(s), json!({"ngens": g.ngens(), "relations": rels}));
    }
    let mut steps = Map::new();
    for (&(s, j), mat) in m.steps() {
        steps.insert(format!("{}->{}", subset_key(s), subset_key(s | 1 << (j - 1))), write_matrix(mat)?);
    }
    let mut trs = Map::new();
    for (&(s, t), mat) in m.transpositions() {
        trs.insert(format!("{}:{}", subset_key(s), t), write_matrix(mat)?);
    }
    Ok(json!({"N": n, "groups": groups, "step_maps": steps, "transpositions": trs}))
}

pub fn from_json(v: &Value) -> Result<FIModulePresentation, CliError> {
    let obj = v.as_object().ok_or_else(|| perr("FI-module document must be an object"))?;
    let n = obj.get("N").and_then(Value::as_u64).ok_or_else(|| perr("missing integer field N"))? as usize;
    if n > fimod::MAX_N {
        return Err(perr(format!("N = {} exceeds {}", n, fimod::MAX_N)));
    }
    let field = |name: &str| obj.get(name).and_then(Value::as_object).ok_or_else(|| perr(format!("missing object field {}", name)));

    let mut groups = BTreeMap::new();
    for (key, g) in field("groups")? {
        let s = parse_subset(key, n)?;
        let ngens = g.get("ngens").and_then(Value::as_u64).ok_or_else(|| perr(format!("group {:?}: missing ngens", key)))? as usize;
        let rels = g.get("relations").and_then(Value::as_array).ok_or_else(|| perr(format!("group {:?}: missing relations", key)))?;
        let mut trip = Vec::new();
        for (j, r) in rels.iter().enumerate() {
            let r = r.as_array().filter(|r| r.len() == ngens).ok_or_else(|| perr(format!("group {:?}: relation {} must have length {}", key, j, ngens)))?;
            for (i, x) in r.iter().enumerate() {
                let x = entry(x)?;
                if x != BigInt::from(0) {
                    trip.push((i, j, x));
                }
            }
        }
        let rel = SpMat::from_triplets(ngens, rels.len(), trip)?;
        groups.insert(s, FGAbelian::new(ngens, rel)?);
    }
    let ngens = |s: Subset| groups.get(&s).map(FGAbelian::ngens).ok_or_else(|| perr(format!("missing group {:?}", subset_key(s))));

    let mut steps = BTreeMap::new();
    for (key, mv) in field("step_maps")? {
        let (a, b) = key.split_once("->").ok_or_else(|| perr(format!("bad step key {:?}", key)))?;
        let (s, t) = (parse_subset(a, n)?, parse_subset(b, n)?);
        if s & !t != 0 || fimod::size(t) != fimod::size(s) + 1 {
            return Err(perr(format!("step key {:?} must add one element", key)));
        }
        let j = (t & !s).trailing_zeros() as usize + 1;
        steps.insert((s, j), parse_matrix(mv, ngens(t)?, ngens(s)?, key)?);
    }
    let mut trs = BTreeMap::new();
    for (key, mv) in field("transpositions")? {
        let (a, b) = key.rsplit_once(':').ok_or_else(|| perr(format!("bad transposition key {:?}", key)))?;
        let s = parse_subset(a, n)?;
        let t: usize = b.parse().map_err(|_| perr(format!("bad transposition key {:?}", key)))?;
        if t == 0 || t >= fimod::size(s) {
            return Err(perr(format!("transposition key {:?} out of range", key)));
        }
        trs.insert((s, t), parse_matrix(mv, ngens(s)?, ngens(s)?, key)?);
    }
    Ok(FIModulePresentation::new(n, groups, steps, trs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use workbench_core::fimod::{builtin, BuiltinKind};

    #[test]
    fn builtins_round_trip() {
        for kind in [BuiltinKind::Constant, BuiltinKind::Standard, BuiltinKind::Exterior(2), BuiltinKind::TensorWedge(1)] {
            let m = builtin(kind, 3).unwrap();
            let v = to_json(&m).unwrap();
            assert_eq!(from_json(&v).unwrap(), m, "{kind}");
        }
        let big = builtin(BuiltinKind::TensorWedge(2), 4).unwrap();
        let v = to_json(&big).unwrap();
        assert!(v["step_maps"]["1,2,3->1,2,3,4"].is_object());
        assert_eq!(from_json(&v).unwrap(), big);
    }

    #[test]
    fn keys() {
        assert_eq!(subset_key(0), "");
        assert_eq!(parse_subset("1,3,4", 4).unwrap(), 0b1101);
        for bad in ["3,1", "1,1", "0", "5", "a"] {
            assert!(parse_subset(bad, 4).is_err(), "{bad}");
        }
        let v = to_json(&builtin(BuiltinKind::Constant, 2).unwrap()).unwrap();
        assert_eq!(v["step_maps"]["->1"], json!([[1]]));
        assert_eq!(v["transpositions"]["1,2:1"], json!([[1]]));
        assert_eq!(v["groups"][""], json!({"ngens": 1, "relations": []}));
    }

    #[test]
    fn malformed_documents() {
        let good = to_json(&builtin(BuiltinKind::Standard, 2).unwrap()).unwrap();
        let mut v = good.clone();
        v["step_maps"].as_object_mut().unwrap().remove("1->1,2");
        assert!(from_json(&v).is_err());
        let mut v = good.clone();
        v["step_maps"]["1->1,2"] = json!([[1, 0]]);
        assert!(from_json(&v).is_err());
        let mut v = good.clone();
        v["step_maps"]["1->1,2"] = json!([[1.5], [0]]);
        assert!(from_json(&v).is_err());
        let mut v = good;
        v["N"] = json!("two");
        assert!(from_json(&v).is_err());
    }
}
