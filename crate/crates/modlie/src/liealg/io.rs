//! JSON serialization of structure-constant tables.
//!
//! Schema: {"p": 5, "k": 1, "dim": 5, "labels": ["e-1", ...],
//! "brackets": [[i, j, [[t, "c"], ...]], ...]} with i < j throughout.
//! A coefficient string holds the decimal coordinates of the extension
//! element in ascending power order, comma-separated when k > 1.

use super::{LieAlgebra, LieError, StructureEntries, Validation};
use crate::gf::{Field, FieldTower};
use serde_json::{json, Value};

fn coeff_string(f: &Field, c: &[u64]) -> String {
    let parts: Vec<String> = c.iter().map(|w| w.to_string()).collect();
    debug_assert_eq!(c.len(), f.k());
    parts.join(",")
}

fn parse_coeff(f: &Field, s: &str) -> Result<Vec<u64>, LieError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != f.k() {
        return Err(LieError::Serialization(format!(
            "coefficient '{}' has {} coordinates, field needs {}",
            s,
            parts.len(),
            f.k()
        )));
    }
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let w: u64 = p
            .trim()
            .parse()
            .map_err(|_| LieError::Serialization(format!("bad coordinate '{}'", p)))?;
        out.push(w % f.p());
    }
    Ok(out)
}

pub fn to_json(l: &LieAlgebra) -> String {
    let f = l.field();
    let n = l.dim();
    let k = f.k();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = l.bracket_basis(i, j);
            if v.is_zero() {
                continue;
            }
            let terms: Vec<Value> = v
                .idx
                .iter()
                .enumerate()
                .map(|(pos, &t)| json!([t, coeff_string(f, &v.dat[pos * k..(pos + 1) * k])]))
                .collect();
            brackets.push(json!([i, j, terms]));
        }
    }
    let doc = json!({
        "p": f.p(),
        "k": f.k(),
        "dim": n,
        "labels": l.labels(),
        "brackets": brackets,
    });
    serde_json::to_string_pretty(&doc).expect("table serializes")
}

pub fn from_json(
    tower: &FieldTower,
    text: &str,
    validation: Validation,
) -> Result<LieAlgebra, LieError> {
    let bad = |msg: &str| LieError::Serialization(msg.to_string());
    let doc: Value =
        serde_json::from_str(text).map_err(|e| LieError::Serialization(e.to_string()))?;
    let p = doc.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing prime 'p'"))?;
    let k = doc.get("k").and_then(Value::as_u64).unwrap_or(1) as usize;
    let dim =
        doc.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing 'dim'"))? as usize;
    let f = if p < 5 { tower.field_small_char(p, k) } else { tower.field(p, k) }
        .map_err(|e| LieError::Serialization(e.to_string()))?;
    let labels: Vec<String> = match doc.get("labels") {
        Some(Value::Array(a)) => {
            if a.len() != dim {
                return Err(bad("label count does not match 'dim'"));
            }
            a.iter()
                .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad("label must be a string")))
                .collect::<Result<_, _>>()?
        }
        None => (0..dim).map(|i| format!("b{}", i)).collect(),
        _ => return Err(bad("'labels' must be an array")),
    };
    let mut entries: StructureEntries = Vec::new();
    let brackets = doc
        .get("brackets")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing 'brackets' array"))?;
    for row in brackets {
        let triple = row.as_array().filter(|a| a.len() == 3).ok_or_else(|| {
            bad("each bracket row must be [i, j, [[t, \"c\"], ...]]")
        })?;
        let i = triple[0].as_u64().ok_or_else(|| bad("bracket index must be an integer"))? as usize;
        let j = triple[1].as_u64().ok_or_else(|| bad("bracket index must be an integer"))? as usize;
        let mut terms = Vec::new();
        for term in triple[2].as_array().ok_or_else(|| bad("bracket terms must be an array"))? {
            let pair = term.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                bad("each term must be [t, \"c\"]")
            })?;
            let t = pair[0].as_u64().ok_or_else(|| bad("term index must be an integer"))? as usize;
            let c = match &pair[1] {
                Value::String(s) => parse_coeff(&f, s)?,
                Value::Number(n) => {
                    let w = n.as_u64().ok_or_else(|| bad("numeric coefficient must be a nonnegative integer"))?;
                    if f.k() != 1 {
                        return Err(bad("numeric coefficients only allowed when k = 1"));
                    }
                    vec![w % f.p()]
                }
                _ => return Err(bad("coefficient must be a string or integer")),
            };
            terms.push((t, c));
        }
        entries.push((i, j, terms));
    }
    LieAlgebra::from_structure_constants(&f, labels, entries, validation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::witt_w11_table;

    #[test]
    fn round_trip_preserves_the_table() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let w = witt_w11_table(&f).unwrap();
        let text = to_json(&w);
        let back = from_json(&tower, &text, Validation::Full).unwrap();
        assert_eq!(back.dim(), w.dim());
        assert_eq!(back.labels(), w.labels());
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(back.bracket_basis(i, j), w.bracket_basis(i, j));
            }
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let tower = FieldTower::new(1);
        assert!(from_json(&tower, "{", Validation::Full).is_err());
        assert!(from_json(&tower, r#"{"p": 5, "dim": 2, "brackets": 3}"#, Validation::Full).is_err());
        // Bad coefficient arity for an extension field.
        let doc = r#"{"p": 5, "k": 2, "dim": 2, "brackets": [[0, 1, [[0, "1,2,3"]]]]}"#;
        assert!(from_json(&tower, doc, Validation::Full).is_err());
        // Antisymmetry violations surface as construction errors.
        let doc = r#"{"p": 5, "dim": 2, "brackets": [[0, 0, [[1, "1"]]]]}"#;
        assert!(from_json(&tower, doc, Validation::Full).is_err());
    }
}
