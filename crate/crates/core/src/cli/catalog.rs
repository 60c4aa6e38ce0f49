//! Built-in algebras addressed by short keys.
//!
//! Keys: `abelian:n`, `heisenberg3`, `so3`, `paper6`, `poincare-sub`.
//! `poincare-sub` takes its `alpha` as `poincare-sub:1.5`,
//! `poincare-sub(1.5)` or `poincare-sub:alpha=1.5` (default 1).

use crate::algebra::{LieAlgebra, StructureConstants};
use crate::error::{LieError, Result};

pub struct CatalogEntry {
    pub key: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { key: "abelian", params: "n (required, e.g. abelian:4)", summary: "n-dimensional abelian algebra" },
    CatalogEntry { key: "heisenberg3", params: "", summary: "Heisenberg algebra, [e1,e2]=e3" },
    CatalogEntry { key: "so3", params: "", summary: "so(3), [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2" },
    CatalogEntry {
        key: "paper6",
        params: "",
        summary: "6-dim non-solvable algebra with center e6 and sl(2) Levi factor",
    },
    CatalogEntry {
        key: "poincare-sub",
        params: "alpha (default 1)",
        summary: "4-dim subalgebra [e1,e3]=e2, [e2,e3]=-e1, [e3,e4]=-alpha e4",
    },
];

/// 1-based `(i, j, k, C^k_ij)` brackets of the 6-dimensional algebra.
const PAPER6: &[(usize, usize, usize, f64)] = &[
    (1, 2, 6, 1.0),
    (1, 4, 1, -1.0),
    (1, 5, 2, 1.0),
    (2, 3, 1, 1.0),
    (2, 4, 2, 1.0),
    (3, 4, 3, -2.0),
    (3, 5, 4, 1.0),
    (4, 5, 5, -2.0),
];

fn from_one_based(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<StructureConstants> {
    let zero_based: Vec<_> = brackets.iter().map(|&(i, j, k, v)| (i - 1, j - 1, k - 1, v)).collect();
    StructureConstants::from_brackets(dim, &zero_based)
}

fn parse_param(key: &str, raw: &str, name: &str) -> Result<f64> {
    let raw = raw.strip_prefix(&format!("{name}=")).unwrap_or(raw);
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| LieError::InvalidInput(format!("catalog key '{key}': '{raw}' is not a valid {name}")))
}

/// Splits `name:arg` or `name(arg)`.
fn split_key(key: &str) -> (&str, Option<&str>) {
    if let Some(open) = key.find('(') {
        if let Some(inner) = key[open + 1..].strip_suffix(')') {
            return (&key[..open], Some(inner));
        }
    }
    match key.split_once(':') {
        Some((name, arg)) => (name, Some(arg)),
        None => (key, None),
    }
}

/// Structure constants (not center-adapted) for a catalog key.
pub fn build(key: &str) -> Result<LieAlgebra> {
    let (name, arg) = split_key(key.trim());
    let c = match (name, arg) {
        ("abelian", Some(n)) => {
            let dim = n
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| LieError::InvalidInput(format!("catalog key '{key}': dimension must be a positive integer")))?;
            StructureConstants::zeros(dim)?
        }
        ("abelian", None) => return Err(LieError::InvalidInput("catalog key 'abelian' needs a dimension, e.g. abelian:3".into())),
        ("heisenberg3", None) => from_one_based(3, &[(1, 2, 3, 1.0)])?,
        ("so3", None) => from_one_based(3, &[(1, 2, 3, 1.0), (2, 3, 1, 1.0), (3, 1, 2, 1.0)])?,
        ("paper6", None) => from_one_based(6, PAPER6)?,
        ("poincare-sub", arg) => {
            let alpha = match arg {
                Some(a) => parse_param(key, a, "alpha")?,
                None => 1.0,
            };
            from_one_based(4, &[(1, 3, 2, 1.0), (2, 3, 1, -1.0), (3, 4, 4, -alpha)])?
        }
        (_, Some(_)) if ENTRIES.iter().any(|e| e.key == name) => {
            return Err(LieError::InvalidInput(format!("catalog key '{name}' takes no parameters")));
        }
        _ => return Err(LieError::InvalidInput(format!("unknown algebra '{key}' (not a file and not a catalog key)"))),
    };
    LieAlgebra::new(c, None)
}
