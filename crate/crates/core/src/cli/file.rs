//! JSON algebra files.
//!
//! ```json
//! {"name": "heisenberg", "dim": 3, "labels": ["p", "q", "c"],
//!  "brackets": [{"i": 1, "j": 2, "coefficients": {"3": 1.0}}],
//!  "metadata": {}}
//! ```
//!
//! Indices are 1-based. A pair listed in one orientation is antisymmetrized;
//! a pair listed in both orientations is taken verbatim so that
//! inconsistent input surfaces as an antisymmetry violation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, StructureConstants};
use crate::error::{LieError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coefficients: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

impl AlgebraFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LieError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LieError::InvalidInput(format!("malformed algebra file: {e}")))
    }

    /// Raw structure constants, before validation.
    pub fn constants(&self) -> Result<StructureConstants> {
        let n = self.dim;
        let mut c = StructureConstants::zeros(n)?;
        let mut seen = BTreeMap::new();
        for b in &self.brackets {
            for idx in [b.i, b.j] {
                if idx == 0 || idx > n {
                    return Err(LieError::InvalidInput(format!("bracket index {idx} out of range 1..{n}")));
                }
            }
            if seen.insert((b.i, b.j), ()).is_some() {
                return Err(LieError::InvalidInput(format!("bracket [e{}, e{}] listed twice", b.i, b.j)));
            }
        }
        for b in &self.brackets {
            let mirrored = seen.contains_key(&(b.j, b.i)) || b.i == b.j;
            for (key, &v) in &b.coefficients {
                let k = key
                    .trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1 && k <= n)
                    .ok_or_else(|| LieError::InvalidInput(format!("coefficient index '{key}' out of range 1..{n}")))?;
                if !v.is_finite() {
                    return Err(LieError::InvalidInput(format!("non-finite coefficient in [e{}, e{}]", b.i, b.j)));
                }
                let (i, j, k) = (b.i - 1, b.j - 1, k - 1);
                c.set(k, i, j, v);
                if !mirrored {
                    c.set(k, j, i, -v);
                }
            }
        }
        Ok(c)
    }

    /// Validated algebra in the file's basis.
    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        LieAlgebra::new(self.constants()?, self.labels.clone())
    }

    /// Sparse `i < j` listing of an algebra.
    pub fn from_algebra(name: &str, alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        let c = alg.constants();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let coefficients: BTreeMap<String, f64> =
                    (0..n).filter(|&k| c.get(k, i, j) != 0.0).map(|k| ((k + 1).to_string(), c.get(k, i, j))).collect();
                if !coefficients.is_empty() {
                    brackets.push(BracketEntry { i: i + 1, j: j + 1, coefficients });
                }
            }
        }
        Self {
            name: name.to_string(),
            dim: n,
            labels: Some(alg.labels().to_vec()),
            brackets,
            metadata: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra file serializes")
    }
}
