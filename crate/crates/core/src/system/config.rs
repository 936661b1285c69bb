//! TOML config ingestion.
//!
//! ```toml
//! n = 3
//! [[equations]]
//! order = 1
//! [[equations.monomials]]
//! coef = 1.0
//! sigma = 0.0
//! powers = [5.0]
//! ```

use super::{SpecError, SystemSpec};
use std::path::Path;

/// Parses a config document. Unknown keys are rejected; invariants are not
/// checked here (see [`super::validate`]).
pub fn parse_spec(text: &str) -> Result<SystemSpec, SpecError> {
    toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<SystemSpec, SpecError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LANE_EMDEN: &str = r#"
n = 3

[[equations]]
order = 1
[[equations.monomials]]
coef = 1.0
sigma = 0.0
powers = [0.0, 5.0]

[[equations]]
order = 1
[[equations.monomials]]
coef = 1
sigma = 0
powers = [5, 0]
"#;

    #[test]
    fn parses_system_with_integer_literals() {
        let spec = parse_spec(LANE_EMDEN).unwrap();
        assert_eq!(spec.n, 3);
        assert_eq!(spec.equations.len(), 2);
        assert_eq!(spec.equations[1].monomials[0].powers, vec![5.0, 0.0]);
        assert_eq!(spec.equations[1].monomials[0].coef, 1.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = LANE_EMDEN.replace("sigma = 0\n", "sigma = 0\nweight = 2\n");
        let err = parse_spec(&text).unwrap_err();
        assert!(err.to_string().contains("weight"), "{err}");
    }

    #[test]
    fn rejects_missing_fields() {
        let text = "n = 3\n[[equations]]\norder = 1\n";
        assert!(parse_spec(text).is_err());
    }
}
