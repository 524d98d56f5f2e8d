//! Built-in example inputs with exact rational structure constants.

use hpk_core::liepair::{abelian, sl2, sl2_matched_pair, sl3, LiePairData};
use hpk_core::serial::{JsonLiePair, JsonMatchedPair};
use hpk_core::{Error, Result};
use std::path::Path;

pub fn emit(name: &str, output: Option<&Path>) -> Result<()> {
    let text = match name {
        "sl2-cartan" => {
            let pair = LiePairData::new(sl2(), &["h"])?;
            serde_json::to_string_pretty(&JsonLiePair::from_lie_pair(&pair))
        }
        "sl3-cartan" => {
            let pair = LiePairData::new(sl3(), &["h1", "h2"])?;
            serde_json::to_string_pretty(&JsonLiePair::from_lie_pair(&pair))
        }
        "sl2-matched" => {
            let data = sl2_matched_pair();
            // Closure of both summands is certified at emission time.
            let compat = data.check_compatibility();
            if !compat.passed() {
                return Err(Error::Structural(
                    "matched-pair example failed its own compatibility check".into(),
                ));
            }
            serde_json::to_string_pretty(&JsonMatchedPair::from_matched_pair(&data))
        }
        "abelian" => {
            let pair = LiePairData::new(abelian(3), &["a0"])?;
            serde_json::to_string_pretty(&JsonLiePair::from_lie_pair(&pair))
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown example {other:?}; available: sl2-cartan, sl3-cartan, sl2-matched, abelian"
            )))
        }
    }
    .map_err(|e| Error::Parse(e.to_string()))?;
    match output {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
    }
}
