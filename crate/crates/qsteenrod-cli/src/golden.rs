//! Golden fixtures for emitted pairing values, keyed by `(p, q_max, h_max)`.
//!
//! Fixtures are only written when regeneration is requested explicitly.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::report::Outcome;

/// Fixture format version; bump when the payload layout changes.
pub const FIXTURE_VERSION: &str = "v1";

/// Fixtures shipped with the crate.
pub fn default_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(FIXTURE_VERSION)
}

#[derive(Debug, Clone)]
pub struct GoldenStore {
    dir: PathBuf,
}

impl GoldenStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, p: u64, q_max: u32, h_max: i32) -> PathBuf {
        self.dir.join(format!("tstar_p{p}_q{q_max}_h{h_max}.json"))
    }

    fn document(p: u64, q_max: u32, h_max: i32, values: &Value) -> Value {
        json!({"p": p, "q_max": q_max, "h_max": h_max, "pairing_values": values})
    }

    /// Compare `values` with the stored fixture, or overwrite it when `regen` is set.
    pub fn check(&self, p: u64, q_max: u32, h_max: i32, values: &Value, regen: bool) -> io::Result<Outcome> {
        let path = self.path(p, q_max, h_max);
        let doc = Self::document(p, q_max, h_max, values);
        if regen {
            fs::create_dir_all(&self.dir)?;
            fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            return Ok(Outcome::pass(format!("regenerated {}", path.display())));
        }
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Ok(Outcome::inconclusive(format!("no fixture at {}", path.display())));
            }
            Err(e) => return Err(e),
        };
        let stored: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => return Ok(Outcome::fail(format!("unreadable fixture {}: {e}", path.display()), None)),
        };
        if stored == doc {
            Ok(Outcome::pass(format!("matches {}", path.display())))
        } else {
            let diff: Vec<Value> = values
                .as_object()
                .into_iter()
                .flatten()
                .filter(|(k, v)| stored["pairing_values"].get(k.as_str()) != Some(v))
                .map(|(k, _)| Value::String(k.clone()))
                .collect();
            Ok(Outcome::fail(format!("differs from {}", path.display()), Some(json!({"differing_pairs": diff}))))
        }
    }
}
