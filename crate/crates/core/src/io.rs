//! JSON and CSV file formats used by the command-line tool.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::observables::{expectation, flexible_dispersion, FlexibleObservable, FlowResult};
use crate::probability::DensityOperator;
use crate::projective::{Config, Ray};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Malformed(e.to_string()))
}

/// A state file holds either a vector (pure state) or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFile {
    Pure(Ray),
    Mixed(DensityOperator),
}

impl StateFile {
    pub fn load(path: &Path) -> Result<Self> {
        let value: serde_json::Value = read_json(path)?;
        let malformed = |e: serde_json::Error| Error::Malformed(format!("{}: {e}", path.display()));
        if value.get("dim").is_some() {
            let m: CMatrix = serde_json::from_value(value).map_err(malformed)?;
            Ok(StateFile::Mixed(DensityOperator::new(m)?))
        } else {
            let v: CVector = serde_json::from_value(value).map_err(malformed)?;
            Ok(StateFile::Pure(Ray::new(&v)?))
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            StateFile::Pure(x) => DensityOperator::pure(x),
            StateFile::Mixed(w) => w.clone(),
        }
    }

    /// The ray of a pure state; mixed states are rejected.
    pub fn ray(&self) -> Result<&Ray> {
        match self {
            StateFile::Pure(x) => Ok(x),
            StateFile::Mixed(_) => Err(Error::Malformed("expected a pure state vector".into())),
        }
    }
}

/// CSV of a flow: `t`, the canonical representative as `re_k,im_k` pairs,
/// `<A>`, `<B>`, `<F> = <A><B>` and the dispersion of the field of `F`.
pub fn flow_csv(cfg: &Config, f: &FlexibleObservable, flow: &FlowResult) -> Result<String> {
    let dim = f.dim();
    let mut out = String::from("t");
    for k in 0..dim {
        out.push_str(&format!(",re{k},im{k}"));
    }
    out.push_str(",expect_a,expect_b,expect_f,flexible_dispersion\n");
    for (t, x) in &flow.trajectory {
        let a = expectation(&f.a, x)?;
        let b = expectation(&f.b, x)?;
        out.push_str(&format!("{t:e}"));
        for z in x.rep().entries() {
            out.push_str(&format!(",{:e},{:e}", z.re, z.im));
        }
        out.push_str(&format!(
            ",{a:e},{b:e},{:e},{:e}\n",
            a * b,
            flexible_dispersion(cfg, f, x)?
        ));
    }
    Ok(out)
}
