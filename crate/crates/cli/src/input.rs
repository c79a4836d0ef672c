use std::fs;
use std::path::{Path, PathBuf};

use polybundle::problems::{load_sdpa, GeneratorManifest};
use polybundle::{Scalar, SdpProblem};

use crate::Failure;

/// Loads an SDPA file, or a generator manifest together with the instance it
/// names. A manifest also supplies the planted trace and rank.
pub fn load_instance<T: Scalar>(path: &Path) -> Result<SdpProblem<T>, Failure> {
    let read_err = |e: &dyn std::fmt::Display| Failure(format!("{}: {e}", path.display()));
    if !is_json(path) {
        return load_sdpa(path).map_err(|e| read_err(&e));
    }
    let (mf, inst) = load_manifest(path)?;
    let p = load_sdpa::<T>(&inst).map_err(|e| Failure(format!("{}: {e}", inst.display())))?;
    if (p.n(), p.m()) != (mf.n, mf.m) {
        return Err(Failure(format!(
            "manifest says n = {}, m = {} but {} has n = {}, m = {}",
            mf.n,
            mf.m,
            inst.display(),
            p.n(),
            p.m()
        )));
    }
    Ok(p.with_known_trace(T::lit(mf.known_trace)).with_known_rank(mf.r))
}

pub fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// The manifest and the resolved path of its instance file.
pub fn load_manifest(path: &Path) -> Result<(GeneratorManifest, PathBuf), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let mf: GeneratorManifest =
        serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let rel = mf
        .instance
        .clone()
        .ok_or_else(|| Failure(format!("{}: manifest names no instance file", path.display())))?;
    let inst = path.parent().unwrap_or(Path::new(".")).join(rel);
    Ok((mf, inst))
}
