//! Plain-text code files and family directories.
//!
//! A code file starts with `n m`, followed by `HX` and `HZ` blocks and
//! optional `LX` / `LZ` blocks, each a matrix in the gf2 text format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CodeError, CodeFamily, CssCode};
use crate::gf2::BitMatrix;

pub fn write_code(code: &CssCode) -> String {
    let mut s = format!("{} {}\n", code.n(), code.m());
    for (tag, mat) in [("HX", code.hx()), ("HZ", code.hz()), ("LX", code.lx()), ("LZ", code.lz())] {
        s.push_str(tag);
        s.push('\n');
        s.push_str(&mat.to_text());
    }
    s
}

pub fn read_code(name: &str, text: &str) -> Result<CssCode, CodeError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| CodeError::Format("empty code file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| CodeError::Format(format!("bad header {header:?}"))))
        .collect::<Result<_, _>>()?;
    let [n, m] = dims[..] else {
        return Err(CodeError::Format(format!("header must be 'n m', got {header:?}")));
    };
    let mut blocks: Vec<(String, BitMatrix)> = Vec::new();
    while let Some(tag) = lines.next() {
        let tag = tag.trim().to_string();
        if !matches!(tag.as_str(), "HX" | "HZ" | "LX" | "LZ") {
            return Err(CodeError::Format(format!("unknown block {tag:?}")));
        }
        let mat = BitMatrix::read_text(&mut lines)?;
        if mat.ncols() != n {
            return Err(CodeError::Format(format!("block {tag} has {} columns, expected {n}", mat.ncols())));
        }
        blocks.push((tag, mat));
    }
    let take = |t: &str| blocks.iter().find(|(k, _)| k == t).map(|(_, m)| m.clone());
    let hx = take("HX").ok_or_else(|| CodeError::Format("missing HX".into()))?;
    let hz = take("HZ").ok_or_else(|| CodeError::Format("missing HZ".into()))?;
    let code = match (take("LX"), take("LZ")) {
        (Some(lx), Some(lz)) => CssCode::from_parts(name, hx, hz, lx, lz),
        (None, None) => CssCode::new(name, hx, hz)?,
        _ => return Err(CodeError::Format("LX and LZ must appear together".into())),
    };
    if code.m() != m {
        return Err(CodeError::Format(format!("header says m = {m}, logical blocks give {}", code.m())));
    }
    Ok(code)
}

#[derive(Debug, Serialize, Deserialize)]
struct FamilyManifest {
    name: String,
    alpha: f64,
    beta: f64,
    r0: usize,
    provenance: String,
    levels: Vec<String>,
}

/// Writes `manifest.json` plus one `level{r}.txt` per level.
pub fn save_family_dir(family: &CodeFamily, dir: &Path) -> Result<(), CodeError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (i, code) in family.levels.iter().enumerate() {
        let file = format!("level{}.txt", i + 1);
        fs::write(dir.join(&file), write_code(code))?;
        files.push(file);
    }
    let manifest = FamilyManifest {
        name: family.name.clone(),
        alpha: family.alpha,
        beta: family.beta,
        r0: family.r0,
        provenance: family.provenance.clone(),
        levels: files,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CodeError::Format(e.to_string()))?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

pub fn load_family_dir(dir: &Path) -> Result<CodeFamily, CodeError> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: FamilyManifest = serde_json::from_str(&text).map_err(|e| CodeError::Format(e.to_string()))?;
    let mut levels = Vec::new();
    for (i, file) in manifest.levels.iter().enumerate() {
        let body = fs::read_to_string(dir.join(file))?;
        levels.push(read_code(&format!("{}/level{}", manifest.name, i + 1), &body)?);
    }
    Ok(CodeFamily {
        name: manifest.name,
        levels,
        alpha: manifest.alpha,
        beta: manifest.beta,
        r0: manifest.r0,
        provenance: manifest.provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_text_round_trip() {
        let c = CssCode::steane();
        let back = read_code("steane", &write_code(&c)).unwrap();
        assert_eq!(back.hx(), c.hx());
        assert_eq!(back.lz(), c.lz());
        assert!(back.validate().all_passed());
    }

    #[test]
    fn checks_only_file_derives_logicals() {
        let text = "4 2\nHX\n1 4\n1111\nHZ\n1 4\n1111\n";
        let c = read_code("422", text).unwrap();
        assert_eq!(c.m(), 2);
        assert!(c.validate().all_passed());
    }
}
