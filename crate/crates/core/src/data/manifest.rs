//! Line-oriented dataset manifest.
//!
//! Each line is `role<TAB>path` with role `train`, `validation` or `test`.
//! Two optional directive lines are understood: `scale<TAB>N` and
//! `augmented<TAB>true|false`. Blank lines and `#` comments are skipped.
//! Relative paths resolve against the manifest's directory.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Train,
    Validation,
    Test,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Validation => "validation",
            Role::Test => "test",
        }
    }

    fn parse(s: &str) -> Option<Role> {
        match s {
            "train" => Some(Role::Train),
            "validation" | "val" => Some(Role::Validation),
            "test" => Some(Role::Test),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub role: Role,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub scale: Option<usize>,
    pub augmented: bool,
}

impl DatasetManifest {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut m = DatasetManifest::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::Manifest { line: line_no, message: "expected `role<TAB>path`".into() })?;
            let value = value.trim();
            match key.trim() {
                "scale" => {
                    let s = value
                        .parse()
                        .map_err(|_| Error::Manifest { line: line_no, message: format!("bad scale `{value}`") })?;
                    m.scale = Some(s);
                }
                "augmented" => {
                    m.augmented = value
                        .parse()
                        .map_err(|_| Error::Manifest { line: line_no, message: format!("bad flag `{value}`") })?;
                }
                role => {
                    let role = Role::parse(role)
                        .ok_or_else(|| Error::Manifest { line: line_no, message: format!("unknown role `{role}`") })?;
                    if value.is_empty() {
                        return Err(Error::Manifest { line: line_no, message: "empty path".into() });
                    }
                    let path = base.join(value);
                    if !seen.insert(path.clone()) {
                        return Err(Error::Manifest { line: line_no, message: format!("duplicate path {}", path.display()) });
                    }
                    m.entries.push(ManifestEntry { role, path });
                }
            }
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn paths(&self, role: Role) -> impl Iterator<Item = &Path> {
        self.entries.iter().filter(move |e| e.role == role).map(|e| e.path.as_path())
    }

    /// Fails on the first path that does not exist.
    pub fn check_paths(&self) -> Result<()> {
        for e in &self.entries {
            if !e.path.is_file() {
                return Err(Error::io(&e.path, std::io::Error::new(std::io::ErrorKind::NotFound, "listed in manifest")));
            }
        }
        Ok(())
    }

    /// Serialized form; paths are written as given.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = self.scale {
            let _ = writeln!(out, "scale\t{s}");
        }
        if self.augmented {
            out.push_str("augmented\ttrue\n");
        }
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}", e.role.as_str(), e.path.display());
        }
        out
    }
}
