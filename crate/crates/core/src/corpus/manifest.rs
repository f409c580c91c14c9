//! JSON Lines corpus manifest.
//!
//! The first non-blank line may be a header declaring subgroups; every other
//! line is one image entry:
//!
//! ```text
//! {"subgroups": [{"id": "light", "where": {"tone": "light"}}]}
//! {"image_id": "a1", "path": "img/a1.png", "attributes": {"tone": "light"}, "head_box": [10, 4, 20, 24]}
//! {"image_id": "b1", "path": "img/b1.png", "attributes": {"tone": "dark"}, "saliency_path": "maps/b1.pfm"}
//! ```
//!
//! A subgroup contains every entry whose attributes match all of its
//! `where` pairs. Paths are relative to the manifest's directory.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
    /// `(x, y, w, h)` in pixels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_box: Option<(u32, u32, u32, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saliency_path: Option<PathBuf>,
    /// 1-based line in the manifest file.
    #[serde(skip)]
    pub line: usize,
}

impl ManifestEntry {
    pub fn head_contains(&self, x: u32, y: u32) -> Option<bool> {
        self.head_box
            .map(|(bx, by, bw, bh)| x >= bx && x < bx + bw && y >= by && y < by + bh)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupDef {
    pub id: String,
    #[serde(rename = "where", default)]
    pub predicate: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Header {
    subgroups: Vec<SubgroupDef>,
}

/// A declared subgroup with its membership resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subgroup {
    pub id: String,
    pub attributes: BTreeMap<String, String>,
    /// Member image ids in manifest order.
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub subgroups: Vec<Subgroup>,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Check that referenced files exist.
    pub check_paths: bool,
    /// Read image headers to check head boxes against image bounds.
    pub probe_images: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            check_paths: true,
            probe_images: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    DuplicateId {
        image_id: String,
        first_line: usize,
        line: usize,
    },
    MissingFile {
        image_id: String,
        line: usize,
        path: PathBuf,
    },
    UnreadableImage {
        image_id: String,
        line: usize,
        message: String,
    },
    HeadBoxOutOfBounds {
        image_id: String,
        line: usize,
        head_box: (u32, u32, u32, u32),
        width: u32,
        height: u32,
    },
    EmptyHeadBox {
        image_id: String,
        line: usize,
    },
    DuplicateSubgroup {
        id: String,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::DuplicateId {
                image_id,
                first_line,
                line,
            } => write!(
                f,
                "line {line}: duplicate image_id {image_id:?} (first defined on line {first_line})"
            ),
            ValidationIssue::MissingFile {
                image_id,
                line,
                path,
            } => write!(f, "line {line}: {image_id:?} references missing file {}", path.display()),
            ValidationIssue::UnreadableImage {
                image_id,
                line,
                message,
            } => write!(f, "line {line}: cannot read image for {image_id:?}: {message}"),
            ValidationIssue::HeadBoxOutOfBounds {
                image_id,
                line,
                head_box: (x, y, w, h),
                width,
                height,
            } => write!(
                f,
                "line {line}: head_box ({x}, {y}, {w}, {h}) of {image_id:?} exceeds {width}x{height} image"
            ),
            ValidationIssue::EmptyHeadBox { image_id, line } => {
                write!(f, "line {line}: head_box of {image_id:?} has zero area")
            }
            ValidationIssue::DuplicateSubgroup { id } => {
                write!(f, "subgroup {id:?} declared more than once")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("manifest failed validation with {} issue(s):\n{}", .0.len(), format_issues(.0))]
    Invalid(Vec<ValidationIssue>),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CorpusManifest {
    pub fn entry(&self, image_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }

    pub fn subgroup(&self, id: &str) -> Option<&Subgroup> {
        self.subgroups.iter().find(|g| g.id == id)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Build from in-memory parts, resolving subgroup membership.
    pub fn from_parts(entries: Vec<ManifestEntry>, defs: Vec<SubgroupDef>, base_dir: PathBuf) -> Self {
        let subgroups = defs
            .into_iter()
            .map(|def| Subgroup {
                members: entries
                    .iter()
                    .filter(|e| def.predicate.iter().all(|(k, v)| e.attributes.get(k) == Some(v)))
                    .map(|e| e.image_id.clone())
                    .collect(),
                id: def.id,
                attributes: def.predicate,
            })
            .collect();
        CorpusManifest {
            entries,
            subgroups,
            base_dir,
        }
    }

    /// Serialise back to the JSON Lines format.
    pub fn to_jsonl(&self) -> String {
        let header = Header {
            subgroups: self
                .subgroups
                .iter()
                .map(|g| SubgroupDef {
                    id: g.id.clone(),
                    predicate: g.attributes.clone(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string(&header).expect("header serialises");
        out.push('\n');
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("entry serialises"));
            out.push('\n');
        }
        out
    }
}

/// Parse manifest text without touching the filesystem.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<CorpusManifest, ManifestError> {
    let mut defs: Vec<SubgroupDef> = Vec::new();
    let mut entries: Vec<ManifestEntry> = Vec::new();
    let mut seen_content = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(raw).map_err(|e| ManifestError::Parse {
            line,
            message: e.to_string(),
        })?;
        let is_header = value.get("subgroups").is_some();
        if is_header {
            if seen_content {
                return Err(ManifestError::Parse {
                    line,
                    message: "subgroup header must be the first line".into(),
                });
            }
            let header: Header = serde_json::from_value(value).map_err(|e| ManifestError::Parse {
                line,
                message: e.to_string(),
            })?;
            defs = header.subgroups;
        } else {
            let mut entry: ManifestEntry =
                serde_json::from_value(value).map_err(|e| ManifestError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            entry.line = line;
            entries.push(entry);
        }
        seen_content = true;
    }

    let mut issues = Vec::new();
    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for e in &entries {
        if let Some(&first_line) = first_seen.get(e.image_id.as_str()) {
            issues.push(ValidationIssue::DuplicateId {
                image_id: e.image_id.clone(),
                first_line,
                line: e.line,
            });
        } else {
            first_seen.insert(&e.image_id, e.line);
        }
        if let Some((_, _, w, h)) = e.head_box {
            if w == 0 || h == 0 {
                issues.push(ValidationIssue::EmptyHeadBox {
                    image_id: e.image_id.clone(),
                    line: e.line,
                });
            }
        }
    }
    let mut seen_groups = HashMap::new();
    for d in &defs {
        if seen_groups.insert(d.id.as_str(), ()).is_some() {
            issues.push(ValidationIssue::DuplicateSubgroup { id: d.id.clone() });
        }
    }
    if !issues.is_empty() {
        return Err(ManifestError::Invalid(issues));
    }
    Ok(CorpusManifest::from_parts(entries, defs, base_dir.to_path_buf()))
}

/// Check that files exist and head boxes fit, collecting every problem.
pub fn validate_files(manifest: &CorpusManifest, probe_images: bool) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for e in &manifest.entries {
        let path = manifest.resolve(&e.path);
        if !path.is_file() {
            issues.push(ValidationIssue::MissingFile {
                image_id: e.image_id.clone(),
                line: e.line,
                path: e.path.clone(),
            });
        } else if probe_images {
            if let Some(hb @ (x, y, w, h)) = e.head_box {
                match image::image_dimensions(&path) {
                    Ok((iw, ih)) => {
                        if x as u64 + w as u64 > iw as u64 || y as u64 + h as u64 > ih as u64 {
                            issues.push(ValidationIssue::HeadBoxOutOfBounds {
                                image_id: e.image_id.clone(),
                                line: e.line,
                                head_box: hb,
                                width: iw,
                                height: ih,
                            });
                        }
                    }
                    Err(err) => issues.push(ValidationIssue::UnreadableImage {
                        image_id: e.image_id.clone(),
                        line: e.line,
                        message: err.to_string(),
                    }),
                }
            }
        }
        if let Some(sp) = &e.saliency_path {
            if !manifest.resolve(sp).is_file() {
                issues.push(ValidationIssue::MissingFile {
                    image_id: e.image_id.clone(),
                    line: e.line,
                    path: sp.clone(),
                });
            }
        }
    }
    issues
}

pub fn load_manifest(path: &Path) -> Result<CorpusManifest, ManifestError> {
    load_manifest_with(path, LoadOptions::default())
}

pub fn load_manifest_with(path: &Path, opts: LoadOptions) -> Result<CorpusManifest, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Read {
        path: path.to_path_buf(),
        source: e,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    // parse-level issues (duplicates) and file-level issues are reported together
    let (manifest, mut issues) = match parse_manifest(&text, base) {
        Ok(m) => (m, Vec::new()),
        Err(ManifestError::Invalid(issues)) => {
            let lenient = parse_lenient(&text, base);
            (lenient, issues)
        }
        Err(other) => return Err(other),
    };
    if opts.check_paths {
        issues.extend(validate_files(&manifest, opts.probe_images));
    }
    if issues.is_empty() {
        Ok(manifest)
    } else {
        Err(ManifestError::Invalid(issues))
    }
}

/// Re-parse ignoring validation, so file checks can still run on every line.
fn parse_lenient(text: &str, base: &Path) -> CorpusManifest {
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        if let Ok(mut e) = serde_json::from_str::<ManifestEntry>(raw) {
            e.line = k + 1;
            entries.push(e);
        }
    }
    CorpusManifest::from_parts(entries, Vec::new(), base.to_path_buf())
}
