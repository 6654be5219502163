//! Corpus loading: group manifests and the bundled program groups.
//!
//! A corpus root holds one directory per group. Each directory contains a
//! `group.manifest` naming the group, its shared signature and its `.ml0`
//! program files. Groups load independently; a broken group is reported
//! without aborting the rest, and groups whose members disagree on the
//! equivalence probe are loaded but flagged.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::minilang::{parse, ParseError, Program, Type};
use crate::prng::derive_seed;
use crate::testkit::{
    equivalence_probe, EquivalenceReport, GroupError, GroupId, ProgramGroup, Signature,
};

/// Parsed `group.manifest` contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupManifest {
    pub group_id: GroupId,
    pub signature: Signature,
    pub program_files: Vec<String>,
    pub notes: Vec<String>,
}

/// One successfully loaded group.
#[derive(Debug, Clone)]
pub struct LoadedGroup {
    pub group: ProgramGroup,
    pub manifest: GroupManifest,
    pub probe: EquivalenceReport,
    /// Set when the equivalence probe found a disagreement.
    pub flagged: bool,
    /// Set when the manifest lists fewer than two programs.
    pub singleton: bool,
}

/// Load result: groups that loaded plus per-directory failures.
#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub groups: Vec<LoadedGroup>,
    pub errors: Vec<(String, CorpusError)>,
}

impl CorpusLoad {
    pub fn program_count(&self) -> usize {
        self.groups.iter().map(|g| g.group.programs.len()).sum()
    }

    pub fn flagged_count(&self) -> usize {
        self.groups.iter().filter(|g| g.flagged).count()
    }
}

#[derive(Debug, Clone, Error)]
pub enum CorpusError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: PathBuf, message: String },
    #[error("missing group.manifest in `{0}`")]
    ManifestMissing(PathBuf),
    #[error("manifest line {line}: {message}")]
    ManifestParse { line: usize, message: String },
    #[error("program file `{file}`: {source}")]
    ProgramParse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("program `{program}` in `{file}` has signature {found}, manifest says {expected}")]
    SignatureMismatch {
        file: String,
        program: String,
        expected: String,
        found: String,
    },
    #[error("duplicate program name `{0}` (program names must be unique corpus-wide)")]
    DuplicateProgram(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// How hard the loader probes each group for equivalence.
#[derive(Debug, Clone, Copy)]
pub struct CorpusConfig {
    pub probe_budget: u64,
    pub seed: u64,
    pub fuel: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            probe_budget: 1_000,
            seed: 1,
            fuel: crate::interp::DEFAULT_FUEL,
        }
    }
}

fn parse_type(text: &str) -> Option<Type> {
    match text.trim() {
        "int" => Some(Type::Int),
        "bool" => Some(Type::Bool),
        _ => None,
    }
}

fn parse_signature(text: &str, line: usize) -> Result<Signature, CorpusError> {
    let bad = |message: String| CorpusError::ManifestParse { line, message };
    let text = text.trim();
    let arrow = text
        .find("->")
        .ok_or_else(|| bad("signature needs `->`".into()))?;
    let params_part = text[..arrow].trim();
    let ret_part = text[arrow + 2..].trim();
    let inner = params_part
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| bad("parameters must be parenthesized".into()))?;
    let mut param_types = Vec::new();
    if !inner.trim().is_empty() {
        for part in inner.split(',') {
            param_types.push(
                parse_type(part).ok_or_else(|| bad(format!("unknown type `{}`", part.trim())))?,
            );
        }
    }
    let return_type =
        parse_type(ret_part).ok_or_else(|| bad(format!("unknown return type `{ret_part}`")))?;
    Ok(Signature {
        param_types,
        return_type,
    })
}

/// Parse the text of a `group.manifest`.
pub fn parse_manifest(text: &str) -> Result<GroupManifest, CorpusError> {
    let mut group_id: Option<GroupId> = None;
    let mut signature: Option<Signature> = None;
    let mut program_files = Vec::new();
    let mut notes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("group ") {
            group_id = Some(GroupId::new(rest.trim()));
        } else if let Some(rest) = trimmed.strip_prefix("signature ") {
            signature = Some(parse_signature(rest, line)?);
        } else if let Some(rest) = trimmed.strip_prefix("program ") {
            program_files.push(rest.trim().to_string());
        } else if let Some(rest) = trimmed.strip_prefix("note ") {
            notes.push(rest.trim().to_string());
        } else {
            return Err(CorpusError::ManifestParse {
                line,
                message: format!("unrecognized line `{trimmed}`"),
            });
        }
    }
    let group_id = group_id.ok_or(CorpusError::ManifestParse {
        line: 0,
        message: "missing `group` line".into(),
    })?;
    let signature = signature.ok_or(CorpusError::ManifestParse {
        line: 0,
        message: "missing `signature` line".into(),
    })?;
    if program_files.is_empty() {
        return Err(CorpusError::ManifestParse {
            line: 0,
            message: "manifest lists no programs".into(),
        });
    }
    Ok(GroupManifest {
        group_id,
        signature,
        program_files,
        notes,
    })
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_group_dir(dir: &Path, cfg: &CorpusConfig) -> Result<LoadedGroup, CorpusError> {
    let manifest_path = dir.join("group.manifest");
    if !manifest_path.is_file() {
        return Err(CorpusError::ManifestMissing(dir.to_path_buf()));
    }
    let manifest = parse_manifest(&read_file(&manifest_path)?)?;
    let mut programs: Vec<Program> = Vec::new();
    for file in &manifest.program_files {
        let source = read_file(&dir.join(file))?;
        let program = parse(&source).map_err(|e| CorpusError::ProgramParse {
            file: file.clone(),
            source: e,
        })?;
        let found = Signature::of(&program);
        if found != manifest.signature {
            return Err(CorpusError::SignatureMismatch {
                file: file.clone(),
                program: program.name.clone(),
                expected: manifest.signature.to_string(),
                found: found.to_string(),
            });
        }
        programs.push(program);
    }
    let singleton = programs.len() < 2;
    let group = ProgramGroup::new(manifest.group_id.clone(), programs)?;
    let probe_seed = derive_seed(cfg.seed, &["probe", &group.id.0]);
    let probe = equivalence_probe(&group, cfg.probe_budget, probe_seed, cfg.fuel);
    let flagged = !probe.agrees();
    Ok(LoadedGroup {
        group,
        manifest,
        probe,
        flagged,
        singleton,
    })
}

/// Load every group directory under `root` (sorted by directory name).
/// Failures are collected per group; loading never aborts the whole corpus.
pub fn load_corpus(root: &Path, cfg: &CorpusConfig) -> Result<CorpusLoad, CorpusError> {
    let entries = std::fs::read_dir(root).map_err(|e| CorpusError::Io {
        path: root.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    let mut load = CorpusLoad::default();
    let mut seen_programs: BTreeSet<String> = BTreeSet::new();
    for dir in dirs {
        let dir_name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        match load_group_dir(&dir, cfg) {
            Ok(loaded) => {
                let mut duplicate = None;
                for p in &loaded.group.programs {
                    if !seen_programs.insert(p.name.clone()) {
                        duplicate = Some(p.name.clone());
                    }
                }
                match duplicate {
                    Some(name) => load
                        .errors
                        .push((dir_name, CorpusError::DuplicateProgram(name))),
                    None => load.groups.push(loaded),
                }
            }
            Err(err) => load.errors.push((dir_name, err)),
        }
    }
    Ok(load)
}

impl fmt::Display for GroupManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {}", self.group_id)?;
        writeln!(f, "signature {}", self.signature)?;
        for p in &self.program_files {
            writeln!(f, "program {p}")?;
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_group(root: &Path, name: &str, manifest: &str, files: &[(&str, &str)]) {
        let dir = root.join(name);
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("group.manifest"), manifest).unwrap();
        for (file, content) in files {
            fs::write(dir.join(file), content).unwrap();
        }
    }

    #[test]
    fn manifest_parses_and_displays() {
        let text = "# demo\ngroup abs\nsignature (int) -> int\nprogram a.ml0\nprogram b.ml0\nnote b uses arithmetic\n";
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.group_id, GroupId::new("abs"));
        assert_eq!(m.program_files, vec!["a.ml0", "b.ml0"]);
        assert_eq!(m.signature.param_types, vec![Type::Int]);
        let printed = m.to_string();
        assert_eq!(parse_manifest(&printed).unwrap(), m);
    }

    #[test]
    fn manifest_rejects_garbage() {
        assert!(parse_manifest("group x\nwhat is this\n").is_err());
        assert!(parse_manifest("signature (int) -> int\nprogram a.ml0\n").is_err());
        assert!(parse_manifest("group x\nsignature int -> int\nprogram a.ml0\n").is_err());
    }

    #[test]
    fn loads_groups_and_flags_divergence() {
        let tmp = tempfile::tempdir().unwrap();
        write_group(
            tmp.path(),
            "abs",
            "group abs\nsignature (int) -> int\nprogram a.ml0\nprogram b.ml0\n",
            &[
                ("a.ml0", "fn abs_a(x:int)->int { if (x<0) { return -x; } return x; }"),
                ("b.ml0", "fn abs_b(x:int)->int { if (x>=0) { return x; } return 0-x; }"),
            ],
        );
        write_group(
            tmp.path(),
            "bad",
            "group bad\nsignature (int) -> int\nprogram a.ml0\nprogram b.ml0\n",
            &[
                ("a.ml0", "fn bad_a(x:int)->int { return x; }"),
                ("b.ml0", "fn bad_b(x:int)->int { return x + 1; }"),
            ],
        );
        let load = load_corpus(tmp.path(), &CorpusConfig::default()).unwrap();
        assert_eq!(load.groups.len(), 2);
        assert!(load.errors.is_empty());
        let abs = &load.groups[0];
        assert!(!abs.flagged);
        let bad = &load.groups[1];
        assert!(bad.flagged, "divergent group loads but is flagged");
        assert!(!bad.probe.disagreements.is_empty());
    }

    #[test]
    fn missing_manifest_is_a_per_group_error() {
        let tmp = tempfile::tempdir().unwrap();
        write_group(
            tmp.path(),
            "ok",
            "group ok\nsignature (int) -> int\nprogram a.ml0\nprogram b.ml0\n",
            &[
                ("a.ml0", "fn ok_a(x:int)->int { return x; }"),
                ("b.ml0", "fn ok_b(x:int)->int { return x + 0; }"),
            ],
        );
        fs::create_dir_all(tmp.path().join("broken")).unwrap();
        fs::write(tmp.path().join("broken/a.ml0"), "fn x()->int { return 1; }").unwrap();
        let load = load_corpus(tmp.path(), &CorpusConfig::default()).unwrap();
        assert_eq!(load.groups.len(), 1);
        assert_eq!(load.errors.len(), 1);
        assert!(matches!(load.errors[0].1, CorpusError::ManifestMissing(_)));
    }

    #[test]
    fn signature_mismatch_reported() {
        let tmp = tempfile::tempdir().unwrap();
        write_group(
            tmp.path(),
            "sig",
            "group sig\nsignature (int, int) -> int\nprogram a.ml0\nprogram b.ml0\n",
            &[
                ("a.ml0", "fn s_a(x:int)->int { return x; }"),
                ("b.ml0", "fn s_b(x:int,y:int)->int { return x+y; }"),
            ],
        );
        let load = load_corpus(tmp.path(), &CorpusConfig::default()).unwrap();
        assert!(load.groups.is_empty());
        assert!(matches!(
            load.errors[0].1,
            CorpusError::SignatureMismatch { .. }
        ));
    }

    #[test]
    fn duplicate_program_names_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        for gname in ["g1", "g2"] {
            write_group(
                tmp.path(),
                gname,
                &format!("group {gname}\nsignature (int) -> int\nprogram a.ml0\nprogram b.ml0\n"),
                &[
                    ("a.ml0", "fn same(x:int)->int { return x; }"),
                    ("b.ml0", &format!("fn {gname}_b(x:int)->int {{ return x + 0; }}")),
                ],
            );
        }
        let load = load_corpus(tmp.path(), &CorpusConfig::default()).unwrap();
        assert_eq!(load.groups.len(), 1);
        assert!(matches!(
            load.errors[0].1,
            CorpusError::DuplicateProgram(_)
        ));
    }
}
