//! Parsing contract shared by all technologies, plus filesystem discovery.
//!
//! A frontend only has to turn one script's text into a [`UnitBlock`]; the
//! provided `parse_file`, `parse_folder` and `parse_module` methods handle
//! I/O, module layouts and per-file fault isolation.

pub mod ansible;
pub mod chef;
pub mod docker;
pub mod puppet;
pub mod terraform;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use walkdir::WalkDir;

use crate::error::{Error, Result, SyntaxError};
use crate::ir::{Comment, Module, Project, UnitBlock, UnitBlockKind};
use crate::source::{self, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TechnologyId {
    Ansible,
    Chef,
    Docker,
    Puppet,
    Terraform,
}

impl TechnologyId {
    pub const ALL: [TechnologyId; 5] = [
        TechnologyId::Ansible,
        TechnologyId::Chef,
        TechnologyId::Docker,
        TechnologyId::Puppet,
        TechnologyId::Terraform,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TechnologyId::Ansible => "ansible",
            TechnologyId::Chef => "chef",
            TechnologyId::Docker => "docker",
            TechnologyId::Puppet => "puppet",
            TechnologyId::Terraform => "terraform",
        }
    }

    /// Whether `path` names a script of this technology.
    pub fn recognizes(self, path: &Path) -> bool {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match self {
            TechnologyId::Ansible => matches!(ext.as_deref(), Some("yml" | "yaml")),
            TechnologyId::Chef => ext.as_deref() == Some("rb"),
            TechnologyId::Docker => name == "Dockerfile" || ext.as_deref() == Some("dockerfile"),
            TechnologyId::Puppet => ext.as_deref() == Some("pp"),
            TechnologyId::Terraform => ext.as_deref() == Some("tf"),
        }
    }

    /// Whether `dir` is the root of a role / cookbook / module for this technology.
    pub fn is_module_root(self, dir: &Path) -> bool {
        let parent_is = |name: &str| {
            dir.parent()
                .and_then(Path::file_name)
                .is_some_and(|n| n == name)
        };
        match self {
            TechnologyId::Ansible => parent_is("roles"),
            TechnologyId::Chef => dir.join("metadata.rb").is_file() || dir.join("recipes").is_dir(),
            TechnologyId::Docker => false,
            TechnologyId::Puppet => dir.join("manifests").is_dir(),
            TechnologyId::Terraform => parent_is("modules"),
        }
    }

    pub fn parser(self) -> Box<dyn Parser> {
        match self {
            TechnologyId::Ansible => Box::new(ansible::AnsibleParser),
            TechnologyId::Chef => Box::new(chef::ChefParser),
            TechnologyId::Docker => Box::new(docker::DockerParser),
            TechnologyId::Puppet => Box::new(puppet::PuppetParser),
            TechnologyId::Terraform => Box::new(terraform::TerraformParser),
        }
    }
}

impl fmt::Display for TechnologyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TechnologyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TechnologyId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown technology `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedFile {
    pub path: String,
    pub reason: String,
}

/// Parse result plus everything that went wrong on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseOutcome<T> {
    pub result: T,
    pub warnings: Vec<String>,
    pub failed_files: Vec<FailedFile>,
}

impl<T> ParseOutcome<T> {
    pub fn ok(result: T) -> Self {
        ParseOutcome {
            result,
            warnings: Vec::new(),
            failed_files: Vec::new(),
        }
    }
}

/// Output of a frontend on one script.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub block: UnitBlock,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileRole {
    Script,
    ModuleMember { module_root: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveredFile {
    pub path: PathBuf,
    pub role: FileRole,
}

/// A technology frontend. Implementors provide `parse_source`; the remaining
/// methods are shared.
pub trait Parser: Send + Sync {
    fn technology(&self) -> TechnologyId;

    /// Lowers one newline-normalized script onto a `Script` unit block.
    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError>;

    fn parse_file(&self, path: &Path) -> Result<ParseOutcome<UnitBlock>> {
        if !path.exists() {
            return Err(Error::NotFound(path.to_path_buf()));
        }
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = source::decode(&bytes);
        let display = path.to_string_lossy().into_owned();
        Ok(match self.parse_source(&display, &text) {
            Ok(parsed) => ParseOutcome {
                result: parsed.block,
                warnings: parsed.warnings,
                failed_files: Vec::new(),
            },
            Err(err) => ParseOutcome {
                result: UnitBlock::new(
                    display.clone(),
                    UnitBlockKind::Script,
                    SourceSpan::location(display.clone(), 1),
                ),
                warnings: Vec::new(),
                failed_files: vec![FailedFile {
                    path: display,
                    reason: err.to_string(),
                }],
            },
        })
    }

    fn parse_folder(&self, path: &Path) -> Result<ParseOutcome<Project>> {
        let tech = self.technology();
        let files = discover(path, tech)?;
        let parsed = parse_all(self, files.iter().map(|f| f.path.as_path()))?;

        let mut project = Project::new(folder_name(path));
        let mut warnings = Vec::new();
        let mut failed_files = Vec::new();
        let mut modules: BTreeMap<PathBuf, Module> = BTreeMap::new();

        for (file, outcome) in files.iter().zip(parsed) {
            warnings.extend(outcome.warnings);
            if !outcome.failed_files.is_empty() {
                failed_files.extend(outcome.failed_files);
                continue;
            }
            match &file.role {
                FileRole::Script => project.unit_blocks.push(outcome.result),
                FileRole::ModuleMember { module_root } => modules
                    .entry(module_root.clone())
                    .or_insert_with(|| {
                        Module::new(
                            folder_name(module_root),
                            SourceSpan::location(module_root.to_string_lossy(), 1),
                        )
                    })
                    .unit_blocks
                    .push(outcome.result),
            }
        }

        project.modules = modules.into_values().collect();
        disambiguate_module_names(&mut project.modules, path);
        Ok(ParseOutcome {
            result: project,
            warnings,
            failed_files,
        })
    }

    fn parse_module(&self, path: &Path) -> Result<ParseOutcome<Module>> {
        let files = list_recognized(path, self.technology())?;
        let parsed = parse_all(self, files.iter().map(PathBuf::as_path))?;
        let mut module = Module::new(
            folder_name(path),
            SourceSpan::location(path.to_string_lossy(), 1),
        );
        let mut warnings = Vec::new();
        let mut failed_files = Vec::new();
        if files.is_empty() {
            warnings.push(format!(
                "{}: no {} files found in module",
                path.display(),
                self.technology()
            ));
        }
        for outcome in parsed {
            warnings.extend(outcome.warnings);
            if outcome.failed_files.is_empty() {
                module.unit_blocks.push(outcome.result);
            } else {
                failed_files.extend(outcome.failed_files);
            }
        }
        Ok(ParseOutcome {
            result: module,
            warnings,
            failed_files,
        })
    }
}

impl Parser for Box<dyn Parser> {
    fn technology(&self) -> TechnologyId {
        (**self).technology()
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        (**self).parse_source(path, source)
    }
}

/// Parses files concurrently; output order follows input order.
fn parse_all<'p, P: Parser + ?Sized>(
    parser: &P,
    paths: impl Iterator<Item = &'p Path>,
) -> Result<Vec<ParseOutcome<UnitBlock>>> {
    let paths: Vec<&Path> = paths.collect();
    paths.par_iter().map(|p| parser.parse_file(p)).collect()
}

fn folder_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn disambiguate_module_names(modules: &mut [Module], root: &Path) {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for m in modules.iter() {
        *seen.entry(m.name.clone()).or_default() += 1;
    }
    for m in modules.iter_mut() {
        if seen[&m.name] > 1 {
            let full = Path::new(&m.span.path);
            m.name = full
                .strip_prefix(root)
                .unwrap_or(full)
                .to_string_lossy()
                .into_owned();
        }
    }
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0
        && entry
            .file_name()
            .to_str()
            .is_some_and(|n| n.starts_with('.'))
}

/// Recognized script files under `root`, sorted by path.
fn list_recognized(root: &Path, tech: TechnologyId) -> Result<Vec<PathBuf>> {
    if !root.exists() {
        return Err(Error::NotFound(root.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).into_iter().filter_entry(|e| !is_hidden(e)) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if entry.file_type().is_file() && tech.recognizes(entry.path()) {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

/// Lists the scripts of `tech` under `root` in lexicographic path order and tags
/// each as a loose script or a member of the outermost enclosing module.
pub fn discover(root: &Path, tech: TechnologyId) -> Result<Vec<DiscoveredFile>> {
    let files = list_recognized(root, tech)?;
    Ok(files
        .into_iter()
        .map(|path| {
            let role = module_root_of(root, &path, tech)
                .map(|module_root| FileRole::ModuleMember { module_root })
                .unwrap_or(FileRole::Script);
            DiscoveredFile { path, role }
        })
        .collect())
}

fn module_root_of(root: &Path, file: &Path, tech: TechnologyId) -> Option<PathBuf> {
    let rel = file.strip_prefix(root).ok()?;
    let mut dir = root.to_path_buf();
    let components: Vec<_> = rel.components().collect();
    // Every proper ancestor directory of the file below `root`, outermost first.
    for comp in components.iter().take(components.len().saturating_sub(1)) {
        dir.push(comp);
        if tech.is_module_root(&dir) {
            return Some(dir);
        }
    }
    None
}

/// Parses a single file with the given technology's frontend.
pub fn parse_file(path: &Path, tech: TechnologyId) -> Result<ParseOutcome<UnitBlock>> {
    tech.parser().parse_file(path)
}

pub fn parse_folder(path: &Path, tech: TechnologyId) -> Result<ParseOutcome<Project>> {
    if !path.is_dir() {
        return Err(Error::NotFound(path.to_path_buf()));
    }
    tech.parser().parse_folder(path)
}

pub fn parse_module(path: &Path, tech: TechnologyId) -> Result<ParseOutcome<Module>> {
    if !path.is_dir() {
        return Err(Error::NotFound(path.to_path_buf()));
    }
    tech.parser().parse_module(path)
}

/// Parses in-memory source text, for tests and tooling.
pub fn parse_source(path: &str, source: &str, tech: TechnologyId) -> Result<Parsed, SyntaxError> {
    let text = source::normalize_newlines(source);
    tech.parser().parse_source(path, &text)
}

pub(crate) fn warning(path: &str, line: usize, message: impl fmt::Display) -> String {
    format!("{path}:{line}: {message}")
}

/// Hangs each comment on the innermost nested block whose lines contain it.
pub(crate) fn attach_comments(root: &mut UnitBlock, comments: Vec<Comment>) {
    fn place(block: &mut UnitBlock, comment: Comment) {
        let line = comment.span.start_line;
        match block
            .nested_blocks
            .iter_mut()
            .find(|n| n.span.contains_line(line))
        {
            Some(nested) => place(nested, comment),
            None => block.comments.push(comment),
        }
    }
    for comment in comments {
        place(root, comment);
    }
}
