//! Detector contract and the traversal that applies detectors to an IR tree.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::config::AnalysisConfig;
use crate::ir::{
    traverse, AtomicUnit, Attribute, Comment, Module, Node, Project, UnitBlock, Variable,
};
use crate::parser::TechnologyId;
use crate::rules;
use crate::smell::{Smell, SmellCode, SmellFamily};

/// A smell detector. Each method inspects one node and never recurses; the
/// engine hands every node of the tree to every detector.
pub trait Detector: Send + Sync {
    fn code(&self) -> SmellCode;

    /// Configuration keys this detector reads.
    fn config_keys(&self) -> &'static [&'static str] {
        &[]
    }

    fn check_project(&self, _node: &Project, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_module(&self, _node: &Module, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_unit_block(&self, _node: &UnitBlock, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_atomic_unit(&self, _node: &AtomicUnit, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_attribute(&self, _node: &Attribute, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_variable(&self, _node: &Variable, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }

    fn check_comment(&self, _node: &Comment, _cfg: &AnalysisConfig) -> Vec<Smell> {
        Vec::new()
    }
}

/// Smells `detector` finds on `node` alone.
pub fn visit(detector: &dyn Detector, node: Node<'_>, cfg: &AnalysisConfig) -> Vec<Smell> {
    match node {
        Node::Project(n) => detector.check_project(n, cfg),
        Node::Module(n) => detector.check_module(n, cfg),
        Node::UnitBlock(n) => detector.check_unit_block(n, cfg),
        Node::AtomicUnit(n) => detector.check_atomic_unit(n, cfg),
        Node::Attribute(n) => detector.check_attribute(n, cfg),
        Node::Variable(n) => detector.check_variable(n, cfg),
        Node::Comment(n) => detector.check_comment(n, cfg),
    }
}

/// Ordered detectors with unique codes.
pub struct DetectorSet {
    detectors: Vec<Box<dyn Detector>>,
}

impl DetectorSet {
    pub fn empty() -> Self {
        DetectorSet {
            detectors: Vec::new(),
        }
    }

    /// Adds a detector. Returns false, leaving the set unchanged, if its code is taken.
    pub fn register(&mut self, detector: Box<dyn Detector>) -> bool {
        if self.detectors.iter().any(|d| d.code() == detector.code()) {
            return false;
        }
        self.detectors.push(detector);
        true
    }

    /// The nine detectors of `family`, specialized for `tech`.
    pub fn for_family(family: SmellFamily, tech: TechnologyId) -> Self {
        let detectors = match family {
            SmellFamily::Design => rules::design::detectors(tech),
            SmellFamily::Security => rules::security::detectors(tech),
        };
        let mut set = DetectorSet::empty();
        for d in detectors {
            set.register(d);
        }
        set
    }

    /// All eighteen detectors specialized for `tech`.
    pub fn all(tech: TechnologyId) -> Self {
        let mut set = Self::for_family(SmellFamily::Design, tech);
        for d in rules::security::detectors(tech) {
            set.register(d);
        }
        set
    }

    pub fn codes(&self) -> Vec<SmellCode> {
        self.detectors.iter().map(|d| d.code()).collect()
    }

    pub fn len(&self) -> usize {
        self.detectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Detector> {
        self.detectors.iter().map(|d| d.as_ref())
    }

    /// Reorders detectors; `order[i]` is the old index of the new i-th detector.
    pub fn permute(&mut self, order: &[usize]) {
        assert_eq!(order.len(), self.detectors.len());
        let mut old: Vec<Option<Box<dyn Detector>>> = self.detectors.drain(..).map(Some).collect();
        self.detectors = order
            .iter()
            .map(|&i| old[i].take().expect("permutation repeats an index"))
            .collect();
    }
}

fn sort_key(s: &Smell) -> (&str, usize, &str, usize, &str, &str) {
    (
        &s.span.path,
        s.span.start_line,
        s.code.code(),
        s.span.end_line,
        &s.span.raw_code,
        &s.detail,
    )
}

/// Sorts by (path, line, code) with remaining fields as tie breakers, and
/// collapses findings with the same code and span.
pub fn normalize(mut smells: Vec<Smell>) -> Vec<Smell> {
    smells.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    smells.dedup_by(|b, a| a.code == b.code && a.span == b.span);
    smells
}

/// Applies every detector to every node reachable from `root`.
pub fn run<'a>(root: impl Into<Node<'a>>, detectors: &DetectorSet, cfg: &AnalysisConfig) -> Vec<Smell> {
    let mut out = Vec::new();
    for node in traverse(root) {
        for d in detectors.iter() {
            out.extend(visit(d, node, cfg));
        }
    }
    normalize(out)
}

/// Runs each file of `project` independently and in parallel. Project and
/// module nodes are visited too.
pub fn run_project(project: &Project, detectors: &DetectorSet, cfg: &AnalysisConfig) -> Vec<Smell> {
    let mut out: Vec<Smell> = project
        .files()
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|ub| run(*ub, detectors, cfg))
        .collect();
    for d in detectors.iter() {
        out.extend(visit(d, Node::Project(project), cfg));
        for m in &project.modules {
            out.extend(visit(d, Node::Module(m), cfg));
        }
    }
    normalize(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub per_code: BTreeMap<SmellCode, usize>,
    /// Distinct files with at least one finding, per code.
    pub files_per_code: BTreeMap<SmellCode, usize>,
    pub per_file: BTreeMap<String, usize>,
    pub files_analyzed: usize,
    pub files_failed: usize,
}

impl Stats {
    pub fn compute(findings: &[Smell], files_analyzed: usize, files_failed: usize) -> Self {
        let mut per_code: BTreeMap<SmellCode, usize> = BTreeMap::new();
        let mut files: BTreeMap<SmellCode, BTreeSet<&str>> = BTreeMap::new();
        let mut per_file: BTreeMap<String, usize> = BTreeMap::new();
        for s in findings {
            *per_code.entry(s.code).or_default() += 1;
            files.entry(s.code).or_default().insert(&s.span.path);
            *per_file.entry(s.span.path.clone()).or_default() += 1;
        }
        Stats {
            per_code,
            files_per_code: files.into_iter().map(|(c, f)| (c, f.len())).collect(),
            per_file,
            files_analyzed,
            files_failed,
        }
    }

    pub fn count(&self, code: SmellCode) -> usize {
        self.per_code.get(&code).copied().unwrap_or(0)
    }

    pub fn files(&self, code: SmellCode) -> usize {
        self.files_per_code.get(&code).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmellReport {
    pub family: SmellFamily,
    pub findings: Vec<Smell>,
    pub stats: Stats,
    pub failed_files: Vec<String>,
}

impl SmellReport {
    pub fn new(family: SmellFamily, findings: Vec<Smell>, files_analyzed: usize, failed_files: Vec<String>) -> Self {
        let stats = Stats::compute(&findings, files_analyzed, failed_files.len());
        SmellReport {
            family,
            findings,
            stats,
            failed_files,
        }
    }
}
