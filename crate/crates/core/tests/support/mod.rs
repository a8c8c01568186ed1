//! Helpers shared by the integration test targets.

#![allow(dead_code)]

pub mod gen;
pub mod properties;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use iac_smells::config::AnalysisConfig;
use iac_smells::engine::{run_project, DetectorSet, SmellReport};
use iac_smells::parser::{parse_folder, TechnologyId};
use iac_smells::report::emit_csv;
use iac_smells::smell::{SmellCode, SmellFamily};

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("corpus")
}

/// (path relative to the corpus root, line, code).
pub type Label = (String, usize, SmellCode);

pub fn load_labels() -> BTreeSet<Label> {
    let mut reader = csv::Reader::from_path(corpus_root().join("labels.csv")).expect("labels.csv");
    reader
        .records()
        .map(|r| {
            let r = r.expect("label row");
            (
                r[0].to_string(),
                r[1].parse().expect("line number"),
                r[2].parse().expect("smell code"),
            )
        })
        .collect()
}

/// Family and technology folders of the corpus that exist on disk.
pub fn corpus_folders() -> Vec<(SmellFamily, TechnologyId, PathBuf)> {
    let mut out = Vec::new();
    for family in [SmellFamily::Design, SmellFamily::Security] {
        for tech in TechnologyId::ALL {
            let dir = corpus_root().join(family.as_str()).join(tech.as_str());
            if dir.is_dir() {
                out.push((family, tech, dir));
            }
        }
    }
    out
}

/// Report for one corpus folder using `detectors`.
pub fn analyze(dir: &Path, tech: TechnologyId, family: SmellFamily, detectors: &DetectorSet) -> SmellReport {
    let outcome = parse_folder(dir, tech).expect("corpus folder parses");
    assert!(outcome.failed_files.is_empty(), "{:?}", outcome.failed_files);
    let findings = run_project(&outcome.result, detectors, &AnalysisConfig::default());
    SmellReport::new(family, findings, outcome.result.files().count(), Vec::new())
}

/// Every corpus finding as a label, paths relative to the corpus root.
pub fn corpus_findings() -> BTreeSet<Label> {
    let root = corpus_root();
    let mut out = BTreeSet::new();
    for (family, tech, dir) in corpus_folders() {
        let report = analyze(&dir, tech, family, &DetectorSet::for_family(family, tech));
        for s in report.findings {
            let rel = Path::new(&s.span.path)
                .strip_prefix(&root)
                .expect("finding inside corpus")
                .to_string_lossy()
                .replace('\\', "/");
            out.insert((rel, s.line(), s.code));
        }
    }
    out
}

/// CSV for one corpus folder with detectors registered in `order`.
pub fn corpus_csv(dir: &Path, tech: TechnologyId, family: SmellFamily, order: Option<&[usize]>) -> String {
    let mut detectors = DetectorSet::for_family(family, tech);
    if let Some(order) = order {
        detectors.permute(order);
    }
    emit_csv(&analyze(dir, tech, family, &detectors))
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_iac-smells")
}

/// Runs the built binary and returns (status, stdout, stderr).
pub fn run_binary(args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// One database setup step written for Puppet and for Chef.
pub const HIVE_PUPPET: &str = "# Hive metastore MySQL database need a (...)
exec { 'hive_mysql_create_database':
  command => \"/usr/bin/mysql (...)\",
  unless => \"/usr/bin/mysql (...)\",
  user => 'root',
}
";

pub const HIVE_CHEF: &str = "# Hive metastore MySQL database need a (...)
execute 'hive_mysql_create_database' do
    command \"/usr/bin/mysql (...)\"
    not_if \"/usr/bin/mysql (...)\"
    user 'root'
end
";

/// A real-world comment line of exactly 140 characters.
pub const UNATTENDED_URL_LINE: &str = "# $unattended_url::               URL hosts will retrieve templates from during build (normally http as many installers don't support https)";
