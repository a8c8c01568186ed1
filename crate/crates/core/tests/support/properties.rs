//! Property suites, each run for a fixed number of generated cases.

use std::collections::{BTreeMap, BTreeSet};

use iac_smells::config::AnalysisConfig;
use iac_smells::engine::{run, DetectorSet, SmellReport};
use iac_smells::ir::{traverse, AtomicUnit, Attribute, UnitBlock, Variable};
use iac_smells::parser::{parse_source, TechnologyId};
use iac_smells::report::{emit_csv, emit_table, TableFormat};
use iac_smells::rules::design::{DuplicateBlock, LongResource, LongStatement, TooManyVariables};
use iac_smells::smell::{SmellCode, SmellFamily};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::gen;

pub const CASES: u32 = 1000;

pub type Property = (&'static str, fn() -> Result<(), String>);

pub const ALL: &[Property] = &[
    ("traversal totality and determinism", traversal),
    ("span soundness", span_soundness),
    ("boundary: long_statement_max", boundary_long_statement),
    ("boundary: long_resource_max_lines", boundary_long_resource),
    ("boundary: too_many_vars_ratio", boundary_too_many_vars),
    ("boundary: duplicate_min_attrs", boundary_duplicate_min_attrs),
    ("duplicate symmetry", duplicate_symmetry),
    ("lexicon monotonicity", lexicon_monotonicity),
    ("stats consistency", stats_consistency),
];

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn parse(tech: TechnologyId, text: &str) -> Result<UnitBlock, TestCaseError> {
    parse_source("gen", text, tech)
        .map(|p| p.block)
        .map_err(|e| TestCaseError::fail(format!("generated {tech} script failed to parse: {e}\n{text}")))
}

fn only(detector: Box<dyn iac_smells::engine::Detector>) -> DetectorSet {
    let mut set = DetectorSet::empty();
    set.register(detector);
    set
}

fn count_attrs(attrs: &[Attribute]) -> usize {
    attrs.iter().map(|a| 1 + count_attrs(&a.nested)).sum()
}

fn count_vars(vars: &[Variable]) -> usize {
    vars.iter().map(|v| 1 + count_vars(&v.nested)).sum()
}

fn count_unit(unit: &AtomicUnit) -> usize {
    1 + count_attrs(&unit.attributes)
}

/// Nodes constructed for `block`, counted from the data structure alone.
fn count_nodes(block: &UnitBlock) -> usize {
    1 + block.atomic_units.iter().map(count_unit).sum::<usize>()
        + count_vars(&block.variables)
        + block.comments.len()
        + count_attrs(&block.attributes)
        + block.nested_blocks.iter().map(count_nodes).sum::<usize>()
}

pub fn traversal() -> Result<(), String> {
    check(gen::script(), |(tech, text)| {
        let block = parse(tech, &text)?;
        let first = traverse(&block);
        let second = traverse(&block);
        prop_assert_eq!(first.len(), count_nodes(&block));
        let ids: BTreeSet<(usize, _)> = first.iter().map(|n| (n.address(), n.kind())).collect();
        prop_assert_eq!(ids.len(), first.len(), "a node was visited twice");
        let a: Vec<_> = first.iter().map(|n| (n.address(), n.kind())).collect();
        let b: Vec<_> = second.iter().map(|n| (n.address(), n.kind())).collect();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn span_soundness() -> Result<(), String> {
    check(gen::script(), |(tech, text)| {
        let block = parse(tech, &text)?;
        let lines: Vec<&str> = text.split('\n').collect();
        for node in traverse(&block) {
            let Some(span) = node.span() else { continue };
            if span.raw_code.is_empty() {
                continue;
            }
            prop_assert!(span.start_line >= 1 && span.start_line <= span.end_line);
            prop_assert!(span.end_line <= lines.len());
            let reread = lines[span.start_line - 1..span.end_line].join("\n");
            prop_assert_eq!(&reread, &span.raw_code, "{:?} {}", node.kind(), node.name());
        }
        Ok(())
    })
}

fn long_statement_count(line_len: usize, cfg: &AnalysisConfig) -> Result<usize, TestCaseError> {
    let text = format!("#{}\n", "é".repeat(line_len.saturating_sub(1)));
    let block = parse(TechnologyId::Puppet, &text)?;
    Ok(run(&block, &only(Box::new(LongStatement)), cfg).len())
}

pub fn boundary_long_statement() -> Result<(), String> {
    check((2usize..400, any::<bool>()), |(t, inclusive)| {
        let cfg = AnalysisConfig {
            long_statement_max: t,
            long_statement_inclusive: inclusive,
            ..AnalysisConfig::default()
        };
        let (below, at) = if inclusive { (t - 1, t) } else { (t, t + 1) };
        prop_assert_eq!(long_statement_count(below, &cfg)?, 0);
        prop_assert_eq!(long_statement_count(at, &cfg)?, 1);
        Ok(())
    })
}

fn resource_of_lines(lines: usize) -> String {
    let mut text = String::from("file { '/x':\n");
    for i in 0..lines - 2 {
        text.push_str(&format!("  a{i:04} => 'v',\n"));
    }
    text.push_str("}\n");
    text
}

pub fn boundary_long_resource() -> Result<(), String> {
    check(2usize..80, |t| {
        let cfg = AnalysisConfig {
            long_resource_max_lines: t,
            ..AnalysisConfig::default()
        };
        let set = only(Box::new(LongResource));
        let at = parse(TechnologyId::Puppet, &resource_of_lines(t))?;
        let above = parse(TechnologyId::Puppet, &resource_of_lines(t + 1))?;
        prop_assert_eq!(run(&at, &set, &cfg).len(), 0);
        prop_assert_eq!(run(&above, &set, &cfg).len(), 1);
        Ok(())
    })
}

fn vars_and_lines(vars: usize, lines: usize) -> String {
    let mut text = String::new();
    for i in 0..vars {
        text.push_str(&format!("$v{i} = {i}\n"));
    }
    for i in vars..lines {
        text.push_str(&format!("# line {i}\n"));
    }
    text
}

pub fn boundary_too_many_vars() -> Result<(), String> {
    check((1usize..80, 1usize..100), |(lines, percent)| {
        let cfg = AnalysisConfig {
            too_many_vars_ratio: percent as f64 / 100.0,
            ..AnalysisConfig::default()
        };
        // Largest count with vars / lines <= ratio, in exact integer arithmetic.
        let at = percent * lines / 100;
        let set = only(Box::new(TooManyVariables));
        let quiet = parse(TechnologyId::Puppet, &vars_and_lines(at, lines))?;
        let loud = parse(TechnologyId::Puppet, &vars_and_lines(at + 1, lines))?;
        prop_assert_eq!(run(&quiet, &set, &cfg).len(), 0);
        prop_assert_eq!(run(&loud, &set, &cfg).len(), 1);
        Ok(())
    })
}

fn twin_resources(attrs: usize) -> String {
    let mut text = String::new();
    for title in ["a", "b"] {
        text.push_str(&format!("file {{ '{title}':\n"));
        for i in 0..attrs {
            text.push_str(&format!("  a{i:02} => 'v',\n"));
        }
        text.push_str("}\n");
    }
    text
}

/// One duplicate group appears at the threshold; a group reports both members.
pub fn boundary_duplicate_min_attrs() -> Result<(), String> {
    check(1usize..40, |t| {
        let cfg = AnalysisConfig {
            duplicate_min_attrs: t,
            ..AnalysisConfig::default()
        };
        let set = only(Box::new(DuplicateBlock));
        let below = parse(TechnologyId::Puppet, &twin_resources(t - 1))?;
        let at = parse(TechnologyId::Puppet, &twin_resources(t))?;
        prop_assert_eq!(run(&below, &set, &cfg).len(), 0);
        prop_assert_eq!(run(&at, &set, &cfg).len(), 2);
        Ok(())
    })
}

fn flagged_titles(text: &str) -> Result<BTreeSet<String>, TestCaseError> {
    let block = parse(TechnologyId::Puppet, text)?;
    let by_line: BTreeMap<usize, String> = block
        .all_atomic_units()
        .into_iter()
        .map(|u| (u.span.start_line, u.name.clone()))
        .collect();
    Ok(run(&block, &only(Box::new(DuplicateBlock)), &AnalysisConfig::default())
        .iter()
        .map(|s| by_line[&s.line()].clone())
        .collect())
}

pub fn duplicate_symmetry() -> Result<(), String> {
    check(gen::duplicate_prone_resources(), |resources| {
        let min = AnalysisConfig::default().duplicate_min_attrs;
        let mut groups: BTreeMap<_, Vec<String>> = BTreeMap::new();
        for (i, (kind, attrs)) in resources.iter().enumerate() {
            if attrs.len() >= min {
                let mut key = attrs.clone();
                key.sort();
                groups.entry((kind.clone(), key)).or_default().push(format!("r{i}"));
            }
        }
        let expected: BTreeSet<String> = groups.into_values().filter(|g| g.len() > 1).flatten().collect();

        let titles: Vec<usize> = (0..resources.len()).collect();
        let forward = flagged_titles(&gen::render_resources(&resources, &titles))?;
        let mut reversed = resources.clone();
        reversed.reverse();
        let rev_titles: Vec<usize> = titles.iter().rev().copied().collect();
        let backward = flagged_titles(&gen::render_resources(&reversed, &rev_titles))?;
        prop_assert_eq!(&forward, &expected);
        prop_assert_eq!(&backward, &expected);
        Ok(())
    })
}

const LEXICONS: &[&str] = &[
    "suspicious_comment_words",
    "secret_key_patterns",
    "password_patterns",
    "user_patterns",
    "weak_crypto_terms",
    "insecure_url_scheme",
    "invalid_bind_addresses",
    "download_commands",
    "default_admin_names",
    "checksum_markers",
];

const EXTRA_WORDS: &[&str] = &["x", "bind", "good", "owner", "https", "sha256", "verify", "a", "r0", "hunter2", "o"];

fn security_findings(block: &UnitBlock, cfg: &AnalysisConfig) -> BTreeSet<(usize, SmellCode)> {
    let set = DetectorSet::for_family(SmellFamily::Security, TechnologyId::Puppet);
    run(block, &set, cfg).iter().map(|s| (s.line(), s.code)).collect()
}

fn current_words(cfg: &AnalysisConfig, key: &str) -> Vec<String> {
    match key {
        "suspicious_comment_words" => cfg.suspicious_comment_words.clone(),
        "secret_key_patterns" => cfg.secret_key_patterns.clone(),
        "password_patterns" => cfg.password_patterns.clone(),
        "user_patterns" => cfg.user_patterns.clone(),
        "weak_crypto_terms" => cfg.weak_crypto_terms.clone(),
        "insecure_url_scheme" => cfg.insecure_url_scheme.clone(),
        "invalid_bind_addresses" => cfg.invalid_bind_addresses.clone(),
        "download_commands" => cfg.download_commands.clone(),
        "default_admin_names" => cfg.default_admin_names.clone(),
        "checksum_markers" => cfg.checksum_markers.clone(),
        other => panic!("not a lexicon: {other}"),
    }
}

/// Adding a word never removes a smell. Checksum markers suppress findings,
/// so for that list the inclusion runs the other way.
pub fn lexicon_monotonicity() -> Result<(), String> {
    let strategy = (
        gen::security_script(),
        prop::sample::select(LEXICONS.to_vec()),
        prop::sample::select(EXTRA_WORDS.to_vec()),
    );
    check(strategy, |(text, key, word)| {
        let block = parse(TechnologyId::Puppet, &text)?;
        let base = AnalysisConfig::default();
        let mut grown = base.clone();
        let mut words = current_words(&base, key);
        words.push(word.to_string());
        grown.set(key, &words.join(",")).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let before = security_findings(&block, &base);
        let after = security_findings(&block, &grown);
        if key == "checksum_markers" {
            prop_assert!(after.is_subset(&before), "{key} += {word}\n{text}");
        } else {
            prop_assert!(before.is_subset(&after), "{key} += {word}\n{text}");
        }
        Ok(())
    })
}

/// (count, files) per code as printed in the pretty table.
pub fn table_counts(table: &str) -> BTreeMap<String, (usize, usize)> {
    table
        .lines()
        .filter_map(|l| {
            let cells: Vec<&str> = l.split('|').map(str::trim).filter(|c| !c.is_empty()).collect();
            match cells.as_slice() {
                [_, code, count, files] => Some((code.to_string(), (count.parse().ok()?, files.parse().ok()?))),
                _ => None,
            }
        })
        .collect()
}

/// (count, files) per code recomputed from CSV rows.
pub fn csv_counts(csv_text: &str) -> BTreeMap<String, (usize, usize)> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut rows: BTreeMap<String, (usize, BTreeSet<String>)> = BTreeMap::new();
    for r in reader.records() {
        let r = r.expect("valid csv");
        let entry = rows.entry(r[2].to_string()).or_default();
        entry.0 += 1;
        entry.1.insert(r[0].to_string());
    }
    rows.into_iter().map(|(c, (n, f))| (c, (n, f.len()))).collect()
}

pub fn stats_consistency() -> Result<(), String> {
    let strategy = (
        prop::collection::vec(gen::script(), 1..4),
        prop::sample::select(vec![SmellFamily::Design, SmellFamily::Security]),
    );
    check(strategy, |(scripts, family)| {
        let cfg = AnalysisConfig::default();
        let mut findings = Vec::new();
        for (i, (tech, text)) in scripts.iter().enumerate() {
            let block = parse_source(&format!("f{i}"), text, *tech)
                .map_err(|e| TestCaseError::fail(e.to_string()))?
                .block;
            findings.extend(run(&block, &DetectorSet::for_family(family, *tech), &cfg));
        }
        let findings = iac_smells::engine::normalize(findings);
        let report = SmellReport::new(family, findings, scripts.len(), Vec::new());
        let table = table_counts(&emit_table(&report, TableFormat::PrettyTable));
        let csv = csv_counts(&emit_csv(&report));
        prop_assert_eq!(table.len(), 9);
        for (code, counts) in &table {
            let from_csv = csv.get(code).copied().unwrap_or((0, 0));
            prop_assert_eq!(*counts, from_csv, "{}", code);
        }
        prop_assert!(csv.keys().all(|c| table.contains_key(c)));
        Ok(())
    })
}

