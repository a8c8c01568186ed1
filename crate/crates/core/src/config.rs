//! Analysis configuration: thresholds, keyword lists and per-technology
//! attribute orderings. User files are INI documents with a single
//! `[smells]` section; every key is optional and overrides a built-in default.

use std::path::Path;

use ini::Ini;

use crate::error::ConfigError;
use crate::parser::TechnologyId;

pub const SECTION: &str = "smells";

/// The configuration file shipped with the crate. Equal to [`AnalysisConfig::default`].
pub const DEFAULT_INI: &str = include_str!("../config/default.ini");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    PositiveInt,
    Flag,
    Ratio,
    /// Comma-separated list that must not be empty.
    Words,
    /// Comma-separated list that may be empty.
    OptionalWords,
}

pub struct KeySpec {
    pub name: &'static str,
    pub kind: KeyKind,
}

const fn key(name: &'static str, kind: KeyKind) -> KeySpec {
    KeySpec { name, kind }
}

/// Every recognized key.
pub const KEYS: &[KeySpec] = &[
    key("long_statement_max", KeyKind::PositiveInt),
    key("long_statement_inclusive", KeyKind::Flag),
    key("long_resource_max_lines", KeyKind::PositiveInt),
    key("too_many_vars_ratio", KeyKind::Ratio),
    key("duplicate_min_attrs", KeyKind::PositiveInt),
    key("alignment_gap", KeyKind::PositiveInt),
    key("misplaced_order_ansible", KeyKind::OptionalWords),
    key("misplaced_order_chef", KeyKind::OptionalWords),
    key("misplaced_order_docker", KeyKind::OptionalWords),
    key("misplaced_order_puppet", KeyKind::OptionalWords),
    key("misplaced_order_terraform", KeyKind::OptionalWords),
    key("unguarded_variable_techs", KeyKind::OptionalWords),
    key("suspicious_comment_words", KeyKind::Words),
    key("secret_key_patterns", KeyKind::Words),
    key("password_patterns", KeyKind::Words),
    key("user_patterns", KeyKind::Words),
    key("weak_crypto_terms", KeyKind::Words),
    key("insecure_url_scheme", KeyKind::Words),
    key("invalid_bind_addresses", KeyKind::Words),
    key("download_commands", KeyKind::Words),
    key("checksum_markers", KeyKind::Words),
    key("default_admin_names", KeyKind::Words),
];

pub fn key_spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub long_statement_max: usize,
    pub long_statement_inclusive: bool,
    pub long_resource_max_lines: usize,
    pub too_many_vars_ratio: f64,
    pub duplicate_min_attrs: usize,
    pub alignment_gap: usize,
    pub misplaced_order_ansible: Vec<String>,
    pub misplaced_order_chef: Vec<String>,
    pub misplaced_order_docker: Vec<String>,
    pub misplaced_order_puppet: Vec<String>,
    pub misplaced_order_terraform: Vec<String>,
    pub unguarded_variable_techs: Vec<String>,
    pub suspicious_comment_words: Vec<String>,
    pub secret_key_patterns: Vec<String>,
    pub password_patterns: Vec<String>,
    pub user_patterns: Vec<String>,
    pub weak_crypto_terms: Vec<String>,
    pub insecure_url_scheme: Vec<String>,
    pub invalid_bind_addresses: Vec<String>,
    pub download_commands: Vec<String>,
    pub checksum_markers: Vec<String>,
    pub default_admin_names: Vec<String>,
}

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            long_statement_max: 140,
            long_statement_inclusive: false,
            long_resource_max_lines: 12,
            too_many_vars_ratio: 0.3,
            duplicate_min_attrs: 2,
            alignment_gap: 1,
            misplaced_order_ansible: Vec::new(),
            misplaced_order_chef: Vec::new(),
            misplaced_order_docker: Vec::new(),
            misplaced_order_puppet: words(&["ensure"]),
            misplaced_order_terraform: Vec::new(),
            unguarded_variable_techs: words(&["puppet"]),
            suspicious_comment_words: words(&["todo", "fixme", "hack", "bug", "later", "ticket"]),
            secret_key_patterns: words(&["pass", "pwd", "secret", "key", "token", "user"]),
            password_patterns: words(&["pass", "pwd"]),
            user_patterns: words(&["user", "role"]),
            weak_crypto_terms: words(&["md5", "sha1", "arcfour"]),
            insecure_url_scheme: words(&["http"]),
            invalid_bind_addresses: words(&["0.0.0.0", "::"]),
            download_commands: words(&["wget", "curl"]),
            checksum_markers: words(&["checksum", "gpg", "sha256", "hash"]),
            default_admin_names: words(&["admin", "root"]),
        }
    }
}

impl AnalysisConfig {
    pub fn misplaced_order(&self, tech: TechnologyId) -> &[String] {
        match tech {
            TechnologyId::Ansible => &self.misplaced_order_ansible,
            TechnologyId::Chef => &self.misplaced_order_chef,
            TechnologyId::Docker => &self.misplaced_order_docker,
            TechnologyId::Puppet => &self.misplaced_order_puppet,
            TechnologyId::Terraform => &self.misplaced_order_terraform,
        }
    }

    pub fn unguarded_variable_enabled(&self, tech: TechnologyId) -> bool {
        self.unguarded_variable_techs.iter().any(|t| t == tech.as_str())
    }

    fn list_mut(&mut self, name: &str) -> Option<&mut Vec<String>> {
        Some(match name {
            "misplaced_order_ansible" => &mut self.misplaced_order_ansible,
            "misplaced_order_chef" => &mut self.misplaced_order_chef,
            "misplaced_order_docker" => &mut self.misplaced_order_docker,
            "misplaced_order_puppet" => &mut self.misplaced_order_puppet,
            "misplaced_order_terraform" => &mut self.misplaced_order_terraform,
            "unguarded_variable_techs" => &mut self.unguarded_variable_techs,
            "suspicious_comment_words" => &mut self.suspicious_comment_words,
            "secret_key_patterns" => &mut self.secret_key_patterns,
            "password_patterns" => &mut self.password_patterns,
            "user_patterns" => &mut self.user_patterns,
            "weak_crypto_terms" => &mut self.weak_crypto_terms,
            "insecure_url_scheme" => &mut self.insecure_url_scheme,
            "invalid_bind_addresses" => &mut self.invalid_bind_addresses,
            "download_commands" => &mut self.download_commands,
            "checksum_markers" => &mut self.checksum_markers,
            "default_admin_names" => &mut self.default_admin_names,
            _ => return None,
        })
    }

    /// Sets one key from its textual form, validating the value.
    pub fn set(&mut self, name: &str, raw: &str) -> Result<(), ConfigError> {
        let spec = key_spec(name).ok_or_else(|| ConfigError::UnknownKey(name.to_string()))?;
        let invalid = |message: String| ConfigError::InvalidValue {
            key: name.to_string(),
            message,
        };
        let raw = raw.trim();
        match spec.kind {
            KeyKind::PositiveInt => {
                let n: usize = raw
                    .parse()
                    .map_err(|_| invalid(format!("expected a positive integer, got `{raw}`")))?;
                if n == 0 {
                    return Err(invalid("must be at least 1".into()));
                }
                match name {
                    "long_statement_max" => self.long_statement_max = n,
                    "long_resource_max_lines" => self.long_resource_max_lines = n,
                    "duplicate_min_attrs" => self.duplicate_min_attrs = n,
                    "alignment_gap" => self.alignment_gap = n,
                    _ => unreachable!("integer key without a field: {name}"),
                }
            }
            KeyKind::Flag => {
                self.long_statement_inclusive = match raw.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "on" | "1" => true,
                    "false" | "no" | "off" | "0" => false,
                    _ => return Err(invalid(format!("expected true or false, got `{raw}`"))),
                };
            }
            KeyKind::Ratio => {
                let r: f64 = raw
                    .parse()
                    .map_err(|_| invalid(format!("expected a number, got `{raw}`")))?;
                if !(r > 0.0 && r <= 1.0) {
                    return Err(invalid(format!("must be in (0, 1], got {raw}")));
                }
                self.too_many_vars_ratio = r;
            }
            KeyKind::Words | KeyKind::OptionalWords => {
                let items: Vec<String> = raw
                    .split(',')
                    .map(|w| w.trim().to_lowercase())
                    .filter(|w| !w.is_empty())
                    .collect();
                if spec.kind == KeyKind::Words && items.is_empty() {
                    return Err(invalid("list must not be empty".into()));
                }
                if name == "unguarded_variable_techs" {
                    if let Some(bad) = items.iter().find(|t| t.parse::<TechnologyId>().is_err()) {
                        return Err(invalid(format!("unknown technology `{bad}`")));
                    }
                }
                *self.list_mut(name).expect("list key without a field") = items;
            }
        }
        Ok(())
    }

    /// Overlays the keys of an INI document onto `self`.
    pub fn merge_ini(&mut self, text: &str) -> Result<(), ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        for (section, props) in ini.iter() {
            for (name, value) in props.iter() {
                if key_spec(name).is_none() {
                    return Err(ConfigError::UnknownKey(name.to_string()));
                }
                if section != Some(SECTION) {
                    return Err(ConfigError::WrongSection {
                        key: name.to_string(),
                        section: section.unwrap_or("").to_string(),
                    });
                }
                self.set(name, value)?;
            }
        }
        Ok(())
    }
}

/// Built-in defaults, overlaid with the file at `path` when one is given.
pub fn load_config(path: Option<&Path>) -> Result<AnalysisConfig, ConfigError> {
    let mut config = AnalysisConfig::default();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.merge_ini(&text)?;
    }
    Ok(config)
}
