//! Security smells. Keyword rules over names and values; every word list is
//! a configuration key.

use super::design::command_attributes;
use super::{has_word, name_matches, strings, tokens};
use crate::config::AnalysisConfig;
use crate::engine::Detector;
use crate::ir::{AtomicUnit, Attribute, Comment, StringStyle, UnitBlock, Value, Variable};
use crate::parser::TechnologyId;
use crate::smell::{Smell, SmellCode};
use crate::source::SourceSpan;

pub fn detectors(tech: TechnologyId) -> Vec<Box<dyn Detector>> {
    vec![
        Box::new(AdminByDefault),
        Box::new(EmptyPassword),
        Box::new(HardcodedSecret),
        Box::new(InvalidIpBinding),
        Box::new(MissingDefault),
        Box::new(NoIntegrityCheck::for_tech(tech)),
        Box::new(SuspiciousComment),
        Box::new(HttpWithoutTls),
        Box::new(WeakCrypto),
    ]
}

/// A value-based rule, applied alike to attributes and variables.
trait ValueRule {
    fn code(&self) -> SmellCode;
    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String>;

    fn check(&self, name: &str, value: &Value, span: &SourceSpan, cfg: &AnalysisConfig) -> Vec<Smell> {
        self.matches(name, value, cfg)
            .map(|detail| vec![Smell::new(self.code(), span.clone(), detail)])
            .unwrap_or_default()
    }
}

macro_rules! value_detector {
    ($ty:ident, $code:expr, $keys:expr) => {
        impl Detector for $ty {
            fn code(&self) -> SmellCode {
                $code
            }

            fn config_keys(&self) -> &'static [&'static str] {
                $keys
            }

            fn check_attribute(&self, node: &Attribute, cfg: &AnalysisConfig) -> Vec<Smell> {
                ValueRule::check(self, &node.name, &node.value, &node.span, cfg)
            }

            fn check_variable(&self, node: &Variable, cfg: &AnalysisConfig) -> Vec<Smell> {
                ValueRule::check(self, &node.name, &node.value, &node.span, cfg)
            }
        }
    };
}

fn literal(value: &Value) -> Option<&str> {
    match value {
        Value::Str(s) if s.style.is_literal() && !s.is_interpolated() => Some(&s.text),
        _ => None,
    }
}

pub struct EmptyPassword;

impl ValueRule for EmptyPassword {
    fn code(&self) -> SmellCode {
        SmellCode::EmptyPassword
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        let empty = matches!(value, Value::Str(s) if s.style.is_literal() && s.text.is_empty());
        (empty && name_matches(name, &cfg.password_patterns)).then(|| format!("{name} is empty"))
    }
}

value_detector!(EmptyPassword, SmellCode::EmptyPassword, &["password_patterns"]);

/// A non-empty literal under a secret-looking name. Numbers count as literals;
/// any interpolation marker shields the value.
pub struct HardcodedSecret;

impl ValueRule for HardcodedSecret {
    fn code(&self) -> SmellCode {
        SmellCode::HardcodedSecret
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        let hardcoded = match value {
            Value::Int(_) | Value::Float(_) => true,
            _ => literal(value).is_some_and(|t| !t.is_empty()),
        };
        (hardcoded && name_matches(name, &cfg.secret_key_patterns)).then(|| format!("{name} is hard-coded"))
    }
}

value_detector!(HardcodedSecret, SmellCode::HardcodedSecret, &["secret_key_patterns"]);

pub struct AdminByDefault;

impl ValueRule for AdminByDefault {
    fn code(&self) -> SmellCode {
        SmellCode::AdminByDefault
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        let text = literal(value)?.trim().to_lowercase();
        (cfg.default_admin_names.contains(&text) && name_matches(name, &cfg.user_patterns))
            .then(|| format!("{name} defaults to {text}"))
    }
}

value_detector!(AdminByDefault, SmellCode::AdminByDefault, &["user_patterns", "default_admin_names"]);

/// The whole value, or its address part before a `:port` suffix, is a wildcard address.
pub fn is_invalid_binding(text: &str, addresses: &[String]) -> bool {
    let text = text.trim().to_lowercase();
    if addresses.contains(&text) {
        return true;
    }
    match text.rsplit_once(':') {
        Some((addr, port)) if !port.is_empty() && port.bytes().all(|b| b.is_ascii_digit()) => {
            let addr = addr.trim_start_matches('[').trim_end_matches(']');
            addresses.iter().any(|a| a == addr)
        }
        _ => false,
    }
}

pub struct InvalidIpBinding;

impl ValueRule for InvalidIpBinding {
    fn code(&self) -> SmellCode {
        SmellCode::InvalidIpBinding
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        strings(value)
            .into_iter()
            .find(|s| is_invalid_binding(&s.text, &cfg.invalid_bind_addresses))
            .map(|s| format!("{name} binds to {}", s.text.trim()))
    }
}

value_detector!(InvalidIpBinding, SmellCode::InvalidIpBinding, &["invalid_bind_addresses"]);

/// A URL with one of the insecure schemes, e.g. `http://`.
pub fn insecure_url(text: &str, schemes: &[String]) -> Option<String> {
    let lower = text.to_lowercase();
    schemes
        .iter()
        .map(|s| format!("{s}://"))
        .find(|prefix| {
            lower.match_indices(prefix.as_str()).any(|(i, _)| {
                !lower[..i].chars().next_back().is_some_and(|c| c.is_ascii_alphanumeric())
            })
        })
}

pub struct HttpWithoutTls;

impl ValueRule for HttpWithoutTls {
    fn code(&self) -> SmellCode {
        SmellCode::HttpWithoutTls
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        strings(value)
            .into_iter()
            .find_map(|s| insecure_url(&s.text, &cfg.insecure_url_scheme))
            .map(|scheme| format!("{name} uses {scheme}"))
    }
}

value_detector!(HttpWithoutTls, SmellCode::HttpWithoutTls, &["insecure_url_scheme"]);

pub struct WeakCrypto;

impl ValueRule for WeakCrypto {
    fn code(&self) -> SmellCode {
        SmellCode::WeakCrypto
    }

    fn matches(&self, name: &str, value: &Value, cfg: &AnalysisConfig) -> Option<String> {
        let terms = &cfg.weak_crypto_terms;
        let found = tokens(name)
            .chain(strings(value).into_iter().flat_map(|s| tokens(&s.text)))
            .find(|t| terms.contains(t))?;
        Some(format!("{name} uses {found}"))
    }
}

value_detector!(WeakCrypto, SmellCode::WeakCrypto, &["weak_crypto_terms"]);

pub struct SuspiciousComment;

impl Detector for SuspiciousComment {
    fn code(&self) -> SmellCode {
        SmellCode::SuspiciousComment
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["suspicious_comment_words"]
    }

    fn check_comment(&self, node: &Comment, cfg: &AnalysisConfig) -> Vec<Smell> {
        if has_word(&node.text, &cfg.suspicious_comment_words) {
            vec![Smell::new(self.code(), node.span.clone(), "suspicious word in comment")]
        } else {
            Vec::new()
        }
    }
}

/// Case blocks without a default branch, and selectors without a `default` key.
pub struct MissingDefault;

fn selector_lacks_default(value: &Value) -> bool {
    strings(value)
        .into_iter()
        .any(|s| s.style == StringStyle::Selector && !tokens(&s.text).any(|t| t == "default"))
}

impl MissingDefault {
    fn check_value(&self, value: &Value, span: &SourceSpan) -> Vec<Smell> {
        if selector_lacks_default(value) {
            vec![Smell::new(self.code(), span.clone(), "selector without default")]
        } else {
            Vec::new()
        }
    }
}

impl Detector for MissingDefault {
    fn code(&self) -> SmellCode {
        SmellCode::MissingDefault
    }

    fn check_unit_block(&self, node: &UnitBlock, _cfg: &AnalysisConfig) -> Vec<Smell> {
        if node.default_branch == Some(false) {
            let span = super::line_span(&node.span, node.span.start_line);
            vec![Smell::new(self.code(), span, "case without default")]
        } else {
            Vec::new()
        }
    }

    fn check_attribute(&self, node: &Attribute, _cfg: &AnalysisConfig) -> Vec<Smell> {
        self.check_value(&node.value, &node.span)
    }

    fn check_variable(&self, node: &Variable, _cfg: &AnalysisConfig) -> Vec<Smell> {
        self.check_value(&node.value, &node.span)
    }
}

/// Resource types whose title is the command when no command attribute is given.
const TITLE_COMMAND_TYPES: &[&str] = &["exec", "execute", "bash", "script"];

/// Downloads without a checksum anywhere in the same atomic unit.
pub struct NoIntegrityCheck {
    attributes: &'static [&'static str],
}

impl NoIntegrityCheck {
    pub fn for_tech(tech: TechnologyId) -> Self {
        NoIntegrityCheck {
            attributes: command_attributes(tech),
        }
    }

    fn downloads(&self, unit: &AtomicUnit, cfg: &AnalysisConfig) -> bool {
        let commands = &cfg.download_commands;
        let base = unit.unit_type.rsplit(['.', ':']).next().unwrap_or("").to_lowercase();
        if commands.contains(&base) {
            return true;
        }
        let mut texts: Vec<&str> = unit
            .attributes
            .iter()
            .filter(|a| self.attributes.contains(&a.name.as_str()))
            .flat_map(|a| strings(&a.value))
            .map(|s| s.text.as_str())
            .collect();
        if texts.is_empty() && TITLE_COMMAND_TYPES.contains(&unit.unit_type.as_str()) {
            texts.push(&unit.name);
        }
        texts.into_iter().any(|t| has_word(t, commands))
    }
}

fn mentions_marker(attrs: &[Attribute], markers: &[String]) -> bool {
    attrs.iter().any(|a| {
        let name = a.name.to_lowercase();
        let value = a.value.text().to_lowercase();
        markers.iter().any(|m| name.contains(m.as_str()) || value.contains(m.as_str()))
            || mentions_marker(&a.nested, markers)
    })
}

impl Detector for NoIntegrityCheck {
    fn code(&self) -> SmellCode {
        SmellCode::NoIntegrityCheck
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["download_commands", "checksum_markers"]
    }

    fn check_atomic_unit(&self, node: &AtomicUnit, cfg: &AnalysisConfig) -> Vec<Smell> {
        if !self.downloads(node, cfg) {
            return Vec::new();
        }
        let title = node.name.to_lowercase();
        let markers = &cfg.checksum_markers;
        if mentions_marker(&node.attributes, markers) || markers.iter().any(|m| title.contains(m.as_str())) {
            return Vec::new();
        }
        let span = super::line_span(&node.span, node.span.start_line);
        vec![Smell::new(self.code(), span, "download without checksum")]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, DetectorSet};
    use crate::parser::parse_source;
    use crate::smell::SmellFamily;

    fn found(tech: TechnologyId, src: &str) -> Vec<(usize, SmellCode)> {
        let ub = parse_source("t", src, tech).unwrap().block;
        run(&ub, &DetectorSet::for_family(SmellFamily::Security, tech), &AnalysisConfig::default())
            .into_iter()
            .map(|s| (s.line(), s.code))
            .collect()
    }

    fn codes(tech: TechnologyId, src: &str) -> Vec<SmellCode> {
        found(tech, src).into_iter().map(|(_, c)| c).collect()
    }

    fn puppet_attr(attr: &str) -> Vec<SmellCode> {
        codes(TechnologyId::Puppet, &format!("thing {{ 'x':\n  {attr},\n}}\n"))
    }

    #[test]
    fn comment_words() {
        assert_eq!(codes(TechnologyId::Puppet, "# TODO fix auth bypass\n"), vec![SmellCode::SuspiciousComment]);
        assert!(codes(TechnologyId::Puppet, "# installs the package\n").is_empty());
        assert_eq!(codes(TechnologyId::Puppet, "# method todo-list renderer\n"), vec![SmellCode::SuspiciousComment]);
    }

    #[test]
    fn empty_password() {
        assert_eq!(puppet_attr("password => ''"), vec![SmellCode::EmptyPassword]);
    }

    #[test]
    fn root_user_is_admin_and_hardcoded() {
        assert_eq!(
            puppet_attr("user => 'root'"),
            vec![SmellCode::AdminByDefault, SmellCode::HardcodedSecret]
        );
    }

    #[test]
    fn interpolation_shields_secrets() {
        assert_eq!(puppet_attr("password => 'hunter2'"), vec![SmellCode::HardcodedSecret]);
        assert!(puppet_attr("password => \"${pw}\"").is_empty());
        assert!(puppet_attr("password => $pw").is_empty());
    }

    #[test]
    fn http_scheme() {
        assert_eq!(puppet_attr("url => 'http://example.com'"), vec![SmellCode::HttpWithoutTls]);
        assert!(puppet_attr("url => 'https://example.com'").is_empty());
    }

    #[test]
    fn bind_addresses() {
        assert!(is_invalid_binding("0.0.0.0", &["0.0.0.0".into()]));
        assert!(is_invalid_binding("0.0.0.0:8080", &["0.0.0.0".into()]));
        assert!(is_invalid_binding("[::]:80", &["::".into()]));
        assert!(!is_invalid_binding("10.0.0.1", &["0.0.0.0".into()]));
        assert_eq!(puppet_attr("bind => '0.0.0.0'"), vec![SmellCode::InvalidIpBinding]);
    }

    #[test]
    fn weak_crypto_in_name_or_value() {
        assert_eq!(puppet_attr("hash => 'md5'"), vec![SmellCode::WeakCrypto]);
        assert_eq!(puppet_attr("sha1_sum => 'x'"), vec![SmellCode::WeakCrypto]);
        assert!(puppet_attr("algo => 'md5sum'").is_empty());
    }

    #[test]
    fn downloads_need_checksums() {
        let bare = "exec { 'get':\n  command => 'wget https://x/pkg.tgz',\n}\n";
        assert_eq!(codes(TechnologyId::Puppet, bare), vec![SmellCode::NoIntegrityCheck]);
        let checked = "exec { 'get':\n  command     => 'wget https://x/pkg.tgz',\n  checksum256 => 'abc',\n}\n";
        assert!(codes(TechnologyId::Puppet, checked).is_empty());
        let docker = "FROM alpine\nRUN curl -o /a https://x/a\n";
        assert_eq!(found(TechnologyId::Docker, docker), vec![(2, SmellCode::NoIntegrityCheck)]);
    }

    #[test]
    fn case_and_selector_defaults() {
        let with = "case $x {\n  'a': { }\n  default: { }\n}\n";
        assert!(codes(TechnologyId::Puppet, with).is_empty());
        let without = "case $x {\n  'a': { }\n}\n";
        assert_eq!(found(TechnologyId::Puppet, without), vec![(1, SmellCode::MissingDefault)]);
        let selector = "$y = $x ? {\n  'a' => 1,\n}\n";
        assert_eq!(codes(TechnologyId::Puppet, selector), vec![SmellCode::MissingDefault]);
    }
}
