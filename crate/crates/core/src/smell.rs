use std::fmt;
use std::str::FromStr;

use crate::source::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SmellFamily {
    Design,
    Security,
}

impl SmellFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            SmellFamily::Design => "design",
            SmellFamily::Security => "security",
        }
    }
}

impl FromStr for SmellFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "design" => Ok(SmellFamily::Design),
            "security" => Ok(SmellFamily::Security),
            _ => Err(format!("unknown smell family `{s}`")),
        }
    }
}

impl fmt::Display for SmellFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The closed set of detectable smells. Declaration order is the report order
/// for ties and the row order of summary tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SmellCode {
    AvoidComments,
    DuplicateBlock,
    ImproperAlignment,
    LongResource,
    LongStatement,
    MisplacedAttribute,
    MultifacetedAbstraction,
    TooManyVariables,
    UnguardedVariable,
    AdminByDefault,
    EmptyPassword,
    HardcodedSecret,
    InvalidIpBinding,
    MissingDefault,
    NoIntegrityCheck,
    SuspiciousComment,
    HttpWithoutTls,
    WeakCrypto,
}

impl SmellCode {
    pub const ALL: [SmellCode; 18] = [
        SmellCode::AvoidComments,
        SmellCode::DuplicateBlock,
        SmellCode::ImproperAlignment,
        SmellCode::LongResource,
        SmellCode::LongStatement,
        SmellCode::MisplacedAttribute,
        SmellCode::MultifacetedAbstraction,
        SmellCode::TooManyVariables,
        SmellCode::UnguardedVariable,
        SmellCode::AdminByDefault,
        SmellCode::EmptyPassword,
        SmellCode::HardcodedSecret,
        SmellCode::InvalidIpBinding,
        SmellCode::MissingDefault,
        SmellCode::NoIntegrityCheck,
        SmellCode::SuspiciousComment,
        SmellCode::HttpWithoutTls,
        SmellCode::WeakCrypto,
    ];

    /// Stable identifier used in CSV output.
    pub fn code(self) -> &'static str {
        match self {
            SmellCode::AvoidComments => "design_avoid_comments",
            SmellCode::DuplicateBlock => "design_duplicate_block",
            SmellCode::ImproperAlignment => "design_improper_alignment",
            SmellCode::LongResource => "design_long_resource",
            SmellCode::LongStatement => "design_long_statement",
            SmellCode::MisplacedAttribute => "design_misplaced_attribute",
            SmellCode::MultifacetedAbstraction => "design_multifaceted_abstraction",
            SmellCode::TooManyVariables => "design_too_many_variables",
            SmellCode::UnguardedVariable => "design_unguarded_variable",
            SmellCode::AdminByDefault => "security_admin_by_default",
            SmellCode::EmptyPassword => "security_empty_password",
            SmellCode::HardcodedSecret => "security_hardcoded_secret",
            SmellCode::InvalidIpBinding => "security_invalid_ip_binding",
            SmellCode::MissingDefault => "security_missing_default",
            SmellCode::NoIntegrityCheck => "security_no_integrity_check",
            SmellCode::SuspiciousComment => "security_suspicious_comment",
            SmellCode::HttpWithoutTls => "security_http_without_tls",
            SmellCode::WeakCrypto => "security_weak_crypto",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SmellCode::AvoidComments => "Avoid comments",
            SmellCode::DuplicateBlock => "Duplicate block",
            SmellCode::ImproperAlignment => "Improper alignment",
            SmellCode::LongResource => "Long resource",
            SmellCode::LongStatement => "Long statement",
            SmellCode::MisplacedAttribute => "Misplaced attribute",
            SmellCode::MultifacetedAbstraction => "Multifaceted abstraction",
            SmellCode::TooManyVariables => "Too many variables",
            SmellCode::UnguardedVariable => "Unguarded variable",
            SmellCode::AdminByDefault => "Admin by default",
            SmellCode::EmptyPassword => "Empty password",
            SmellCode::HardcodedSecret => "Hard-coded secret",
            SmellCode::InvalidIpBinding => "Invalid IP address binding",
            SmellCode::MissingDefault => "Missing default case statement",
            SmellCode::NoIntegrityCheck => "No integrity check",
            SmellCode::SuspiciousComment => "Suspicious comment",
            SmellCode::HttpWithoutTls => "Use of HTTP without SSL/TLS",
            SmellCode::WeakCrypto => "Use of weak cryptography algorithms",
        }
    }

    pub fn family(self) -> SmellFamily {
        if self.code().starts_with("design_") {
            SmellFamily::Design
        } else {
            SmellFamily::Security
        }
    }

    pub fn of_family(family: SmellFamily) -> impl Iterator<Item = SmellCode> {
        Self::ALL.into_iter().filter(move |c| c.family() == family)
    }
}

impl fmt::Display for SmellCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SmellCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SmellCode::ALL
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| format!("unknown smell code `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Smell {
    pub code: SmellCode,
    pub span: SourceSpan,
    /// One-line explanation.
    pub detail: String,
}

impl Smell {
    pub fn new(code: SmellCode, span: SourceSpan, detail: impl Into<String>) -> Self {
        Smell {
            code,
            span,
            detail: detail.into(),
        }
    }

    pub fn label(&self) -> &'static str {
        self.code.label()
    }

    /// Reported line.
    pub fn line(&self) -> usize {
        self.span.start_line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_per_family() {
        assert_eq!(SmellCode::of_family(SmellFamily::Design).count(), 9);
        assert_eq!(SmellCode::of_family(SmellFamily::Security).count(), 9);
    }

    #[test]
    fn codes_are_unique_and_round_trip() {
        let mut codes: Vec<_> = SmellCode::ALL.iter().map(|c| c.code()).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 18);
        for c in SmellCode::ALL {
            assert_eq!(c.code().parse::<SmellCode>().unwrap(), c);
        }
    }
}
