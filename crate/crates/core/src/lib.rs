//! Polyglot smell detection for infrastructure-as-code scripts.
//!
//! Ansible, Chef, Docker, Puppet and Terraform scripts are lowered onto one
//! intermediate representation ([`ir`]); design and security smell detectors
//! ([`rules`]) run over that representation through the [`engine`].

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod ir;
pub mod parser;
pub mod report;
pub mod rules;
pub mod shell;
pub mod smell;
pub mod source;

pub use error::{ConfigError, Error, Result, SyntaxError};
