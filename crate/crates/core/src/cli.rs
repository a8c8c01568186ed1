//! Command-line front end. [`run_cli`] does all the work and returns what a
//! process would print, so it can be tested without spawning one.

use std::path::{Path, PathBuf};

use clap::Parser as _;

use crate::config::load_config;
use crate::engine::{run_project, DetectorSet, SmellReport};
use crate::ir::Project;
use crate::parser::{parse_file, parse_folder, parse_module, ParseOutcome, TechnologyId};
use crate::report::{emit_csv, emit_table, TableFormat};
use crate::smell::SmellFamily;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Clone, clap::Parser)]
#[command(name = "iac-smells", version, about = "Detect design and security smells in infrastructure-as-code scripts")]
pub struct CliOptions {
    /// Script file or folder to analyze.
    pub input_path: PathBuf,

    /// ansible, chef, docker, puppet or terraform.
    #[arg(long, value_parser = parse_tech)]
    pub tech: TechnologyId,

    /// Smell family to report.
    #[arg(long, value_enum, default_value = "design")]
    pub smells: FamilyArg,

    /// INI configuration file.
    #[arg(long = "config", value_name = "PATH")]
    pub config_path: Option<PathBuf>,

    /// Summary table style.
    #[arg(long = "tableformat", value_enum, default_value = "prettytable")]
    pub table_format: TableFormat,

    /// Print findings as CSV instead of a summary table.
    #[arg(long)]
    pub csv: bool,

    /// Treat the input folder as a single module.
    #[arg(long = "module")]
    pub module_mode: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Design,
    Security,
}

impl From<FamilyArg> for SmellFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Design => SmellFamily::Design,
            FamilyArg::Security => SmellFamily::Security,
        }
    }
}

fn parse_tech(s: &str) -> Result<TechnologyId, String> {
    s.parse()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn fatal(message: impl std::fmt::Display) -> Self {
        CliOutput {
            status: EXIT_FATAL,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses `args` (program name first) and runs the analysis.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match CliOptions::try_parse_from(args) {
        Ok(options) => run(&options),
        Err(err) => {
            let text = err.render().to_string();
            if err.use_stderr() {
                CliOutput {
                    status: EXIT_FATAL,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    status: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

fn load_project(path: &Path, tech: TechnologyId, module_mode: bool) -> Result<ParseOutcome<Project>, Error> {
    if path.is_file() {
        let outcome = parse_file(path, tech)?;
        let mut project = Project::new(path.to_string_lossy());
        if outcome.failed_files.is_empty() {
            project.unit_blocks.push(outcome.result);
        }
        return Ok(ParseOutcome {
            result: project,
            warnings: outcome.warnings,
            failed_files: outcome.failed_files,
        });
    }
    if module_mode {
        let outcome = parse_module(path, tech)?;
        let mut project = Project::new(outcome.result.name.clone());
        project.modules.push(outcome.result);
        return Ok(ParseOutcome {
            result: project,
            warnings: outcome.warnings,
            failed_files: outcome.failed_files,
        });
    }
    parse_folder(path, tech)
}

/// Runs an already parsed command line.
pub fn run(options: &CliOptions) -> CliOutput {
    let cfg = match load_config(options.config_path.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return CliOutput::fatal(e),
    };
    let outcome = match load_project(&options.input_path, options.tech, options.module_mode) {
        Ok(o) => o,
        Err(e) => return CliOutput::fatal(e),
    };

    let family = SmellFamily::from(options.smells);
    let detectors = DetectorSet::for_family(family, options.tech);
    let project = &outcome.result;
    let findings = run_project(project, &detectors, &cfg);
    let failed: Vec<String> = outcome.failed_files.iter().map(|f| f.path.clone()).collect();
    let report = SmellReport::new(family, findings, project.files().count(), failed);

    let mut stderr = String::new();
    for w in &outcome.warnings {
        stderr.push_str(&format!("warning: {w}\n"));
    }
    for f in &outcome.failed_files {
        stderr.push_str(&format!("error: {}: {}\n", f.path, f.reason));
    }
    let stdout = if options.csv {
        emit_csv(&report)
    } else {
        emit_table(&report, options.table_format)
    };
    CliOutput {
        status: if report.failed_files.is_empty() { EXIT_OK } else { EXIT_PARTIAL },
        stdout,
        stderr,
    }
}
