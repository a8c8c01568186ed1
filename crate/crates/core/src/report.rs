//! Report rendering: CSV rows and per-smell summary tables.

use comfy_table::presets::ASCII_FULL;
use comfy_table::{CellAlignment, Table};

use crate::engine::SmellReport;
use crate::smell::SmellCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum TableFormat {
    #[default]
    #[value(name = "prettytable")]
    PrettyTable,
    Latex,
}

pub const CSV_HEADER: [&str; 4] = ["path", "line", "smell_code", "smell_label"];

/// One row per finding under a fixed header, LF line endings.
pub fn emit_csv(report: &SmellReport) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("writing to memory");
    for s in &report.findings {
        let line = s.line().to_string();
        writer
            .write_record([s.span.path.as_str(), line.as_str(), s.code.code(), s.label()])
            .expect("writing to memory");
    }
    let bytes = writer.into_inner().expect("writing to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// All nine codes of the report's family, zero rows included.
pub fn emit_table(report: &SmellReport, format: TableFormat) -> String {
    let rows: Vec<(SmellCode, usize, usize)> = SmellCode::of_family(report.family)
        .map(|c| (c, report.stats.count(c), report.stats.files(c)))
        .collect();
    match format {
        TableFormat::PrettyTable => pretty(report, &rows),
        TableFormat::Latex => latex(&rows),
    }
}

fn pretty(report: &SmellReport, rows: &[(SmellCode, usize, usize)]) -> String {
    let mut table = Table::new();
    table.load_style(ASCII_FULL).force_no_tty();
    table.set_header(["Smell", "Code", "Occurrences", "Files"]);
    for (code, count, files) in rows {
        table.add_row([
            code.label().to_string(),
            code.code().to_string(),
            count.to_string(),
            files.to_string(),
        ]);
    }
    for idx in [2, 3] {
        if let Some(col) = table.column_mut(idx) {
            col.set_cell_alignment(CellAlignment::Right);
        }
    }
    let total: usize = rows.iter().map(|r| r.1).sum();
    format!(
        "{table}\nTotal occurrences: {total}\nFiles analyzed: {}\nFiles failed: {}\n",
        report.stats.files_analyzed, report.stats.files_failed
    )
}

/// Escapes LaTeX special characters in plain text.
pub fn latex_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(c),
        }
    }
    out
}

fn latex(rows: &[(SmellCode, usize, usize)]) -> String {
    let mut out = String::from("\\begin{tabular}{llrr}\n\\hline\nSmell & Code & Occurrences & Files \\\\\n\\hline\n");
    for (code, count, files) in rows {
        out.push_str(&format!(
            "{} & {} & {count} & {files} \\\\\n",
            latex_escape(code.label()),
            latex_escape(code.code())
        ));
    }
    out.push_str("\\hline\n\\end{tabular}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smell::{Smell, SmellFamily};
    use crate::source::SourceSpan;

    fn smell(code: SmellCode, path: &str, line: usize) -> Smell {
        Smell::new(code, SourceSpan::location(path, line), "")
    }

    #[test]
    fn empty_csv_is_header_only() {
        let report = SmellReport::new(SmellFamily::Design, Vec::new(), 0, Vec::new());
        assert_eq!(emit_csv(&report), "path,line,smell_code,smell_label\n");
    }

    #[test]
    fn csv_row_and_quoting() {
        let report = SmellReport::new(
            SmellFamily::Design,
            vec![smell(SmellCode::AvoidComments, "a.pp", 1), smell(SmellCode::AvoidComments, "b,c.pp", 2)],
            2,
            Vec::new(),
        );
        assert_eq!(
            emit_csv(&report),
            "path,line,smell_code,smell_label\na.pp,1,design_avoid_comments,Avoid comments\n\"b,c.pp\",2,design_avoid_comments,Avoid comments\n"
        );
    }

    #[test]
    fn table_counts_and_files() {
        let findings = vec![
            smell(SmellCode::LongStatement, "a.pp", 1),
            smell(SmellCode::LongStatement, "a.pp", 2),
            smell(SmellCode::LongStatement, "b.pp", 1),
        ];
        let report = SmellReport::new(SmellFamily::Design, findings, 2, Vec::new());
        let text = emit_table(&report, TableFormat::PrettyTable);
        let row = text.lines().find(|l| l.contains("design_long_statement")).unwrap();
        let cells: Vec<&str> = row.split('|').map(str::trim).filter(|c| !c.is_empty()).collect();
        assert_eq!(cells, vec!["Long statement", "design_long_statement", "3", "2"]);
        for code in SmellCode::of_family(SmellFamily::Design) {
            assert!(text.contains(code.code()));
        }
    }

    #[test]
    fn latex_escapes_underscores() {
        let report = SmellReport::new(SmellFamily::Security, Vec::new(), 0, Vec::new());
        let text = emit_table(&report, TableFormat::Latex);
        assert!(text.starts_with("\\begin{tabular}"));
        assert_eq!(text.lines().filter(|l| l.contains("security\\_")).count(), 9);
        assert!(!text.replace("\\_", "").contains('_'));
    }
}
