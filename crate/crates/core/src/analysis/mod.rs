//! Engagement analysis: like and followup preferences per fact source,
//! significance tests, annotator agreement and paraphrase categories.

mod alpha;
mod paraphrase;
mod preference;
mod ztest;

pub use alpha::{
    alpha_report, krippendorff_alpha, krippendorff_alpha_multilabel, krippendorff_alpha_nominal, AgreementInput,
    AlphaReport, ALPHA_THRESHOLD,
};
pub use paraphrase::{
    paraphrase_stats, parse_paraphrase_labels, CountRow, ParaphraseGroup, ParaphraseLabel, ParaphraseTable,
};
pub use preference::{explicit_preference, implicit_followups, overall_like_rate, PreferenceCell, PreferenceTable};
pub use ztest::{two_proportion_z_test, ZTest};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::FactIndex;
use crate::data::{Dialog, SourceLabel};
use crate::Result;

/// A z-test between two cells of one preference table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub a: SourceLabel,
    pub b: SourceLabel,
    pub test: ZTest,
}

/// Pairwise tests between every two defined cells.
pub fn compare_cells(table: &PreferenceTable) -> Vec<CellComparison> {
    let mut out = Vec::new();
    for (i, &a) in SourceLabel::CELLS.iter().enumerate() {
        for &b in &SourceLabel::CELLS[i + 1..] {
            let (ca, cb) = (table.cell(a), table.cell(b));
            if let Ok(test) = two_proportion_z_test(ca.successes, ca.n, cb.successes, cb.n) {
                out.push(CellComparison { a, b, test });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dialogs: usize,
    pub like_rate: Option<f64>,
    pub explicit: PreferenceTable,
    pub explicit_tests: Vec<CellComparison>,
    pub implicit: PreferenceTable,
    pub implicit_tests: Vec<CellComparison>,
    pub agreement: Option<AlphaReport>,
    pub paraphrase: Option<ParaphraseTable>,
}

pub fn analyze_dialogs(dialogs: &[Dialog], index: &FactIndex) -> Result<AnalysisReport> {
    let explicit = explicit_preference(dialogs, index)?;
    let implicit = implicit_followups(dialogs, index)?;
    Ok(AnalysisReport {
        dialogs: dialogs.len(),
        like_rate: overall_like_rate(dialogs),
        explicit_tests: compare_cells(&explicit),
        explicit,
        implicit_tests: compare_cells(&implicit),
        implicit,
        agreement: None,
        paraphrase: None,
    })
}

fn render_table(out: &mut String, title: &str, table: &PreferenceTable, tests: &[CellComparison]) {
    let _ = writeln!(out, "{title}");
    for label in SourceLabel::CELLS {
        let c = table.cell(label);
        match c.estimate() {
            Some(p) => {
                let bar = "#".repeat((p * 40.0).round() as usize);
                let _ = writeln!(out, "  {:<20} {:>6.3}  n={:<6} {bar}", label.name(), p, c.n);
            }
            None => {
                let _ = writeln!(out, "  {:<20} {:>6}  n={:<6}", label.name(), "undef", c.n);
            }
        }
    }
    for t in tests {
        let mark = if t.test.significant(0.99) {
            "**"
        } else if t.test.significant(0.95) {
            "*"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} vs {}: z={:.3} p={:.4}{mark}",
            t.a.name(),
            t.b.name(),
            t.test.z,
            t.test.p_value
        );
    }
}

impl AnalysisReport {
    /// Plain-text bar chart of both preference tables with test results.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dialogs: {}", self.dialogs);
        if let Some(r) = self.like_rate {
            let _ = writeln!(out, "overall like rate: {r:.3}");
        }
        render_table(&mut out, "explicit preference (like rate)", &self.explicit, &self.explicit_tests);
        render_table(&mut out, "implicit preference (followup rate)", &self.implicit, &self.implicit_tests);
        if let Some(a) = &self.agreement {
            let alpha = a.alpha.map_or("undefined".to_string(), |x| format!("{x:.4}"));
            let verdict = if a.passes { "pass" } else { "fail" };
            let _ = writeln!(out, "krippendorff alpha: {alpha} over {} rows (threshold {}: {verdict})", a.pairable_rows, a.threshold);
        }
        if let Some(p) = &self.paraphrase {
            let _ = writeln!(out, "paraphrase categories (total {})", p.total);
            for g in &p.groups {
                let _ = writeln!(out, "  {:<12} {:>5} {:>6.1}%", format!("{:?}", g.key), g.count, g.percent);
            }
        }
        out
    }
}
