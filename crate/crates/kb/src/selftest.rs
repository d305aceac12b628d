//! The shipped corpus and its self-test.
//!
//! The corpus files are compiled into the binary, one script per module
//! of the library's surface.  The self-test holds each file to four
//! promises:
//!
//! 1. it parses;
//! 2. it is in canonical print form — printing the parsed forms, one per
//!    line, reproduces the file byte for byte — and re-parsing the print
//!    yields congruent forms;
//! 3. it runs from a fresh store and environment with every report
//!    succeeding, expectations included;
//! 4. every verification check attached to a report recomputes to `true`
//!    pointwise, independently of the decision-diagram engine.

use kbool::store::TermStore;

use crate::cmds::execute;
use crate::elab::{CliError, Env};
use crate::sexp::{parse, parse_one};

/// The embedded corpus: `(file name, contents)`.
pub const CORPUS: &[(&str, &str)] = &[
    ("terms.kb", include_str!("../corpus/terms.kb")),
    ("t2_axioms.kb", include_str!("../corpus/t2_axioms.kb")),
    ("logic.kb", include_str!("../corpus/logic.kb")),
    ("interpolation.kb", include_str!("../corpus/interpolation.kb")),
    ("retraction.kb", include_str!("../corpus/retraction.kb")),
    ("colimits.kb", include_str!("../corpus/colimits.kb")),
    ("syncat.kb", include_str!("../corpus/syncat.kb")),
];

/// What the self-test verified for one corpus file.
#[derive(Clone, Debug)]
pub struct FileOutcome {
    pub name: &'static str,
    pub forms: usize,
    pub checks_recomputed: usize,
}

/// Runs the whole self-test; any failure is an error.
pub fn selftest() -> Result<Vec<FileOutcome>, CliError> {
    CORPUS.iter().map(|(name, src)| selftest_file(name, src)).collect()
}

fn selftest_file(name: &'static str, src: &str) -> Result<FileOutcome, CliError> {
    let fail = |msg: String| CliError::Internal { msg: format!("{name}: {msg}") };

    let forms = parse(src).map_err(|e| fail(format!("parse error at {e}")))?;

    let printed: String = forms.iter().map(|f| format!("{f}\n")).collect();
    if printed != src {
        return Err(fail("file is not in canonical print form".into()));
    }
    for form in &forms {
        let back = parse_one(&form.to_string()).map_err(|e| fail(format!("reparse: {e}")))?;
        if !back.congruent(form) {
            return Err(fail(format!("`{form}` does not reparse to a congruent form")));
        }
    }

    let mut store = TermStore::new();
    let mut env = Env::new();
    let mut checks_recomputed = 0;
    for form in &forms {
        let report = execute(&mut store, &mut env, form)
            .map_err(|e| fail(format!("`{form}`: {e}")))?;
        if !report.ok {
            let detail = report.detail.join("; ");
            return Err(fail(format!("`{}` reported `{}` ({detail})", report.echo, report.result)));
        }
        for check in &report.checks {
            let verdict = check
                .recompute(&mut store)
                .map_err(|e| fail(format!("recomputing `{}`: {e}", check.label)))?;
            if !(check.ok && verdict) {
                return Err(fail(format!(
                    "check `{}` did not recompute to its recorded verdict",
                    check.label
                )));
            }
            checks_recomputed += 1;
        }
    }
    Ok(FileOutcome { name, forms: forms.len(), checks_recomputed })
}

// ---------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------
