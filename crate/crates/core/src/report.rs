//! Pass/fail reports with failure witnesses, shared by all check suites.

use std::fmt;

/// One failing case: the inputs that produced a nonzero residual.
#[derive(Debug, Clone)]
pub struct Witness {
    pub label: String,
    pub inputs: Vec<String>,
    pub residual: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: inputs [{}] residual {}",
            self.label,
            self.inputs.join("; "),
            self.residual
        )
    }
}

/// Outcome of a check suite run over a sample.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<Witness>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        if !ok {
            self.failures.push(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{}: PASS ({} cases)", self.name, self.cases)
        } else {
            writeln!(
                f,
                "{}: FAIL ({} of {} cases)",
                self.name,
                self.failures.len(),
                self.cases
            )?;
            for w in &self.failures {
                writeln!(f, "  {w}")?;
            }
            Ok(())
        }
    }
}
