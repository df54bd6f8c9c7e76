use std::fmt;

/// Outcomes that are not module errors but still end the run unsuccessfully.
#[derive(Debug)]
pub enum Failure {
    NonConvergence(String),
    Verification { category: &'static str, msg: String },
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::NonConvergence(_) => 3,
            Failure::Verification { .. } => 5,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            Failure::NonConvergence(_) => "non-convergence",
            Failure::Verification { category, .. } => category,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NonConvergence(m) | Failure::Verification { msg: m, .. } => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

/// Exit code, category and one-line message for an error.
pub fn classify(e: &anyhow::Error) -> (u8, &'static str, String) {
    let msg = format!("{e:#}").replace('\n', " ");
    if let Some(f) = e.downcast_ref::<Failure>() {
        return (f.code(), f.category(), f.to_string());
    }
    if let Some(g) = e.downcast_ref::<gwfo::Error>() {
        let code = match g {
            _ if g.is_budget() => 4,
            gwfo::Error::AllRunsDiverged => 3,
            _ => 2,
        };
        return (code, g.category(), msg);
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return (2, "io", msg);
    }
    (2, "usage", msg)
}
