use serde::Serialize;

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    Breakdown,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::MaxIterations => 2,
            Status::Breakdown => 3,
        }
    }
}

/// An error reported as one JSON line on stderr.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip)]
    pub code: i32,
}

impl Failure {
    pub fn config(message: String) -> Self {
        Self { kind: "config", message, code: 1 }
    }

    pub fn io(message: String) -> Self {
        Self { kind: "io", message, code: 1 }
    }

    pub fn report(&self) {
        eprintln!("{}", serde_json::json!({ "error": self }));
    }
}

impl From<tteig::Error> for Failure {
    fn from(e: tteig::Error) -> Self {
        match e {
            tteig::Error::Breakdown(_) => Self { kind: "breakdown", message: e.to_string(), code: Status::Breakdown.code() },
            tteig::Error::Config(_) => Self::config(e.to_string()),
            _ => Self { kind: "numerical", message: e.to_string(), code: 1 },
        }
    }
}
