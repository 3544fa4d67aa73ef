use serde::Serialize;

/// Outcome of an exhaustive check: pass, or the first violation found.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "witness", rename_all = "lowercase")]
pub enum Verdict<W> {
    Pass,
    Violation(W),
}

impl<W> Verdict<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Violation(w) => Some(w),
        }
    }

    pub fn into_witness(self) -> Option<W> {
        match self {
            Verdict::Pass => None,
            Verdict::Violation(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Pass => Verdict::Pass,
            Verdict::Violation(w) => Verdict::Violation(f(w)),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    fn from(w: Option<W>) -> Self {
        match w {
            None => Verdict::Pass,
            Some(w) => Verdict::Violation(w),
        }
    }
}
