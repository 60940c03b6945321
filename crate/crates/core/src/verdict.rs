use serde::{Deserialize, Serialize};

/// Outcome of a one-sided rigorous check.
///
/// `Verified` means the inequality holds for every value represented by the
/// balls involved, `Refuted` means it fails for every such value, and
/// `Undecidable` means the balls are too wide to tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Undecidable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Verified
        } else {
            Verdict::Refuted
        }
    }

    pub fn is_verified(self) -> bool {
        self == Verdict::Verified
    }

    /// Conjunction: refuted dominates, then undecidable.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Refuted, _) | (_, Verdict::Refuted) => Verdict::Refuted,
            (Verdict::Undecidable, _) | (_, Verdict::Undecidable) => Verdict::Undecidable,
            _ => Verdict::Verified,
        }
    }

    pub fn all<I: IntoIterator<Item = Verdict>>(iter: I) -> Verdict {
        iter.into_iter().fold(Verdict::Verified, Verdict::and)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::Undecidable => "undecidable",
        })
    }
}

/// Runs `attempt` at doubling precision, starting at `start` and stopping at
/// `max`, until it reports something other than `Undecidable`.
pub fn precision_ladder<T, F>(start: u32, max: u32, mut attempt: F) -> (T, u32)
where
    F: FnMut(u32) -> (T, Verdict),
{
    let mut prec = start;
    loop {
        let (out, verdict) = attempt(prec);
        if verdict != Verdict::Undecidable || prec >= max {
            return (out, prec);
        }
        prec = (prec * 2).min(max);
    }
}
