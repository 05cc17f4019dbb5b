use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary class label. `Female` is `+1`, `Male` is `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Female,
    Male,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Female, Label::Male];

    pub fn value(self) -> i8 {
        match self {
            Label::Female => 1,
            Label::Male => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    /// Sign rule shared by every decision function: a score of exactly
    /// zero is `Female`.
    pub fn from_score(score: f64) -> Label {
        if score >= 0.0 {
            Label::Female
        } else {
            Label::Male
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Female => "female",
            Label::Male => "male",
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Female => Label::Male,
            Label::Male => Label::Female,
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        l.value()
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Label::Female),
            -1 => Ok(Label::Male),
            other => Err(format!("label must be +1 or -1, got {other}")),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "+1" | "1" => Ok(Label::Female),
            "-1" => Ok(Label::Male),
            other => Err(format!("label must be +1 or -1, got {other:?}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}
