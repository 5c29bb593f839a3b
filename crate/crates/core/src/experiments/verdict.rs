use serde::{Deserialize, Serialize};

/// Comparison applied to a measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Check {
    AtMost { bound: f64 },
    AtLeast { bound: f64 },
    LessThan { bound: f64 },
    GreaterThan { bound: f64 },
    Within { lo: f64, hi: f64 },
}

impl Check {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Check::AtMost { bound } => value <= bound,
            Check::AtLeast { bound } => value >= bound,
            Check::LessThan { bound } => value < bound,
            Check::GreaterThan { bound } => value > bound,
            Check::Within { lo, hi } => value >= lo && value <= hi,
        }
    }
}

/// A named pass/fail clause that can be re-evaluated from `value` and `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub check: Check,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: f64, check: Check) -> Self {
        Self {
            name: name.into(),
            value,
            check,
            pass: check.holds(value),
        }
    }

    /// Boolean clause encoded as value 1/0 with `AtLeast 1`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Check::AtLeast { bound: 1.0 })
    }

    pub fn recheck(&self) -> bool {
        self.check.holds(self.value) == self.pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks() {
        assert!(Check::Within { lo: 0.95, hi: 1.05 }.holds(1.0));
        assert!(!Check::LessThan { bound: 1.0 }.holds(1.0));
        assert!(Check::AtMost { bound: 1.0 }.holds(1.0));
        assert!(!Check::AtLeast { bound: 1.0 }.holds(f64::NAN));
        let v = Verdict::new("x", 3.0, Check::GreaterThan { bound: 2.0 });
        assert!(v.pass && v.recheck());
        assert!(!Verdict::flag("f", false).pass);
    }
}
