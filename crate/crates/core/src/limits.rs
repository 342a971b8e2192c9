use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Resource caps for one solver run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of derivation trees produced by unfolding.
    pub max_derivations: usize,
    /// Maximum number of constraints alive during Fourier–Motzkin elimination.
    pub max_fm_constraints: usize,
    /// Wall-clock budget; `None` disables the check.
    pub timeout: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_derivations: 10_000,
            max_fm_constraints: 50_000,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

/// Limits plus a running deadline.
#[derive(Clone, Debug)]
pub struct Budget {
    limits: Limits,
    deadline: Option<Instant>,
}

impl Budget {
    pub fn new(limits: Limits) -> Self {
        let deadline = limits.timeout.map(|t| Instant::now() + t);
        Budget { limits, deadline }
    }

    pub fn unlimited() -> Self {
        Budget::new(Limits {
            max_derivations: usize::MAX,
            max_fm_constraints: usize::MAX,
            timeout: None,
        })
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::ResourceLimit(format!(
                "time limit of {:?} exceeded",
                self.limits.timeout.unwrap_or_default()
            ))),
            _ => Ok(()),
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Limits::default())
    }
}
