//! Time sources.
//!
//! Match transcripts for in-process agents must be byte-reproducible, so the
//! runner never reads the system clock directly.

use core::cell::Cell;
use core::time::Duration;

/// A monotonic time source in seconds, plus the ability to wait.
pub trait Clock {
    fn now(&self) -> f64;

    /// Blocks for `d`. Logical clocks simply advance.
    fn sleep(&self, d: Duration);
}

/// A clock that never moves. Used for matches between in-process agents,
/// which are unmetered.
#[derive(Debug, Default, Clone, Copy)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }

    fn sleep(&self, _d: Duration) {}
}

/// A logical clock advanced only by `sleep` or `advance`.
#[derive(Debug, Default)]
pub struct ManualClock {
    t: Cell<f64>,
}

impl ManualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, seconds: f64) {
        self.t.set(self.t.get() + seconds);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> f64 {
        self.t.get()
    }

    fn sleep(&self, d: Duration) {
        self.advance(d.as_secs_f64());
    }
}
