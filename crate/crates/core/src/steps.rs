//! Statement counter for the update and query paths.
//!
//! With the `step-counter` feature every executed statement of `add` and
//! `query` bumps a thread-local counter. Without the feature the hooks compile
//! to nothing.

#[cfg(feature = "step-counter")]
mod imp {
    use std::cell::Cell;

    thread_local! {
        static STEPS: Cell<u64> = const { Cell::new(0) };
    }

    #[inline]
    pub(crate) fn tick(n: u64) {
        STEPS.with(|s| s.set(s.get() + n));
    }

    /// Returns the steps recorded on this thread and resets the counter.
    pub fn take() -> u64 {
        STEPS.with(|s| s.replace(0))
    }
}

#[cfg(not(feature = "step-counter"))]
mod imp {
    #[inline(always)]
    pub(crate) fn tick(_n: u64) {}
}

pub(crate) use imp::tick;

#[cfg(feature = "step-counter")]
pub use imp::take;

/// Whether step counting was compiled in.
pub const ENABLED: bool = cfg!(feature = "step-counter");
