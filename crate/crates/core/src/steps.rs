//! Abstract step counter shared by every engine primitive.
//!
//! The counter is thread-local so that tests running in parallel do not
//! interfere with each other.

use std::cell::Cell;

thread_local! {
    static STEPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn tick() {
    STEPS.with(|s| s.set(s.get() + 1));
}

#[inline]
pub fn add(n: u64) {
    STEPS.with(|s| s.set(s.get() + n));
}

pub fn read() -> u64 {
    STEPS.with(|s| s.get())
}

pub fn reset() {
    STEPS.with(|s| s.set(0));
}

/// Runs `f` and returns its result with the number of steps it charged.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = read();
    let out = f();
    (out, read() - before)
}
