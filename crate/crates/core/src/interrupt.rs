//! Cooperative cancellation hook for long searches.

/// Polled by the pulse engine every few thousand pulses. Returning `true`
/// abandons the current search; callers report the outcome as a timeout.
pub trait Interrupt {
    fn interrupted(&self) -> bool;
}

/// Never interrupts.
#[derive(Debug, Clone, Copy, Default)]
pub struct Never;

impl Interrupt for Never {
    #[inline]
    fn interrupted(&self) -> bool {
        false
    }
}

impl<F: Fn() -> bool> Interrupt for F {
    #[inline]
    fn interrupted(&self) -> bool {
        self()
    }
}
