//! Bit accounting for the work tape.
//!
//! Persistent registers live in a LIFO frame stack; counters that a call
//! recomputes and throws away are charged as scratch, capped at
//! `c0 · ⌈log₂(n+1)⌉` bits per active call.

use std::borrow::Cow;
use std::fmt;

use crate::log_bits;

pub const DEFAULT_C0: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub label: Cow<'static, str>,
    pub bits: u64,
}

/// Handle returned by [`WorkspaceMeter::push_frame`]; must be popped in
/// LIFO order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[must_use]
pub struct FrameHandle(usize);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PeakReport {
    pub peak_persistent: u64,
    pub peak_scratch: u64,
    pub scratch_violations: u64,
}

pub type TraceSink = Box<dyn FnMut(&str) + Send>;

pub struct WorkspaceMeter {
    n: u64,
    frames: Vec<Frame>,
    current_persistent: u64,
    peak_persistent: u64,
    scratch_cap: u64,
    current_scratch: u64,
    peak_scratch: u64,
    active_calls: u64,
    violations: u64,
    first_violation: Option<String>,
    trace: Option<TraceSink>,
}

impl fmt::Debug for WorkspaceMeter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WorkspaceMeter")
            .field("n", &self.n)
            .field("open_frames", &self.frames.len())
            .field("current_persistent", &self.current_persistent)
            .field("peak_persistent", &self.peak_persistent)
            .field("scratch_cap", &self.scratch_cap)
            .field("current_scratch", &self.current_scratch)
            .field("peak_scratch", &self.peak_scratch)
            .field("violations", &self.violations)
            .finish()
    }
}

impl WorkspaceMeter {
    pub fn new(n: usize) -> Self {
        Self::with_c0(n, DEFAULT_C0)
    }

    pub fn with_c0(n: usize, c0: u64) -> Self {
        let n = n as u64;
        WorkspaceMeter {
            n,
            frames: Vec::new(),
            current_persistent: 0,
            peak_persistent: 0,
            scratch_cap: c0 * log_bits(n),
            current_scratch: 0,
            peak_scratch: 0,
            active_calls: 0,
            violations: 0,
            first_violation: None,
            trace: None,
        }
    }

    pub fn set_trace(&mut self, sink: TraceSink) {
        self.trace = Some(sink);
    }

    pub fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    /// Sends a line to the trace sink, if any. The closure only runs when
    /// tracing is on.
    pub fn trace_with(&mut self, line: impl FnOnce() -> String) {
        if let Some(sink) = self.trace.as_mut() {
            sink(&line());
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn push_frame(&mut self, label: impl Into<Cow<'static, str>>, bits: u64) -> FrameHandle {
        let label = label.into();
        self.current_persistent += bits;
        self.peak_persistent = self.peak_persistent.max(self.current_persistent);
        if let Some(sink) = self.trace.as_mut() {
            sink(&format!(
                "push {label} {bits} -> {}",
                self.current_persistent
            ));
        }
        self.frames.push(Frame { label, bits });
        FrameHandle(self.frames.len() - 1)
    }

    /// Pops the top frame.
    ///
    /// # Panics
    /// If `h` is not the top open frame.
    pub fn pop_frame(&mut self, h: FrameHandle) {
        assert!(
            !self.frames.is_empty(),
            "pop_frame on an empty frame stack"
        );
        assert_eq!(
            h.0,
            self.frames.len() - 1,
            "non-LIFO pop_frame: frame {} popped while {} frames open",
            h.0,
            self.frames.len()
        );
        let frame = self.frames.pop().expect("checked above");
        self.current_persistent -= frame.bits;
        if let Some(sink) = self.trace.as_mut() {
            sink(&format!(
                "pop {} {} -> {}",
                frame.label, frame.bits, self.current_persistent
            ));
        }
    }

    /// Grows the top frame in place (a register whose declared range widened).
    pub fn grow_top(&mut self, h: FrameHandle, extra: u64) {
        assert_eq!(h.0 + 1, self.frames.len(), "grow_top on a buried frame");
        self.frames[h.0].bits += extra;
        self.current_persistent += extra;
        self.peak_persistent = self.peak_persistent.max(self.current_persistent);
    }

    pub fn open_frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn current_persistent(&self) -> u64 {
        self.current_persistent
    }

    pub fn enter_call(&mut self) {
        self.active_calls += 1;
    }

    pub fn exit_call(&mut self) {
        assert!(self.active_calls > 0, "exit_call without enter_call");
        self.active_calls -= 1;
    }

    pub fn active_calls(&self) -> u64 {
        self.active_calls
    }

    pub fn scratch_cap(&self) -> u64 {
        self.scratch_cap
    }

    /// Charges scratch bits. Returns `false` and records a violation when the
    /// total exceeds the cap times the number of active calls.
    pub fn charge_scratch(&mut self, bits: u64) -> bool {
        self.current_scratch += bits;
        self.peak_scratch = self.peak_scratch.max(self.current_scratch);
        let allowed = self.scratch_cap * self.active_calls.max(1);
        if self.current_scratch > allowed {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(format!(
                    "scratch {} bits exceeds cap {} ({} active calls)",
                    self.current_scratch, allowed, self.active_calls
                ));
            }
            false
        } else {
            true
        }
    }

    pub fn release_scratch(&mut self, bits: u64) {
        assert!(bits <= self.current_scratch, "released more scratch than charged");
        self.current_scratch -= bits;
    }

    pub fn current_scratch(&self) -> u64 {
        self.current_scratch
    }

    pub fn violations(&self) -> u64 {
        self.violations
    }

    pub fn first_violation(&self) -> Option<&str> {
        self.first_violation.as_deref()
    }

    pub fn peak_report(&self) -> PeakReport {
        PeakReport {
            peak_persistent: self.peak_persistent,
            peak_scratch: self.peak_scratch,
            scratch_violations: self.violations,
        }
    }
}

/// Charges scratch on creation and releases it on drop.
pub struct ScratchGuard<'a> {
    meter: &'a mut WorkspaceMeter,
    bits: u64,
}

impl<'a> ScratchGuard<'a> {
    pub fn new(meter: &'a mut WorkspaceMeter, bits: u64) -> Self {
        meter.charge_scratch(bits);
        ScratchGuard { meter, bits }
    }

    pub fn meter(&mut self) -> &mut WorkspaceMeter {
        self.meter
    }
}

impl Drop for ScratchGuard<'_> {
    fn drop(&mut self) {
        self.meter.release_scratch(self.bits);
    }
}
