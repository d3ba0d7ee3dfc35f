//! Sliding-window minimum and maximum over a 1-D sequence.
//!
//! Two algorithms with identical output:
//!
//! * [`linear_window_1d`] reduces all `w` taps of each window directly. Every
//!   tap is a whole-sequence elementwise min/max, so the inner loop
//!   vectorizes, but work grows linearly with `w`.
//! * [`van_herk_1d`] is the van Herk/Gil-Werman algorithm. The padded
//!   sequence is cut into blocks of `w` values; inside each block a forward
//!   and a backward running extremum are built, and any window (which covers
//!   at most two adjacent blocks) is the extremum of the backward value at
//!   its start and the forward value at its end. Work per element is bounded
//!   independently of `w`.
//!
//! Both accept an optional [`OpCounter`] that records how many two-input
//! min/max evaluations were performed.

use crate::error::{check_window, MorphError, Result};
use crate::image::{BorderPolicy, OpKind};

/// Number of two-input min/max evaluations made by one call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    comparisons: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn reset(&mut self) {
        self.comparisons = 0;
    }
}

/// Receiver for comparison counts. The unit impl compiles to nothing.
pub(crate) trait Tally {
    fn record(&mut self, n: usize);
}

impl Tally for () {
    #[inline(always)]
    fn record(&mut self, _n: usize) {}
}

impl Tally for OpCounter {
    #[inline]
    fn record(&mut self, n: usize) {
        self.comparisons += n as u64;
    }
}

/// Two-input reduction resolved at compile time so inner loops carry no
/// per-element branch on the operation.
pub(crate) trait Reducer {
    fn pick(a: u8, b: u8) -> u8;
}

pub(crate) struct MinReducer;
pub(crate) struct MaxReducer;

impl Reducer for MinReducer {
    #[inline(always)]
    fn pick(a: u8, b: u8) -> u8 {
        a.min(b)
    }
}

impl Reducer for MaxReducer {
    #[inline(always)]
    fn pick(a: u8, b: u8) -> u8 {
        a.max(b)
    }
}

/// Elementwise `dst[i] = pick(dst[i], src[i])`.
#[inline]
pub(crate) fn reduce_into<R: Reducer>(dst: &mut [u8], src: &[u8]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = R::pick(*d, s);
    }
}

/// Elementwise `dst[i] = pick(a[i], b[i])`.
#[inline]
pub(crate) fn reduce_pair<R: Reducer>(dst: &mut [u8], a: &[u8], b: &[u8]) {
    for ((d, &x), &y) in dst.iter_mut().zip(a).zip(b) {
        *d = R::pick(x, y);
    }
}

/// Writes `seq` extended by `wing` border samples on each side into `ext`.
pub(crate) fn pad_sequence(seq: &[u8], wing: usize, border: BorderPolicy, ext: &mut Vec<u8>) {
    let (left, right) = match border {
        BorderPolicy::Replicate => (seq[0], seq[seq.len() - 1]),
        BorderPolicy::Constant(c) => (c, c),
    };
    ext.clear();
    ext.reserve(seq.len() + 2 * wing);
    ext.resize(wing, left);
    ext.extend_from_slice(seq);
    ext.resize(seq.len() + 2 * wing, right);
}

/// Direct window reduction over an already padded sequence.
/// `ext.len()` must be `out.len() + w - 1`.
pub(crate) fn linear_padded<R: Reducer, T: Tally>(
    ext: &[u8],
    w: usize,
    out: &mut [u8],
    tally: &mut T,
) {
    let n = out.len();
    debug_assert_eq!(ext.len(), n + w - 1);
    out.copy_from_slice(&ext[..n]);
    for k in 1..w {
        reduce_into::<R>(out, &ext[k..k + n]);
        tally.record(n);
    }
}

/// van Herk/Gil-Werman over an already padded sequence.
/// `ext.len()` must be `out.len() + w - 1`.
pub(crate) fn van_herk_padded<R: Reducer, T: Tally>(
    ext: &[u8],
    w: usize,
    out: &mut [u8],
    forward: &mut Vec<u8>,
    backward: &mut Vec<u8>,
    tally: &mut T,
) {
    let n = out.len();
    let len = ext.len();
    debug_assert_eq!(len, n + w - 1);
    forward.resize(len, 0);
    backward.resize(len, 0);

    for start in (0..len).step_by(w) {
        let end = (start + w).min(len);
        forward[start] = ext[start];
        for i in start + 1..end {
            forward[i] = R::pick(forward[i - 1], ext[i]);
        }
        backward[end - 1] = ext[end - 1];
        for i in (start..end - 1).rev() {
            backward[i] = R::pick(backward[i + 1], ext[i]);
        }
        tally.record(2 * (end - start - 1));
    }

    // A window starting on a block boundary is exactly that block.
    let mut merges = 0;
    for (i, o) in out.iter_mut().enumerate() {
        if i % w == 0 {
            *o = backward[i];
        } else {
            *o = R::pick(backward[i], forward[i + w - 1]);
            merges += 1;
        }
    }
    tally.record(merges);
}

/// Reusable per-row scratch for the 2-D passes.
#[derive(Default)]
pub(crate) struct RowScratch {
    ext: Vec<u8>,
    forward: Vec<u8>,
    backward: Vec<u8>,
}

impl RowScratch {
    pub(crate) fn linear<T: Tally>(
        &mut self,
        seq: &[u8],
        w: usize,
        op: OpKind,
        border: BorderPolicy,
        out: &mut [u8],
        tally: &mut T,
    ) {
        pad_sequence(seq, w / 2, border, &mut self.ext);
        match op {
            OpKind::Erode => linear_padded::<MinReducer, T>(&self.ext, w, out, tally),
            OpKind::Dilate => linear_padded::<MaxReducer, T>(&self.ext, w, out, tally),
        }
    }

    pub(crate) fn van_herk<T: Tally>(
        &mut self,
        seq: &[u8],
        w: usize,
        op: OpKind,
        border: BorderPolicy,
        out: &mut [u8],
        tally: &mut T,
    ) {
        pad_sequence(seq, w / 2, border, &mut self.ext);
        let Self {
            ext,
            forward,
            backward,
        } = self;
        match op {
            OpKind::Erode => {
                van_herk_padded::<MinReducer, T>(ext, w, out, forward, backward, tally)
            }
            OpKind::Dilate => {
                van_herk_padded::<MaxReducer, T>(ext, w, out, forward, backward, tally)
            }
        }
    }
}

fn check_input(seq: &[u8], w: usize) -> Result<()> {
    check_window(w)?;
    if seq.is_empty() {
        return Err(MorphError::EmptySequence);
    }
    Ok(())
}

/// Sliding extremum by direct reduction of every window, `w - 1`
/// comparisons per output value.
pub fn linear_window_1d(
    seq: &[u8],
    w: usize,
    op: OpKind,
    border: BorderPolicy,
    counter: Option<&mut OpCounter>,
) -> Result<Vec<u8>> {
    check_input(seq, w)?;
    let mut out = vec![0; seq.len()];
    let mut scratch = RowScratch::default();
    match counter {
        Some(c) => {
            c.reset();
            scratch.linear(seq, w, op, border, &mut out, c);
        }
        None => scratch.linear(seq, w, op, border, &mut out, &mut ()),
    }
    Ok(out)
}

/// Sliding extremum by the van Herk/Gil-Werman block decomposition.
pub fn van_herk_1d(
    seq: &[u8],
    w: usize,
    op: OpKind,
    border: BorderPolicy,
    counter: Option<&mut OpCounter>,
) -> Result<Vec<u8>> {
    check_input(seq, w)?;
    let mut out = vec![0; seq.len()];
    let mut scratch = RowScratch::default();
    match counter {
        Some(c) => {
            c.reset();
            scratch.van_herk(seq, w, op, border, &mut out, c);
        }
        None => scratch.van_herk(seq, w, op, border, &mut out, &mut ()),
    }
    Ok(out)
}
