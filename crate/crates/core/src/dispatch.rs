//! Hybrid pass selection and compound operations.
//!
//! The linear pass wins for small windows and van Herk/Gil-Werman for large
//! ones. [`DispatchConfig`] stores the crossover per axis; [`resolve`] picks
//! Linear when the window is at or below it. Thresholds only change speed,
//! never output.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bench::{random_image, time_pass, DEFAULT_SEED};
use crate::error::{check_window, MorphError, Result};
use crate::image::{BorderPolicy, Image, OpKind, StructuringElement};
use crate::separable::{morph_resolved, PassAlgorithm, VerticalStrategy};

/// Crossover window for the horizontal pass measured on the reference ARM
/// hardware.
pub const DEFAULT_THRESHOLD_H: usize = 69;
/// Crossover window for the vertical pass on the same hardware.
pub const DEFAULT_THRESHOLD_V: usize = 59;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Horizontal => "horizontal",
            Axis::Vertical => "vertical",
        }
    }
}

/// A concrete 1-D pass algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PassKind {
    Linear,
    VanHerk,
}

impl PassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PassKind::Linear => "linear",
            PassKind::VanHerk => "vanherk",
        }
    }

    /// Vertical strategy the dispatcher pairs with this algorithm: the
    /// linear pass runs directly on rows, van Herk goes through transposes.
    pub fn vertical_strategy(self) -> VerticalStrategy {
        match self {
            PassKind::Linear => VerticalStrategy::Direct,
            PassKind::VanHerk => VerticalStrategy::ViaTranspose,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigSource {
    PaperDefault,
    Calibrated,
}

impl ConfigSource {
    fn as_str(self) -> &'static str {
        match self {
            ConfigSource::PaperDefault => "paper",
            ConfigSource::Calibrated => "calibrated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value {value:?} for {key}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("threshold must be an odd integer of at least 1, got {0}")]
    BadThreshold(usize),
}

/// Per-axis crossover windows. Linear is used when `window <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DispatchConfig {
    threshold_h: usize,
    threshold_v: usize,
    source: ConfigSource,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        Self {
            threshold_h: DEFAULT_THRESHOLD_H,
            threshold_v: DEFAULT_THRESHOLD_V,
            source: ConfigSource::PaperDefault,
        }
    }
}

impl DispatchConfig {
    pub fn new(
        threshold_h: usize,
        threshold_v: usize,
        source: ConfigSource,
    ) -> std::result::Result<Self, ConfigError> {
        for t in [threshold_h, threshold_v] {
            if t == 0 || t % 2 == 0 {
                return Err(ConfigError::BadThreshold(t));
            }
        }
        Ok(Self {
            threshold_h,
            threshold_v,
            source,
        })
    }

    pub fn threshold_h(&self) -> usize {
        self.threshold_h
    }

    pub fn threshold_v(&self) -> usize {
        self.threshold_v
    }

    pub fn source(&self) -> ConfigSource {
        self.source
    }

    pub fn threshold(&self, axis: Axis) -> usize {
        match axis {
            Axis::Horizontal => self.threshold_h,
            Axis::Vertical => self.threshold_v,
        }
    }
}

/// Writes the `key=value` file form, one entry per line.
impl fmt::Display for DispatchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "threshold_h={}", self.threshold_h)?;
        writeln!(f, "threshold_v={}", self.threshold_v)?;
        writeln!(f, "source={}", self.source.as_str())
    }
}

impl FromStr for DispatchConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, ConfigError> {
        let mut threshold_h = None;
        let mut threshold_v = None;
        let mut source = None;
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line,
                text: text.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad_value = || ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            };
            let duplicate = || ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            };
            match key {
                "threshold_h" | "threshold_v" => {
                    let v: usize = value.parse().map_err(|_| bad_value())?;
                    let slot = if key == "threshold_h" {
                        &mut threshold_h
                    } else {
                        &mut threshold_v
                    };
                    if slot.replace(v).is_some() {
                        return Err(duplicate());
                    }
                }
                "source" => {
                    let v = match value {
                        "paper" => ConfigSource::PaperDefault,
                        "calibrated" => ConfigSource::Calibrated,
                        _ => return Err(bad_value()),
                    };
                    if source.replace(v).is_some() {
                        return Err(duplicate());
                    }
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        DispatchConfig::new(
            threshold_h.ok_or(ConfigError::MissingKey("threshold_h"))?,
            threshold_v.ok_or(ConfigError::MissingKey("threshold_v"))?,
            source.ok_or(ConfigError::MissingKey("source"))?,
        )
    }
}

/// Maps a requested algorithm to a concrete one for `window` on `axis`.
pub fn resolve(alg: PassAlgorithm, window: usize, axis: Axis, cfg: &DispatchConfig) -> PassKind {
    match alg {
        PassAlgorithm::Linear => PassKind::Linear,
        PassAlgorithm::VanHerk => PassKind::VanHerk,
        PassAlgorithm::Auto if window <= cfg.threshold(axis) => PassKind::Linear,
        PassAlgorithm::Auto => PassKind::VanHerk,
    }
}

/// Erosion or dilation with both passes chosen by `cfg`.
pub fn morph(
    src: &Image,
    se: StructuringElement,
    op: OpKind,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    let h_kind = resolve(PassAlgorithm::Auto, se.w_h(), Axis::Horizontal, cfg);
    let v_kind = resolve(PassAlgorithm::Auto, se.w_v(), Axis::Vertical, cfg);
    morph_resolved(
        src,
        se,
        op,
        border,
        h_kind,
        v_kind,
        v_kind.vertical_strategy(),
    )
}

pub fn erode(
    src: &Image,
    se: StructuringElement,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    morph(src, se, OpKind::Erode, border, cfg)
}

pub fn dilate(
    src: &Image,
    se: StructuringElement,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    morph(src, se, OpKind::Dilate, border, cfg)
}

/// Erosion followed by dilation.
pub fn opening(
    src: &Image,
    se: StructuringElement,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    dilate(&erode(src, se, border, cfg), se, border, cfg)
}

/// Dilation followed by erosion.
pub fn closing(
    src: &Image,
    se: StructuringElement,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    erode(&dilate(src, se, border, cfg), se, border, cfg)
}

/// Morphological gradient, `dilate - erode`. The window always contains
/// its own center pixel, so the difference cannot underflow.
pub fn gradient(
    src: &Image,
    se: StructuringElement,
    border: BorderPolicy,
    cfg: &DispatchConfig,
) -> Image {
    let hi = dilate(src, se, border, cfg);
    let lo = erode(src, se, border, cfg);
    let mut out = hi.clone();
    for y in 0..out.height() {
        for (o, &l) in out.row_mut(y).iter_mut().zip(lo.row(y)) {
            *o -= l;
        }
    }
    out
}

/// Threshold rule used by [`calibrate`]: the largest window at which Linear
/// was at least as fast as van Herk, `1` if it never was.
pub fn choose_threshold(windows: &[usize], linear_ns: &[u64], van_herk_ns: &[u64]) -> usize {
    windows
        .iter()
        .zip(linear_ns.iter().zip(van_herk_ns))
        .filter(|(_, (lin, vh))| lin <= vh)
        .map(|(&w, _)| w)
        .max()
        .unwrap_or(1)
}

/// Measures both algorithms on both axes and returns the resulting
/// crossovers.
///
/// Timing needs the machine to itself: run this single-threaded, with no
/// concurrent workload in the process.
pub fn calibrate(
    width: usize,
    height: usize,
    windows: &[usize],
    reps: usize,
) -> Result<DispatchConfig> {
    if reps < 3 {
        return Err(MorphError::InsufficientReps(reps));
    }
    validate_windows(windows)?;
    let img = random_image(width, height, DEFAULT_SEED)?;
    let mut thresholds = [1; 2];
    for (slot, axis) in thresholds
        .iter_mut()
        .zip([Axis::Horizontal, Axis::Vertical])
    {
        let linear: Vec<u64> = windows
            .iter()
            .map(|&w| time_pass(&img, axis, PassKind::Linear, w, OpKind::Erode, reps))
            .collect();
        let van_herk: Vec<u64> = windows
            .iter()
            .map(|&w| time_pass(&img, axis, PassKind::VanHerk, w, OpKind::Erode, reps))
            .collect();
        *slot = choose_threshold(windows, &linear, &van_herk);
    }
    Ok(DispatchConfig {
        threshold_h: thresholds[0],
        threshold_v: thresholds[1],
        source: ConfigSource::Calibrated,
    })
}

/// Window lists must be non-empty, odd, and strictly ascending.
pub fn validate_windows(windows: &[usize]) -> Result<()> {
    if windows.is_empty() {
        return Err(MorphError::InvalidWindows("no windows given".into()));
    }
    for &w in windows {
        check_window(w)?;
    }
    if windows.windows(2).any(|p| p[0] >= p[1]) {
        return Err(MorphError::InvalidWindows(
            "windows must be strictly ascending".into(),
        ));
    }
    Ok(())
}
