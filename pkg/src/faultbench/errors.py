"""Exception hierarchy shared across the toolkit.

Every domain error derives from FaultBenchError so callers (and the CLI)
can distinguish expected failure modes from genuine bugs.
"""


class FaultBenchError(Exception):
    """Base class for all domain errors raised by this package."""


# --- volume and mask I/O ---

class UnsupportedFormatCode(FaultBenchError):
    """SEG-Y sample format code outside the supported set {1, 5}."""


class TruncatedFile(FaultBenchError):
    """Input ended before a complete header or trace could be read."""


class IrregularGeometry(FaultBenchError):
    """Trace inline/crossline numbering does not form a dense regular grid."""


class SizeMismatch(FaultBenchError):
    """Raw payload length disagrees with the declared dimensions."""


class NonFiniteSample(FaultBenchError):
    """A NaN or infinity showed up where only finite samples are allowed."""


class UnsupportedDtype(FaultBenchError):
    """NPY dtype outside the supported set."""


class UnsupportedRank(FaultBenchError):
    """NPY array rank outside {2, 3}."""


class FortranOrderUnsupported(FaultBenchError):
    """NPY payload is Fortran-ordered; only C order is accepted."""


class UnsupportedColorType(FaultBenchError):
    """PNG color type is not 8-bit grayscale or palette."""


# --- preprocessing ---

class ConstantVolume(FaultBenchError):
    """Min-max normalization is undefined when every sample is equal."""


class ZeroVariance(FaultBenchError):
    """Z-score normalization is undefined when the variance is zero."""


class IndexOutOfRange(FaultBenchError):
    """Section index outside the volume extent along the chosen axis."""


class WindowLargerThanSection(FaultBenchError):
    """No tile window fits inside the section."""


class CoverageGap(FaultBenchError):
    """Stitching found pixels covered by no patch."""


# --- metrics and losses ---

class DimensionMismatch(FaultBenchError):
    """Two arrays that must share a shape do not."""


class EmptyMask(FaultBenchError):
    """Distance computation requested against a mask with no foreground."""


# --- thresholding ---

class EmptyDataset(FaultBenchError):
    """An operation over a dataset received zero items."""


class LengthMismatch(FaultBenchError):
    """Paired lists (predictions vs. ground truths) differ in length."""


# --- synthetic fault lab ---

class SaltNoiseOverflow(FaultBenchError):
    """More noise pixels requested than background pixels available."""


class NotFoundWithinBudget(FaultBenchError):
    """Search exhausted its candidate budget without a hit."""


# --- benchmarking ---

class NoPairsFound(FaultBenchError):
    """Prediction and ground-truth directories share no filename stems."""


class AllDegenerate(FaultBenchError):
    """Every record in an aggregation was degenerate."""


class InsufficientConfigs(FaultBenchError):
    """Ranking needs at least two configurations."""


# --- CLI ---

class ConfigError(FaultBenchError):
    """Malformed pipeline configuration file."""
