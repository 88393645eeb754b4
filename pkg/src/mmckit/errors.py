"""Exception types raised by the toolkit.

Everything derives from MmcError so callers (the CLI in particular) can
catch one base class and report the concrete failure by class name.
"""


class MmcError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------- numerics
class NonSymmetric(MmcError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class NonFinite(MmcError):
    """Input contains NaN or infinity."""


# ---------------------------------------------------------------- data / io
class Io(MmcError):
    """File could not be read or written."""


class Parse(MmcError):
    """A cell failed to parse; coordinates are 1-based file positions."""

    def __init__(self, row, col, detail=""):
        self.row = row
        self.col = col
        msg = f"row {row}, column {col}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class EmptyDataset(MmcError):
    """No samples survived loading."""


class SingleClass(MmcError):
    """Fewer than two distinct labels present."""


class BadMagic(MmcError):
    """IDX file does not start with the expected magic number."""


class CountMismatch(MmcError):
    """Image and label files disagree on the sample count."""


class Truncated(MmcError):
    """IDX payload is shorter than its header promises."""


class InsufficientSamples(MmcError):
    """A class is too small for the requested split."""

    def __init__(self, label, detail=""):
        self.label = label
        msg = f"class {label}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


# ---------------------------------------------------------------- fitting
class NegativeGamma(MmcError):
    """Within-class weight must be nonnegative."""


class RankDeficient(MmcError):
    """Decomposition produced non-finite output."""


class InsufficientPositiveSpectrum(MmcError):
    """Fewer strictly positive eigenvalues than requested directions."""


class ShapeMismatch(MmcError):
    """Operand dimensions are inconsistent."""


class TTooLarge(MmcError):
    """More anchor samples requested than samples available."""


class RTooLarge(MmcError):
    """Target dimension exceeds what the input supports."""


class DimensionCollapse(MmcError):
    """A layer would need more output dimensions than its input has."""


# ---------------------------------------------------------------- filter nets
class BadKernel(MmcError):
    """Patch kernel size must be a positive integer."""


class TooManyFilters(MmcError):
    """More filters requested than the patch dimension supports."""


class BlockTooLarge(MmcError):
    """Histogram block exceeds the hash map extent."""


# ---------------------------------------------------------------- evaluation
class KTooLarge(MmcError):
    """More neighbours requested than training points available."""


class LengthMismatch(MmcError):
    """Prediction and truth vectors differ in length."""


# ---------------------------------------------------------------- cli
class ConfigInvalid(MmcError):
    """Experiment configuration is missing or malformed."""

    def __init__(self, field, detail=""):
        self.field = field
        msg = f"field {field!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
