"""Exception hierarchy shared by every gaugefiber module."""

from __future__ import annotations


class GaugeFiberError(Exception):
    """Base class; ``code`` is a stable machine-readable tag."""

    code = "error"


# -- signatures and slots ---------------------------------------------------

class SignatureError(GaugeFiberError, ValueError):
    code = "signature"


class DuplicateBlock(SignatureError):
    code = "duplicate-block"


class NegativeCount(SignatureError):
    code = "negative-count"


class BlockCountError(SignatureError):
    code = "block-count"


class SignatureSyntaxError(SignatureError):
    code = "syntax"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SlotOutOfRange(GaugeFiberError, IndexError):
    code = "slot-out-of-range"


class SlotClassMismatch(GaugeFiberError, ValueError):
    code = "slot-class-mismatch"


class UnsupportedBlock(GaugeFiberError, ValueError):
    code = "unsupported-block"


# -- frames and charts ------------------------------------------------------

class FrameMismatch(GaugeFiberError, ValueError):
    code = "frame-mismatch"


class ChartMismatch(GaugeFiberError, ValueError):
    code = "chart-mismatch"


class SingularTransition(GaugeFiberError, ValueError):
    code = "singular-transition"


class SingularMatrix(GaugeFiberError, ValueError):
    code = "singular-matrix"


class NotSquare(GaugeFiberError, ValueError):
    code = "not-square"


class UnknownFrame(GaugeFiberError, KeyError):
    code = "unknown-frame"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown frame"


class NoOverlap(GaugeFiberError, ValueError):
    code = "no-overlap"


class AtlasError(GaugeFiberError, ValueError):
    code = "atlas"


# -- metrics ----------------------------------------------------------------

class DimensionMismatch(GaugeFiberError, ValueError):
    code = "dimension-mismatch"


class ConstructionError(GaugeFiberError, ValueError):
    code = "construction"


class NotHermitian(ConstructionError):
    code = "not-hermitian"


class NotPositiveDefinite(ConstructionError):
    code = "not-positive-definite"


class ZeroSkew(GaugeFiberError, ValueError):
    code = "zero-skew"


class NotConcordant(GaugeFiberError, ValueError):
    code = "not-concordant"

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


# -- documents --------------------------------------------------------------

class DocumentError(GaugeFiberError, ValueError):
    """Malformed input document; ``where`` is a JSON-path-like location."""

    code = "document"

    def __init__(self, message: str, where: str = "$"):
        super().__init__(f"{where}: {message}")
        self.where = where
