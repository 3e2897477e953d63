"""Hermitian and skew-symmetric metric tensors of the U(1), SU(2), SU(3) bundles.

A :class:`HermitianMetric` holds ``D[i, j]`` with the first index unbarred
and the second barred; the pairing is ``D(X, Y) = sum D[i, j] conj(X[j]) Y[i]``.
A :class:`SkewMetric` stores only its one independent component, ``d_12`` in
dimension 2 and ``d_123`` in dimension 3 (or the upper-index versions for the
inverse tensor).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameMismatch,
    NotHermitian,
    NotPositiveDefinite,
    SlotClassMismatch,
    SlotOutOfRange,
    UnsupportedBlock,
    ZeroSkew,
)
from .tensor import (
    BlockType,
    Bundle,
    SlotKind,
    TensorField,
    Transition,
    change_frame,
    make_signature,
)

DEFAULT_TOL = 1e-9

# Hermiticity is checked relative to the largest entry before symmetrizing.
_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianMetric:
    components: np.ndarray

    def __post_init__(self):
        m = np.array(self.components, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (1, 2, 3):
            raise DimensionMismatch(f"Hermitian metric must be 1x1, 2x2 or 3x3, got {m.shape}")
        scale = np.abs(m).max()
        if np.abs(m - m.conj().T).max() > _HERMITIAN_TOL * scale:
            raise NotHermitian("metric components are not conjugate-symmetric")
        m = (m + m.conj().T) / 2
        for k in range(1, m.shape[0] + 1):
            if not np.linalg.det(m[:k, :k]).real > 0:
                raise NotPositiveDefinite(f"leading principal minor of order {k} is not positive")
        m.flags.writeable = False
        object.__setattr__(self, "components", m)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    @property
    def bundle(self) -> Bundle:
        return Bundle.for_dim(self.dim)

    def as_tensor(self, chart: str | None = None, frame: str | None = None) -> TensorField:
        return TensorField.of([(self.bundle, 0, 1, 0, 1)], self.components, chart, frame)

    @classmethod
    def from_tensor(cls, t: TensorField) -> HermitianMetric:
        blocks = t.signature.blocks
        if len(blocks) != 1 or blocks[0].counts != (0, 1, 0, 1) or blocks[0].bundle.dim > 3:
            raise DimensionMismatch(f"tensor of type {t.signature} is not a Hermitian metric")
        return cls(t.components)


@dataclass(frozen=True)
class SkewMetric:
    """Totally antisymmetric 2- or 3-form given by its single free component."""

    dim: int
    scalar: complex
    contravariant: bool = False

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionMismatch(f"skew metric dimension must be 2 or 3, got {self.dim}")
        object.__setattr__(self, "scalar", complex(self.scalar))
        if self.scalar == 0:
            raise ZeroSkew("skew-symmetric metric must be nonzero")

    @property
    def bundle(self) -> Bundle:
        return Bundle.for_dim(self.dim)

    def as_tensor(self, chart: str | None = None, frame: str | None = None) -> TensorField:
        counts = (self.dim, 0) if self.contravariant else (0, self.dim)
        return TensorField.of([(self.bundle, *counts, 0, 0)], skew_expand(self), chart, frame)

    @classmethod
    def from_tensor(cls, t: TensorField) -> SkewMetric:
        blocks = t.signature.blocks
        if len(blocks) != 1 or blocks[0].bundle.dim not in (2, 3):
            raise DimensionMismatch(f"tensor of type {t.signature} is not a skew metric")
        dim = blocks[0].bundle.dim
        if blocks[0].counts == (0, dim, 0, 0):
            contravariant = False
        elif blocks[0].counts == (dim, 0, 0, 0):
            contravariant = True
        else:
            raise DimensionMismatch(f"tensor of type {t.signature} is not a skew metric")
        return cls(dim, t.components[tuple(range(dim))], contravariant)


def _permutation_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def skew_expand(d: SkewMetric) -> np.ndarray:
    """Full antisymmetric component array of ``d``."""
    out = np.zeros((d.dim,) * d.dim, dtype=complex)
    for perm in itertools.permutations(range(d.dim)):
        out[perm] = _permutation_sign(perm) * d.scalar
    return out


def skew_inverse(d: SkewMetric) -> SkewMetric:
    """The dual form with the opposite variance.

    In dimension 2 the two matrices are mutually inverse; in dimension 3 the
    free components multiply to one.
    """
    if d.scalar == 0:
        raise ZeroSkew("cannot invert a zero skew metric")
    if d.dim == 2:
        # [[0, s], [-s, 0]]^-1 == [[0, -1/s], [1/s, 0]]
        return SkewMetric(2, -1 / d.scalar, not d.contravariant)
    return SkewMetric(3, 1 / d.scalar, not d.contravariant)


def inverse_products(d: SkewMetric) -> tuple[np.ndarray, np.ndarray]:
    """``(inv . d, d . inv)`` contracted over all but one index.

    For a 3-form the double contraction is divided by 2 so both products
    equal the identity when ``d`` and its inverse are dual.
    """
    lo = skew_expand(d)
    hi = skew_expand(skew_inverse(d))
    if d.contravariant:
        lo, hi = hi, lo
    if d.dim == 2:
        return hi @ lo, lo @ hi
    left = np.einsum("ijk,jkl->il", hi, lo) / 2
    right = np.einsum("ijk,jkl->il", lo, hi) / 2
    return left, right


def _covariant(d: SkewMetric) -> SkewMetric:
    return skew_inverse(d) if d.contravariant else d


def _check_dims(D: HermitianMetric, d: SkewMetric | None) -> None:
    if d is not None and d.dim != D.dim:
        raise DimensionMismatch(f"Hermitian metric has dimension {D.dim}, skew metric {d.dim}")


def hermitian_pairing(D: HermitianMetric, x: TensorField, y: TensorField) -> complex:
    """``D(X, Y) = sum_ij D[i, j] conj(X[j]) Y[i]`` for vectors ``x`` and ``y``."""
    if x.frame != y.frame:
        raise FrameMismatch(f"vectors are in frames {x.frame!r} and {y.frame!r}")
    expected = make_signature([(D.bundle, 1, 0, 0, 0)])
    for v in (x, y):
        if v.signature != expected:
            raise DimensionMismatch(f"expected a {D.bundle} vector, got type {v.signature}")
    return complex(y.components @ D.components @ x.components.conj())


def raise_hermitian(D: HermitianMetric, d: SkewMetric) -> np.ndarray:
    """``D^{ij} = sum_pq d^{ip} conj(d^{jq}) D[p, q]`` for the SU(2) metric."""
    if D.dim != 2:
        raise DimensionMismatch("index raising of the Hermitian metric is defined in dimension 2")
    _check_dims(D, d)
    up = skew_expand(skew_inverse(_covariant(d)))
    return np.einsum("ip,jq,pq->ij", up, up.conj(), D.components)


@dataclass(frozen=True)
class ConcordanceResult:
    concordant: bool
    residual: float
    threshold: float

    def __bool__(self) -> bool:
        return self.concordant


def is_concordant(D: HermitianMetric, d: SkewMetric, tol: float = DEFAULT_TOL) -> ConcordanceResult:
    """Test whether the skew metric is compatible with the Hermitian one.

    Dimension 2: the raised metric must be inverse to ``D`` on both sides;
    the residual is the largest deviation from the identity.  Dimension 3:
    the contraction of the inverse 3-form with three copies of ``D`` must
    equal the conjugate 3-form; the residual is the largest entrywise gap
    and the threshold is ``tol`` times the largest entry compared.
    """
    if D.dim not in (2, 3):
        raise DimensionMismatch("concordance is defined for dimensions 2 and 3")
    _check_dims(D, d)
    d = _covariant(d)
    Dm = D.components
    if D.dim == 2:
        up = raise_hermitian(D, d)
        eye = np.eye(2)
        residual = max(np.abs(up @ Dm.T - eye).max(), np.abs(Dm.T @ up - eye).max())
        threshold = tol
    else:
        b = skew_expand(skew_inverse(d))
        lhs = np.einsum("ijk,ia,jb,kc->abc", b, Dm, Dm, Dm)
        rhs = skew_expand(d).conj()
        residual = np.abs(lhs - rhs).max()
        threshold = tol * max(np.abs(lhs).max(), np.abs(rhs).max())
    residual = float(residual)
    return ConcordanceResult(bool(residual <= threshold), residual, float(threshold))


def concordance_residual_2d_alt(D: HermitianMetric, d: SkewMetric) -> float:
    """Largest entry of ``sum_ij d^{ij} D[i, a] D[j, b] - conj(d_ab)``.

    Diagnostic only: at the canonical pair (D = I, d_12 = 1) this is 2, not 0.
    """
    if D.dim != 2:
        raise DimensionMismatch("the two-dimensional residual needs a 2x2 metric")
    _check_dims(D, d)
    d = _covariant(d)
    up = skew_expand(skew_inverse(d))
    lhs = np.einsum("ij,ia,jb->ab", up, D.components, D.components)
    return float(np.abs(lhs - skew_expand(d).conj()).max())


@dataclass(frozen=True)
class OrthonormalityResult:
    hermitian: bool
    skew: bool | None
    hermitian_residual: float
    skew_residual: float | None

    @property
    def orthonormal(self) -> bool:
        return self.hermitian and self.skew is not False

    def __bool__(self) -> bool:
        return self.orthonormal


def is_orthonormal(D: HermitianMetric, d: SkewMetric | None = None,
                   tol: float = DEFAULT_TOL) -> OrthonormalityResult:
    """Check ``D == I`` and, when given, ``d_12 == 1`` / ``d_123 == 1``."""
    _check_dims(D, d)
    if D.dim == 1 and d is not None:
        raise DimensionMismatch("the U(1) bundle has no skew metric")
    h_res = float(np.abs(D.components - np.eye(D.dim)).max())
    s_res = None
    if d is not None:
        if d.contravariant:
            raise DimensionMismatch("orthonormality is tested on the covariant skew metric")
        s_res = abs(d.scalar - 1)
    return OrthonormalityResult(bool(h_res <= tol), None if s_res is None else bool(s_res <= tol), h_res, s_res)


def apply_skew_metric(t: TensorField, slot: int, direction: str, d: SkewMetric) -> TensorField:
    """Lower an upper SU(2) index with ``d_ij`` or raise a lower one with ``d^ij``.

    The converted index becomes the last slot of its new class in the SU(2)
    block.  Barred slots use the conjugate form.
    """
    slots = t.signature.slots()
    if not 0 <= slot < len(slots):
        raise SlotOutOfRange(f"slot {slot} is out of range for {t.signature}")
    s = slots[slot]
    if s.bundle is not Bundle.SU2:
        raise UnsupportedBlock(f"skew-metric index moves are defined on SU2 slots, not {s.bundle}")
    if d.dim != 2:
        raise DimensionMismatch("an SU2 slot needs the two-dimensional skew metric")
    if direction not in ("raise", "lower"):
        raise ValueError(f"direction must be 'raise' or 'lower', got {direction!r}")
    lowering = direction == "lower"
    if s.kind.contravariant != lowering:
        raise SlotClassMismatch(f"cannot {direction} the {s.describe()}")

    lo = _covariant(d)
    mat = skew_expand(lo) if lowering else skew_expand(skew_inverse(lo))
    if s.kind.barred:
        mat = mat.conj()
    comps = np.moveaxis(np.tensordot(mat, t.components, axes=([1], [slot])), 0, slot)

    new_kind = SlotKind(s.kind + 1 if lowering else s.kind - 1)
    counts = list(t.signature.block(Bundle.SU2).counts)
    counts[s.kind] -= 1
    counts[new_kind] += 1
    sig = t.signature.with_counts(Bundle.SU2, counts)
    # move the converted axis behind the last slot of its new class
    new_slots = sig.slots()
    target = max(i for i, x in enumerate(new_slots) if x.bundle is Bundle.SU2 and x.kind == new_kind)
    comps = np.moveaxis(comps, slot, target)
    return t.with_components(comps, sig)


def transform_hermitian(D: HermitianMetric, matrix) -> HermitianMetric:
    """Components of ``D`` in the frame reached by the transition ``matrix``."""
    s = Transition(None, None, matrix, D.bundle)
    return HermitianMetric.from_tensor(change_frame(D.as_tensor(), s))


def transform_skew(d: SkewMetric, matrix) -> SkewMetric:
    s = Transition(None, None, matrix, d.bundle)
    return SkewMetric.from_tensor(change_frame(d.as_tensor(), s))
