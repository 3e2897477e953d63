"""Multi-index complex tensors over the gauge and spinor bundles.

A tensor's type is a :class:`TypeSignature`: one block of slot counts per
bundle, blocks in the fixed order SU3, SU2, U1, Dirac, Tangent.  Inside a
block the slots are laid out as up, down, barred-up, barred-down, and the
component array of a :class:`TensorField` follows exactly that order.

Frame changes follow the section convention ``new_i = sum_j S[j, i] old_j``,
so vector (up) components pick up ``S^-1``, covector (down) components pick
up ``S^T`` and the barred slots use the complex-conjugate matrices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ChartMismatch,
    DimensionMismatch,
    DuplicateBlock,
    FrameMismatch,
    NegativeCount,
    SignatureError,
    SingularTransition,
    SlotClassMismatch,
    SlotOutOfRange,
)

__all__ = [
    "Bundle",
    "SlotKind",
    "Slot",
    "BlockType",
    "TypeSignature",
    "TensorField",
    "Transition",
    "make_signature",
    "tensor_product",
    "contract",
    "check_contraction",
    "tau",
    "change_frame",
]


class Bundle(str, enum.Enum):
    SU3 = "SU3"
    SU2 = "SU2"
    U1 = "U1"
    DIRAC = "Dirac"
    TANGENT = "Tangent"

    @property
    def dim(self) -> int:
        return _FIBER_DIM[self]

    @property
    def order(self) -> int:
        return _BUNDLE_ORDER.index(self)

    @classmethod
    def parse(cls, name: str | Bundle) -> Bundle:
        if isinstance(name, Bundle):
            return name
        for b in cls:
            if b.value.lower() == str(name).lower():
                return b
        raise SignatureError(f"unknown bundle tag {name!r}")

    @classmethod
    def for_dim(cls, dim: int) -> Bundle:
        """The gauge bundle whose fiber has dimension ``dim`` (1, 2 or 3)."""
        try:
            return {1: cls.U1, 2: cls.SU2, 3: cls.SU3}[dim]
        except KeyError:
            raise DimensionMismatch(f"no gauge bundle of fiber dimension {dim}") from None

    def __str__(self) -> str:
        return self.value


_BUNDLE_ORDER = (Bundle.SU3, Bundle.SU2, Bundle.U1, Bundle.DIRAC, Bundle.TANGENT)
_FIBER_DIM = {Bundle.SU3: 3, Bundle.SU2: 2, Bundle.U1: 1, Bundle.DIRAC: 4, Bundle.TANGENT: 4}


class SlotKind(enum.IntEnum):
    UP = 0
    DOWN = 1
    BARRED_UP = 2
    BARRED_DOWN = 3

    @property
    def barred(self) -> bool:
        return self >= SlotKind.BARRED_UP

    @property
    def contravariant(self) -> bool:
        return self in (SlotKind.UP, SlotKind.BARRED_UP)

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")


@dataclass(frozen=True)
class Slot:
    bundle: Bundle
    kind: SlotKind

    def describe(self) -> str:
        return f"{self.kind.label} slot of the {self.bundle} block"


@dataclass(frozen=True)
class BlockType:
    """Slot counts of one bundle block."""

    bundle: Bundle
    up: int = 0
    down: int = 0
    barred_up: int = 0
    barred_down: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bundle", Bundle.parse(self.bundle))
        for name in ("up", "down", "barred_up", "barred_down"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise SignatureError(f"{name} count must be an integer, got {value!r}")
            if value < 0:
                raise NegativeCount(f"{self.bundle} block has negative {name} count {value}")
            object.__setattr__(self, name, int(value))
        if self.bundle is Bundle.TANGENT and (self.barred_up or self.barred_down):
            raise SignatureError("the tangent bundle is real and carries no barred slots")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.up, self.down, self.barred_up, self.barred_down)

    @property
    def rank(self) -> int:
        return sum(self.counts)

    def conjugate(self) -> BlockType:
        if self.bundle is Bundle.TANGENT:
            return self
        return BlockType(self.bundle, self.barred_up, self.barred_down, self.up, self.down)


@dataclass(frozen=True)
class TypeSignature:
    """Canonically ordered blocks; all-zero blocks are dropped."""

    blocks: tuple[BlockType, ...] = ()

    def block(self, bundle: Bundle | str) -> BlockType:
        bundle = Bundle.parse(bundle)
        for b in self.blocks:
            if b.bundle is bundle:
                return b
        return BlockType(bundle)

    @property
    def rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    @property
    def is_scalar(self) -> bool:
        return not self.blocks

    def slots(self) -> tuple[Slot, ...]:
        out = []
        for b in self.blocks:
            for kind, count in zip(SlotKind, b.counts):
                out.extend([Slot(b.bundle, kind)] * count)
        return tuple(out)

    def shape(self) -> tuple[int, ...]:
        return tuple(s.bundle.dim for s in self.slots())

    def with_counts(self, bundle: Bundle, counts: Sequence[int]) -> TypeSignature:
        others = [b for b in self.blocks if b.bundle is not bundle]
        return make_signature(others + [BlockType(bundle, *counts)])

    def __str__(self) -> str:
        if not self.blocks:
            return "scalar"
        return " ".join(
            f"{b.bundle}({b.up},{b.down}|{b.barred_up},{b.barred_down})" for b in self.blocks
        )


def make_signature(blocks: Iterable[BlockType | tuple]) -> TypeSignature:
    """Build a canonical signature from blocks given in any order.

    Tuples are accepted as ``(bundle, up, down, barred_up, barred_down)``.
    A bundle may appear only once.
    """
    parsed = [b if isinstance(b, BlockType) else BlockType(*b) for b in blocks]
    seen = set()
    for b in parsed:
        if b.bundle in seen:
            raise DuplicateBlock(f"bundle {b.bundle} appears more than once")
        seen.add(b.bundle)
    kept = sorted((b for b in parsed if b.rank), key=lambda b: b.bundle.order)
    return TypeSignature(tuple(kept))


@dataclass(frozen=True, eq=False)
class TensorField:
    """Components of a tensor at one sample point, in a named frame."""

    signature: TypeSignature
    components: np.ndarray
    chart: str | None = None
    frame: str | None = None

    def __post_init__(self):
        comps = np.array(self.components, dtype=complex)
        if comps.shape != self.signature.shape():
            raise DimensionMismatch(
                f"components have shape {comps.shape}, signature {self.signature} "
                f"needs {self.signature.shape()}"
            )
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    @classmethod
    def scalar(cls, value: complex, chart: str | None = None, frame: str | None = None) -> TensorField:
        return cls(TypeSignature(), np.asarray(value, dtype=complex), chart, frame)

    @classmethod
    def of(cls, blocks: Iterable[BlockType | tuple], components, chart=None, frame=None) -> TensorField:
        return cls(make_signature(blocks), components, chart, frame)

    def with_components(self, components, signature: TypeSignature | None = None,
                        frame: str | None = None) -> TensorField:
        return TensorField(signature or self.signature, components, self.chart,
                           self.frame if frame is None else frame)

    def __repr__(self) -> str:
        return (f"TensorField({self.signature}, chart={self.chart!r}, frame={self.frame!r}, "
                f"components={self.components.tolist()!r})")


def _check_same_place(a: TensorField, b: TensorField) -> None:
    if a.chart != b.chart:
        raise ChartMismatch(f"tensors live on charts {a.chart!r} and {b.chart!r}")
    if a.frame != b.frame:
        raise FrameMismatch(f"tensors are expressed in frames {a.frame!r} and {b.frame!r}")


def tensor_product(a: TensorField, b: TensorField) -> TensorField:
    _check_same_place(a, b)
    blocks = []
    for bundle in _BUNDLE_ORDER:
        ca, cb = a.signature.block(bundle).counts, b.signature.block(bundle).counts
        blocks.append(BlockType(bundle, *(x + y for x, y in zip(ca, cb))))
    sig = make_signature(blocks)

    outer = np.multiply.outer(a.components, b.components)
    a_slots, b_slots = a.signature.slots(), b.signature.slots()
    offset = len(a_slots)
    perm = []
    for slot_class in dict.fromkeys(sig.slots()):
        perm.extend(i for i, s in enumerate(a_slots) if s == slot_class)
        perm.extend(offset + i for i, s in enumerate(b_slots) if s == slot_class)
    return a.with_components(np.transpose(outer, perm), sig)


def check_contraction(sig: TypeSignature, up_slot: int, down_slot: int) -> None:
    """Raise unless ``up_slot`` and ``down_slot`` may be summed against each other.

    The first must be an upper index and the second a lower index of the same
    bundle block, and both must be barred or both unbarred.
    """
    slots = sig.slots()
    for idx in (up_slot, down_slot):
        if not 0 <= idx < len(slots):
            raise SlotOutOfRange(f"slot {idx} is out of range for {sig} ({len(slots)} slots)")
    if up_slot == down_slot:
        raise SlotClassMismatch(f"slot {up_slot} cannot be contracted with itself")
    up, down = slots[up_slot], slots[down_slot]
    pair = f"slot {up_slot} ({up.describe()}) and slot {down_slot} ({down.describe()})"
    if up.bundle is not down.bundle:
        raise SlotClassMismatch(f"{pair} belong to different bundle blocks")
    if up.kind.barred != down.kind.barred:
        raise SlotClassMismatch(f"{pair} mix barred and unbarred indices")
    if not up.kind.contravariant:
        raise SlotClassMismatch(f"{pair}: the first slot must be an upper index")
    if down.kind.contravariant:
        raise SlotClassMismatch(f"{pair}: the second slot must be a lower index")


def contract(a: TensorField, up_slot: int, down_slot: int) -> TensorField:
    check_contraction(a.signature, up_slot, down_slot)
    slot = a.signature.slots()[up_slot]
    counts = list(a.signature.block(slot.bundle).counts)
    counts[slot.kind] -= 1
    counts[slot.kind + 1] -= 1
    sig = a.signature.with_counts(slot.bundle, counts)
    return a.with_components(np.trace(a.components, axis1=up_slot, axis2=down_slot), sig)


def tau(a: TensorField) -> TensorField:
    """Complex conjugation: barred and unbarred slots trade places."""
    sig = make_signature(b.conjugate() for b in a.signature.blocks)
    perm = []
    start = 0
    for b in a.signature.blocks:
        u, d, bu, bd = b.counts
        idx = list(range(start, start + b.rank))
        if b.bundle is Bundle.TANGENT:
            perm.extend(idx)
        else:
            perm.extend(idx[u + d:] + idx[:u + d])
        start += b.rank
    return a.with_components(np.conj(np.transpose(a.components, perm)), sig)


@dataclass(frozen=True, eq=False)
class Transition:
    """Frame change at one point: ``target_i = sum_j matrix[j, i] source_j``."""

    source: str | None
    target: str | None
    matrix: np.ndarray
    bundle: Bundle
    chart: str | None = None
    _inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bundle", Bundle.parse(self.bundle))
        m = np.array(self.matrix, dtype=complex)
        n = self.bundle.dim
        if m.shape != (n, n):
            raise DimensionMismatch(f"{self.bundle} transition must be {n}x{n}, got {m.shape}")
        scale = max(np.abs(m).max(), np.finfo(float).tiny)
        if abs(np.linalg.det(m / scale)) <= 1e-12:
            raise SingularTransition(f"transition {self.source!r} -> {self.target!r} is singular")
        m.flags.writeable = False
        inv = np.linalg.inv(m)
        inv.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_inverse", inv)

    @property
    def inverse_matrix(self) -> np.ndarray:
        return self._inverse

    def inverse(self) -> Transition:
        return Transition(self.target, self.source, self._inverse, self.bundle, self.chart)


def _apply_on_axis(comps: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(m, comps, axes=([1], [axis])), 0, axis)


def change_frame(a: TensorField, s: Transition) -> TensorField:
    """Re-express ``a`` in the target frame of ``s``.

    Only the slots of ``s.bundle`` are touched; other blocks are carried
    through unchanged.
    """
    if a.frame != s.source:
        raise FrameMismatch(f"tensor is in frame {a.frame!r}, transition starts at {s.source!r}")
    if s.chart is not None and a.chart is not None and s.chart != a.chart:
        raise ChartMismatch(f"tensor lives on chart {a.chart!r}, transition on {s.chart!r}")
    per_kind = {
        SlotKind.UP: s.inverse_matrix,
        SlotKind.DOWN: s.matrix.T,
        SlotKind.BARRED_UP: s.inverse_matrix.conj(),
        SlotKind.BARRED_DOWN: s.matrix.conj().T,
    }
    comps = a.components
    for axis, slot in enumerate(a.signature.slots()):
        if slot.bundle is s.bundle:
            comps = _apply_on_axis(comps, per_kind[slot.kind], axis)
    return a.with_components(comps, frame=s.target)
