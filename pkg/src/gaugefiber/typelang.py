"""Tuple notation for tensor types and the catalogue of basic fields.

A type is written as ``(a,b|c,d|...)``: one ``up,down`` pair per slot group.
Every gauge or Dirac bundle contributes two pairs (unbarred, then barred)
and the tangent bundle one.  Which bundles the pairs belong to is not
recoverable from the text, so parsing and printing always take a context.

    SIG  := '(' PAIR ('|' PAIR)* ')'
    PAIR := INT ',' INT
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import BlockCountError, NegativeCount, SignatureError, SignatureSyntaxError
from .tensor import BlockType, Bundle, TypeSignature, check_contraction, make_signature  # noqa: F401

__all__ = [
    "CONTEXTS",
    "FieldRegistryEntry",
    "TypeRow",
    "builtin_registry",
    "bundle_signature",
    "check_contraction",
    "format_signature",
    "lookup",
    "parse_signature",
    "registry_records",
]

CONTEXTS: dict[str, tuple[Bundle, ...]] = {
    "u1": (Bundle.U1,),
    "su2": (Bundle.SU2,),
    "su3": (Bundle.SU3,),
    "ew": (Bundle.SU2, Bundle.U1),
    "lepton": (Bundle.SU2, Bundle.U1),
    "color": (Bundle.SU3, Bundle.SU2, Bundle.U1),
    "quark": (Bundle.SU3, Bundle.SU2, Bundle.U1),
    "spin": (Bundle.DIRAC, Bundle.TANGENT),
    "tangent": (Bundle.TANGENT,),
}

_FULL_LAYOUT = {
    "lepton": (Bundle.SU2, Bundle.U1, Bundle.DIRAC, Bundle.TANGENT),
    "quark": (Bundle.SU3, Bundle.SU2, Bundle.U1, Bundle.DIRAC, Bundle.TANGENT),
}


def _pairs_per_block(bundle: Bundle) -> int:
    return 1 if bundle is Bundle.TANGENT else 2


def _layout(context: str) -> tuple[Bundle, ...]:
    try:
        return CONTEXTS[context]
    except KeyError:
        raise SignatureError(
            f"unknown context {context!r}; expected one of {', '.join(sorted(CONTEXTS))}"
        ) from None


def _blocks_from_pairs(layout: Sequence[Bundle], pairs: Sequence[tuple[int, int]],
                      allow_prefix: bool = False) -> TypeSignature:
    """Assign count pairs to the blocks of ``layout`` in order.

    With ``allow_prefix`` the pairs may stop after any whole block; the
    blocks left out are zero.
    """
    boundaries = [0]
    for b in layout:
        boundaries.append(boundaries[-1] + _pairs_per_block(b))
    allowed = boundaries[1:] if allow_prefix else boundaries[-1:]
    if len(pairs) not in allowed:
        raise BlockCountError(
            f"expected {' or '.join(map(str, allowed))} pairs for this layout, got {len(pairs)}")
    blocks = []
    it = iter(pairs)
    for bundle in layout[:boundaries.index(len(pairs))]:
        counts = list(next(it))
        if _pairs_per_block(bundle) == 2:
            counts += list(next(it))
        for c in counts:
            if c < 0:
                raise NegativeCount(f"negative count {c} in the {bundle} block")
        blocks.append(BlockType(bundle, *counts))
    return make_signature(blocks)


def _tokens(text: str):
    """Yield ``(position, token)``; integers as int, punctuation as str, then ``None``."""
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
        elif ch in "0123456789":
            end = pos
            while end < len(text) and text[end] in "0123456789":
                end += 1
            yield pos, int(text[pos:end])
            pos = end
        else:
            yield pos, ch
            pos += 1
    yield len(text), None


def parse_signature(text: str, context: str) -> TypeSignature:
    """Parse ``(a,b|c,d|...)`` against the bundle layout named by ``context``.

    A tuple that stops after a whole block leaves the remaining blocks zero,
    so ``(0,1|0,1)`` in the ``ew`` context is the SU2 part of
    ``(0,1|0,1|0,0|0,0)``.
    """
    layout = _layout(context)
    toks = _tokens(text)
    pos, tok = next(toks)

    def expect(symbol: str):
        nonlocal pos, tok
        if tok != symbol:
            found = "end of input" if tok is None else repr(str(tok))
            raise SignatureSyntaxError(f"expected {symbol!r}, found {found}", pos)
        pos, tok = next(toks)

    def integer() -> int:
        nonlocal pos, tok
        if not isinstance(tok, int):
            found = "end of input" if tok is None else repr(str(tok))
            raise SignatureSyntaxError(f"expected an integer, found {found}", pos)
        value = tok
        pos, tok = next(toks)
        return value

    expect("(")
    pairs = []
    while True:
        a = integer()
        expect(",")
        pairs.append((a, integer()))
        if tok == "|":
            pos, tok = next(toks)
            continue
        expect(")")
        break
    if tok is not None:
        raise SignatureSyntaxError(f"unexpected {str(tok)!r} after the closing parenthesis", pos)
    if not 1 <= len(pairs) <= 6:
        raise BlockCountError(f"a signature has 1 to 6 pairs, got {len(pairs)}")
    return _blocks_from_pairs(layout, pairs, allow_prefix=True)


def format_signature(sig: TypeSignature, context: str) -> str:
    layout = _layout(context)
    stray = [b.bundle for b in sig.blocks if b.bundle not in layout]
    if stray:
        raise SignatureError(f"context {context!r} has no slot group for {', '.join(map(str, stray))}")
    pairs = []
    for bundle in layout:
        b = sig.block(bundle)
        pairs.append(f"{b.up},{b.down}")
        if _pairs_per_block(bundle) == 2:
            pairs.append(f"{b.barred_up},{b.barred_down}")
    return "(" + "|".join(pairs) + ")"


def bundle_signature(kind: str, counts: Sequence[tuple[int, int]]) -> TypeSignature:
    """Full type of a lepton or quark field from its ordered count pairs.

    Leptons take 7 pairs: SU2 (2), U1 (2), Dirac (2), tangent (1).  Quarks
    prepend the two SU3 pairs for 9 in total.
    """
    try:
        layout = _FULL_LAYOUT[kind]
    except KeyError:
        raise SignatureError(f"kind must be 'lepton' or 'quark', got {kind!r}") from None
    return _blocks_from_pairs(layout, [tuple(p) for p in counts])


@dataclass(frozen=True)
class TypeRow:
    context: str
    text: str

    @property
    def signature(self) -> TypeSignature:
        return parse_signature(self.text, self.context)


@dataclass(frozen=True)
class FieldRegistryEntry:
    symbol: str
    display: str
    name: str
    table: str
    rows: tuple[TypeRow, ...]

    @property
    def signature(self) -> TypeSignature:
        """The gauge-bundle type; for spin-only fields the spin type."""
        return self.rows[-1].signature


def _entry(symbol, display, name, table, *rows) -> FieldRegistryEntry:
    return FieldRegistryEntry(symbol, display, name, table, tuple(TypeRow(*r) for r in rows))


_SPIN_ZERO = ("spin", "(0,0|0,0|0,0)")

_REGISTRY: tuple[FieldRegistryEntry, ...] = (
    _entry("g", "g", "Metric tensor", "spin", ("spin", "(0,0|0,0|0,2)")),
    _entry("d", "d", "Skew-symmetric metric tensor", "spin", ("spin", "(0,2|0,0|0,0)")),
    _entry("H", "H", "Chirality operator", "spin", ("spin", "(1,1|0,0|0,0)")),
    _entry("D", "D", "Dirac form", "spin", ("spin", "(0,1|0,1|0,0)")),
    _entry("gamma", "γ", "Dirac gamma-field", "spin", ("spin", "(1,1|0,0|1,0)")),
    _entry("D1", "D́", "Hermitian metric tensor", "electro-weak",
           _SPIN_ZERO, ("ew", "(0,0|0,0|0,1|0,1)")),
    _entry("D2", "D̋", "Hermitian metric tensor", "electro-weak",
           _SPIN_ZERO, ("ew", "(0,1|0,1|0,0|0,0)")),
    _entry("d2", "d̋", "Skew-symmetric metric tensor", "electro-weak",
           _SPIN_ZERO, ("ew", "(0,2|0,0|0,0|0,0)")),
    _entry("D1", "D́", "Hermitian metric tensor", "color",
           _SPIN_ZERO, ("color", "(0,0|0,0|0,0|0,0|0,1|0,1)")),
    _entry("D2", "D̋", "Hermitian metric tensor", "color",
           _SPIN_ZERO, ("color", "(0,0|0,0|0,1|0,1|0,0|0,0)")),
    _entry("d2", "d̋", "Skew-symmetric metric tensor", "color",
           _SPIN_ZERO, ("color", "(0,0|0,0|0,2|0,0|0,0|0,0)")),
    _entry("D3", "D̏", "Hermitian metric tensor", "color",
           _SPIN_ZERO, ("color", "(0,1|0,1|0,0|0,0|0,0|0,0)")),
    _entry("d3", "d̏", "Completely skew-symmetric tensor", "color",
           _SPIN_ZERO, ("color", "(0,3|0,0|0,0|0,0|0,0|0,0)")),
)


def builtin_registry() -> tuple[FieldRegistryEntry, ...]:
    return _REGISTRY


def lookup(symbol: str, table: str | None = None) -> list[FieldRegistryEntry]:
    """Entries whose symbol or display name matches; empty when unknown."""
    return [e for e in _REGISTRY
            if symbol in (e.symbol, e.display) and (table is None or e.table == table)]


def registry_records() -> list[dict]:
    return [
        {
            "symbol": e.symbol,
            "display": e.display,
            "name": e.name,
            "table": e.table,
            "types": [{"context": r.context, "type": r.text} for r in e.rows],
        }
        for e in _REGISTRY
    ]


def registry_json() -> str:
    return json.dumps(registry_records(), indent=2, ensure_ascii=True, sort_keys=True) + "\n"
