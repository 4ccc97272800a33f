"""Single-pair and family sup-norm evaluation.

Canonical evaluation rule shared by every code path that must agree
bit-for-bit: squared terms are ``(c*c)*(w*w)``, inner sums run over
cell points in ascending index order under ``math.fsum``, cell values
are ``pow(s, p/2)``, the outer sum is again ``fsum`` in canonical cell
order, and the final value ``pow(outer, 1/p)``.  ``fsum`` is correctly
rounded, so independently constructed but identical term multisets give
identical floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CapacityError, NormOverflowError, SupportError
from .families import DEFAULT_MAX_PAIRS, Family, restrict_family
from .indices import Index
from .partitions import PairPW, PartitionDescriptor, RestrictedPair
from .vectors import SparseVector
from .weights import Weight

__all__ = [
    "NormResult",
    "pair_norm",
    "family_norm",
    "member_norm_intensional",
    "term",
    "canonical_value",
    "DEFAULT_MAX_SUPPORT",
]

DEFAULT_MAX_SUPPORT = 1 << 16


def term(c: float, w: float) -> float:
    """The squared summand c²w² — the one atomic formula used everywhere."""
    return (c * c) * (w * w)


def canonical_value(cell_terms: Sequence[Sequence[float]], p: float) -> float:
    """((Σ_cells (Σ terms)^{p/2})^{1/p} with fsum at both levels."""
    hp = p / 2.0
    try:
        outer = math.fsum(pow(math.fsum(ts), hp) for ts in cell_terms)
        value = pow(outer, 1.0 / p)
    except OverflowError as exc:
        raise NormOverflowError(f"norm evaluation overflowed ({exc})") from exc
    if not math.isfinite(value):
        raise NormOverflowError(f"norm evaluation overflowed (outer sum {outer!r})")
    return value


@dataclass(frozen=True)
class NormResult:
    value: float
    argmax_member: str
    candidates_evaluated: int


def pair_norm(x: SparseVector, rp: RestrictedPair, p: float) -> float:
    """Norm of ``x`` under one restricted member.

    Every support point of ``x`` must lie in ``rp``'s support; cells not
    meeting supp(x) contribute nothing.
    """
    items = dict(x.items())
    member_support = set(rp.support)
    missing = [b for b in items if b not in member_support]
    if missing:
        raise SupportError(f"vector points {missing[:3]} outside the member's support")
    wmap = rp.weight_map()
    cell_terms = []
    for cell in rp.cells:
        ts = [term(items[b], wmap[b]) for b in cell if b in items]
        if ts:
            cell_terms.append(ts)
    if not cell_terms:
        return 0.0
    return canonical_value(cell_terms, p)


def family_norm(
    x: SparseVector,
    f: Family,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> NormResult:
    """Exact max of pair norms over the family restricted to supp(x)."""
    supp = x.support(cap=max_support)
    if not supp:
        raise SupportError("family_norm needs a vector with nonempty support")
    members = restrict_family(f, supp, max_pairs)
    best = -1.0
    best_label = ""
    for rp in members:
        v = pair_norm(x, rp, f.p)
        if v > best:
            best, best_label = v, rp.label
    return NormResult(value=best, argmax_member=best_label, candidates_evaluated=len(members))


# ---------------------------------------------------------------------------
# intensional evaluation straight from descriptors (no support expansion)

def member_norm_intensional(
    x: SparseVector,
    partition: PartitionDescriptor,
    weight: Weight,
    p: float,
    arity: int,
    expand_cap: int = DEFAULT_MAX_SUPPORT,
) -> float:
    """Pair norm from descriptors, with run-length blocks in closed form.

    A block whose running coordinate the partition does not fix and whose
    weight is constant along the run contributes K·c²·w² to one cell.  A
    block whose running coordinate is fixed splits into K cells of its
    own — valid in closed form only when nothing else meets those cells,
    which is checked structurally; on any overlap (or a weight varying
    along the run) the block is expanded, subject to ``expand_cap``.
    """
    hp = p / 2.0
    fixed = sorted(partition.fixed_coords(arity))
    fixed_set = frozenset(fixed)
    wdeps = weight.depends_on(arity)

    def key_of(idx: Index) -> tuple[int, ...]:
        return tuple(idx[q - 1] for q in fixed)

    cells: dict[tuple[int, ...], list[float]] = {}
    # (key with the running slot masked, slot position, lo, hi, K·t^{hp})
    split_blocks: list[tuple[tuple[int, ...], int, int, int, float]] = []
    expanded: list[tuple[Index, float]] = list(x.entries)

    for blk in x.blocks:
        rc = blk.running_coord
        if rc in wdeps:
            expanded.extend((b, blk.coeff) for b in _expanded_points(blk, expand_cap))
            continue
        wv = weight.value_at(blk.point_at(blk.lo))
        t = term(blk.coeff, wv)
        if rc not in fixed_set:
            cells.setdefault(key_of(blk.template), []).append(blk.size * t)
        else:
            slot = fixed.index(rc)
            masked = list(key_of(blk.template))
            masked[slot] = -1
            split_blocks.append((tuple(masked), slot, blk.lo, blk.hi, blk.size * pow(t, hp)))

    def hits_split(key: tuple[int, ...]) -> bool:
        for masked, slot, lo, hi, _ in split_blocks:
            probe = list(key)
            v = probe[slot]
            probe[slot] = -1
            if tuple(probe) == masked and lo <= v <= hi:
                return True
        return False

    # split blocks must not collide with each other either
    clash = False
    for i, (m1, s1, lo1, hi1, _) in enumerate(split_blocks):
        for m2, s2, lo2, hi2, _ in split_blocks[i + 1 :]:
            if s1 == s2 and m1 == m2 and not (hi1 < lo2 or hi2 < lo1):
                clash = True
            elif s1 != s2:
                p1 = list(m1)
                p2 = list(m2)
                if p1[s2] != -1 and p2[s1] != -1:
                    v2_in_1 = lo1 <= p2[s1] <= hi1
                    v1_in_2 = lo2 <= p1[s2] <= hi2
                    rest1 = [v for q, v in enumerate(p1) if q not in (s1, s2)]
                    rest2 = [v for q, v in enumerate(p2) if q not in (s1, s2)]
                    if v2_in_1 and v1_in_2 and rest1 == rest2:
                        clash = True

    for b, _ in expanded:
        if hits_split(key_of(b)):
            clash = True
            break

    if clash:
        # fall back: everything extensional
        expanded = list(x.entries)
        for blk in x.blocks:
            expanded.extend((b, blk.coeff) for b in _expanded_points(blk, expand_cap))
        cells = {}
        split_blocks = []
        for b, c in expanded:
            cells.setdefault(key_of(b), []).append(term(c, weight.value_at(b)))
        # re-sort within cells by point for determinism
        outer_terms = [pow(math.fsum(ts), hp) for _, ts in sorted(cells.items())]
        return _finish(outer_terms, p)

    for b, c in expanded:
        cells.setdefault(key_of(b), []).append(term(c, weight.value_at(b)))

    outer_terms = [pow(math.fsum(ts), hp) for _, ts in sorted(cells.items())]
    outer_terms.extend(contrib for *_ , contrib in split_blocks)
    return _finish(outer_terms, p)


def _finish(outer_terms: list[float], p: float) -> float:
    if not outer_terms:
        return 0.0
    value = pow(math.fsum(outer_terms), 1.0 / p)
    if not math.isfinite(value):
        raise NormOverflowError("norm evaluation overflowed")
    return value


def _expanded_points(blk, cap: int):
    if blk.size > cap:
        raise CapacityError(
            f"block of {blk.size} points cannot be evaluated in closed form "
            f"here and exceeds the expansion cap {cap}"
        )
    return blk.points()
