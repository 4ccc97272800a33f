"""Families of (partition, weight) members and their finite restrictions.

A family is an exponent p > 2 together with a member source: an explicit
list, the subset lattice over coordinate pairs, a sum of child families,
a tensor product, or the refinement closure of an inner family.  All
norm evaluation happens on restrictions to finite supports, where every
source yields a finite, canonical, deduplicated list of
:class:`~pwnorm.partitions.RestrictedPair`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .errors import ArityError, CapacityError, SupportError, ValidationError
from .indices import Index, check_index
from .partitions import (
    Discrete,
    Indiscrete,
    PairGrouping,
    PairPW,
    PartitionDescriptor,
    RestrictedPair,
    RestrictedPartition,
    canonical_cells,
    restrict_pair,
)
from .weights import CoordinateLift, One, Product, Weight, is_one

__all__ = [
    "ExplicitMembers",
    "SubsetLattice",
    "SumMembers",
    "TensorMembers",
    "EnvelopeMembers",
    "ExtendedMembers",
    "MemberSource",
    "Family",
    "restrict_family",
    "is_admissible",
    "indiscrete_weight",
    "subset_order",
    "subset_label",
    "lattice_member_weight",
    "glue_restrictions",
    "set_partitions",
    "sum_embed",
    "sum_split_support",
    "DEFAULT_MAX_PAIRS",
]

DEFAULT_MAX_PAIRS = 10**6


@dataclass(frozen=True)
class ExplicitMembers:
    pairs: tuple[PairPW, ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ValidationError("a family needs at least one member")


@dataclass(frozen=True)
class SubsetLattice:
    """One member per I ⊆ {1..n} on arity 2n: partition fixes the pairs
    in I, weight is the product over pairs outside I of ``base`` lifted
    to that pair's first coordinate."""

    n: int
    base: Weight

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"subset lattice needs n >= 1, got {self.n}")


@dataclass(frozen=True)
class SumMembers:
    """Members of a sum family: per-child member choices glued across the
    children's copies, plus the global single-cell member whose weight at
    a point of child a's copy is outer(a) times the child's distinguished
    single-cell weight there."""

    children: tuple["Family", ...]
    outer: Weight

    def __post_init__(self) -> None:
        if not self.children:
            raise ValidationError("sum needs at least one child")
        p = self.children[0].p
        for ch in self.children:
            if ch.p != p:
                raise ValidationError("sum children must share the exponent p")
        for a in range(1, len(self.children) + 1):
            self.outer.value_at_nat(a)  # range-checked by the descriptor


@dataclass(frozen=True)
class TensorMembers:
    left: "Family"
    right: "Family"

    def __post_init__(self) -> None:
        if self.left.p != self.right.p:
            raise ValidationError("tensor factors must share the exponent p")


@dataclass(frozen=True)
class EnvelopeMembers:
    """Refinement closure of the inner family; enumerable on finite
    supports as all (partition, per-cell member choice) gluings."""

    inner: "Family"


@dataclass(frozen=True)
class ExtendedMembers:
    """A member source with finitely many extra explicit members appended."""

    base: "MemberSource"
    extra: tuple[PairPW, ...]


MemberSource = Union[
    ExplicitMembers,
    SubsetLattice,
    SumMembers,
    TensorMembers,
    EnvelopeMembers,
    ExtendedMembers,
]


@dataclass(frozen=True)
class Family:
    p: float
    arity: int
    members: MemberSource

    def __post_init__(self) -> None:
        if not (self.p > 2.0):
            raise ValidationError(f"exponent p must be > 2, got {self.p}")
        if self.arity < 1:
            raise ValidationError(f"arity must be >= 1, got {self.arity}")
        m = self.members
        if isinstance(m, SubsetLattice) and self.arity != 2 * m.n:
            raise ArityError(
                f"subset lattice over {m.n} pairs needs arity {2 * m.n}, got {self.arity}"
            )
        if isinstance(m, SumMembers):
            want = 1 + max(ch.arity for ch in m.children)
            if self.arity != want:
                raise ArityError(f"sum of these children needs arity {want}")
        if isinstance(m, TensorMembers):
            want = m.left.arity + m.right.arity
            if self.arity != want:
                raise ArityError(f"tensor of these factors needs arity {want}")
        if isinstance(m, EnvelopeMembers) and m.inner.arity != self.arity:
            raise ArityError("envelope closure keeps the inner arity")


# ---------------------------------------------------------------------------
# subset-lattice plumbing

def subset_order(n: int) -> list[tuple[int, ...]]:
    """All I ⊆ {1..n} sorted by (|I|, lexicographic) — the canonical
    member order used in reports."""
    out: list[tuple[int, ...]] = []
    for size in range(n + 1):
        out.extend(itertools.combinations(range(1, n + 1), size))
    return out


def subset_label(I: Sequence[int]) -> str:
    return "I={" + ",".join(str(k) for k in sorted(I)) + "}"


def lattice_member_weight(n: int, I: Sequence[int], base: Weight) -> Weight:
    outside = [k for k in range(1, n + 1) if k not in set(I)]
    if not outside:
        return One()
    return Product(tuple(CoordinateLift((2 * k - 1,), base) for k in outside))


def _lattice_pairs(src: SubsetLattice) -> list[PairPW]:
    return [
        PairPW(
            partition=PairGrouping(frozenset(I)),
            weight=lattice_member_weight(src.n, I, src.base),
            label=subset_label(I),
        )
        for I in subset_order(src.n)
    ]


# ---------------------------------------------------------------------------
# sum plumbing

def sum_embed(child_no: int, pt: Index, arity: int) -> Index:
    """Embed a child point into the sum's base set: child number first,
    then the child's coordinates, then padding 1s up to the sum arity."""
    out = (child_no,) + tuple(pt)
    return out + (1,) * (arity - len(out))


def sum_split_support(
    members: SumMembers, arity: int, support: Sequence[Index]
) -> dict[int, list[Index]]:
    """Group support points by child number and strip the embedding."""
    children = members.children
    by_child: dict[int, list[Index]] = {}
    for b in support:
        a = b[0]
        if not (1 <= a <= len(children)):
            raise SupportError(f"point {b}: child number {a} outside 1..{len(children)}")
        ch = children[a - 1]
        rest = b[1:]
        if any(c != 1 for c in rest[ch.arity :]):
            raise SupportError(f"point {b}: padding beyond child arity {ch.arity} must be 1")
        by_child.setdefault(a, []).append(rest[: ch.arity])
    return by_child


class _SumIndiscreteWeight(Weight):
    """Weight of the sum's single-cell member: outer(a)·w^{a,()}(child point)."""

    def __init__(self, members: SumMembers, arity: int):
        self._members = members
        self._arity = arity
        self._child_ind = tuple(indiscrete_weight(ch) for ch in members.children)

    def value_at(self, idx: Index) -> float:
        a = idx[0]
        if not (1 <= a <= len(self._members.children)):
            raise SupportError(f"child number {a} outside the sum")
        ch = self._members.children[a - 1]
        return self._members.outer.value_at_nat(a) * self._child_ind[a - 1].value_at(
            idx[1 : 1 + ch.arity]
        )

    def depends_on(self, arity: int) -> frozenset[int]:
        return frozenset(range(1, arity + 1))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, _SumIndiscreteWeight)
            and other._members == self._members
            and other._arity == self._arity
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._members, self._arity))


def _restrict_sum(
    family: Family, src: SumMembers, support: list[Index], max_pairs: int
) -> list[RestrictedPair]:
    by_child = sum_split_support(src, family.arity, support)
    touched = sorted(by_child)
    per_child: dict[int, list[RestrictedPair]] = {}
    count = 1
    for a in touched:
        per_child[a] = restrict_family(src.children[a - 1], by_child[a], max_pairs)
        count *= len(per_child[a])
        if count > max_pairs:
            raise CapacityError(
                f"sum restriction would exceed {max_pairs} member combinations"
            )

    out: list[RestrictedPair] = []
    for combo in itertools.product(*(per_child[a] for a in touched)):
        cells: list[tuple[Index, ...]] = []
        wmap: dict[Index, float] = {}
        for a, rp in zip(touched, combo):
            for cell in rp.cells:
                cells.append(tuple(sum_embed(a, b, family.arity) for b in cell))
            for b, w in zip(rp.support, rp.weight_values):
                wmap[sum_embed(a, b, family.arity)] = w
        pts = tuple(sorted(support))
        out.append(
            RestrictedPair(
                support=pts,
                cells=canonical_cells(cells),
                weight_values=tuple(wmap[b] for b in pts),
                label="prod(" + ",".join(f"{a}:{rp.label}" for a, rp in zip(touched, combo)) + ")",
            )
        )

    ind = _SumIndiscreteWeight(src, family.arity)
    pts = tuple(sorted(support))
    out.append(
        RestrictedPair(
            support=pts,
            cells=(pts,),
            weight_values=tuple(ind.value_at(b) for b in pts),
            label="()",
        )
    )
    return out


# ---------------------------------------------------------------------------
# tensor plumbing

def _restrict_tensor(
    family: Family, src: TensorMembers, support: list[Index], max_pairs: int
) -> list[RestrictedPair]:
    la = src.left.arity
    lsupp = sorted({b[:la] for b in support})
    rsupp = sorted({b[la:] for b in support})
    lefts = restrict_family(src.left, lsupp, max_pairs)
    rights = restrict_family(src.right, rsupp, max_pairs)
    if len(lefts) * len(rights) > max_pairs:
        raise CapacityError(
            f"tensor restriction would exceed {max_pairs} member combinations"
        )
    pts = tuple(sorted(support))
    out: list[RestrictedPair] = []
    for lm, rm in itertools.product(lefts, rights):
        lcell = lm.cell_of()
        rcell = rm.cell_of()
        lw = lm.weight_map()
        rw = rm.weight_map()
        groups: dict[tuple[int, int], list[Index]] = {}
        for b in pts:
            groups.setdefault((lcell[b[:la]], rcell[b[la:]]), []).append(b)
        out.append(
            RestrictedPair(
                support=pts,
                cells=canonical_cells(list(groups.values())),
                weight_values=tuple(lw[b[:la]] * rw[b[la:]] for b in pts),
                label=f"({lm.label})x({rm.label})",
            )
        )
    return out


# ---------------------------------------------------------------------------
# envelope (refinement-closure) plumbing

def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions, by restricted growth: cell order is by least
    (i.e. first-seen) element."""
    items = list(items)
    if not items:
        yield []
        return

    def rec(i: int, cells: list[list]):
        if i == len(items):
            yield [list(c) for c in cells]
            return
        for c in cells:
            c.append(items[i])
            yield from rec(i + 1, cells)
            c.pop()
        cells.append([items[i]])
        yield from rec(i + 1, cells)
        cells.pop()

    yield from rec(0, [])


def glue_restrictions(
    support: Sequence[Index], parts: Sequence[RestrictedPair], label: str = ""
) -> RestrictedPair:
    """Combine member restrictions on disjoint cells into one pair."""
    cells: list[tuple[Index, ...]] = []
    wmap: dict[Index, float] = {}
    for rp in parts:
        cells.extend(rp.cells)
        wmap.update(rp.weight_map())
    pts = tuple(sorted(support))
    return RestrictedPair(
        support=pts,
        cells=canonical_cells(cells),
        weight_values=tuple(wmap[b] for b in pts),
        label=label,
    )


def _restrict_envelope(
    family: Family, src: EnvelopeMembers, support: list[Index], max_pairs: int
) -> list[RestrictedPair]:
    inner = restrict_family(src.inner, support, max_pairs)
    pts = sorted(support)
    out: list[RestrictedPair] = []
    total = 0
    for cells in set_partitions(pts):
        # Per cell, member choices matter only through their restriction
        # to the cell; dedup before taking the product.
        per_cell: list[list[tuple[RestrictedPair, str]]] = []
        for q in cells:
            seen: dict[tuple, tuple[RestrictedPair, str]] = {}
            for rp in inner:
                sub = rp.restrict_to(q)
                seen.setdefault(sub.canonical_key(), (sub, rp.label))
            per_cell.append(list(seen.values()))
        combos = 1
        for choices in per_cell:
            combos *= len(choices)
        total += combos
        if total > max_pairs:
            raise CapacityError(
                f"envelope restriction would exceed {max_pairs} refinements"
            )
        for picks in itertools.product(*per_cell):
            lbl = "ref(" + ";".join(
                "{" + ",".join(str(b) for b in q) + "}:" + name
                for q, (_, name) in zip(cells, picks)
            ) + ")"
            out.append(glue_restrictions(pts, [sub for sub, _ in picks], lbl))
    return out


# ---------------------------------------------------------------------------
# restriction dispatch

def _dedup(pairs: Sequence[RestrictedPair]) -> list[RestrictedPair]:
    seen: dict[tuple, RestrictedPair] = {}
    for rp in pairs:
        seen.setdefault(rp.canonical_key(), rp)
    return list(seen.values())


def restrict_family(
    family: Family, support: Sequence[Index], max_pairs: int = DEFAULT_MAX_PAIRS
) -> list[RestrictedPair]:
    """All distinct member restrictions to the support, in canonical
    member order with first-occurrence labels kept.

    Raises :class:`CapacityError` when the enumeration would exceed
    ``max_pairs`` — never silently truncates.
    """
    pts = sorted(set(support))
    if not pts:
        raise ValidationError("support must be nonempty")
    for b in pts:
        check_index(b, family.arity)

    src = family.members
    if isinstance(src, ExplicitMembers):
        raw = [restrict_pair(m, pts, family.arity) for m in src.pairs]
    elif isinstance(src, SubsetLattice):
        raw = [restrict_pair(m, pts, family.arity) for m in _lattice_pairs(src)]
    elif isinstance(src, SumMembers):
        raw = _restrict_sum(family, src, pts, max_pairs)
    elif isinstance(src, TensorMembers):
        raw = _restrict_tensor(family, src, pts, max_pairs)
    elif isinstance(src, EnvelopeMembers):
        raw = _restrict_envelope(family, src, pts, max_pairs)
    elif isinstance(src, ExtendedMembers):
        raw = restrict_family(
            Family(family.p, family.arity, src.base), pts, max_pairs
        ) + [restrict_pair(m, pts, family.arity) for m in src.extra]
    else:  # pragma: no cover
        raise ValidationError(f"unknown member source {type(src).__name__}")

    if len(raw) > max_pairs:
        raise CapacityError(f"{len(raw)} restricted pairs exceed the cap {max_pairs}")
    return _dedup(raw)


# ---------------------------------------------------------------------------
# admissibility

def _explicit_has_discrete_one(pairs: Sequence[PairPW], arity: int) -> bool:
    for m in pairs:
        part = m.partition
        if isinstance(part, PartitionDescriptor):
            if part.fixed_coords(arity) == frozenset(range(1, arity + 1)):
                if isinstance(m.weight, Weight) and is_one(m.weight):
                    return True
    return False


def _explicit_has_indiscrete(pairs: Sequence[PairPW], arity: int) -> bool:
    for m in pairs:
        part = m.partition
        if isinstance(part, PartitionDescriptor):
            if part.fixed_coords(arity) == frozenset():
                return True
    return False


def is_admissible(family: Family) -> bool:
    """True when the family contains the discrete partition with weight 1
    and the indiscrete partition with some weight."""
    src = family.members
    if isinstance(src, ExplicitMembers):
        return _explicit_has_discrete_one(src.pairs, family.arity) and _explicit_has_indiscrete(
            src.pairs, family.arity
        )
    if isinstance(src, SubsetLattice):
        return True
    if isinstance(src, SumMembers):
        return all(is_admissible(ch) for ch in src.children)
    if isinstance(src, TensorMembers):
        return is_admissible(src.left) and is_admissible(src.right)
    if isinstance(src, EnvelopeMembers):
        return is_admissible(src.inner)
    if isinstance(src, ExtendedMembers):
        if is_admissible(Family(family.p, family.arity, src.base)):
            return True
        # extras may supply the missing members
        all_pairs = list(src.extra) + list(_explicit_pairs_or_empty(src.base))
        return _explicit_has_discrete_one(all_pairs, family.arity) and _explicit_has_indiscrete(
            all_pairs, family.arity
        )
    raise ValidationError(f"unknown member source {type(src).__name__}")  # pragma: no cover


def _explicit_pairs_or_empty(src: MemberSource) -> tuple[PairPW, ...]:
    if isinstance(src, ExplicitMembers):
        return src.pairs
    if isinstance(src, ExtendedMembers):
        return _explicit_pairs_or_empty(src.base) + src.extra
    return ()


def indiscrete_weight(family: Family) -> Weight:
    """The distinguished single-cell member's weight descriptor."""
    src = family.members
    if isinstance(src, ExtendedMembers):
        try:
            return indiscrete_weight(Family(family.p, family.arity, src.base))
        except ValidationError:
            src = ExplicitMembers(src.extra)
    if isinstance(src, ExplicitMembers):
        for m in src.pairs:
            part = m.partition
            if isinstance(part, PartitionDescriptor) and part.fixed_coords(family.arity) == frozenset():
                if not isinstance(m.weight, Weight):
                    raise ValidationError(
                        "indiscrete member needs a weight descriptor, not point values"
                    )
                return m.weight
        raise ValidationError("family has no indiscrete member")
    if isinstance(src, SubsetLattice):
        return lattice_member_weight(src.n, (), src.base)
    if isinstance(src, SumMembers):
        return _SumIndiscreteWeight(src, 1 + max(ch.arity for ch in src.children))
    if isinstance(src, TensorMembers):
        lw = indiscrete_weight(src.left)
        rw = indiscrete_weight(src.right)
        la = src.left.arity
        return Product(
            (
                CoordinateLift(tuple(range(1, la + 1)), lw),
                CoordinateLift(tuple(range(la + 1, la + src.right.arity + 1)), rw),
            )
        )
    if isinstance(src, EnvelopeMembers):
        return indiscrete_weight(src.inner)
    raise ValidationError(f"unknown member source {type(src).__name__}")  # pragma: no cover
