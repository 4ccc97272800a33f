import math

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pwnorm import (
    Constant,
    Explicit,
    Family,
    ExplicitMembers,
    Geometric,
    One,
    PowerDecay,
    SparseVector,
)
from pwnorm.partitions import Discrete, Indiscrete, PairPW
from pwnorm.weights import CoordinateLift

settings.register_profile(
    "pwnorm",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("pwnorm")


# --- strategies ------------------------------------------------------------

naturals = st.integers(min_value=1, max_value=50)

finite_values = st.floats(
    min_value=-8.0, max_value=8.0, allow_nan=False, allow_infinity=False
).filter(lambda v: v == 0.0 or abs(v) > 1e-6)

p_values = st.sampled_from([2.5, 3.0, 4.0, 5.5])

weight_fractions = st.floats(min_value=0.05, max_value=1.0)


@st.composite
def weights_1d(draw):
    kind = draw(st.sampled_from(["one", "const", "power", "geom", "explicit"]))
    if kind == "one":
        return One()
    if kind == "const":
        return Constant(draw(weight_fractions))
    if kind == "power":
        return PowerDecay(draw(st.floats(min_value=0.05, max_value=1.5)))
    if kind == "geom":
        return Geometric(draw(st.floats(min_value=0.2, max_value=0.95)))
    head = tuple(draw(st.lists(weight_fractions, min_size=1, max_size=4)))
    return Explicit(head, One())


def lift_weight(w, arity: int, position: int = 1):
    """Weights built by weights_1d are one-dimensional; attach to a coord."""
    if arity == 1 or isinstance(w, (One, Constant)):
        return w
    return CoordinateLift((position,), w)


@st.composite
def sparse_vectors(draw, arity: int = 1, max_points: int = 6):
    coords = st.tuples(*([st.integers(min_value=1, max_value=9)] * arity))
    pts = draw(st.lists(coords, min_size=1, max_size=max_points, unique=True))
    vals = draw(
        st.lists(
            finite_values.filter(lambda v: v != 0.0),
            min_size=len(pts),
            max_size=len(pts),
        )
    )
    return SparseVector(arity, entries=tuple(zip(pts, vals)))


@st.composite
def small_families(draw, arity: int = 1, admissible: bool = False):
    pairs = [PairPW(Discrete(), One(), "discrete")] if admissible else []
    if not admissible and draw(st.booleans()):
        pairs.append(PairPW(Discrete(), One(), "discrete"))
    n_extra = draw(st.integers(min_value=1, max_value=3))
    for i in range(n_extra):
        w = lift_weight(draw(weights_1d()), arity)
        pairs.append(PairPW(Indiscrete(), w, f"ind{i}"))
    p = draw(p_values)
    return Family(p, arity, ExplicitMembers(tuple(pairs)))


def rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def lp_norm_of(entries, p: float) -> float:
    """l_p norm in the canonical evaluation form (terms as (v*v)^(p/2))."""
    return math.fsum(((v * v) * 1.0) ** (p / 2.0) for _, v in entries) ** (1.0 / p)
