"""Concrete vector-lattice models.

Three element families are provided:

* ``LatticeVector`` -- finitely supported real sequences, the elements of the
  c0 / lp / l-infinity models (sparse storage, 1-based indices);
* ``StepFunction`` -- dyadic step functions on [0,1) with per-cell measure
  weights, the elements of the Lp(mu) step models (dense storage);
* ``DirectSumVector`` -- pairs (l1-part, linf-part) under the max norm.

All values are immutable after construction and every operation is a pure
function, so elements are safe to share freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import NegativeInput, TagMismatch, ValidationError

#: Default working horizon for "infinite" sequence-space objects.
DEFAULT_HORIZON = 4096

#: Default maximum dyadic refinement level for step functions.
MAX_REFINE_LEVEL = 14


# ---------------------------------------------------------------------------
# measures and space tags
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureModel:
    """Finite measure on the 2**level dyadic cells of [0,1)."""

    level: int
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValidationError("measure level must be >= 0")
        if len(self.weights) != 2 ** self.level:
            raise ValidationError("measure needs 2**level cell weights")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise ValidationError("cell weights must be finite and >= 0")
        if not sum(self.weights) > 0:
            raise ValidationError("total mass must be positive")

    @classmethod
    def lebesgue(cls, level: int) -> "MeasureModel":
        return cls(level, (2.0 ** -level,) * 2 ** level)

    @property
    def total_mass(self) -> float:
        return float(sum(self.weights))

    def refined(self, level: int) -> "MeasureModel":
        """Split each cell into equal-mass children down to ``level``."""
        if level < self.level:
            raise ValidationError("cannot coarsen a measure")
        if level == self.level:
            return self
        factor = 2 ** (level - self.level)
        w = np.repeat(np.asarray(self.weights, dtype=float) / factor, factor)
        return MeasureModel(level, tuple(float(v) for v in w))

    def weight_array(self, level: int) -> np.ndarray:
        return np.asarray(self.refined(level).weights, dtype=float)


@dataclass(frozen=True)
class SpaceTag:
    """Ambient-space tag; two elements combine only if their tags agree."""

    kind: str  # "c0" | "lp" | "linf" | "lp_step" | "l1_oplus_linf"
    p: float | None = None
    measure: MeasureModel | None = None

    def __post_init__(self):
        if self.kind not in ("c0", "lp", "linf", "lp_step", "l1_oplus_linf"):
            raise ValidationError(f"unknown space kind {self.kind!r}")
        if self.kind in ("lp", "lp_step"):
            if self.p is None or self.p < 1:
                raise ValidationError("lp spaces need p >= 1")
        elif self.p is not None:
            raise ValidationError(f"{self.kind} takes no exponent")
        if self.kind == "lp_step":
            if self.measure is None:
                raise ValidationError("lp_step needs a MeasureModel")
        elif self.measure is not None:
            raise ValidationError(f"{self.kind} takes no measure")

    @property
    def is_sequence_kind(self) -> bool:
        return self.kind in ("c0", "lp", "linf")

    def describe(self) -> str:
        if self.kind == "lp":
            return f"l{self.p:g}"
        if self.kind == "lp_step":
            return f"L{self.p:g}-step(level={self.measure.level})"
        return {"c0": "c0", "linf": "linf", "l1_oplus_linf": "l1(+)linf"}[self.kind]


def c0() -> SpaceTag:
    return SpaceTag("c0")


def lp(p: float) -> SpaceTag:
    return SpaceTag("lp", p=float(p))


def linf() -> SpaceTag:
    return SpaceTag("linf")


def lp_step(p: float, measure: MeasureModel | None = None, level: int = 0) -> SpaceTag:
    if measure is None:
        measure = MeasureModel.lebesgue(level)
    return SpaceTag("lp_step", p=float(p), measure=measure)


def direct_sum() -> SpaceTag:
    return SpaceTag("l1_oplus_linf")


def _step_tags_compatible(a: SpaceTag, b: SpaceTag) -> bool:
    if a.p != b.p:
        return False
    level = max(a.measure.level, b.measure.level)
    return a.measure.refined(level).weights == b.measure.refined(level).weights


def check_tags(a: SpaceTag, b: SpaceTag) -> None:
    if a.kind != b.kind:
        raise TagMismatch(f"cannot combine {a.describe()} with {b.describe()}")
    if a.kind == "lp_step":
        if not _step_tags_compatible(a, b):
            raise TagMismatch("step-function measures are not refinement-compatible")
    elif a != b:
        raise TagMismatch(f"cannot combine {a.describe()} with {b.describe()}")


# ---------------------------------------------------------------------------
# sequence-space vectors
# ---------------------------------------------------------------------------

def _clean_coords(coords: Mapping[int, float]) -> dict[int, float]:
    out = {}
    for i, v in coords.items():
        i = int(i)
        v = float(v)
        if i < 1:
            raise ValidationError("coordinate indices are 1-based")
        if not math.isfinite(v):
            raise ValidationError("coordinates must be finite")
        if v != 0.0:
            out[i] = v
    return out


@dataclass(frozen=True, eq=False)
class LatticeVector:
    """Finitely supported vector in a tagged sequence space."""

    tag: SpaceTag
    coords: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tag.is_sequence_kind:
            raise ValidationError("LatticeVector requires a sequence-space tag")
        object.__setattr__(self, "coords", _clean_coords(self.coords))

    # -- basic access ------------------------------------------------------

    def __getitem__(self, i: int) -> float:
        return self.coords.get(i, 0.0)

    @property
    def support(self) -> set[int]:
        return set(self.coords)

    def is_zero(self) -> bool:
        return not self.coords

    # -- arithmetic ----------------------------------------------------------

    def _zip(self, other: "LatticeVector", fn) -> "LatticeVector":
        check_tags(self.tag, other.tag)
        keys = self.coords.keys() | other.coords.keys()
        return LatticeVector(self.tag, {i: fn(self[i], other[i]) for i in keys})

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, a: float) -> "LatticeVector":
        a = float(a)
        return LatticeVector(self.tag, {i: a * v for i, v in self.coords.items()})

    def __mul__(self, a: float):
        return self.scale(a)

    __rmul__ = __mul__

    # -- lattice structure ---------------------------------------------------

    def meet(self, other):
        check_tags(self.tag, other.tag)
        a, b = self.coords, other.coords
        if all(v > 0 for v in a.values()) and all(v > 0 for v in b.values()):
            # positive meets live on the support intersection
            if len(b) < len(a):
                a, b = b, a
            return LatticeVector(
                self.tag, {i: min(v, b[i]) for i, v in a.items() if i in b}
            )
        return self._zip(other, min)

    def join(self, other):
        return self._zip(other, max)

    def abs(self):
        return LatticeVector(self.tag, {i: math.fabs(v) for i, v in self.coords.items()})

    def pos(self):
        return LatticeVector(self.tag, {i: v for i, v in self.coords.items() if v > 0})

    def neg(self):
        return LatticeVector(self.tag, {i: -v for i, v in self.coords.items() if v < 0})

    def leq(self, other, slack: float = 0.0) -> bool:
        check_tags(self.tag, other.tag)
        keys = self.coords.keys() | other.coords.keys()
        return all(self[i] <= other[i] + slack for i in keys)

    def is_positive(self, slack: float = 0.0) -> bool:
        return all(v >= -slack for v in self.coords.values())

    # -- norm ----------------------------------------------------------------

    def norm(self) -> float:
        if not self.coords:
            return 0.0
        if self.tag.kind in ("c0", "linf"):
            return max(math.fabs(v) for v in self.coords.values())
        p = self.tag.p
        if p == 1.0:
            return math.fsum(math.fabs(v) for v in self.coords.values())
        if p == 2.0:
            return math.sqrt(math.fsum(v * v for v in self.coords.values()))
        return math.fsum(math.fabs(v) ** p for v in self.coords.values()) ** (1.0 / p)

    def approx_eq(self, other, tol: float = 1e-12) -> bool:
        d = self - other
        scale = 1.0 + self.norm() + other.norm()
        return d.norm() <= tol * scale


def unit(tag: SpaceTag, n: int) -> LatticeVector:
    """Standard unit vector e_n."""
    return LatticeVector(tag, {n: 1.0})


def ones(tag: SpaceTag, horizon: int = DEFAULT_HORIZON) -> LatticeVector:
    return LatticeVector(tag, {i: 1.0 for i in range(1, horizon + 1)})


# ---------------------------------------------------------------------------
# dyadic step functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StepFunction:
    """Dyadic step function on [0,1); values[i] on cell [i/2**L, (i+1)/2**L)."""

    tag: SpaceTag
    level: int
    values: np.ndarray

    def __post_init__(self):
        if self.tag.kind != "lp_step":
            raise ValidationError("StepFunction requires an lp_step tag")
        if self.level < self.tag.measure.level:
            raise ValidationError("function level below the measure's base level")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 ** self.level,):
            raise ValidationError("values must have 2**level entries")
        if not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # -- refinement ----------------------------------------------------------

    def refined(self, level: int) -> "StepFunction":
        if level < self.level:
            raise ValidationError("cannot coarsen a step function")
        if level == self.level:
            return self
        v = np.repeat(self.values, 2 ** (level - self.level))
        return StepFunction(self.tag, level, v)

    def _zip(self, other: "StepFunction", fn):
        check_tags(self.tag, other.tag)
        level = max(self.level, other.level)
        a = self.refined(level)
        b = other.refined(level)
        return StepFunction(self.tag, level, fn(a.values, b.values))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        return self._zip(other, np.add)

    def __sub__(self, other):
        return self._zip(other, np.subtract)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, a: float):
        return StepFunction(self.tag, self.level, float(a) * self.values)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return self._zip(other, np.multiply)  # pointwise product
        return self.scale(other)

    __rmul__ = __mul__

    # -- lattice structure ---------------------------------------------------

    def meet(self, other):
        return self._zip(other, np.minimum)

    def join(self, other):
        return self._zip(other, np.maximum)

    def abs(self):
        return StepFunction(self.tag, self.level, np.abs(self.values))

    def pos(self):
        return StepFunction(self.tag, self.level, np.maximum(self.values, 0.0))

    def neg(self):
        return StepFunction(self.tag, self.level, np.maximum(-self.values, 0.0))

    def leq(self, other, slack: float = 0.0) -> bool:
        check_tags(self.tag, other.tag)
        level = max(self.level, other.level)
        return bool(
            np.all(self.refined(level).values <= other.refined(level).values + slack)
        )

    def is_positive(self, slack: float = 0.0) -> bool:
        return bool(np.all(self.values >= -slack))

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    # -- measure-aware quantities ---------------------------------------------

    def weights(self) -> np.ndarray:
        return self.tag.measure.weight_array(self.level)

    def norm(self) -> float:
        w = self.weights()
        p = self.tag.p
        if p == 1.0:
            return float(np.dot(w, np.abs(self.values)))
        return float(np.dot(w, np.abs(self.values) ** p) ** (1.0 / p))

    def measure_where(self, predicate) -> float:
        """Total mass of the cells whose value satisfies ``predicate``."""
        mask = predicate(self.values)
        return float(self.weights()[mask].sum())

    def approx_eq(self, other, tol: float = 1e-12) -> bool:
        d = self - other
        scale = 1.0 + self.norm() + other.norm()
        return d.norm() <= tol * scale


def constant_one(tag: SpaceTag) -> StepFunction:
    level = tag.measure.level
    return StepFunction(tag, level, np.ones(2 ** level))


def indicator(tag: SpaceTag, level: int, cell: int) -> StepFunction:
    """Characteristic function of the dyadic cell [cell/2**level, (cell+1)/2**level)."""
    v = np.zeros(2 ** level)
    v[cell] = 1.0
    return StepFunction(tag, level, v)


# ---------------------------------------------------------------------------
# the l1 (+)_inf linf direct sum
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DirectSumVector:
    """Pair (l1-part, linf-part) with norm max(||left||_1, ||right||_inf)."""

    left: LatticeVector
    right: LatticeVector

    def __post_init__(self):
        if self.left.tag != lp(1):
            raise ValidationError("left part must carry the l1 tag")
        if self.right.tag != linf():
            raise ValidationError("right part must carry the linf tag")

    @property
    def tag(self) -> SpaceTag:
        return direct_sum()

    def _zip(self, other, method):
        if not isinstance(other, DirectSumVector):
            raise TagMismatch("direct-sum vectors only combine with each other")
        return DirectSumVector(
            method(self.left)(other.left), method(self.right)(other.right)
        )

    def __add__(self, other):
        return self._zip(other, lambda part: part.__add__)

    def __sub__(self, other):
        return self._zip(other, lambda part: part.__sub__)

    def __neg__(self):
        return DirectSumVector(-self.left, -self.right)

    def scale(self, a: float):
        return DirectSumVector(self.left.scale(a), self.right.scale(a))

    def __mul__(self, a: float):
        return self.scale(a)

    __rmul__ = __mul__

    def meet(self, other):
        return self._zip(other, lambda part: part.meet)

    def join(self, other):
        return self._zip(other, lambda part: part.join)

    def abs(self):
        return DirectSumVector(self.left.abs(), self.right.abs())

    def pos(self):
        return DirectSumVector(self.left.pos(), self.right.pos())

    def neg(self):
        return DirectSumVector(self.left.neg(), self.right.neg())

    def leq(self, other, slack: float = 0.0) -> bool:
        return self.left.leq(other.left, slack) and self.right.leq(other.right, slack)

    def is_positive(self, slack: float = 0.0) -> bool:
        return self.left.is_positive(slack) and self.right.is_positive(slack)

    def is_zero(self) -> bool:
        return self.left.is_zero() and self.right.is_zero()

    def norm(self) -> float:
        return max(self.left.norm(), self.right.norm())

    def approx_eq(self, other, tol: float = 1e-12) -> bool:
        d = self - other
        scale = 1.0 + self.norm() + other.norm()
        return d.norm() <= tol * scale


Element = Union[LatticeVector, StepFunction, DirectSumVector]


# ---------------------------------------------------------------------------
# shared element operations
# ---------------------------------------------------------------------------

def zero(tag: SpaceTag) -> Element:
    if tag.is_sequence_kind:
        return LatticeVector(tag, {})
    if tag.kind == "lp_step":
        return StepFunction(tag, tag.measure.level, np.zeros(2 ** tag.measure.level))
    return DirectSumVector(zero(lp(1)), zero(linf()))


def quasi_interior_point(tag: SpaceTag, horizon: int = DEFAULT_HORIZON) -> Element:
    """A canonical quasi-interior point of the tagged model.

    c0 and lp get the summable geometric sequence (2**-n), truncated at the
    working horizon; linf gets its strong unit 1 on the horizon; the step
    models get the constant-one function.
    """
    if tag.kind == "lp_step":
        return constant_one(tag)
    if tag.kind == "linf":
        return ones(tag, horizon)
    if tag.is_sequence_kind:
        return LatticeVector(tag, {n: 2.0 ** -n for n in range(1, horizon + 1)})
    raise ValidationError(f"no canonical quasi-interior point for {tag.describe()}")


def truncate(u: Element, e: Element, m: int) -> Element:
    """u /\\ (m*e), the truncation used to reduce un-tests to a single vector."""
    if m < 1:
        raise ValidationError("truncation multiple must be a positive integer")
    if not u.is_positive() or not e.is_positive():
        raise NegativeInput("truncate expects positive u and e")
    return u.meet(e.scale(float(m)))


def is_disjoint(x: Element, y: Element, tol: float = 0.0) -> bool:
    """Whether || |x| /\\ |y| || vanishes up to ``tol`` relative slack."""
    if tol < 0:
        raise ValidationError("tol must be >= 0")
    check_tags(x.tag, y.tag)
    m = x.abs().meet(y.abs()).norm()
    return m <= tol * (1.0 + x.norm() + y.norm())


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def tag_to_dict(tag: SpaceTag) -> dict:
    d: dict = {"kind": tag.kind}
    if tag.p is not None:
        d["p"] = tag.p
    if tag.measure is not None:
        d["measure"] = {"level": tag.measure.level, "weights": list(tag.measure.weights)}
    return d


def tag_from_dict(d: Mapping) -> SpaceTag:
    kind = d.get("kind")
    measure = None
    if "measure" in d and d["measure"] is not None:
        measure = MeasureModel(int(d["measure"]["level"]),
                               tuple(float(w) for w in d["measure"]["weights"]))
    return SpaceTag(kind, p=d.get("p"), measure=measure)


def element_to_dict(x: Element) -> dict:
    if isinstance(x, LatticeVector):
        return {"tag": tag_to_dict(x.tag),
                "coords": {str(i): x.coords[i] for i in sorted(x.coords)}}
    if isinstance(x, StepFunction):
        return {"tag": tag_to_dict(x.tag), "level": x.level,
                "values": [float(v) for v in x.values],
                "weights": [float(w) for w in x.weights()]}
    if isinstance(x, DirectSumVector):
        return {"tag": {"kind": "l1_oplus_linf"},
                "left": element_to_dict(x.left), "right": element_to_dict(x.right)}
    raise ValidationError(f"cannot serialize {type(x).__name__}")


def element_from_dict(d: Mapping) -> Element:
    tag = tag_from_dict(d["tag"])
    if tag.is_sequence_kind:
        return LatticeVector(tag, {int(i): float(v) for i, v in d["coords"].items()})
    if tag.kind == "lp_step":
        return StepFunction(tag, int(d["level"]), np.asarray(d["values"], dtype=float))
    return DirectSumVector(element_from_dict(d["left"]), element_from_dict(d["right"]))
