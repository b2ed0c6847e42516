"""Sequence-convergence diagnostics.

Every diagnostic consumes a :class:`VectorSequence` and produces a
:class:`TailReport`: the per-index values of the monitored quantity plus a
NULL / NOT_NULL verdict decided on the final tail window.  "Converges to 0"
is rendered at desk scale as "every value in the last ``window`` indices is
below ``tol``".

The pointwise (uo-proxy) diagnostic is the one exception: its verdict is
decided coordinate-by-coordinate (cell-by-cell for step functions), because
coordinatewise convergence is weaker than uniform smallness of the reported
sup values.  A coordinate counts as failing only when its violations
*persist*: inside the recurrence zone (the last three quarters of the run by
default) the first and last indices with |value| >= tol must be at least a
full tail window apart.  A transient burst shorter than the window is
indistinguishable from a settling coordinate at a finite horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    MNotFound,
    NegativeTestVector,
    NonStepSequence,
    NotOrderBounded,
    NoIndexFound,
    RefinementOverflow,
    ValidationError,
)
from .spaces import (
    DEFAULT_HORIZON,
    MAX_REFINE_LEVEL,
    DirectSumVector,
    Element,
    LatticeVector,
    SpaceTag,
    StepFunction,
    check_tags,
    quasi_interior_point,
    zero,
)

NULL = "NULL"
NOT_NULL = "NOT_NULL"

DEFAULT_TOL = 1e-6

#: slack for exact componentwise order comparisons
ORDER_SLACK = 1e-12


# ---------------------------------------------------------------------------
# sequences, tolerances, reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorSequence:
    """Finite, 1-based, deterministic sequence of tagged elements."""

    tag: SpaceTag
    length: int
    at: Callable[[int], Element]
    name: str = ""

    def __post_init__(self):
        if self.length < 1:
            raise ValidationError("sequence length must be >= 1")

    def __iter__(self):
        return (self.at(n) for n in range(1, self.length + 1))

    def terms(self) -> list[Element]:
        return [self.at(n) for n in range(1, self.length + 1)]

    def subsequence(self, indices: Sequence[int], name: str = "") -> "VectorSequence":
        idx = list(indices)
        if not idx:
            raise ValidationError("subsequence needs at least one index")
        return VectorSequence(
            self.tag, len(idx), lambda j: self.at(idx[j - 1]),
            name=name or f"{self.name}[sub]",
        )


def sequence_from_list(elements: Sequence[Element], name: str = "") -> VectorSequence:
    elements = list(elements)
    tag = elements[0].tag
    for x in elements[1:]:
        check_tags(tag, x.tag)
    return VectorSequence(tag, len(elements), lambda n: elements[n - 1], name=name)


@dataclass(frozen=True)
class ToleranceSpec:
    """Desk-scale rendering of "tends to zero": tail window + threshold."""

    tol: float = DEFAULT_TOL
    window: int | None = None  # None -> length // 4 (at least 1)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tol must be > 0")
        if self.window is not None and self.window < 1:
            raise ValidationError("window must be >= 1")

    def window_for(self, length: int) -> int:
        w = self.window if self.window is not None else max(1, length // 4)
        if w > length:
            raise ValidationError("window exceeds sequence length")
        return w


@dataclass
class TailReport:
    quantity: str
    values: list[float]
    verdict: str
    tol: float
    window: int
    horizon: int
    witness: dict | None = None
    extras: dict = field(default_factory=dict)

    @property
    def is_null(self) -> bool:
        return self.verdict == NULL

    def to_json_dict(self) -> dict:
        d = {
            "quantity": self.quantity,
            "values": self.values,
            "verdict": self.verdict,
            "tol": self.tol,
            "window": self.window,
            "horizon": self.horizon,
            "witness": self.witness,
        }
        if self.extras:
            d["extras"] = self.extras
        return d

    def to_csv(self) -> str:
        lines = ["index,value"]
        lines += [f"{n},{v:.17g}" for n, v in enumerate(self.values, start=1)]
        return "\n".join(lines) + "\n"


def _tail_verdict(values: Sequence[float], tol: float, window: int):
    """Generic verdict: NULL iff every value in the final window is < tol."""
    n = len(values)
    for i in range(n - window, n):
        if not values[i] < tol:
            return NOT_NULL, i + 1
    return NULL, None


def _make_report(quantity, values, ts, length, witness_extra=None, extras=None):
    window = ts.window_for(length)
    verdict, bad = _tail_verdict(values, ts.tol, window)
    witness = None
    if verdict == NOT_NULL:
        witness = {"index": bad, "value": values[bad - 1]}
        if witness_extra:
            witness.update(witness_extra(bad))
    return TailReport(quantity, [float(v) for v in values], verdict,
                      ts.tol, window, length, witness, extras or {})


# ---------------------------------------------------------------------------
# norm and un diagnostics
# ---------------------------------------------------------------------------

def norm_tail(seq: VectorSequence, limit: Element, ts: ToleranceSpec) -> TailReport:
    """values[n] = ||seq(n) - limit||."""
    check_tags(seq.tag, limit.tag)
    values = [(x - limit).norm() for x in seq]
    return _make_report("norm-tail", values, ts, seq.length)


def _check_tests(tag, tests):
    if not tests:
        raise ValidationError("un_tail needs at least one test vector")
    for u in tests:
        check_tags(tag, u.tag)
        if not u.is_positive():
            raise NegativeTestVector("test vectors must be >= 0")
        if u.is_zero():
            raise ValidationError("test vectors must be nonzero")


def _meet_positive(d: Element, u: Element) -> Element:
    # both arguments are known positive (d is a modulus, u a validated test),
    # so the sparse meet lives on the support intersection
    if isinstance(d, LatticeVector):
        a, b = d.coords, u.coords
        if len(b) < len(a):
            a, b = b, a
        return LatticeVector(d.tag, {i: min(v, b[i]) for i, v in a.items() if i in b})
    return d.meet(u)


def un_tail(seq: VectorSequence, limit: Element, tests: Sequence[Element],
            ts: ToleranceSpec) -> TailReport:
    """values[n] = max over test vectors u of || |seq(n) - limit| /\\ u ||."""
    check_tags(seq.tag, limit.tag)
    tests = list(tests)
    _check_tests(seq.tag, tests)
    limit_is_zero = limit.is_zero()
    values = []
    argmax = []
    for x in seq:
        d = x.abs() if limit_is_zero else (x - limit).abs()
        norms = [_meet_positive(d, u).norm() for u in tests]
        j = int(np.argmax(norms))
        values.append(norms[j])
        argmax.append(j)
    return _make_report(
        "un-tail", values, ts, seq.length,
        witness_extra=lambda n: {"test_index": argmax[n - 1]},
        extras={"num_tests": len(tests)},
    )


def truncation_index(u: Element, e: Element, eps: float, m_max: int = 2 ** 20) -> int:
    """Smallest m with ||u - u /\\ (m e)|| < eps (the quasi-interior m-selection)."""
    if not eps > 0:
        raise ValidationError("eps must be > 0")

    def remainder(m: int) -> float:
        return (u - u.meet(e.scale(float(m)))).norm()

    # the remainder is nonincreasing in m: double to bracket, then bisect
    hi = 1
    while remainder(hi) >= eps:
        hi *= 2
        if hi > m_max:
            raise MNotFound(
                f"no m <= {m_max} achieves ||u - u/\\me|| < {eps}", m_max=m_max
            )
    lo = hi // 2  # remainder(lo) >= eps when lo >= 1
    while hi - lo > 1 and lo >= 1:
        mid = (lo + hi) // 2
        if remainder(mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def un_tail_qip(seq: VectorSequence, limit: Element, ts: ToleranceSpec,
                horizon: int = DEFAULT_HORIZON,
                m_request: tuple[Element, float] | None = None,
                m_max: int = 2 ** 20) -> TailReport:
    """Single-vector un-test against the model's quasi-interior point.

    When ``m_request=(u, eps)`` is given, the report also carries the
    smallest m with ||u - u /\\ (m e)|| < eps, the reduction step that makes
    the single-vector test sufficient.
    """
    e = quasi_interior_point(seq.tag, horizon)
    report = un_tail(seq, limit, [e], ts)
    report.quantity = "un-tail-qip"
    report.extras["test_family"] = "quasi-interior-point"
    report.extras["qip_horizon"] = horizon
    if m_request is not None:
        u, eps = m_request
        m = truncation_index(u, e, eps, m_max=m_max)
        report.extras["m_selected"] = m
        report.extras["m_eps"] = eps
    return report


# ---------------------------------------------------------------------------
# in-measure diagnostic (step models)
# ---------------------------------------------------------------------------

def in_measure_tail(seq: VectorSequence, delta: float, ts: ToleranceSpec) -> TailReport:
    """values[n] = mu{ |seq(n)| > delta }."""
    if seq.tag.kind != "lp_step":
        raise NonStepSequence("in-measure diagnostic needs an lp_step sequence")
    if not delta > 0:
        raise ValidationError("delta must be > 0")
    values = [f.measure_where(lambda v: np.abs(v) > delta) for f in seq]
    return _make_report("in-measure-tail", values, ts, seq.length,
                        extras={"delta": delta})


# ---------------------------------------------------------------------------
# pointwise / uo-proxy diagnostic
# ---------------------------------------------------------------------------

def _coordinate_matrix(seq: VectorSequence, max_level: int):
    """(N, C) matrix of per-coordinate (per-cell) values, plus cell labels."""
    if seq.tag.kind == "lp_step":
        levels = [seq.at(n).level for n in range(1, seq.length + 1)]
        level = max(levels)
        if level > max_level:
            raise RefinementOverflow(
                f"common refinement level {level} exceeds the maximum {max_level}"
            )
        rows = [seq.at(n).refined(level).values for n in range(1, seq.length + 1)]
        labels = [f"cell[{level}:{i}]" for i in range(2 ** level)]
        return np.stack(rows), labels, level
    if seq.tag.is_sequence_kind:
        touched = sorted(set().union(*(x.support for x in seq)) or {1})
        mat = np.zeros((seq.length, len(touched)))
        pos = {c: j for j, c in enumerate(touched)}
        for n, x in enumerate(seq):
            for i, v in x.coords.items():
                mat[n, pos[i]] = v
        return mat, [str(c) for c in touched], None
    raise ValidationError("pointwise diagnostic supports sequence and step models")


def pointwise_tail(seq: VectorSequence, ts: ToleranceSpec,
                   max_level: int = MAX_REFINE_LEVEL,
                   recurrence_fraction: float = 0.75) -> TailReport:
    """uo-proxy: coordinatewise / cellwise convergence to zero.

    values[n] is the sup of |seq(n)| over the touched coordinates
    (informational).  The verdict is per coordinate: a coordinate fails only
    if, inside the recurrence zone (the final ``recurrence_fraction`` of the
    run), its violations |seq(n)(c)| >= tol span at least a full tail window;
    per-coordinate limsup and liminf over the zone are reported.
    """
    mat, labels, level = _coordinate_matrix(seq, max_level)
    amat = np.abs(mat)
    n = seq.length
    window = ts.window_for(n)
    zone_start = n - max(window, int(math.ceil(recurrence_fraction * n)))
    zone = amat[zone_start:, :]
    bad = zone >= ts.tol
    persistent = []
    for c in range(bad.shape[1]):
        hits = np.where(bad[:, c])[0]
        if hits.size >= 2 and hits[-1] - hits[0] >= window:
            persistent.append(c)
    values = amat.max(axis=1) if amat.size else np.zeros(n)
    verdict = NULL if not persistent else NOT_NULL
    witness = None
    if verdict == NOT_NULL:
        c = persistent[0]
        hits = [int(zone_start + i + 1) for i in np.where(bad[:, c])[0]]
        witness = {"coordinate": labels[c], "violation_indices": hits[:8]}
    extras = {
        "zone_start": zone_start + 1,
        "limsup": [float(v) for v in zone.max(axis=0)] if zone.size else [],
        "liminf": [float(v) for v in zone.min(axis=0)] if zone.size else [],
        "coordinates": labels,
    }
    if level is not None:
        extras["refinement_level"] = level
    return TailReport("pointwise-tail", [float(v) for v in values], verdict,
                      ts.tol, window, n, witness, extras)


# ---------------------------------------------------------------------------
# weak diagnostics
# ---------------------------------------------------------------------------

def pairing(f: Element, x: Element) -> float:
    """Duality pairing <f, x> for the representable functional families."""
    check_tags(f.tag, x.tag)
    if isinstance(f, LatticeVector):
        keys = f.coords.keys() & x.coords.keys()
        return math.fsum(f.coords[i] * x.coords[i] for i in keys)
    if isinstance(f, StepFunction):
        level = max(f.level, x.level)
        prod = (f.tag.measure.weight_array(level)
                * f.refined(level).values * x.refined(level).values)
        if prod.size % 2 == 0:
            # adjacent-pair summation: exact cancellation for sign-modulated
            # integrands that flip within equal-mass cell pairs
            return float(prod.reshape(-1, 2).sum(axis=1).sum())
        return float(prod.sum())
    if isinstance(f, DirectSumVector):
        return pairing(f.left, x.left) + pairing(f.right, x.right)
    raise ValidationError("unsupported functional type")


def weak_tail(seq: VectorSequence, functionals: Sequence[Element], ts: ToleranceSpec,
              modulus: bool = False) -> TailReport:
    """values[n] = max over f of |<f, seq(n)>| (or <|f|, |seq(n)|> with modulus).

    A NULL verdict certifies nullity only *against the given family*; a
    NOT_NULL verdict genuinely refutes weak (resp. absolute-weak) nullity.
    """
    functionals = list(functionals)
    if not functionals:
        raise ValidationError("weak_tail needs at least one functional")
    for f in functionals:
        check_tags(seq.tag, f.tag)
    values = []
    argmax = []
    for x in seq:
        if modulus:
            vals = [abs(pairing(f.abs(), x.abs())) for f in functionals]
        else:
            vals = [abs(pairing(f, x)) for f in functionals]
        j = int(np.argmax(vals))
        values.append(vals[j])
        argmax.append(j)
    quantity = "modulus-weak-tail" if modulus else "weak-tail"
    report = _make_report(
        quantity, values, ts, seq.length,
        witness_extra=lambda n: {"functional_index": argmax[n - 1]},
        extras={"family_size": len(functionals), "verdict_scope": "against family"},
    )
    return report


# ---------------------------------------------------------------------------
# order-convergence witness in atomic models
# ---------------------------------------------------------------------------

@dataclass
class OrderWitness:
    """Dominating schedule certifying desk-scale order convergence to zero."""

    atoms: list[int]
    entries: list[dict]  # {"k": k, "index": n_k, "dominator_norm": ||v_k||}

    def to_json_dict(self) -> dict:
        return {"atoms": self.atoms, "entries": self.entries}


def order_witness_atomic(seq: VectorSequence, bound: Element, ts: ToleranceSpec,
                         max_steps: int | None = None) -> OrderWitness:
    """Construct the decreasing dominators v_k over the atoms of ``bound``.

    v_k agrees with ``bound`` beyond the first k atoms and is capped at 1/k on
    them; for each k the least n_k is found with |seq(n)| <= v_k for every
    n >= n_k within the horizon.
    """
    if not seq.tag.is_sequence_kind:
        raise ValidationError("order witness requires an atomic sequence model")
    check_tags(seq.tag, bound.tag)
    if not bound.is_positive():
        raise ValidationError("bound must be >= 0")
    moduli = [x.abs() for x in seq]
    for n, m in enumerate(moduli, start=1):
        if not m.leq(bound, slack=ORDER_SLACK):
            raise NotOrderBounded(
                f"|seq({n})| is not dominated by the bound", witness_index=n
            )
    atoms = sorted(bound.coords)
    steps = max_steps if max_steps is not None else max(len(atoms), 8)
    entries = []
    for k in range(1, steps + 1):
        cap = 1.0 / k
        vk = LatticeVector(
            seq.tag,
            {a: (min(cap, bound[a]) if i < k else bound[a])
             for i, a in enumerate(atoms)},
        )
        last_bad = 0
        for n in range(seq.length, 0, -1):
            if not moduli[n - 1].leq(vk, slack=ORDER_SLACK):
                last_bad = n
                break
        if last_bad == seq.length:
            raise NoIndexFound(
                f"no index n_k within the horizon dominates step k={k}", step=k
            )
        entries.append({"k": k, "index": last_bad + 1, "dominator_norm": vk.norm()})
    return OrderWitness(atoms, entries)


# ---------------------------------------------------------------------------
# almost order boundedness
# ---------------------------------------------------------------------------

@dataclass
class AlmostOrderBoundedResult:
    bounded: bool
    worst_value: float
    worst_index: int  # position in the input list, 0-based

    def __bool__(self):
        return self.bounded


def almost_order_bounded_check(vectors: Sequence[Element], u: Element,
                               eps: float) -> AlmostOrderBoundedResult:
    """True iff ||(|x| - u)^+|| < eps for every listed x."""
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    vectors = list(vectors)
    if not vectors:
        raise ValidationError("need at least one vector")
    if not u.is_positive():
        raise ValidationError("u must be >= 0")
    worst_value = -1.0
    worst_index = 0
    for i, x in enumerate(vectors):
        check_tags(x.tag, u.tag)
        v = (x.abs() - u).pos().norm()
        if v > worst_value:
            worst_value = v
            worst_index = i
    return AlmostOrderBoundedResult(worst_value < eps, worst_value, worst_index)
