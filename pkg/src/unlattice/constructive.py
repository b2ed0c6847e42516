"""Constructive lattice algorithms.

* ``riesz_decompose`` -- split x = y + z with |y| = u, |z| = v given
  |x| = u + v, through an explicit choice of the four decomposition parts;
* ``kp_disjointify_positive`` / ``kp_disjointify`` -- greedy extraction of an
  almost-disjoint subsequence with geometric meet bounds and residuals;
* ``uo_extract`` -- weighted-sum test vector plus subsequence selection
  realizing "un-null implies a pointwise-null subsequence";
* ``norm_to_order_subsequence`` -- geometric-norm subsequence with a
  summable dominating certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convergence import (
    NOT_NULL,
    NULL,
    TailReport,
    ToleranceSpec,
    VectorSequence,
    norm_tail,
    pointwise_tail,
    un_tail_qip,
)
from .errors import (
    HorizonExhausted,
    NegativeInput,
    NegativePart,
    NotADecomposition,
    SelectionStalled,
    ValidationError,
)
from .spaces import Element, check_tags, zero

#: relative tolerance for the algebraic identity checks in the witnesses
IDENTITY_RTOL = 1e-12


# ---------------------------------------------------------------------------
# Riesz decomposition
# ---------------------------------------------------------------------------

@dataclass
class RieszWitness:
    y: Element
    z: Element
    a: Element
    b: Element
    c: Element
    d: Element

    def identity_residuals(self, x: Element, u: Element, v: Element) -> dict[str, float]:
        """Relative residuals of the eight defining identities."""
        def rel(lhs: Element, rhs: Element) -> float:
            return (lhs - rhs).norm() / (1.0 + rhs.norm())

        return {
            "x=y+z": rel(self.y + self.z, x),
            "|y|=u": rel(self.y.abs(), u),
            "|z|=v": rel(self.z.abs(), v),
            "u=a+b": rel(self.a + self.b, u),
            "v=c+d": rel(self.c + self.d, v),
            "x+=a+c": rel(self.a + self.c, x.pos()),
            "x-=b+d": rel(self.b + self.d, x.neg()),
            "a^b=0,c^d=0": max(self.a.meet(self.b).norm(), self.c.meet(self.d).norm())
            / (1.0 + u.norm() + v.norm()),
        }


def riesz_decompose(x: Element, u: Element, v: Element,
                    tol: float = 1e-9) -> RieszWitness:
    """Split x into y + z with |y| = u and |z| = v, given |x| = u + v.

    The four positive parts are fixed constructively as a = x+ /\\ u,
    b = u - a, c = x+ - a, d = x- - b; in the componentwise models this
    choice satisfies a <= x+ and b <= x-, which forces a _|_ b and c _|_ d.
    """
    check_tags(x.tag, u.tag)
    check_tags(x.tag, v.tag)
    if not u.is_positive() or not v.is_positive():
        raise NegativeInput("u and v must be >= 0")
    defect = (x.abs() - (u + v)).norm()
    if defect > tol * (1.0 + x.norm()):
        raise NotADecomposition(
            f"|| |x| - (u+v) || = {defect:.3g} exceeds the tolerance"
        )
    xp = x.pos()
    xm = x.neg()
    a = xp.meet(u)
    b = u - a
    c = xp - a
    d = xm - b
    neg_slack = tol * (1.0 + x.norm() + u.norm() + v.norm())
    for name, part in (("a", a), ("b", b), ("c", c), ("d", d)):
        if not part.is_positive(slack=neg_slack):
            raise NegativePart(f"part {name} dips below -{neg_slack:.3g}")
    return RieszWitness(y=a - b, z=c - d, a=a, b=b, c=c, d=d)


# ---------------------------------------------------------------------------
# greedy disjointification
# ---------------------------------------------------------------------------

@dataclass
class DisjointificationResult:
    selected_indices: list[int]
    disjoint_parts: list[Element]
    residual_norms: list[float]
    meet_matrix: dict[tuple[int, int], float]  # (i, k) 1-based selection slots
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "selected_indices": self.selected_indices,
            "residual_norms": self.residual_norms,
            "meet_matrix": {f"{i},{k}": v for (i, k), v in sorted(self.meet_matrix.items())},
            "warnings": self.warnings,
        }


def _un_null_advisory(seq: VectorSequence, ts: ToleranceSpec) -> list[str]:
    try:
        report = un_tail_qip(seq, zero(seq.tag), ts)
    except Exception as exc:  # advisory only; never fatal
        return [f"un-null precondition could not be checked: {exc}"]
    if report.verdict == NOT_NULL:
        return ["input sequence is not un-null against the default test family; "
                "the greedy scan may stall"]
    return []


def kp_disjointify_positive(seq: VectorSequence, target_count: int,
                            ts: ToleranceSpec,
                            check_un_null: bool = True,
                            require_un_null: bool = False) -> DisjointificationResult:
    """Greedy almost-disjoint subsequence of a positive sequence.

    Selection slot k accepts the first index whose meet norm against every
    previously selected term x_{a_i} is at most 2**-(k+i); the disjoint parts
    are d_k = (x_{a_k} - v_k)+ where v_k collects the pairwise meets of the
    selected terms.
    """
    if target_count < 1:
        raise ValidationError("target_count must be >= 1")
    warnings = []
    if check_un_null:
        warnings = _un_null_advisory(seq, ts)
        if warnings and require_un_null:
            raise ValidationError(warnings[0])

    def term(n: int) -> Element:
        x = seq.at(n)
        if not x.is_positive():
            raise NegativeInput(f"seq({n}) has a negative coordinate")
        return x

    selected = [1]
    terms = [term(1)]
    while len(selected) < target_count:
        k = len(selected) + 1
        found = None
        for n in range(selected[-1] + 1, seq.length + 1):
            x = term(n)
            if all(x.meet(terms[i - 1]).norm() <= 2.0 ** -(k + i)
                   for i in range(1, k)):
                found = (n, x)
                break
        if found is None:
            partial = _assemble_disjoint(selected, terms, warnings)
            raise HorizonExhausted(
                f"no admissible index for selection slot {k} "
                f"(bound 2**-(k+i), k={k})", step=k, partial=partial,
            )
        selected.append(found[0])
        terms.append(found[1])
    return _assemble_disjoint(selected, terms, warnings)


def _assemble_disjoint(selected, terms, warnings) -> DisjointificationResult:
    kk = len(selected)
    meets = {}
    meet_norms = {}
    for i in range(1, kk + 1):
        for k in range(i + 1, kk + 1):
            z = terms[i - 1].meet(terms[k - 1])
            meets[(i, k)] = z
            meet_norms[(i, k)] = z.norm()
    parts = []
    residuals = []
    for k in range(1, kk + 1):
        vk = zero(terms[0].tag)
        for i in range(1, k):
            vk = vk + meets[(i, k)]
        for j in range(k + 1, kk + 1):
            vk = vk + meets[(k, j)]
        dk = (terms[k - 1] - vk).pos()
        parts.append(dk)
        residuals.append((terms[k - 1] - dk).norm())
    return DisjointificationResult(selected, parts, residuals, meet_norms, warnings)


def kp_disjointify(seq: VectorSequence, target_count: int, ts: ToleranceSpec,
                   check_un_null: bool = True,
                   require_un_null: bool = False) -> DisjointificationResult:
    """General (signed) disjointification: moduli first, then Riesz splitting."""
    moduli = VectorSequence(seq.tag, seq.length, lambda n: seq.at(n).abs(),
                            name=f"|{seq.name}|")
    base = kp_disjointify_positive(moduli, target_count, ts,
                                   check_un_null=check_un_null,
                                   require_un_null=require_un_null)
    parts = []
    residuals = []
    for n, wk in zip(base.selected_indices, base.disjoint_parts):
        x = seq.at(n)
        hk = x.abs() - wk  # >= 0: wk = (|x| - v)+ <= |x| componentwise
        witness = riesz_decompose(x, wk, hk)
        parts.append(witness.y)
        residuals.append(witness.z.norm())
    return DisjointificationResult(base.selected_indices, parts, residuals,
                                   base.meet_matrix, base.warnings)


# ---------------------------------------------------------------------------
# uo-subsequence extraction
# ---------------------------------------------------------------------------

@dataclass
class UoExtraction:
    test_vector: Element
    subindices: list[int]
    meet_norms: list[float]
    report: TailReport
    degenerate: bool = False


def _unsettled_mass_report(sub: VectorSequence, support_mask, ts: ToleranceSpec) -> TailReport:
    """Borel-Cantelli style a.e. certificate for a step subsequence.

    values[j] = mass of the cells (inside the test vector's support) on which
    some term at position >= j still exceeds tol.  A decaying tail certifies
    that, outside a set of vanishing measure, the subsequence settles.
    """
    level = max(sub.at(j).level for j in range(1, sub.length + 1))
    weights = sub.tag.measure.weight_array(level)
    mask = support_mask(level)
    active = np.zeros(2 ** level, dtype=bool)
    values = [0.0] * sub.length
    for j in range(sub.length, 0, -1):
        f = sub.at(j).refined(level).values
        active |= (np.abs(f) >= ts.tol) & mask
        values[j - 1] = float(weights[active].sum())
    window = ts.window_for(sub.length)
    verdict = NULL
    witness = None
    for j in range(sub.length - window, sub.length):
        if not values[j] < ts.tol:
            verdict = NOT_NULL
            witness = {"index": j + 1, "value": values[j]}
            break
    return TailReport("uo-subsequence-unsettled-mass", values, verdict,
                      ts.tol, window, sub.length, witness,
                      {"refinement_level": level})


def uo_extract(seq: VectorSequence, ts: ToleranceSpec,
               target_count: int | None = None) -> UoExtraction:
    """Build the weighted test vector e and select n_k with ||x_{n_k}| /\\ e|| <= 2**-k.

    Returns the selection together with a pointwise-null certificate of the
    subsequence restricted to the support (band) of e.  For step models the
    certificate is the unsettled-mass tail, the honest finite rendering of
    "a.e. convergence along the subsequence"; for atomic models it is the
    coordinatewise report.
    """
    norms = [seq.at(n).norm() for n in range(1, seq.length + 1)]
    nonzero = [n for n, v in enumerate(norms, start=1) if v > 0]
    if not nonzero:
        report = TailReport("pointwise-tail", [0.0] * seq.length, NULL,
                            ts.tol, ts.window_for(seq.length), seq.length, None,
                            {"degenerate": True})
        return UoExtraction(zero(seq.tag), list(range(1, seq.length + 1)),
                            [0.0] * seq.length, report, degenerate=True)

    e = zero(seq.tag)
    for n in nonzero:
        w = 2.0 ** -n / norms[n - 1]
        if w == 0.0:
            break  # underflow past the representable horizon
        e = e + seq.at(n).abs().scale(w)

    subindices: list[int] = []
    meet_norms: list[float] = []
    prev = 0
    k = 1
    while True:
        found = None
        for n in range(prev + 1, seq.length + 1):
            m = seq.at(n).abs().meet(e).norm()
            if m <= 2.0 ** -k:
                found = (n, m)
                break
        if found is None:
            if target_count is not None and len(subindices) < target_count:
                raise SelectionStalled(
                    f"no index with ||x_n| /\\ e|| <= 2**-{k} within the horizon",
                    step=k, partial=subindices,
                )
            break
        subindices.append(found[0])
        meet_norms.append(found[1])
        prev = found[0]
        k += 1
        if target_count is not None and len(subindices) == target_count:
            break
    if not subindices:
        raise SelectionStalled("no admissible first index", step=1, partial=[])

    sub = seq.subsequence(subindices, name=f"{seq.name}[uo]")
    if seq.tag.kind == "lp_step":
        def support_mask(level):
            return e.refined(level).values > 0

        report = _unsettled_mass_report(sub, support_mask, ts)
    else:
        support = e.support

        def restrict(j: int):
            x = sub.at(j)
            return type(x)(x.tag, {i: v for i, v in x.coords.items() if i in support})

        restricted = VectorSequence(sub.tag, sub.length, restrict, name=sub.name)
        report = pointwise_tail(restricted, ts)
    return UoExtraction(e, subindices, meet_norms, report)


# ---------------------------------------------------------------------------
# norm-null -> order-null subsequence
# ---------------------------------------------------------------------------

@dataclass
class OrderSubsequence:
    subindices: list[int]
    certificate_norms: list[float]  # ||z_m|| for the dominating tails z_m

    def to_json_dict(self) -> dict:
        return {"subindices": self.subindices,
                "certificate_norms": self.certificate_norms}


def norm_to_order_subsequence(seq: VectorSequence, ts: ToleranceSpec,
                              target_count: int | None = None) -> OrderSubsequence:
    """Select ||seq(n_k)|| <= 2**-k; the partial sums of moduli dominate the tail.

    The certificate z_m = sum_{k >= m} |seq(n_k)| satisfies |seq(n_k)| <= z_m
    for k >= m and ||z_m|| <= 2**-m+1, the desk-scale order-convergence bound.
    """
    if norm_tail(seq, zero(seq.tag), ts).verdict != NULL:
        raise ValidationError("sequence is not norm-null at the given tolerance")
    subindices: list[int] = []
    prev = 0
    k = 1
    while True:
        found = None
        for n in range(prev + 1, seq.length + 1):
            if seq.at(n).norm() <= 2.0 ** -k:
                found = n
                break
        if found is None:
            if target_count is not None and len(subindices) < target_count:
                raise SelectionStalled(
                    f"norm tail decays too slowly for step k={k}",
                    step=k, partial=subindices,
                )
            break
        subindices.append(found)
        prev = found
        k += 1
        if target_count is not None and len(subindices) == target_count:
            break
    if not subindices:
        raise SelectionStalled("no admissible first index", step=1, partial=[])
    cert = []
    tail = zero(seq.tag)
    for n in reversed(subindices):
        tail = tail + seq.at(n).abs()
        cert.append(tail.norm())
    cert.reverse()
    return OrderSubsequence(subindices, cert)
