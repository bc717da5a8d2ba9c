"""The full verification run behind ``hscale verify``.

Every check is wrapped so that a numerical failure becomes a FAIL entry
rather than an exception. Entries are reported sorted by check id.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import jtl, opalg, rhs
from .errors import ConditionAViolation, HScaleError, NotInjective, ParallelogramViolation
from .hspace import inner
from .io import LoadedFile
from .ofamily import FORMULA_TOL, OFamily, u_formula, u_simplified, validate_ofamily
from .report import (FAIL, INCONCLUSIVE, PASS, UNDEFINED, CheckResult, Report)
from .system import ContractiveSystem, validate_system

ANCHORS = {
    "axiom.directed": "index set is directed",
    "axiom.injective": "linking maps are injective",
    "axiom.contraction": "linking maps are contractions",
    "axiom.identity": "U_aa is the identity",
    "axiom.path_independence": "U_cb U_ba = U_ca",
    "duality.v_adjoint": "V_ab = U_ba^*",
    "pairing.stabilization": "pairing constant for large indices",
    "pairing.separating": "duality between D^x and D is separating",
    "isometry.equivalence": "V isometric iff Lambda_a = Lambda_b",
    "condition.A": "condition (A): ||.||_0 vanishes only at 0",
    "condition.C": "condition (C): norm compatibility",
    "central.parallelogram": "||.||_0 satisfies the parallelogram law",
    "central.reconstruction": "H_a is the graph-norm space of A_a on H_0",
    "central.order": "index order matches the order of the A_a",
    "central.intertwiner": "joint limit unique up to intertwiner",
    "ofamily.closed_form": "U_BA = S_B^-1/2 (S_A^1/2 S_B^-1/2)^* S_A^1/2",
    "ofamily.directed": "operator family is directed",
    "operator.roundtrip": "operators in L(D, D^x) are inductive limits",
    "operator.involution": "involution X -> X^dagger",
    "operator.product": "partial multiplication reverses under the involution",
}

ROUNDTRIP_TOL = 1e-10
DUALITY_TOL = 1e-10
STABILIZATION_TOL = 1e-10
PRODUCT_TOL = 1e-9


def _rand(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _guard(fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except (HScaleError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return CheckResult(FAIL, float("nan"), {"error": f"{type(exc).__name__}: {exc}"})


def duality_defect(s: ContractiveSystem, samples: int, seed: int) -> tuple[float, list]:
    """Worst relative |<U xi, eta>_b - <xi, V eta>_a| over covering pairs."""
    rng = np.random.default_rng(seed)
    worst, where = 0.0, None
    for a, b in s.poset.edges:
        u, v = s.u_map(a, b), s.v_map(a, b)
        for _ in range(samples):
            xi, eta = _rand(rng, s.dim(a)), _rand(rng, s.dim(b))
            lhs, rhs_ = inner(s.space(b), u(xi), eta), inner(s.space(a), xi, v(eta))
            scale = 1.0 + abs(lhs) + abs(rhs_)
            d = abs(lhs - rhs_) / scale
            if d > worst:
                worst, where = d, [a, b]
    return worst, where


def stabilization_drift(s: ContractiveSystem, samples: int, seed: int) -> tuple[float, list]:
    """Worst relative change of the pairing when x is re-based upward."""
    rng = np.random.default_rng(seed)
    worst, where = 0.0, None
    n = s.dim(s.top)
    for a in s.labels:
        above = [b for b in s.labels if s.poset.leq(a, b)]
        for _ in range(samples):
            x = jtl.theta(s, a, _rand(rng, s.dim(a)))
            d = jtl.d_element(s, _rand(rng, n))
            ref = jtl.pair(s, x, d)
            for b in above:
                val = jtl.pair(s, jtl.rebase(s, x, b), d)
                drift = abs(val - ref) / max(abs(ref), 1e-300)
                if drift > worst:
                    worst, where = drift, [a, b]
    return worst, where


def _axioms(s: ContractiveSystem, report: Report):
    rep = validate_system(s)
    for name, res in rep.axioms().items():
        report.add(f"axiom.{name}", ANCHORS[f"axiom.{name}"],
                   verdict=PASS if res.passed else FAIL, margin=res.margin, witness=res.witness)
    return rep


def _probe_operators(s: ContractiveSystem, seed: int) -> dict[str, opalg.LimOperator]:
    rng = np.random.default_rng(seed)
    out = {}
    for a in s.labels:
        n = s.dim(a)
        out[f"rand@{a}"] = opalg.lift(s, a, rng.standard_normal((n, n))
                                      + 1j * rng.standard_normal((n, n)))
        out[f"I@{a}"] = opalg.lift(s, a, np.eye(n))
    return out


def operator_roundtrip(s: ContractiveSystem, ops: dict) -> CheckResult:
    worst, where = 0.0, None
    for name, x in ops.items():
        for g in s.labels:
            if not s.poset.leq(x.base, g):
                continue
            ext = opalg.extract_component(s, x, g)
            if not ext.bounded:
                return CheckResult(FAIL, ext.residual, {"operator": name, "index": g})
            ref = opalg.component_at(s, x, g)
            err = np.linalg.norm(ext.matrix - ref, 2) / max(1.0, np.linalg.norm(ref, 2))
            if err > worst:
                worst, where = err, {"operator": name, "index": g}
    return CheckResult(PASS if worst <= ROUNDTRIP_TOL else FAIL, float(worst), where)


def involution_laws(s: ContractiveSystem, ops: dict) -> CheckResult:
    basis = jtl.d_basis(s)
    worst, where = 0.0, None
    names = list(ops)
    for name in names:
        x = ops[name]
        xd = opalg.involution(s, x)
        if opalg.involution(s, xd) is not x:
            return CheckResult(FAIL, float("inf"), {"operator": name, "law": "double dagger"})
        for d in basis:
            for e in basis:
                lhs = jtl.pair(s, opalg.apply(s, xd, e), d)
                rhs_ = np.conj(jtl.pair(s, opalg.apply(s, x, d), e))
                err = abs(lhs - rhs_) / (1.0 + abs(rhs_))
                if err > worst:
                    worst, where = err, {"operator": name, "law": "defining identity"}
    for i, p in enumerate(names):
        for q in names[i + 1:]:
            a, b = 1.5 - 0.5j, -0.25 + 2j
            x, y = ops[p], ops[q]
            lhs = opalg.involution(s, opalg.combine(s, x, y, a, b))
            rhs_ = opalg.combine(s, opalg.involution(s, x), opalg.involution(s, y),
                                 np.conj(a), np.conj(b))
            err = opalg.op_distance(s, lhs, rhs_)
            if err > worst:
                worst, where = err, {"operators": [p, q], "law": "antilinear"}
    return CheckResult(PASS if worst <= 1e-10 else FAIL, float(worst), where)


def product_laws(s: ContractiveSystem, ops: dict) -> CheckResult:
    defined = undefined = 0
    worst, where = 0.0, None
    for p, x in ops.items():
        for q, y in ops.items():
            xy = opalg.partial_product(s, x, y)
            if isinstance(xy, opalg.Undefined):
                undefined += 1
                continue
            defined += 1
            rev = opalg.partial_product(s, opalg.involution(s, y), opalg.involution(s, x))
            if isinstance(rev, opalg.Undefined):
                return CheckResult(FAIL, rev.residual, {"operators": [p, q],
                                                        "reason": "Y^dagger X^dagger undefined"})
            err = opalg.op_distance(s, opalg.involution(s, xy), rev)
            if err > worst:
                worst, where = err, {"operators": [p, q]}
    info = {"defined": defined, "undefined": undefined, "worst_at": where}
    if defined == 0:
        return CheckResult(INCONCLUSIVE, 0.0, info)
    return CheckResult(PASS if worst <= PRODUCT_TOL else FAIL, float(worst), info)


def ofamily_checks(f: OFamily, report: Report):
    rep = validate_ofamily(f)
    report.add("ofamily.directed", ANCHORS["ofamily.directed"],
               verdict=PASS if rep.directed else FAIL, margin=float(len(rep.unbounded_pairs)),
               witness={"unbounded_pairs": rep.unbounded_pairs, "ties": rep.ties})
    worst = 0.0
    for i, a in enumerate(f.names):
        for j, b in enumerate(f.names):
            if i != j and rep.order[i, j]:
                simp = u_simplified(f, a, b)
                gap = np.linalg.norm(u_formula(f, a, b) - simp, 2) / max(1.0, np.linalg.norm(simp, 2))
                worst = max(worst, gap)
    report.add("ofamily.closed_form", ANCHORS["ofamily.closed_form"],
               verdict=PASS if worst <= FORMULA_TOL else FAIL, margin=worst)


def run_suite(loaded: LoadedFile, seed: int = 42, samples: int = 200) -> Report:
    s = loaded.system
    report = Report()
    rep = _axioms(s, report)
    if loaded.family is not None:
        ofamily_checks(loaded.family, report)
    if not rep.directed.passed:
        return report.sorted()

    def add(check, fn):
        report.add(check, ANCHORS[check], _guard(fn))

    def duality():
        worst, where = duality_defect(s, min(samples, 50), seed)
        return CheckResult(PASS if worst <= DUALITY_TOL else FAIL, worst, {"pair": where})

    def stabilization():
        worst, where = stabilization_drift(s, min(samples, 10), seed)
        return CheckResult(PASS if worst <= STABILIZATION_TOL else FAIL, worst, {"pair": where})

    def separating():
        r = jtl.separating_check(s)
        return CheckResult(PASS if r.passed else FAIL, r.margin, r.witness)

    def isometry():
        r = jtl.check_isometry_equiv(s)
        verdicts = [[p.a, p.b, p.isometry, p.lambda_equal] for p in r.pairs]
        return CheckResult(PASS if r.passed else FAIL, float(len(r.mixed)), {"pairs": verdicts})

    def parallelogram():
        r = rhs.check_parallelogram(s, samples, seed)
        ok = r.violation <= rhs.PARALLELOGRAM_TOL
        wit = None if ok or r.witness is None else {
            "d": [[z.real, z.imag] for z in r.witness[0]],
            "e": [[z.real, z.imag] for z in r.witness[1]]}
        return CheckResult(PASS if ok else FAIL, r.violation, wit)

    add("duality.v_adjoint", duality)
    add("pairing.stabilization", stabilization)
    add("pairing.separating", separating)
    add("isometry.equivalence", isometry)
    add("condition.A", lambda: rhs.check_condition_A(s, samples, seed))
    add("condition.C", lambda: rhs.check_condition_C(s, samples, seed))
    add("central.parallelogram", parallelogram)
    _central(s, report, samples, seed)

    ops = dict(loaded.operators) or _probe_operators(s, seed)
    add("operator.roundtrip", lambda: operator_roundtrip(s, ops))
    add("operator.involution", lambda: involution_laws(s, ops))
    add("operator.product", lambda: product_laws(s, ops))
    return report.sorted()


def _central(s: ContractiveSystem, report: Report, samples: int, seed: int):
    ids = ("central.reconstruction", "central.order", "central.intertwiner")
    if not validate_system(s).ok:
        for c in ids:
            report.add(c, ANCHORS[c], verdict=UNDEFINED, witness={"reason": "system is invalid"})
        return
    try:
        h0 = rhs.build_h0(s, samples, seed)
    except (ConditionAViolation, ParallelogramViolation) as exc:
        for c in ids:
            report.add(c, ANCHORS[c], verdict=UNDEFINED,
                       witness={"reason": f"no central space: {type(exc).__name__}"})
        return
    try:
        rec = rhs.reconstruct_ofamily(s, h0)
    except (HScaleError, np.linalg.LinAlgError) as exc:
        report.add(ids[0], ANCHORS[ids[0]], verdict=FAIL, margin=float("nan"),
                   witness={"error": f"{type(exc).__name__}: {exc}"})
        for c in ids[1:]:
            report.add(c, ANCHORS[c], verdict=UNDEFINED, witness={"reason": "no reconstruction"})
        return
    report.add(ids[0], ANCHORS[ids[0]], verdict=PASS if rec.max_gram_error <= 1e-8 else FAIL,
               margin=rec.max_gram_error, witness={"h0": h0.provenance})
    # the converse direction only holds when distinct indices carry distinct norms
    exact = s.kind in ("ofamily", "reconstruction")
    matches = rhs.operator_order_matches(s, rec) if exact else _order_implied(s, rec)
    report.add(ids[1], ANCHORS[ids[1]], verdict=PASS if matches else FAIL,
               margin=0.0 if matches else 1.0, witness={"exact": exact})
    try:
        s2 = rhs.system_from_family(rec, tol=s.tol, poset=s.poset)
        res = rhs.intertwiner(s, s2)
    except (NotInjective, HScaleError, ArithmeticError) as exc:
        res = CheckResult(FAIL, float("nan"), {"error": f"{type(exc).__name__}: {exc}"})
    report.add(ids[2], ANCHORS[ids[2]], res)


def _order_implied(s: ContractiveSystem, rec: rhs.ReconstructedFamily) -> bool:
    """a <= b implies A_a^H G_0 A_a <= A_b^H G_0 A_b."""
    g0 = rec.h0.gram
    forms = {a: op.conj().T @ g0 @ op for a, op in rec.A.items()}
    scale = max(np.linalg.norm(f, 2) for f in forms.values()) or 1.0
    for a, b in s.poset.comparable_pairs(strict=True):
        diff = forms[b] - forms[a]
        if np.linalg.eigvalsh((diff + diff.conj().T) / 2).min() < -1e-9 * scale:
            return False
    return True
