"""Ex-ante key synthesis from permutation menus.

A menu lists, per attribute, power-mean targets on absolute displacement
(``alpha <= 1``) and an optional floor on every record's displacement, and per
attribute pair, power-mean targets on relative displacement (``alpha >= 1``).
:func:`synthesize_keys` searches for a key group meeting the menu by simulated
annealing; :func:`score_keys` is the independent check used to accept it.

The annealer never recomputes displacement vectors: it keeps an integer
histogram of displacement magnitudes per key and per constrained pair, so a
swap costs O(1) bookkeeping plus one small matrix product per touched
histogram, and the measured power means carry no accumulated rounding.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import CalibrationError, DimensionError
from .metrics import (
    DEFAULT_CUTOFF,
    GEOMETRIC_ALPHA,
    LOG_SPACE_ALPHA,
    absolute_displacement,
    power_mean,
    relative_displacement,
)
from .perm import DEFAULT_EPSILON, KeyGroup, PermutationKey, displacement
from .seeding import stage_rng

logger = logging.getLogger(__name__)

Comparator = Literal[">=", "<=", "~"]
_CMP_ALIASES = {">=": ">=", "≥": ">=", "<=": "<=", "≤": "<=", "~": "~", "≈": "~", "approx": "~", "==": "~"}

DEFAULT_TOLERANCE = 0.05
DEFAULT_RESTARTS = 8
DEFAULT_BUDGET = 100_000


def normalize_comparator(cmp: str) -> Comparator:
    try:
        return _CMP_ALIASES[cmp.strip()]
    except KeyError:
        raise ValueError(f"unknown comparator {cmp!r}; use '>=', '<=' or '~'") from None


@dataclass(frozen=True)
class Constraint:
    alpha: float
    cmp: Comparator
    target: float
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "cmp", normalize_comparator(self.cmp))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "target", float(self.target))
        object.__setattr__(self, "weight", float(self.weight))

    def bounds(self, tolerance: float) -> tuple[float, float]:
        """Interval of achieved values that satisfies this constraint."""
        if self.cmp == ">=":
            return self.target, math.inf
        if self.cmp == "<=":
            return -math.inf, self.target
        return self.target * (1 - tolerance), self.target * (1 + tolerance)


@dataclass(frozen=True)
class AttributeMenu:
    name: str
    constraints: tuple[Constraint, ...] = ()
    floor: int | None = None


@dataclass(frozen=True)
class PairMenu:
    a: int
    b: int
    constraints: tuple[Constraint, ...] = ()


@dataclass(frozen=True)
class MenuSpec:
    n: int
    attributes: tuple[AttributeMenu, ...]
    pairs: tuple[PairMenu, ...] = ()
    tolerance: float = DEFAULT_TOLERANCE
    normalized: bool = False

    @property
    def p(self) -> int:
        return len(self.attributes)

    @property
    def max_distance(self) -> float:
        return 1.0 if self.normalized else float(self.n - 1)


@dataclass(frozen=True)
class Diagnostic:
    severity: Literal["error", "warning"]
    code: str
    message: str


@dataclass(frozen=True)
class ConstraintResult:
    scope: Literal["attribute", "pair", "floor"]
    subject: str
    alpha: float | None
    cmp: str
    target: float
    achieved: float
    weight: float
    violation: float
    satisfied: bool


@dataclass(frozen=True)
class CalibrationReport:
    results: tuple[ConstraintResult, ...]
    residual: float
    iterations: int = 0
    seed: int | None = None
    restarts: int = 0
    best_restart: int | None = None
    epsilon: float = DEFAULT_EPSILON

    @property
    def satisfied(self) -> bool:
        return all(r.satisfied for r in self.results)

    @property
    def unmet(self) -> list[ConstraintResult]:
        return [r for r in self.results if not r.satisfied]


# ---------------------------------------------------------------------------
# menu coherency


def validate_menu(m: MenuSpec) -> list[Diagnostic]:
    """Report contradictions (``error``) and incoherent requests (``warning``).

    Only provable contradictions are errors.  They rely on the power mean
    being nondecreasing in alpha, on ``J >= min >= floor``, and on the mean
    relative distance of a pair being at least the gap between the two
    attributes' mean absolute distances.
    """
    out: list[Diagnostic] = []

    def err(code, msg):
        out.append(Diagnostic("error", code, msg))

    if m.n < 2:
        err("invalid-size", f"menu n={m.n} must be >= 2")
        return out
    if not m.tolerance > 0:
        err("invalid-tolerance", f"tolerance must be > 0, got {m.tolerance}")
    maxd = m.max_distance
    unit = 1.0 / (m.n - 1) if m.normalized else 1.0

    def check_list(where: str, cons: Sequence[Constraint], risk: bool):
        for c in cons:
            if risk and c.alpha > 1:
                err("alpha-range", f"{where}: risk constraints need alpha <= 1, got {c.alpha}")
            if not risk and c.alpha < 1:
                err("alpha-range", f"{where}: pair constraints need alpha >= 1, got {c.alpha}")
            if not c.target > 0:
                err("target-nonpositive", f"{where}: target must be > 0, got {c.target}")
            if c.target > maxd:
                err("target-exceeds-max", f"{where}: target {c.target} exceeds the maximum distance {maxd:g}")
            if not c.weight > 0:
                err("weight-nonpositive", f"{where}: weight must be > 0, got {c.weight}")
        for c1 in cons:
            lo, _ = c1.bounds(m.tolerance)
            for c2 in cons:
                _, hi = c2.bounds(m.tolerance)
                if c2.alpha >= c1.alpha and lo > hi:
                    err(
                        "empty-interval",
                        f"{where}: J(alpha={c1.alpha:g}) >= {lo:g} cannot coexist with "
                        f"J(alpha={c2.alpha:g}) <= {hi:g}",
                    )

    for j, att in enumerate(m.attributes):
        where = f"attribute {att.name!r}"
        check_list(where, att.constraints, risk=True)
        if att.floor is not None:
            f = att.floor
            if f < 0:
                err("floor-negative", f"{where}: floor must be >= 0, got {f}")
            elif f > m.n // 2:
                err("floor-infeasible", f"{where}: no key of size {m.n} displaces every record by {f} ranks")
            elif f > 0:
                for c in att.constraints:
                    _, hi = c.bounds(m.tolerance)
                    if hi < f * unit:
                        err(
                            "floor-vs-target",
                            f"{where}: floor {f} forces J >= {f * unit:g} but alpha={c.alpha:g} allows at most {hi:g}",
                        )

    names = [a.name for a in m.attributes]
    for pair in m.pairs:
        if not (0 <= pair.a < m.p and 0 <= pair.b < m.p) or pair.a == pair.b:
            err("pair-index", f"pair ({pair.a}, {pair.b}) does not name two distinct attributes")
            continue
        where = f"pair ({names[pair.a]!r}, {names[pair.b]!r})"
        check_list(where, pair.constraints, risk=False)
        mean_a = _mean_bounds(m.attributes[pair.a], m.tolerance)
        mean_b = _mean_bounds(m.attributes[pair.b], m.tolerance)
        gap = max(0.0, mean_a[0] - mean_b[1], mean_b[0] - mean_a[1])
        for c in pair.constraints:
            _, hi = c.bounds(m.tolerance)
            if gap > hi:
                err(
                    "pair-incoherent",
                    f"{where}: the attributes' mean displacements differ by at least {gap:g}, "
                    f"so alpha={c.alpha:g} cannot stay <= {hi:g}",
                )
            elif hi < unit and _profiles_differ(m.attributes[pair.a], m.attributes[pair.b], m.tolerance):
                out.append(
                    Diagnostic(
                        "warning",
                        "dissimilar-keys",
                        f"{where}: near-identical keys are requested (alpha={c.alpha:g} <= {hi:g}) "
                        "but the two attributes ask for different risk profiles",
                    )
                )
    return out


def _mean_bounds(att: AttributeMenu, tol: float) -> tuple[float, float]:
    lo, hi = 0.0, math.inf
    for c in att.constraints:
        if c.alpha == 1:
            clo, chi = c.bounds(tol)
            lo, hi = max(lo, clo), min(hi, chi)
    return lo, hi


def _profiles_differ(a: AttributeMenu, b: AttributeMenu, tol: float) -> bool:
    if (a.floor or 0) != (b.floor or 0):
        return True
    ta = {c.alpha: c.target for c in a.constraints if c.cmp == "~"}
    tb = {c.alpha: c.target for c in b.constraints if c.cmp == "~"}
    for alpha in ta.keys() & tb.keys():
        if abs(ta[alpha] - tb[alpha]) > 2 * tol * max(ta[alpha], tb[alpha]):
            return True
    return False


# ---------------------------------------------------------------------------
# scoring


def _violation(c: Constraint, achieved: float, tol: float) -> tuple[float, bool]:
    t = c.target
    if c.cmp == ">=":
        v = (t - achieved) / t
        return v, achieved >= t
    if c.cmp == "<=":
        v = (achieved - t) / t
        return v, achieved <= t
    v = abs(achieved - t) / t - tol
    return v, v <= 0


def score_keys(K: KeyGroup, m: MenuSpec, epsilon: float = DEFAULT_EPSILON) -> CalibrationReport:
    """Measure every menu constraint on ``K`` with the metrics module.

    ``residual = sum(weight * max(0, violation) ** 2)`` with violations
    relative to the target, so it is zero exactly when all are satisfied.
    """
    if K.n != m.n or K.p != m.p:
        raise DimensionError(f"key group ({K.n} x {K.p}) does not match menu ({m.n} x {m.p})")
    results: list[ConstraintResult] = []
    for j, att in enumerate(m.attributes):
        dist = absolute_displacement(K[j], epsilon, m.normalized)
        if att.floor:
            lowest = float(np.abs(displacement(K[j], epsilon).signed).min())
            f = float(att.floor)
            v = (f - lowest) / f
            results.append(ConstraintResult("floor", att.name, None, ">=", f, lowest, 1.0, v, lowest >= f))
        for c in att.constraints:
            achieved = power_mean(dist, c.alpha)
            v, ok = _violation(c, achieved, m.tolerance)
            results.append(ConstraintResult("attribute", att.name, c.alpha, c.cmp, c.target, achieved, c.weight, v, ok))
    for pair in m.pairs:
        dist = relative_displacement(K[pair.a], K[pair.b], epsilon, m.normalized)
        subject = f"{m.attributes[pair.a].name}|{m.attributes[pair.b].name}"
        for c in pair.constraints:
            achieved = power_mean(dist, c.alpha)
            v, ok = _violation(c, achieved, m.tolerance)
            results.append(ConstraintResult("pair", subject, c.alpha, c.cmp, c.target, achieved, c.weight, v, ok))
    residual = float(sum(r.weight * max(0.0, r.violation) ** 2 for r in results))
    return CalibrationReport(tuple(results), residual, epsilon=epsilon)


# ---------------------------------------------------------------------------
# key proposals


def local_shuffle(n: int, window: int, fixed_fraction: float, rng: np.random.Generator) -> np.ndarray:
    """0-based key that rotates short runs of mobile positions.

    Each position stays put with probability ``fixed_fraction``; the rest are
    cut into consecutive runs of ``window + 1`` and cyclically shifted, so
    every mobile position moves and no shift exceeds the run's span.
    """
    src = np.arange(n)
    mobile = np.flatnonzero(rng.random(n) >= fixed_fraction)
    size = max(2, int(window) + 1)
    runs = [mobile[i : i + size] for i in range(0, mobile.size, size)]
    if len(runs) > 1 and runs[-1].size < 2:
        runs[-2] = np.concatenate((runs[-2], runs[-1]))
        runs.pop()
    for run in runs:
        if run.size >= 2:
            src[run] = np.roll(run, int(rng.integers(1, run.size)))
    return src


def adjacent_transpositions(n: int) -> np.ndarray:
    """Every record moves exactly one rank (a 3-cycle closes odd ``n``)."""
    src = np.arange(n)
    for i in range(0, n - 1, 2):
        src[i], src[i + 1] = i + 1, i
    if n % 2 == 1 and n >= 3:
        src[n - 3 :] = [n - 2, n - 1, n - 3]
    return src


# ---------------------------------------------------------------------------
# annealing state


class _Term:
    """Power-mean constraints evaluated on one displacement histogram."""

    def __init__(self, constraints: Sequence[Constraint], floor: int, dvals: np.ndarray, tol: float, cutoff: float):
        self.constraints = list(constraints)
        self.floor = int(floor or 0)
        self.dvals = dvals
        self.n_hist = dvals.size
        band = min(math.log1p(tol), -math.log1p(-tol)) * 0.9 if tol < 1 else math.log1p(tol) * 0.9
        self.band = band
        self.cutoff = cutoff
        cols, kinds = [], []
        logd = np.log(dvals)
        for c in self.constraints:
            a = c.alpha
            if abs(a) > cutoff:
                kinds.append("max" if a > 0 else "min")
                cols.append(np.zeros_like(dvals))
            elif abs(a) < GEOMETRIC_ALPHA:
                kinds.append("geo")
                cols.append(logd)
            elif abs(a) > LOG_SPACE_ALPHA:
                kinds.append("lse")
                cols.append(a * logd)
            else:
                kinds.append("pow")
                cols.append(dvals**a)
        self.kinds = kinds
        self.table = np.column_stack(cols) if cols else np.zeros((dvals.size, 0))
        self.log_targets = np.array([math.log(c.target) for c in self.constraints])
        self.weights = np.array([c.weight for c in self.constraints])

    def measure(self, counts: np.ndarray, total: int) -> np.ndarray:
        sums = counts @ self.table
        out = np.empty(len(self.constraints))
        nz = None
        for k, (kind, c) in enumerate(zip(self.kinds, self.constraints)):
            if kind == "pow":
                out[k] = (sums[k] / total) ** (1.0 / c.alpha)
            elif kind == "geo":
                out[k] = math.exp(sums[k] / total)
            else:
                if nz is None:
                    nz = np.flatnonzero(counts)
                if kind == "min":
                    out[k] = self.dvals[nz[0]]
                elif kind == "max":
                    out[k] = self.dvals[nz[-1]]
                else:
                    col = self.table[nz, k]
                    top = col.max()
                    lse = top + math.log(float(np.dot(counts[nz], np.exp(col - top))))
                    out[k] = math.exp((lse - math.log(total)) / c.alpha)
        return out

    def energy(self, counts: np.ndarray, total: int) -> float:
        e = 0.0
        if self.floor:
            below = counts[: self.floor]
            deficit = float(np.dot(below, self.floor - np.arange(self.floor)))
            e += 10.0 * deficit / (total * self.floor)
        if self.constraints:
            lr = np.log(self.measure(counts, total)) - self.log_targets
            for k, c in enumerate(self.constraints):
                if c.cmp == "~":
                    d = abs(lr[k]) - self.band
                elif c.cmp == ">=":
                    d = -lr[k] + 1e-9
                else:
                    d = lr[k] + 1e-9
                if d > 0:
                    e += self.weights[k] * d * d
        return e


class _State:
    def __init__(self, menu: MenuSpec, keys: list[np.ndarray], terms_att, terms_pair, pair_index):
        self.n = menu.n
        self.keys = [k.copy() for k in keys]
        self.inv = [np.argsort(k) for k in self.keys]
        self.terms_att = terms_att
        self.terms_pair = terms_pair
        self.pairs = pair_index
        self.pairs_of = {j: [q for q, (a, b) in enumerate(pair_index) if j in (a, b)] for j in range(len(keys))}
        self.rebuild()

    def rebuild(self):
        n = self.n
        idx = np.arange(n)
        self.h_att = [np.bincount(np.abs(idx - k), minlength=n) for k in self.keys]
        self.h_pair = [np.bincount(np.abs(self.keys[a] - self.keys[b]), minlength=n) for a, b in self.pairs]
        self.e_att = [t.energy(h, n) if t else 0.0 for t, h in zip(self.terms_att, self.h_att)]
        self.e_pair = [t.energy(h, n) for t, h in zip(self.terms_pair, self.h_pair)]

    @property
    def energy(self) -> float:
        return float(sum(self.e_att) + sum(self.e_pair))

    def swap(self, j: int, i1: int, i2: int) -> float:
        """Swap two entries of key ``j``; returns the new total energy."""
        k = self.keys[j]
        h = self.h_att[j]
        v1, v2 = k[i1], k[i2]
        h[abs(i1 - v1)] -= 1
        h[abs(i2 - v2)] -= 1
        h[abs(i1 - v2)] += 1
        h[abs(i2 - v1)] += 1
        for q in self.pairs_of[j]:
            a, b = self.pairs[q]
            other = self.keys[b if a == j else a]
            hp = self.h_pair[q]
            hp[abs(v1 - other[i1])] -= 1
            hp[abs(v2 - other[i2])] -= 1
            hp[abs(v2 - other[i1])] += 1
            hp[abs(v1 - other[i2])] += 1
        k[i1], k[i2] = v2, v1
        inv = self.inv[j]
        inv[v1], inv[v2] = i2, i1
        self._reenergize(j)
        return self.energy

    def replace(self, j: int, new_key: np.ndarray) -> float:
        self.keys[j] = new_key.copy()
        self.inv[j] = np.argsort(new_key)
        n = self.n
        self.h_att[j] = np.bincount(np.abs(np.arange(n) - new_key), minlength=n)
        for q in self.pairs_of[j]:
            a, b = self.pairs[q]
            self.h_pair[q] = np.bincount(np.abs(self.keys[a] - self.keys[b]), minlength=n)
        self._reenergize(j)
        return self.energy

    def _reenergize(self, j: int):
        t = self.terms_att[j]
        self.e_att[j] = t.energy(self.h_att[j], self.n) if t else 0.0
        for q in self.pairs_of[j]:
            self.e_pair[q] = self.terms_pair[q].energy(self.h_pair[q], self.n)

    def snapshot(self, j: int):
        return self.keys[j].copy()


def _dvals(m: MenuSpec, epsilon: float) -> np.ndarray:
    d = np.arange(m.n, dtype=float)
    if m.normalized:
        d /= m.n - 1
    d[0] = epsilon
    return d


def _initial_candidates(n: int, rng: np.random.Generator) -> list[np.ndarray]:
    cands = [np.arange(n), rng.permutation(n), adjacent_transpositions(n)]
    w = 1
    while w < n:
        for phi in (0.0, 0.5, 0.9):
            cands.append(local_shuffle(n, w, phi, rng))
        w *= 2
    return cands


def _anneal(menu, terms_att, terms_pair, pair_index, constrained, rng, iterations, cutoff):
    n, p = menu.n, menu.p
    keys = []
    for j in range(p):
        t = terms_att[j]
        if j not in constrained:
            keys.append(np.arange(n))
            continue
        best, best_e = None, math.inf
        for cand in _initial_candidates(n, rng):
            e = t.energy(np.bincount(np.abs(np.arange(n) - cand), minlength=n), n) if t else 0.0
            if e < best_e:
                best, best_e = cand, e
        keys.append(best)
    state = _State(menu, keys, terms_att, terms_pair, pair_index)
    # pair-driven alternative: derive the second key of each pair from the first
    for q, (a, b) in enumerate(pair_index):
        before = state.energy
        saved = state.snapshot(b)
        best_key, best_e = saved, before
        w = 1
        while w < n:
            for phi in (0.0, 0.5, 0.9):
                pert = local_shuffle(n, w, phi, rng)
                e = state.replace(b, pert[state.keys[a]])
                if e < best_e:
                    best_key, best_e = state.keys[b].copy(), e
            w *= 2
        state.replace(b, best_key)

    cur = state.energy
    best_keys = [k.copy() for k in state.keys]
    best_e = cur
    used = 0
    if cur == 0 or iterations <= 0:
        return best_keys, best_e, used

    movable = sorted(constrained)
    log_n = math.log(max(n - 1, 2))

    def propose():
        """Apply one random move; return an undo callback."""
        j = movable[int(rng.integers(len(movable)))]
        u = rng.random()
        if u < 0.01:
            saved = state.snapshot(j)
            w = int(math.exp(rng.random() * log_n))
            state.replace(j, local_shuffle(n, w, rng.random(), rng))
            return lambda: state.replace(j, saved)
        if u < 0.02 and pair_index:
            q = int(rng.integers(len(pair_index)))
            a, b = pair_index[q]
            if rng.random() < 0.5:
                a, b = b, a
            if b in constrained:
                saved = state.snapshot(b)
                w = int(math.exp(rng.random() * log_n))
                state.replace(b, local_shuffle(n, w, rng.random(), rng)[state.keys[a]])
                return lambda: state.replace(b, saved)
        i1 = int(rng.integers(n))
        if u < 0.15:
            i2 = int(state.inv[j][i1])
            if i2 == i1:
                i2 = i1 + (1 if i1 + 1 < n else -1)
        elif u < 0.25 and state.pairs_of[j]:
            q = state.pairs_of[j][int(rng.integers(len(state.pairs_of[j])))]
            a, b = pair_index[q]
            other = state.keys[b if a == j else a]
            i2 = int(state.inv[j][other[i1]])
            if i2 == i1:
                i2 = i1 + (1 if i1 + 1 < n else -1)
        else:
            w = int(math.exp(rng.random() * log_n))
            step = int(rng.integers(1, w + 1)) * (1 if rng.random() < 0.5 else -1)
            i2 = i1 + step
            if i2 < 0 or i2 >= n:
                i2 = i1 - step
            i2 = min(max(i2, 0), n - 1)
            if i2 == i1:
                i2 = i1 + (1 if i1 + 1 < n else -1)
        state.swap(j, i1, i2)
        return lambda: state.swap(j, i1, i2)

    # temperature scale from the typical uphill step
    deltas = []
    for _ in range(min(200, iterations)):
        undo = propose()
        deltas.append(abs(state.energy - cur))
        undo()
    positive = [d for d in deltas if d > 0]
    t0 = float(np.median(positive)) if positive else 1e-3
    t_end = t0 * 1e-4
    decay = (t_end / t0) ** (1.0 / max(iterations - 1, 1))
    temp = t0
    for it in range(iterations):
        used = it + 1
        undo = propose()
        new = state.energy
        delta = new - cur
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            cur = new
            if cur < best_e:
                best_e = cur
                best_keys = [k.copy() for k in state.keys]
                if best_e == 0:
                    break
        else:
            undo()
        temp *= decay
    return best_keys, best_e, used


def synthesize_keys(
    m: MenuSpec,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    epsilon: float = DEFAULT_EPSILON,
    restarts: int = DEFAULT_RESTARTS,
    cutoff: float = DEFAULT_CUTOFF,
) -> tuple[KeyGroup, CalibrationReport]:
    """Search for a key group satisfying ``m``.

    ``budget`` is the total number of annealing iterations, split evenly over
    ``restarts``.  Restart ``r`` draws from stage ``("calibrate", r)`` of
    ``seed``; restarts run in order and the first one whose keys re-verify
    with :func:`score_keys` wins, which is the same as picking the lowest
    residual with ties going to the lowest restart index.  Attributes
    without constraints and outside every pair keep the identity key.

    Raises :class:`CalibrationError` (carrying the best report) when the
    menu is contradictory or the budget runs out with constraints unmet.
    """
    problems = [d for d in validate_menu(m) if d.severity == "error"]
    if problems:
        report = score_keys(KeyGroup(PermutationKey(np.arange(1, m.n + 1)) for _ in range(m.p)), m, epsilon)
        raise CalibrationError("menu is contradictory: " + "; ".join(d.message for d in problems), report)
    dvals = _dvals(m, epsilon)
    terms_att = [
        _Term(a.constraints, a.floor or 0, dvals, m.tolerance, cutoff) if (a.constraints or a.floor) else None
        for a in m.attributes
    ]
    pair_index = [(pr.a, pr.b) for pr in m.pairs if pr.constraints]
    terms_pair = [_Term(pr.constraints, 0, dvals, m.tolerance, cutoff) for pr in m.pairs if pr.constraints]
    constrained = {j for j, t in enumerate(terms_att) if t is not None}
    for a, b in pair_index:
        constrained.update((a, b))

    restarts = max(1, int(restarts))
    per_restart = max(0, int(budget)) // restarts
    best = None
    total_used = 0
    for r in range(restarts):
        rng = stage_rng(seed, "calibrate", r)
        keys, energy, used = _anneal(m, terms_att, terms_pair, pair_index, constrained, rng, per_restart, cutoff)
        total_used += used
        group = KeyGroup(PermutationKey.from_source(k) for k in keys)
        report = score_keys(group, m, epsilon)
        logger.debug("restart %d: energy=%.3g residual=%.3g after %d iterations", r, energy, report.residual, used)
        if best is None or report.residual < best[1].residual:
            best = (group, report, r)
        if report.satisfied:
            break
    group, report, r = best
    report = CalibrationReport(
        report.results, report.residual, total_used, seed, restarts, r, epsilon
    )
    if not report.satisfied:
        raise CalibrationError(
            f"budget of {budget} iterations exhausted with {len(report.unmet)} unmet constraint(s)", report
        )
    return group, report


def menu_from_measurements(
    K: KeyGroup,
    risk_alphas: Sequence[float],
    loss_alphas: Sequence[float] = (),
    pairs: Sequence[tuple[int, int]] | None = None,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = DEFAULT_TOLERANCE,
    normalized: bool = False,
    names: Sequence[str] | None = None,
) -> MenuSpec:
    """``~`` menu whose targets are the measured curves of ``K``.

    Useful for replaying the menu of an existing method, and as a round-trip
    check of :func:`synthesize_keys`.
    """
    names = list(names) if names is not None else [f"X{j + 1}" for j in range(K.p)]
    atts = []
    for j, k in enumerate(K):
        dist = absolute_displacement(k, epsilon, normalized)
        cons = tuple(Constraint(a, "~", power_mean(dist, a)) for a in risk_alphas)
        atts.append(AttributeMenu(names[j], cons))
    if pairs is None:
        pairs = [(a, b) for a in range(K.p) for b in range(a + 1, K.p)]
    prs = []
    for a, b in pairs:
        dist = relative_displacement(K[a], K[b], epsilon, normalized)
        prs.append(PairMenu(a, b, tuple(Constraint(x, "~", power_mean(dist, x)) for x in loss_alphas)))
    return MenuSpec(K.n, tuple(atts), tuple(prs) if loss_alphas else (), tolerance, normalized)
