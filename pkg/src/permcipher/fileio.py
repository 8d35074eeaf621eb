"""File formats: CSV datasets and curves, JSON keys and menus."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .calibrate import AttributeMenu, CalibrationReport, Constraint, MenuSpec, PairMenu, validate_menu
from .dataset import Dataset
from .errors import InvalidDataError, InvalidSizeError, ParseError, ValidationError
from .metrics import GRID_STEP, AversionCurve
from .perm import DEFAULT_EPSILON, KeyGroup, PermutationKey

PathLike = str | Path


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    alpha_min: float = -5.0
    alpha_max: float = 5.0
    alpha_step: float = GRID_STEP
    normalize: bool = False

    def __post_init__(self):
        if not self.alpha_step > 0:
            raise ValidationError(f"alpha step must be > 0, got {self.alpha_step}")
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")
        if self.seed < 0:
            raise ValidationError(f"seed must be >= 0, got {self.seed}")


def format_number(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


# ---------------------------------------------------------------------------
# datasets


def _parse_id(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def load_dataset(path: PathLike, has_header: bool = True) -> Dataset:
    """Read a rectangular numeric CSV.

    A header column named ``id`` (any case) supplies record IDs; otherwise
    records are numbered ``1..n`` in file order.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: file is empty")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise InvalidSizeError(f"{path}: no data records")
    width = len(header) if header else len(rows[0])
    id_col = None
    if header:
        lowered = [h.lower() for h in header]
        if "id" in lowered:
            id_col = lowered.index("id")
    ids, data = [], []
    for i, row in enumerate(rows, start=2 if has_header else 1):
        if len(row) != width:
            raise ParseError(f"{path}: row {i} has {len(row)} fields, expected {width}")
        rec = []
        for j, cell in enumerate(row):
            if j == id_col:
                ids.append(_parse_id(cell.strip()))
                continue
            try:
                v = float(cell)
            except ValueError:
                name = header[j] if header else str(j + 1)
                raise ParseError(f"{path}: row {i}, column {name!r}: {cell!r} is not numeric") from None
            if not math.isfinite(v):
                name = header[j] if header else str(j + 1)
                raise ParseError(f"{path}: row {i}, column {name!r}: non-finite value {cell!r}")
            rec.append(v)
        data.append(rec)
    if len(data) < 2:
        raise InvalidSizeError(f"{path}: a dataset needs at least 2 records, got {len(data)}")
    names = None
    if header:
        names = [h for j, h in enumerate(header) if j != id_col]
    if not data[0]:
        raise ParseError(f"{path}: no numeric attributes")
    return Dataset(np.array(data), record_ids=ids if id_col is not None else None, column_names=names)


def dataset_to_csv(D: Dataset, include_ids: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((["id"] if include_ids else []) + list(D.column_names))
    for rid, row in zip(D.record_ids, D.values):
        w.writerow(([rid] if include_ids else []) + [format_number(v) for v in row])
    return buf.getvalue()


def save_dataset(D: Dataset, path: PathLike, include_ids: bool = True) -> None:
    Path(path).write_text(dataset_to_csv(D, include_ids), encoding="utf-8")


# ---------------------------------------------------------------------------
# keys


def key_to_matrix(k: PermutationKey) -> np.ndarray:
    """Dense 0/1 matrix ``D`` with ``D[i, map[i]] = 1`` (so ``D @ s == apply(k, s)``)."""
    D = np.zeros((k.n, k.n), dtype=np.int8)
    D[np.arange(k.n), k.source] = 1
    return D


def key_from_matrix(D) -> PermutationKey:
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValidationError(f"permutation matrix must be square, got shape {D.shape}")
    if not np.isin(D, (0, 1)).all() or not (D.sum(axis=0) == 1).all() or not (D.sum(axis=1) == 1).all():
        raise ValidationError("not a permutation matrix: every row and column needs exactly one 1")
    return PermutationKey.from_source(np.argmax(D, axis=1))


def keys_to_dict(K: KeyGroup) -> dict:
    return {"n": K.n, "keys": [k.map.tolist() for k in K]}


def keys_from_dict(doc) -> KeyGroup:
    if not isinstance(doc, dict) or "keys" not in doc or "n" not in doc:
        raise ValidationError("key file must be an object with 'n' and 'keys'")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"'n' must be an integer, got {n!r}")
    keys = doc["keys"]
    if not isinstance(keys, list) or not keys:
        raise ValidationError("'keys' must be a non-empty list")
    out = []
    for j, seq in enumerate(keys):
        if not isinstance(seq, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in seq):
            raise ValidationError(f"keys[{j}] must be a list of integers")
        if len(seq) != n:
            raise ValidationError(f"keys[{j}] has length {len(seq)}, expected n={n}")
        try:
            out.append(PermutationKey(seq))
        except (InvalidDataError, InvalidSizeError) as exc:
            raise ValidationError(f"keys[{j}]: {exc}") from None
    return KeyGroup(out)


def save_keys(K: KeyGroup, path: PathLike, matrix: bool = False) -> None:
    """Write the JSON key document; ``matrix=True`` adds dense 0/1 matrices."""
    doc = keys_to_dict(K)
    if matrix:
        doc["matrices"] = [key_to_matrix(k).tolist() for k in K]
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_keys(path: PathLike) -> KeyGroup:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from None
    return keys_from_dict(doc)


# ---------------------------------------------------------------------------
# menus


def _constraints(doc, where: str) -> tuple[Constraint, ...]:
    if doc is None:
        return ()
    if not isinstance(doc, list):
        raise ValidationError(f"{where}.constraints must be a list")
    out = []
    for i, c in enumerate(doc):
        here = f"{where}.constraints[{i}]"
        if not isinstance(c, dict):
            raise ValidationError(f"{here} must be an object")
        unknown = set(c) - {"alpha", "cmp", "target", "weight"}
        if unknown:
            raise ValidationError(f"{here}: unknown field(s) {sorted(unknown)}")
        for req in ("alpha", "cmp", "target"):
            if req not in c:
                raise ValidationError(f"{here}: missing field {req!r}")
        for num in ("alpha", "target", "weight"):
            if num in c and (not isinstance(c[num], (int, float)) or isinstance(c[num], bool)):
                raise ValidationError(f"{here}.{num} must be a number, got {c[num]!r}")
        try:
            out.append(Constraint(c["alpha"], c["cmp"], c["target"], c.get("weight", 1.0)))
        except ValueError as exc:
            raise ValidationError(f"{here}.cmp: {exc}") from None
    return tuple(out)


def menu_from_dict(doc) -> MenuSpec:
    """Build a :class:`MenuSpec` from the JSON document layout.

    ``{"n", "attributes": [{"name", "floor"?, "constraints"}], "pairs":
    [{"a", "b", "constraints"}], "tolerance"?, "normalized"?}``; pair ends may be
    attribute names or 0-based indices.
    """
    if not isinstance(doc, dict):
        raise ValidationError("menu must be a JSON object")
    unknown = set(doc) - {"n", "attributes", "pairs", "tolerance", "normalized"}
    if unknown:
        raise ValidationError(f"menu: unknown field(s) {sorted(unknown)}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValidationError(f"menu.n must be an integer >= 2, got {n!r}")
    atts_doc = doc.get("attributes", [])
    if not isinstance(atts_doc, list):
        raise ValidationError("menu.attributes must be a list")
    atts = []
    for j, a in enumerate(atts_doc):
        where = f"attributes[{j}]"
        if not isinstance(a, dict):
            raise ValidationError(f"{where} must be an object")
        unknown = set(a) - {"name", "floor", "constraints"}
        if unknown:
            raise ValidationError(f"{where}: unknown field(s) {sorted(unknown)}")
        floor = a.get("floor")
        if floor is not None and (not isinstance(floor, int) or isinstance(floor, bool)):
            raise ValidationError(f"{where}.floor must be an integer, got {floor!r}")
        atts.append(AttributeMenu(str(a.get("name", f"X{j + 1}")), _constraints(a.get("constraints"), where), floor))
    names = [a.name for a in atts]

    def resolve(ref, where):
        if isinstance(ref, int) and not isinstance(ref, bool):
            return ref
        if isinstance(ref, str) and ref in names:
            return names.index(ref)
        raise ValidationError(f"{where} does not name an attribute: {ref!r}")

    pairs = []
    pairs_doc = doc.get("pairs", [])
    if not isinstance(pairs_doc, list):
        raise ValidationError("menu.pairs must be a list")
    for q, pr in enumerate(pairs_doc):
        where = f"pairs[{q}]"
        if not isinstance(pr, dict) or "a" not in pr or "b" not in pr:
            raise ValidationError(f"{where} must be an object with 'a' and 'b'")
        pairs.append(PairMenu(resolve(pr["a"], f"{where}.a"), resolve(pr["b"], f"{where}.b"), _constraints(pr.get("constraints"), where)))
    tol = doc.get("tolerance", 0.05)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool):
        raise ValidationError(f"menu.tolerance must be a number, got {tol!r}")
    normalized = doc.get("normalized", False)
    if not isinstance(normalized, bool):
        raise ValidationError(f"menu.normalized must be true or false, got {normalized!r}")
    return MenuSpec(n, tuple(atts), tuple(pairs), float(tol), normalized)


def menu_to_dict(m: MenuSpec) -> dict:
    def cons(cs):
        return [{"alpha": c.alpha, "cmp": c.cmp, "target": c.target, "weight": c.weight} for c in cs]

    atts = []
    for a in m.attributes:
        d = {"name": a.name, "constraints": cons(a.constraints)}
        if a.floor is not None:
            d["floor"] = a.floor
        atts.append(d)
    return {
        "n": m.n,
        "attributes": atts,
        "pairs": [{"a": pr.a, "b": pr.b, "constraints": cons(pr.constraints)} for pr in m.pairs],
        "tolerance": m.tolerance,
        "normalized": m.normalized,
    }


def parse_menu(path: PathLike) -> tuple[MenuSpec, list]:
    """Load a menu file; returns the menu and its :func:`validate_menu` diagnostics."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from None
    m = menu_from_dict(doc)
    return m, validate_menu(m)


def report_to_dict(r: CalibrationReport) -> dict:
    return {
        "satisfied": r.satisfied,
        "residual": r.residual,
        "iterations": r.iterations,
        "seed": r.seed,
        "restarts": r.restarts,
        "best_restart": r.best_restart,
        "epsilon": r.epsilon,
        "constraints": [
            {
                "scope": c.scope,
                "subject": c.subject,
                "alpha": c.alpha,
                "cmp": c.cmp,
                "target": c.target,
                "achieved": c.achieved,
                "satisfied": c.satisfied,
            }
            for c in r.results
        ],
    }


# ---------------------------------------------------------------------------
# curves


CURVE_COLUMNS = ("alpha", "value", "kind", "attribute_or_pair")


def curves_to_csv(curves: Iterable[AversionCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for c in curves:
        for a, v in zip(c.alphas, c.values):
            w.writerow([repr(float(a)), repr(float(v)), c.kind, c.label])
    return buf.getvalue()


def write_curves_csv(curves: Iterable[AversionCurve], path: PathLike) -> None:
    Path(path).write_text(curves_to_csv(curves), encoding="utf-8")


def read_curves_csv(path: PathLike) -> list[AversionCurve]:
    """Inverse of :func:`write_curves_csv`; curves keep their file order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CURVE_COLUMNS:
            raise ParseError(f"{path}: expected header {','.join(CURVE_COLUMNS)}")
        groups: dict[tuple[str, str], tuple[list, list]] = {}
        for i, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ParseError(f"{path}: row {i} has {len(row)} fields, expected 4")
            try:
                a, v = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"{path}: row {i} has a non-numeric alpha or value") from None
            alphas, values = groups.setdefault((row[2], row[3]), ([], []))
            alphas.append(a)
            values.append(v)
    return [AversionCurve(np.array(a), np.array(v), kind, label=label) for (kind, label), (a, v) in groups.items()]


def linkage_report_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    cols = ["masking", "method", "strategy", "seed", "correct_rate"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in cols})
    return buf.getvalue()
