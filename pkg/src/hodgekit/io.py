"""JSON records for structures and scenarios, and CSV emission for scans.

Scalars travel as "a/b+c/di" strings, vectors as string arrays, matrices as
row-major nested arrays, and integer-indexed maps with string-encoded keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .filtrations import DecFiltration, IncFiltration
from .linalg import Matrix, Subspace
from .mhs import PolarizationSystem
from .orbits import OrbitScenario, ScanResult
from .scalars import EXACT, QI, format_scalar, parse_scalar


class RecordError(ValueError):
    """Malformed input record (bad keys, shapes, or scalar strings)."""


@dataclass
class Structure:
    """Parsed mixed-structure record: filtration pair, polarization data, N."""

    dimension: int
    w: IncFiltration
    f: DecFiltration
    pol: PolarizationSystem | None
    n_op: Matrix | None


def _scalar(text) -> QI:
    if not isinstance(text, str):
        raise RecordError(f"scalar entries must be strings, got {text!r}")
    try:
        return parse_scalar(text)
    except ValueError as e:
        raise RecordError(str(e))


def _vector(entry, dimension: int):
    if not isinstance(entry, list) or len(entry) != dimension:
        raise RecordError(f"vector must be a list of {dimension} scalar strings")
    return tuple(_scalar(x) for x in entry)


def _int_key(k) -> int:
    try:
        return int(k)
    except (TypeError, ValueError):
        raise RecordError(f"expected string-encoded integer key, got {k!r}")


def matrix_from_json(entry, n: int | None = None) -> Matrix:
    if not isinstance(entry, list) or not entry:
        raise RecordError("matrix must be a non-empty nested list")
    width = len(entry[0])
    rows = []
    for r in entry:
        if not isinstance(r, list) or len(r) != width:
            raise RecordError("matrix rows must all have the same length")
        rows.append([_scalar(x) for x in r])
    if n is not None and (len(rows), width) != (n, n):
        raise RecordError(f"matrix must be {n}x{n}")
    return Matrix(rows, EXACT)


def matrix_to_json(m: Matrix) -> list:
    return [[format_scalar(x) for x in r] for r in m.rows]


def _subspaces_from_json(entry, dimension: int) -> dict[int, Subspace]:
    if not isinstance(entry, dict):
        raise RecordError("filtration must be a map of index -> vector list")
    out = {}
    for k, vectors in entry.items():
        if not isinstance(vectors, list):
            raise RecordError(f"filtration step {k} must be a list of vectors")
        out[_int_key(k)] = Subspace(
            dimension, [_vector(v, dimension) for v in vectors], EXACT
        )
    return out


def _filtration_to_json(jumps) -> dict:
    return {
        str(k): [[format_scalar(x) for x in v] for v in s.basis] for k, s in jumps
    }


def structure_from_json(record: dict) -> Structure:
    if not isinstance(record, dict):
        raise RecordError("structure record must be a JSON object")
    try:
        dimension = int(record["dimension"])
    except (KeyError, TypeError, ValueError):
        raise RecordError('record needs an integer "dimension"')
    if "weight_filtration" not in record or "hodge_filtration" not in record:
        raise RecordError('record needs "weight_filtration" and "hodge_filtration"')
    from .filtrations import FiltrationError

    try:
        w = IncFiltration(dimension, _subspaces_from_json(record["weight_filtration"], dimension))
        f = DecFiltration(dimension, _subspaces_from_json(record["hodge_filtration"], dimension))
    except FiltrationError as e:
        raise RecordError(str(e))
    pol = None
    if "polarizations" in record:
        if "graded_lifts" not in record or "hodge_numbers" not in record:
            raise RecordError('polarized records need "graded_lifts" and "hodge_numbers"')
        lifts = {
            _int_key(k): [_vector(v, dimension) for v in vs]
            for k, vs in record["graded_lifts"].items()
        }
        forms = {_int_key(k): matrix_from_json(m) for k, m in record["polarizations"].items()}
        numbers = {}
        for key, count in record["hodge_numbers"].items():
            parts = str(key).split(",")
            if len(parts) != 2:
                raise RecordError(f'hodge number keys look like "p,q", got {key!r}')
            numbers[(int(parts[0]), int(parts[1]))] = int(count)
        from .mhs import MHSError

        try:
            pol = PolarizationSystem(numbers, lifts, forms)
        except MHSError as e:
            raise RecordError(str(e))
    n_op = None
    if record.get("nilpotent") is not None:
        n_op = matrix_from_json(record["nilpotent"], dimension)
    return Structure(dimension, w, f, pol, n_op)


def structure_to_json(st: Structure) -> dict:
    out = {
        "dimension": st.dimension,
        "weight_filtration": _filtration_to_json(st.w.jumps),
        "hodge_filtration": _filtration_to_json(st.f.jumps),
    }
    if st.pol is not None:
        out["graded_lifts"] = {
            str(k): [[format_scalar(x) for x in v] for v in vs]
            for k, vs in st.pol.graded_lifts.items()
        }
        out["polarizations"] = {str(k): matrix_to_json(m) for k, m in st.pol.forms.items()}
        out["hodge_numbers"] = {
            f"{p},{q}": c for (p, q), c in sorted(st.pol.hodge_numbers.items())
        }
    if st.n_op is not None:
        out["nilpotent"] = matrix_to_json(st.n_op)
    return out


# ---------------------------------------------------------------------------
# scenarios


def scenario_from_json(record: dict) -> OrbitScenario:
    st = structure_from_json(record)
    if st.pol is None or st.n_op is None:
        raise RecordError("scenario records need polarization data and a nilpotent operator")
    gamma = [matrix_from_json(m, st.dimension) for m in record.get("gamma", [])]
    samples_block = record.get("samples", {})
    if not isinstance(samples_block, dict):
        raise RecordError('"samples" must be an object with "kind" and "values"')
    kind = samples_block.get("kind", "s_abs")
    if kind not in ("s_abs", "y"):
        raise RecordError(f'sample kind must be "s_abs" or "y", got {kind!r}')
    values = []
    for v in samples_block.get("values", []):
        try:
            values.append(Fraction(v))
        except (TypeError, ValueError):
            raise RecordError(f"samples must be rational strings, got {v!r}")
    return OrbitScenario(
        name=str(record.get("name", "scenario")),
        f=st.f,
        w=st.w,
        pol=st.pol,
        n_op=st.n_op,
        gamma=gamma,
        samples=values,
        sample_kind=kind,
        compare_split=bool(record.get("compare_split", False)),
    )


def scenario_to_json(sc: OrbitScenario) -> dict:
    st = Structure(sc.f.ambient_dim, sc.w, sc.f, sc.pol, sc.n_op)
    out = structure_to_json(st)
    out["name"] = sc.name
    out["gamma"] = [matrix_to_json(g) for g in sc.gamma]
    out["samples"] = {"kind": sc.sample_kind, "values": [str(v) for v in sc.samples]}
    if sc.compare_split:
        out["compare_split"] = True
    return out


# ---------------------------------------------------------------------------
# scan CSV


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def scan_to_csv(result: ScanResult, exact: bool) -> str:
    header = "y,s_abs,dist,log_dist"
    if exact:
        header += ",dist_sq_exact"
    lines = [header]
    for row in result.rows:
        # skipped rows carry nan distances, which print as "nan"
        cells = [
            fmt_float(row.y),
            fmt_float(row.s_abs),
            fmt_float(row.dist),
            fmt_float(row.log_dist),
        ]
        if exact:
            cells.append("" if row.dist_sq_exact is None else str(Fraction(row.dist_sq_exact)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def scan_to_json(result: ScanResult, exact: bool) -> dict:
    rows = []
    for row in result.rows:
        entry = {
            "y": row.y,
            "s_abs": row.s_abs,
            "dist": row.dist,
            "log_dist": row.log_dist,
        }
        if row.skipped:
            entry["skipped"] = True
            entry["reason"] = row.reason
        if exact and row.dist_sq_exact is not None:
            entry["dist_sq_exact"] = str(Fraction(row.dist_sq_exact))
        rows.append(entry)
    return {
        "rows": rows,
        "fit": {
            "slope": result.slope,
            "log_coeff": result.log_coeff,
            "intercept": result.intercept,
        },
    }


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise RecordError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise RecordError(f"invalid JSON in {path}: {e}")
