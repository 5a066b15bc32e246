"""Problem file format (version 1) and solution serialization.

A problem file is a JSON object {"version": 1, "dim": N, "T": M, "P": [M..]}
where a matrix M is a row-major list of rows and every entry is a two-element
[re, im] list of finite doubles. Complex values stay split for portability.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .problem import HqcqpProblem, Solution


class ProblemFormatError(ValueError):
    pass


def _matrix_to_lists(a: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(a, dtype=np.complex128)]


def _vector_to_lists(v: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128)]


def _lists_to_matrix(obj, n: int, name: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise ProblemFormatError(f"{name} must be a list of {n} rows")
    out = np.zeros((n, n), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise ProblemFormatError(f"{name} row {i} must have {n} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) for x in entry)
            ):
                raise ProblemFormatError(
                    f"{name}[{i}][{j}] must be a [re, im] pair of numbers"
                )
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ProblemFormatError(f"{name}[{i}][{j}] must be finite")
            out[i, j] = re + 1j * im
    return out


def problem_to_json(prob: HqcqpProblem) -> str:
    doc = {
        "version": 1,
        "dim": prob.dim,
        "T": _matrix_to_lists(prob.T),
        "P": [_matrix_to_lists(p) for p in prob.P],
    }
    return json.dumps(doc, indent=2)


def parse_problem_text(text: str) -> HqcqpProblem:
    """Parse and validate a version-1 problem document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProblemFormatError(
            f"parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err
    if not isinstance(doc, dict):
        raise ProblemFormatError("top-level document must be an object")
    if doc.get("version") != 1:
        raise ProblemFormatError("unsupported or missing version (expected 1)")
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ProblemFormatError("dim must be a positive integer")
    if "T" not in doc or "P" not in doc:
        raise ProblemFormatError("document must carry both T and P")
    t = _lists_to_matrix(doc["T"], dim, "T")
    plist = doc["P"]
    if not isinstance(plist, list) or not 1 <= len(plist) <= 3:
        raise ProblemFormatError("P must list between 1 and 3 matrices")
    ps = tuple(
        _lists_to_matrix(p, dim, f"P[{k}]") for k, p in enumerate(plist)
    )
    try:
        return HqcqpProblem(t, ps)
    except ValueError as err:
        raise ProblemFormatError(str(err)) from err


def load_problem(path) -> HqcqpProblem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem_text(fh.read())


def save_problem(prob: HqcqpProblem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(problem_to_json(prob))
        fh.write("\n")


def solution_to_dict(sol: Solution) -> dict:
    return {
        "p_star": sol.p_star,
        "c_star": sol.c_star,
        "u": _vector_to_lists(sol.u),
        "x": _vector_to_lists(sol.x),
        "case_tag": sol.case_tag,
        "binding": list(sol.binding),
        "multipliers": list(sol.multipliers),
        "iterations": sol.trace[-1][0] if sol.trace else 0,
        "flags": list(sol.flags),
    }


def solution_to_json(sol: Solution) -> str:
    return json.dumps(solution_to_dict(sol), indent=2)
