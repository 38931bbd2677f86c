"""Entrywise comparison of pipeline output against shipped reference tables.

Fixtures for n = 2, 3, 4 live next to this module as JSON; polynomials are
stored in the canonical text rendering and parsed back for exact comparison.
Every mismatch is reported with its fixture location; nothing is rounded or
tolerated.
"""

from __future__ import annotations

import json
from importlib import resources

from .connection import Report
from .matrix import PolyMatrix
from .pipeline import Pipeline
from .poly import parse_poly

GOLDEN_NS = ("gl2.json", "gl3.json", "gl4.json")


def load_fixture(n: int) -> dict:
    name = f"gl{n}.json"
    if name not in GOLDEN_NS:
        raise ValueError(f"no reference data for n={n}")
    text = resources.files("qhflag").joinpath("data").joinpath(name).read_text()
    return json.loads(text)


def _compare_matrix(report: Report, tag: str, computed: PolyMatrix, fixture: dict) -> None:
    expected = PolyMatrix.from_json(fixture)
    if computed.nrows != expected.nrows or computed.ncols != expected.ncols:
        report.failures.append(f"{tag}: shape mismatch")
        return
    for key in set(computed.entries) | set(expected.entries):
        got = computed[key]
        want = expected[key]
        if got != want:
            report.failures.append(f"{tag}[{key[0]},{key[1]}]: {got} != {want}")


def verify_golden(pipe: Pipeline) -> Report:
    """Compare every table the fixture pins for this n; exact equality only."""
    fix = load_fixture(pipe.n)
    report = Report(f"reference comparison n={pipe.n}")

    if "p" in fix and pipe.connection.p != fix["p"]:
        report.failures.append(
            f"theta depth: computed p={pipe.connection.p}, reference {fix['p']}"
        )
    if "omega" in fix:
        for i, mat in enumerate(fix["omega"]):
            _compare_matrix(report, f"omega[{i}]", pipe.connection.omega[i], mat)
    if "theta" in fix:
        for j, level in enumerate(fix["theta"]):
            for i, mat in enumerate(level):
                computed = (
                    pipe.connection.thetas[j][i]
                    if j < len(pipe.connection.thetas)
                    else PolyMatrix.zero(pipe.context.size, pipe.context.size)
                )
                _compare_matrix(report, f"theta[{j}][{i}]", computed, mat)
    if "q0" in fix:
        _compare_matrix(report, "q0", pipe.lplus.q0, fix["q0"])
    if "q0_inv" in fix:
        _compare_matrix(report, "q0_inv", pipe.lplus.q0_inverse(), fix["q0_inv"])
    if "hatted" in fix:
        for i, text in enumerate(fix["hatted"]):
            want = parse_poly(text)
            got = pipe.evaluation.hatted[i]
            if got != want:
                report.failures.append(f"hatted[{i}]: {got} != {want}")
    if "basis" in fix:
        for i, text in enumerate(fix["basis"]):
            got = pipe.context.basis_shadows[i]
            if got != parse_poly(text):
                report.failures.append(f"basis[{i}]: {got} != {text}")
    if "c_matrix" in fix:
        _compare_matrix(report, "c_matrix", pipe.schubert_matrix, fix["c_matrix"])
    if "r_matrix" in fix:
        _compare_matrix(report, "r_matrix", pipe.quantum_schubert[0], fix["r_matrix"])
    if "classical_schubert" in fix:
        for i, text in enumerate(fix["classical_schubert"]):
            got = pipe.reduced_schubert_classes[i]
            if got != parse_poly(text):
                report.failures.append(f"classical_schubert[{i}]: {got} != {text}")
    if "quantum_schubert" in fix:
        for i, text in enumerate(fix["quantum_schubert"]):
            got = pipe.quantum_schubert[1][i]
            if got != parse_poly(text):
                report.failures.append(f"quantum_schubert[{i}]: {got} != {text}")
    return report
