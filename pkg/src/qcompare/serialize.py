"""JSON wire formats.

States are lists of [re, im] pairs.  Matrices are row-major nested lists of
[re, im] pairs.  Machines and cloners are JSON objects wrapping a matrix, a
state, and their register metadata.
"""
from __future__ import annotations

from typing import Any

import numpy as np

from .cloning import Cloner
from .core import Operator, StateVector
from .machines import DecisionMachine
from .verifier import VerificationReport


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _from_pair(p: Any, what: str) -> complex:
    if not (isinstance(p, (list, tuple)) and len(p) == 2):
        raise ValueError(f"{what}: expected a [re, im] pair, got {p!r}")
    re, im = p
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
        raise ValueError(f"{what}: [re, im] entries must be numbers, got {p!r}")
    return complex(re, im)


def state_to_literal(s: StateVector) -> list[list[float]]:
    return [_pair(z) for z in s.amplitudes]


def state_from_literal(lit: Any, dims: tuple[int, ...] | None = None) -> StateVector:
    if not isinstance(lit, list) or not lit:
        raise ValueError(f"state literal must be a non-empty list, got {lit!r}")
    amp = np.array([_from_pair(p, "state literal") for p in lit])
    return StateVector(amp, dims if dims is not None else (amp.size,))


def matrix_to_literal(m: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def matrix_from_literal(lit: Any) -> np.ndarray:
    if not isinstance(lit, list) or not lit:
        raise ValueError(f"matrix literal must be a non-empty list of rows, got {lit!r}")
    rows = []
    for row in lit:
        if not isinstance(row, list) or len(row) != len(lit[0]):
            raise ValueError("matrix literal rows must be equal-length lists")
        rows.append([_from_pair(p, "matrix literal") for p in row])
    return np.array(rows)


def machine_to_dict(machine: DecisionMachine) -> dict[str, Any]:
    return {
        "probe_dim": machine.probe_dim,
        "target_dim": machine.target_dim,
        "ancilla_dims": list(machine.ancilla_dims),
        "output_qubit": machine.output_qubit,
        "unitary": matrix_to_literal(machine.unitary.entries),
        "ancilla_init": state_to_literal(machine.ancilla_init),
    }


def machine_from_dict(d: Any) -> DecisionMachine:
    if not isinstance(d, dict):
        raise ValueError(f"machine JSON must be an object, got {type(d).__name__}")
    required = {"probe_dim", "target_dim", "ancilla_dims", "output_qubit", "unitary"}
    missing = required - d.keys()
    if missing:
        raise ValueError(f"machine JSON missing keys: {sorted(missing)}")
    ancilla_dims = tuple(int(x) for x in d["ancilla_dims"])
    ancilla_init = (
        state_from_literal(d["ancilla_init"], ancilla_dims)
        if "ancilla_init" in d
        else None
    )
    return DecisionMachine(
        unitary=Operator(matrix_from_literal(d["unitary"])),
        probe_dim=int(d["probe_dim"]),
        target_dim=int(d["target_dim"]),
        ancilla_dims=ancilla_dims,
        ancilla_init=ancilla_init,
        output_qubit=int(d["output_qubit"]),
    )


def cloner_to_dict(cloner: Cloner) -> dict[str, Any]:
    return {
        "dims": list(cloner.dims),
        "clone_indices": list(cloner.clone_indices),
        "input_index": cloner.input_index,
        "unitary": matrix_to_literal(cloner.unitary.entries),
    }


def cloner_from_dict(d: Any) -> Cloner:
    if not isinstance(d, dict):
        raise ValueError(f"cloner JSON must be an object, got {type(d).__name__}")
    required = {"dims", "clone_indices", "unitary"}
    missing = required - d.keys()
    if missing:
        raise ValueError(f"cloner JSON missing keys: {sorted(missing)}")
    return Cloner(
        unitary=Operator(matrix_from_literal(d["unitary"])),
        dims=tuple(int(x) for x in d["dims"]),
        clone_indices=tuple(int(x) for x in d["clone_indices"]),
        input_index=int(d.get("input_index", 0)),
    )


def report_to_dict(report: VerificationReport) -> dict[str, Any]:
    return {
        "case": report.case_id,
        "violation": report.violation,
        "amplitudes": dict(report.amplitudes),
        "triviality_gap": report.triviality_gap,
        "bound_constant": report.bound_constant,
        "verdict": report.verdict,
        "premise_met": report.premise_met,
    }
