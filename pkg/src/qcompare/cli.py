"""Command-line interface.

Every command writes a single JSON document to stdout (or --out) and is
byte-for-byte deterministic for a fixed set of flags.  Exit codes: 0 on
success, 2 on invalid input, 3 when a search finds a machine beating the
impossibility threshold for an anti-linear map (a falsification signal).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from typing import Any

from .cloning import run_game, sample_game, trivial_cloner, universal_cloner
from .core import AntiLinearMap, Operator, StateVector, apply, inner
from .machines import (
    build_k_comparison_machine,
    build_swap_test_machine,
    classify_one_sidedness,
    evaluate,
)
from .search import adversarial_search
from .serialize import (
    cloner_from_dict,
    machine_from_dict,
    machine_to_dict,
    matrix_from_literal,
    report_to_dict,
    state_from_literal,
)
from .verifier import exactly_constrained_machine, verify_case1, verify_case2

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_THRESHOLD_VIOLATED = 3


def _parse_json_arg(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what} is not valid JSON: {exc}") from exc


def _load_json_file(path: str, what: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {what} file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what} file {path!r} is not valid JSON: {exc}") from exc


def _state_arg(text: str, what: str) -> StateVector:
    return state_from_literal(_parse_json_arg(text, what))


def _map_arg(text: str, antilinear: bool) -> AntiLinearMap | Operator:
    op = Operator(matrix_from_literal(_parse_json_arg(text, "map literal")))
    return AntiLinearMap(op) if antilinear else op


def _ancilla_dims_arg(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"ancilla dims must be comma-separated integers, got {text!r}") from exc
    if not dims or any(d < 2 for d in dims):
        raise ValueError(f"ancilla dims must all be >= 2, got {dims}")
    return dims


def _emit(payload: dict[str, Any], args: argparse.Namespace) -> None:
    indent = args.json_indent if args.json_indent >= 0 else None
    text = json.dumps(payload, indent=indent) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _comparison_payload(machine, k: Operator | None, phi: StateVector, psi: StateVector) -> dict:
    image = apply(k, phi).normalized() if k is not None else phi
    delta = abs(inner(image, psi))
    formula = (1.0 + delta * delta) / 2.0
    circuit = evaluate(machine, phi, psi).p_yes
    return {
        "delta": delta,
        "p_yes_formula": formula,
        "p_yes_circuit": circuit,
        "max_abs_diff": abs(formula - circuit),
    }


def _cmd_swap_test(args: argparse.Namespace) -> int:
    phi = _state_arg(args.phi, "--phi")
    psi = _state_arg(args.psi, "--psi")
    if phi.dim != psi.dim:
        raise ValueError(f"state dims differ: {phi.dim} vs {psi.dim}")
    machine = build_swap_test_machine(phi.dim)
    _emit(_comparison_payload(machine, None, phi, psi), args)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    k = _map_arg(args.k, antilinear=False)
    phi = _state_arg(args.phi, "--phi")
    psi = _state_arg(args.psi, "--psi")
    machine = build_k_comparison_machine(k)
    _emit(_comparison_payload(machine, k, phi, psi), args)
    return EXIT_OK


def _machine_arg(args: argparse.Namespace, k) -> Any:
    if getattr(args, "machine", None):
        return machine_from_dict(_load_json_file(args.machine, "machine"))
    if getattr(args, "swap_test", False):
        return build_swap_test_machine(2)
    if getattr(args, "exact_construction", False):
        return exactly_constrained_machine(
            k, args.case, ancilla_dims=args.ancilla_dims, seed=args.seed
        )
    raise ValueError("no machine given; pass --machine FILE or a construction flag")


def _cmd_classify(args: argparse.Namespace) -> int:
    k = _map_arg(args.k, antilinear=not args.linear)
    if args.machine:
        machine = machine_from_dict(_load_json_file(args.machine, "machine"))
    elif args.swap_test:
        machine = build_swap_test_machine(2)
    else:
        raise ValueError("no machine given; pass --machine FILE or --swap-test")
    report = classify_one_sidedness(
        machine, k, n_samples=args.samples, seed=args.seed, tol=args.tol
    )
    _emit(asdict(report), args)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    k = _map_arg(args.k, antilinear=not args.linear)
    machine = _machine_arg(args, k)
    verify = verify_case1 if args.case == 1 else verify_case2
    report = verify(machine, k, premise_tol=args.premise_tol)
    _emit(report_to_dict(report), args)
    return EXIT_OK


def _cmd_search(args: argparse.Namespace) -> int:
    k = _map_arg(args.k, antilinear=not args.linear)
    result = adversarial_search(
        k,
        args.case,
        ancilla_dims=args.ancilla_dims,
        epsilon=args.epsilon,
        budget=args.budget,
        seed=args.seed,
    )
    threshold_applies = not args.linear
    threshold_held = (not threshold_applies) or result.best_nontriviality <= args.threshold
    if args.save_machine:
        with open(args.save_machine, "w", encoding="utf-8") as fh:
            json.dump(machine_to_dict(result.best_machine), fh, indent=2)
            fh.write("\n")
    _emit(
        {
            "best_nontriviality": result.best_nontriviality,
            "achieved_violation": result.achieved_violation,
            "restarts": result.restarts,
            "seed": result.seed,
            "case": result.case_id,
            "epsilon": result.epsilon,
            "feasible_candidates": result.feasible_candidates,
            "threshold": args.threshold,
            "threshold_held": threshold_held,
        },
        args,
    )
    return EXIT_OK if threshold_held else EXIT_THRESHOLD_VIOLATED


def _cmd_cloning_game(args: argparse.Namespace) -> int:
    if args.cloner:
        cloner = cloner_from_dict(_load_json_file(args.cloner, "cloner"))
    elif args.trivial:
        cloner = trivial_cloner()
    else:
        cloner = universal_cloner()
    psi = _state_arg(args.psi, "--psi")
    result = run_game(cloner, psi, args.clone)
    payload: dict[str, Any] = {
        "p_pass": result.p_pass,
        "expected_payoff": result.expected_payoff,
        "fidelity": result.fidelity,
    }
    if args.sample:
        payload["sampled"] = {
            "n_rounds": args.sample,
            "mean_payoff": sample_game(cloner, psi, args.clone, args.sample, seed=args.seed),
        }
    _emit(payload, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root random seed")
    common.add_argument("--out", default=None, help="write the JSON result to this file")
    common.add_argument(
        "--json-indent", type=int, default=2, help="indent for JSON output, negative for compact"
    )

    parser = argparse.ArgumentParser(
        prog="qcompare",
        description="Simulate and probe quantum comparison machines with one-sided error.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("swap-test", parents=[common], help="swap test on two state literals")
    p.add_argument("--phi", required=True, help="probe state literal, JSON [re,im] pairs")
    p.add_argument("--psi", required=True, help="target state literal")
    p.set_defaults(handler=_cmd_swap_test)

    p = sub.add_parser("compare", parents=[common], help="swap test of (k phi) against psi")
    p.add_argument("--k", required=True, help="unitary matrix literal applied to the probe")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("classify", parents=[common], help="sampled one-sidedness classification")
    p.add_argument("--k", required=True, help="matrix literal of the comparison map")
    p.add_argument("--linear", action="store_true", help="treat k as linear, not anti-linear")
    p.add_argument("--machine", default=None, help="machine JSON file")
    p.add_argument("--swap-test", action="store_true", help="classify the qubit swap-test machine")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-9, help="certainty tolerance on probabilities")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="check the triviality bound on a machine")
    p.add_argument("--k", required=True, help="matrix literal of the comparison map")
    p.add_argument("--linear", action="store_true", help="treat k as linear, not anti-linear")
    p.add_argument("--case", type=int, choices=(1, 2), required=True)
    p.add_argument("--machine", default=None, help="machine JSON file")
    p.add_argument(
        "--exact-construction",
        action="store_true",
        help="verify a machine constructed to satisfy the case constraints exactly",
    )
    p.add_argument("--ancilla-dims", type=_ancilla_dims_arg, default=(2,))
    p.add_argument("--premise-tol", type=float, default=1e-6)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("search", parents=[common], help="adversarial search for useful machines")
    p.add_argument("--k", required=True, help="matrix literal of the comparison map")
    p.add_argument("--linear", action="store_true", help="treat k as linear, not anti-linear")
    p.add_argument("--case", type=int, choices=(1, 2), required=True)
    p.add_argument("--epsilon", type=float, default=1e-6, help="violation budget")
    p.add_argument("--budget", type=int, default=50, help="optimizer restarts")
    p.add_argument("--ancilla-dims", type=_ancilla_dims_arg, default=(2, 2))
    p.add_argument(
        "--threshold",
        type=float,
        default=1e-3,
        help="nontriviality above this for anti-linear k exits with status 3",
    )
    p.add_argument("--save-machine", default=None, help="also write the best machine JSON here")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("cloning-game", parents=[common], help="swap-test graded cloning game")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--cloner", default=None, help="cloner JSON file")
    src.add_argument("--universal", action="store_true", help="symmetric qubit cloner (default)")
    src.add_argument("--trivial", action="store_true", help="keep-input-and-blank cloner")
    p.add_argument("--psi", required=True, help="input state literal")
    p.add_argument("--clone", type=int, choices=(1, 2), default=1)
    p.add_argument("--sample", type=int, default=None, help="also report this many sampled rounds")
    p.set_defaults(handler=_cmd_cloning_game)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
