"""Command-line interface: payloads, exit codes, and byte determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from qcompare.cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_THRESHOLD_VIOLATED, main
from qcompare.serialize import machine_from_dict

ZERO = "[[1,0],[0,0]]"
PLUS = "[[0.7071067811865476,0],[0.7071067811865476,0]]"
ONE = "[[0,0],[1,0]]"
K_ORTH = "[[[0,0],[-1,0]],[[1,0],[0,0]]]"
K_IDENTITY = "[[[1,0],[0,0]],[[0,0],[1,0]]]"


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


# ---------------------------------------------------------------------------
# swap-test / compare


def test_swap_test_known_overlap(capsys):
    code, out = run_cli(capsys, "swap-test", "--phi", ZERO, "--psi", PLUS)
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["delta"] == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert payload["p_yes_formula"] == pytest.approx(0.75, abs=1e-12)
    assert payload["max_abs_diff"] <= 1e-10


def test_compare_applies_the_map_first(capsys):
    # k = X maps |0> to |1>, which is orthogonal to |0>: delta = 0.
    x_literal = "[[[0,0],[1,0]],[[1,0],[0,0]]]"
    code, out = run_cli(capsys, "compare", "--k", x_literal, "--phi", ZERO, "--psi", ZERO)
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["delta"] == pytest.approx(0.0, abs=1e-12)
    assert payload["p_yes_formula"] == pytest.approx(0.5, abs=1e-12)


def test_swap_test_rejects_malformed_state(capsys):
    code = main(["swap-test", "--phi", "[[1,0]", "--psi", PLUS])
    captured = capsys.readouterr()
    assert code == EXIT_INPUT_ERROR
    assert "error:" in captured.err


def test_compare_rejects_nonunitary_map(capsys):
    bad = "[[[2,0],[0,0]],[[0,0],[1,0]]]"
    code = main(["compare", "--k", bad, "--phi", ZERO, "--psi", ZERO])
    assert code == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# classify


def test_classify_swap_test_against_orthogonalizing_map(capsys):
    code, out = run_cli(
        capsys, "classify", "--k", K_ORTH, "--swap-test", "--samples", "50"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["label"] == "neither"
    assert payload["max_matched_p_no"] == pytest.approx(0.5, abs=1e-9)


def test_classify_linear_comparison_machine(capsys):
    # For k = identity the plain swap test is the comparison machine.
    code, out = run_cli(
        capsys,
        "classify",
        "--k",
        K_IDENTITY,
        "--linear",
        "--swap-test",
        "--samples",
        "50",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["label"] == "yes-certain-on-match"


def test_classify_requires_a_machine_source(capsys):
    code = main(["classify", "--k", K_IDENTITY, "--linear"])
    assert code == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# verify


def test_verify_exact_construction_case2(capsys):
    code, out = run_cli(
        capsys, "verify", "--k", K_ORTH, "--case", "2", "--exact-construction"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["case"] == 2
    assert payload["verdict"] == "pass"
    assert payload["premise_met"] is True
    assert payload["violation"] <= 1e-10
    assert payload["triviality_gap"] <= 1e-9
    assert set(payload["amplitudes"]) == {"b01", "b10"}


def test_verify_machine_from_file(capsys, tmp_path):
    # Round-trip a machine through disk and verify it.
    code, out = run_cli(
        capsys,
        "search",
        "--k",
        K_ORTH,
        "--case",
        "1",
        "--budget",
        "1",
        "--save-machine",
        str(tmp_path / "machine.json"),
    )
    assert code == EXIT_OK
    machine_from_dict(json.loads((tmp_path / "machine.json").read_text()))
    code, out = run_cli(
        capsys,
        "verify",
        "--k",
        K_ORTH,
        "--case",
        "1",
        "--machine",
        str(tmp_path / "machine.json"),
    )
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "pass"


def test_verify_rejects_unreadable_machine_file(capsys):
    code = main(["verify", "--k", K_ORTH, "--case", "1", "--machine", "/dev/null"])
    assert code == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_verify_requires_a_machine_source(capsys):
    code = main(["verify", "--k", K_ORTH, "--case", "1"])
    assert code == EXIT_INPUT_ERROR


# ---------------------------------------------------------------------------
# search


def test_search_antilinear_respects_threshold(capsys):
    code, out = run_cli(
        capsys, "search", "--k", K_ORTH, "--case", "2", "--budget", "2"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["best_nontriviality"] <= 1e-3
    assert payload["achieved_violation"] <= payload["epsilon"]
    assert payload["threshold_held"] is True


def test_search_linear_control_does_not_trip_threshold(capsys):
    # A useful machine exists for linear k; the exit code stays 0 because
    # the threshold only guards the anti-linear claim.
    code, out = run_cli(
        capsys,
        "search",
        "--k",
        K_IDENTITY,
        "--linear",
        "--case",
        "2",
        "--budget",
        "2",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["best_nontriviality"] >= 0.2
    assert payload["threshold_held"] is True


def test_search_exit_code_3_when_threshold_is_forced_low(capsys):
    # Forcing an unattainable threshold on the anti-linear search must
    # surface as the dedicated exit code, not an exception.
    code, out = run_cli(
        capsys,
        "search",
        "--k",
        K_ORTH,
        "--case",
        "2",
        "--budget",
        "1",
        "--threshold",
        "-1.0",
    )
    assert code == EXIT_THRESHOLD_VIOLATED
    payload = json.loads(out)
    assert payload["threshold_held"] is False


# ---------------------------------------------------------------------------
# cloning-game


def test_cloning_game_universal(capsys):
    code, out = run_cli(capsys, "cloning-game", "--psi", ZERO)
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["fidelity"] == pytest.approx(5 / 6, abs=1e-10)
    assert payload["expected_payoff"] == pytest.approx(5 / 6, abs=1e-10)
    assert payload["p_pass"] == pytest.approx(11 / 12, abs=1e-10)


def test_cloning_game_trivial_second_clone(capsys):
    psi = "[[0.6,0],[0.8,0]]"
    code, out = run_cli(
        capsys, "cloning-game", "--trivial", "--psi", psi, "--clone", "2"
    )
    assert code == EXIT_OK
    assert json.loads(out)["fidelity"] == pytest.approx(0.36, abs=1e-12)


def test_cloning_game_sampled_rounds(capsys):
    code, out = run_cli(
        capsys, "cloning-game", "--psi", ZERO, "--sample", "10000", "--seed", "3"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["sampled"]["n_rounds"] == 10000
    assert abs(payload["sampled"]["mean_payoff"] - payload["expected_payoff"]) <= 0.05


# ---------------------------------------------------------------------------
# Output plumbing


def test_out_flag_writes_file_and_silences_stdout(capsys, tmp_path):
    target = tmp_path / "result.json"
    code, out = run_cli(
        capsys, "swap-test", "--phi", ZERO, "--psi", PLUS, "--out", str(target)
    )
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text())["p_yes_formula"] == pytest.approx(0.75)


def test_negative_indent_means_compact_output(capsys):
    _, out = run_cli(
        capsys, "swap-test", "--phi", ZERO, "--psi", PLUS, "--json-indent", "-1"
    )
    assert "\n" not in out.strip()


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["no-such-command"])


# ---------------------------------------------------------------------------
# Byte determinism through the real entry point


def _run_subprocess(*argv: str) -> bytes:
    proc = subprocess.run(
        [sys.executable, "-m", "qcompare.cli", *argv],
        capture_output=True,
        check=True,
    )
    return proc.stdout


def test_cli_output_is_byte_deterministic():
    cases = [
        ("swap-test", "--phi", ZERO, "--psi", PLUS),
        ("classify", "--k", K_ORTH, "--swap-test", "--samples", "25", "--seed", "7"),
        ("search", "--k", K_ORTH, "--case", "1", "--budget", "1", "--seed", "11"),
        ("cloning-game", "--psi", ZERO, "--sample", "500", "--seed", "5"),
    ]
    for argv in cases:
        assert _run_subprocess(*argv) == _run_subprocess(*argv)
