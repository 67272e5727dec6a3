"""Acceptance gate: one test per criterion, each printing its pass/fail
line. Run with `pytest tests/test_acceptance.py -s` to see every line, or
through the CLI: `nlfkpp acceptance --config <cfg>`."""

import pytest

from nlfkpp import acceptance


def _check(result):
    print(result.line)
    assert result.passed, result.line


def test_criterion_01_moment_closed_form():
    _check(acceptance.criterion_1_moment_closed_form(seed=0))


def test_criterion_02_germ_invariants():
    _check(acceptance.criterion_2_germ_invariants(seed=0))


def test_criterion_03_hermite_lemmas():
    _check(acceptance.criterion_3_hermite_lemmas())


def test_criterion_04_moment_constants():
    _check(acceptance.criterion_4_moment_constants())


def test_criterion_05_biorthogonality():
    _check(acceptance.criterion_5_biorthogonality())


def test_criterion_06_semiclassical_convergence():
    _check(acceptance.criterion_6_semiclassical_convergence())


def test_criterion_07_background_limits():
    _check(acceptance.criterion_7_background_limits())


def test_criterion_08_perturbation_coefficients():
    _check(acceptance.criterion_8_perturbation_coefficients())


def test_criterion_09_perturbation_vs_direct():
    _check(acceptance.criterion_9_perturbation_vs_direct())


def test_criterion_10_multimodality():
    _check(acceptance.criterion_10_multimodality())


def test_criterion_11_solver_self_checks():
    _check(acceptance.criterion_11_solver_self_checks())


def test_criterion_runtime_budgets():
    # the stated runtime caps: closed-form sweep < 5 s, semiclassical sweep
    # < 2 min, perturbation comparison < 1 min
    r1 = acceptance.criterion_1_moment_closed_form(seed=0)
    assert r1.seconds < 5.0, f"criterion 1 took {r1.seconds:.1f}s"
    r6 = acceptance.criterion_6_semiclassical_convergence()
    assert r6.seconds < 120.0, f"criterion 6 took {r6.seconds:.1f}s"
    r9 = acceptance.criterion_9_perturbation_vs_direct()
    assert r9.seconds < 60.0, f"criterion 9 took {r9.seconds:.1f}s"
