"""Acceptance suite: one test per criterion, tolerances pinned here.

Each test runs the criterion through ``halfline.selftest`` (the same code
the ``selftest`` CLI subcommand uses), checks that every measured quantity
meets the tolerance pinned below, and that the runtime fits its budget.
"""

import pytest

from halfline import selftest

from conftest import ACCEPTANCE_LINES

# criterion -> (runtime budget in s, {check name: (kind, limit)})
PINNED = {
    1: (5.0, {
        "gamma recurrence rel err": ("max", 1e-12),
        "gamma reflection rel err": ("max", 1e-11),
        "Wronskian |x(I'K - IK') - 1| on 5x20 lattice": ("max", 1e-10),
        "asymptotic forms rel err at x = 1e-3, 30": ("max", 1e-2),
    }),
    2: (30.0, {
        "max resolvent residual": ("max", 1e-5),
        "closed form at m = +-1/2 abs err": ("max", 1e-10),
        "degree -2 scaling rel err": ("max", 1e-8),
    }),
    3: (5.0, {
        "max |d/d(conj m) R| / |R|": ("max", 1e-5),
        "min control |d/d(conj m) |R|| / |R|": ("min", 1e-2),
    }),
    4: (60.0, {
        "involution rel err": ("max", 1e-6),
        "isometry rel err": ("max", 1e-6),
        "diagonalization residual": ("max", 1e-4),
        "intertwining residual (tau = 0.3)": ("max", 1e-4),
        "projection idempotence": ("max", 1e-5),
        "projection additivity": ("max", 1e-5),
    }),
    5: (60.0, {
        "J F_m vs Xi_m(D) rel err": ("max", 1e-4),
        "wave operator two-path rel err": ("max", 1e-4),
        "|S - exp(i pi (m - k))|": ("max", 1e-5),
        "energy-independence residual": ("max", 1e-4),
        "finite-time residuals strictly decreasing (m != k)": ("min", 1.0),
    }),
    6: (30.0, {
        "Barnes vs series rel err": ("max", 1e-6),
    }),
    7: (10.0, {
        "Gamma-equation energy abs err": ("max", 1e-8),
        "shooting oracle energy abs err": ("max", 1e-6),
        "scans with exactly one root in (pi/2, pi)": ("min", 30.0),
        "roots found in [0, pi/2]": ("max", 0.0),
    }),
    8: (10.0, {
        "form two-path rel err": ("max", 1e-4),
        "monotonicity violations / 50": ("max", 0.0),
    }),
    9: (5.0, {
        "samples outside the cone": ("max", 0.0),
        "real-m samples |Im z| / |z|": ("max", 1e-12),
    }),
    10: (20.0, {
        "contraction excess max(||T f|| - ||f||)": ("max", 1e-8),
        "group law rel err": ("max", 1e-8),
        "resolvent residual": ("max", 1e-6),
        "factorization residual": ("max", 1e-6),
    }),
    11: (2.0, {
        "deficiency index mismatches / 200": ("max", 0.0),
        "strip table mismatches": ("max", 0.0),
        "strip-consistency failures": ("max", 0.0),
    }),
    12: (5.0, {
        "Hardy violations / 200": ("max", 0.0),
        "min ||f'|| - ||f/x||/2": ("min", -1e-10),
    }),
}


def _check(number):
    result = selftest.run_criterion(number)
    line = selftest.format_line(result)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.error is None, line
    budget, pinned = PINNED[number]
    measured = {c.name: c for c in result.checks}
    assert set(measured) == set(pinned), f"criterion {number} checks changed: {sorted(measured)}"
    for name, (kind, limit) in pinned.items():
        c = measured[name]
        # the suite must not run with a looser tolerance than the pinned one
        assert c.kind == kind and c.limit == limit, f"{name}: suite uses {c.kind} {c.limit}, pinned {kind} {limit}"
        if kind == "max":
            assert c.value <= limit, f"{name} = {c.value:.3g} > {limit:g}"
        else:
            assert c.value >= limit, f"{name} = {c.value:.3g} < {limit:g}"
    assert result.seconds < budget, f"criterion {number} took {result.seconds:.1f} s (budget {budget:g} s)"
    assert result.passed


def test_criterion_01_special_function_health():
    _check(1)


def test_criterion_02_resolvent_identities():
    _check(2)


def test_criterion_03_holomorphy_in_order():
    _check(3)


def test_criterion_04_hankel_transform():
    _check(4)


def test_criterion_05_scattering():
    _check(5)


def test_criterion_06_barnes_representation():
    _check(6)


def test_criterion_07_bound_states():
    _check(7)


def test_criterion_08_quadratic_forms():
    _check(8)


def test_criterion_09_numerical_range():
    _check(9)


def test_criterion_10_first_order_operators():
    _check(10)


def test_criterion_11_aharonov_bohm_sectors():
    _check(11)


def test_criterion_12_hardy_inequality():
    _check(12)
