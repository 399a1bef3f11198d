"""Acceptance criteria: one pass/fail line per criterion at the default settings.

The lines are printed in the terminal summary.
"""

import pytest

from twotemp import verification as vf

SETTINGS = vf.VerifySettings()
# collected for the terminal summary in conftest
REPORT: list[str] = []


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(vf.CHECKS))
def test_criterion(number):
    result = vf.run_check(number, SETTINGS)
    REPORT.append(result.line())
    if number == 11:
        d = result.detail
        REPORT.append(f"     shock density ratio {d['density_ratio']:.6f}: jump conditions"
                      f" {d['rankine_hugoniot']:.4f}, printed value {d['printed_value']}"
                      " (gamma = 5/3 figure)")
    assert result.status == vf.PASS, result.detail
