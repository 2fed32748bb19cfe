"""Acceptance criteria, one test each; every test prints its pass/fail line."""
import pytest

from reflectpos import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    c = criterion()
    with capsys.disabled():
        print("\n" + c.line(), c.details)
    assert c.passed, c.details
