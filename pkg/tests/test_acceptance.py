"""Acceptance run: one test per criterion, each printing a PASS/FAIL line."""

import json

import pytest

from burgerslab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"{c[0]:02d}-{c[1].replace(' ', '-')}" for c in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print(f"\n{res.line()}  ({res.seconds:.2f} s)")
    assert res.passed, json.dumps(res.detail, indent=1, default=str)
