"""Acceptance gate: every verification criterion at its stated tolerance.

Each criterion prints one pass/fail line. Shared experiment runs are cached
inside the acceptance module, so the whole gate costs a handful of long runs
rather than one per criterion. Two criteria are expected to fail for the
pinned auction configuration; see README.md for the analysis. They are kept
red here on purpose: the suite reports what the dynamics actually do.
"""

import pytest

from adagames import acceptance


@pytest.mark.parametrize("cid", list(acceptance.CRITERIA), ids=list(acceptance.CRITERIA))
def test_criterion(cid):
    rep = acceptance.CRITERIA[cid]()
    print(rep.line())
    assert rep.passed, rep.line()
