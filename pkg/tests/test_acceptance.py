"""One test per acceptance criterion; each prints its pass/fail line."""
import json

import pytest

from threerank import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    result = acceptance.CRITERIA[number]()
    with capsys.disabled():
        print()
        print(result.line())
        print("    " + json.dumps(result.detail, default=str)[:600])
    assert result.passed, result.detail
