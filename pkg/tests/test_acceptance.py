"""The ten acceptance criteria, one test each.

The shared implementations live in phylonet.acceptance so the CLI
``selftest`` subcommand runs exactly the same checks.
"""

import pytest

from phylonet import acceptance


@pytest.mark.parametrize("number,title,fn", acceptance.CRITERIA,
                         ids=["criterion_%02d" % n
                              for n, _, _ in acceptance.CRITERIA])
def test_criterion(number, title, fn):
    detail = fn()
    assert detail
