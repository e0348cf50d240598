import math
import sys
from pathlib import Path

import pytest

# make oracle_values / make_oracles importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

import constrained_hl  # noqa: E402
from constrained_hl import geometry  # noqa: E402

# every envelope built anywhere in the suite is checked against the height bound
ENVELOPES_CHECKED = []
_envelope = geometry.envelope


def _checked_envelope(*args, **kw):
    env = _envelope(*args, **kw)
    bound = math.sqrt(2 * env.t) + env.eps + 1e-6
    top = geometry.max_height(env)
    ENVELOPES_CHECKED.append((env.k, env.n, top, bound))
    assert top <= bound, f"height {top} exceeds sqrt(2t) + eps at k={env.k}, n={env.n}"
    return env


for _name, _mod in list(sys.modules.items()):
    if _name.startswith("constrained_hl") and getattr(_mod, "envelope", None) is _envelope:
        _mod.envelope = _checked_envelope

ACCEPTANCE_LINES = []


@pytest.fixture
def envelopes_checked():
    return ENVELOPES_CHECKED


@pytest.fixture
def gate():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_collection_modifyitems(config, items):
    # the acceptance gate runs last so the height criterion sees every envelope
    items.sort(key=lambda it: it.fspath.basename == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
