"""The frozen reference table agrees with a fresh mpmath derivation."""

import mpmath as mp
import pytest

import make_oracles
from oracle_values import FROZEN


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_value_matches_mpmath(key):
    fresh = complex(mp.mpc(make_oracles.VALUES[key]))
    assert abs(FROZEN[key] - fresh) <= 1e-15 * max(1.0, abs(fresh))
