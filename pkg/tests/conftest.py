from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

from apartments.field import field_of_order

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRIME_POWERS = [q for q in range(2, 65) if any(q == p**e for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37,
                                                                 41, 43, 47, 53, 59, 61) for e in range(1, 7))]


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(params=[2, 3, 4], ids=["F2", "F3", "F4"])
def small_field(request):
    return field_of_order(request.param)


def F(q: int):
    return field_of_order(q)
