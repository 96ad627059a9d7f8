import random

import pytest

from stealthkem import protocol


@pytest.fixture
def seeded_recipient():
    """Deterministic recipient bundle for tests that need stable keys."""
    keys, meta = protocol.recipient_setup(random.Random(0xC0FFEE))
    return keys, meta
