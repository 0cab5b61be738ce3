import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from cpshift.chain import ChainSystem  # noqa: E402

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

CANTOR = ChainSystem.cantor()
LEBESGUE = ChainSystem.lebesgue(2)
BERNOULLI = ChainSystem.bernoulli(2, ["2/3", "1/3"])
DETERMINISTIC = ChainSystem.bernoulli(2, ["1", "0"])
SYSTEMS = {"cantor": CANTOR, "lebesgue": LEBESGUE, "bernoulli": BERNOULLI}


@pytest.fixture(params=sorted(SYSTEMS))
def system(request):
    return SYSTEMS[request.param]
