import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def catalog():
    from fusionkit.catalog import default_catalog
    return default_catalog()


@pytest.fixture(scope="session")
def fusion():
    """fusion("builtin:psl3:2") -> memoized F_S(G) at p = 2."""
    from fusionkit.fusion import fusion_of
    return fusion_of
