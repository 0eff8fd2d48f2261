import pytest

from locality_lab.catalog import load_catalog_group

_cache = {}


@pytest.fixture(scope="session")
def cat():
    """Session-cached catalog loader: cat('s4') -> FiniteGroup."""
    def load(instance_id):
        if instance_id not in _cache:
            _cache[instance_id] = load_catalog_group(instance_id)
        return _cache[instance_id]
    return load
