import pytest

from pseudofree.group.families import named_group


@pytest.fixture(scope="session")
def group():
    cache = {}

    def build(spec):
        if spec not in cache:
            cache[spec] = named_group(spec)
        return cache[spec]

    return build
