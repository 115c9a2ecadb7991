import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from redprod.filters import make_filter  # noqa: E402
from redprod.structure import BinaryStructure  # noqa: E402

settings.register_profile("default", max_examples=80, deadline=None)
settings.load_profile("default")

INSTANCES = Path(__file__).parent.parent / "instances"


@st.composite
def structures(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    pairs = [(u, v) for u in range(n) for v in range(n)]
    rel = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    return BinaryStructure(n, frozenset(rel))


@st.composite
def filters(draw, index_size):
    kernel = draw(st.sets(st.integers(0, index_size - 1), min_size=1))
    extra = draw(
        st.lists(st.sets(st.integers(0, index_size - 1)), max_size=2)
    )
    return make_filter(index_size, [kernel | e for e in extra] + [kernel])


@st.composite
def instances(draw, max_index=3, max_size=3):
    m = draw(st.integers(1, max_index))
    factors = [draw(structures(max_size)) for _ in range(m)]
    return factors, draw(filters(m))


@pytest.fixture
def instance_dir():
    return INSTANCES
