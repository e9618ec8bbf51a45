from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def ex1():
    from hetcycle.glv import example1

    return example1()


@pytest.fixture(scope="session")
def ex2():
    from hetcycle.glv import example2

    return example2()


@pytest.fixture(scope="session")
def unstable_homoclinic():
    """Map-level spec with dominant eigenvalue ~0.814 (< 1)."""
    from hetcycle.core import CycleSpec, NodeSpec

    return CycleSpec((NodeSpec("h", 1.0, [-0.5], [-0.2], -1.0, [1, 0]),))
