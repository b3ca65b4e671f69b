import pytest

from mrb.core import catalog
from mrb.opring import OperatorRing


@pytest.fixture(scope="session")
def instances():
    """Named verified catalog instances, shared across the whole run."""
    return catalog()


@pytest.fixture(scope="session")
def rings(instances):
    """One operator ring per catalog instance, with shared rewrite caches."""
    return {name: OperatorRing(inst) for name, inst in instances.items()}
