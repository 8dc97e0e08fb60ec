import pytest

from outerlab.groups import Automorphism, identity_auto, preset, subgroup_generated, trivial
from outerlab.hnn import validate_hnn


def s3_a3_id():
    S3 = preset("symmetric 3")
    return validate_hnn(S3, subgroup_generated(S3, [3]), identity_auto(S3))


def c8_k2_inv():
    C8 = preset("cyclic 8")
    inv = Automorphism(C8, tuple((-x) % 8 for x in range(8)))
    return validate_hnn(C8, subgroup_generated(C8, [2]), inv)


def c2_trivial_id():
    C2 = preset("cyclic 2")
    return validate_hnn(C2, trivial(C2), identity_auto(C2))


@pytest.fixture
def s3():
    return s3_a3_id()


@pytest.fixture
def c8():
    return c8_k2_inv()


@pytest.fixture
def c2():
    return c2_trivial_id()
