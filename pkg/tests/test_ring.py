import pytest
from hypothesis import given, strategies as st

from balance.ring import (IncompatibleRings, NotAUnit, RingError, RingSpec, ResidueFieldTooSmall, add,
                          find_unit_avoiding, inverse, mul, neg, val_unit)

Z9, Z5, Z4, Z8 = RingSpec(3, 2), RingSpec(5), RingSpec(2, 2), RingSpec(2, 3)


def test_basic_arithmetic():
    assert add(Z9(7), Z9(5)) == Z9(3)
    assert mul(Z9(3), Z9(3)).value == 0
    assert neg(Z4(1)).value == 3


def test_mismatched_rings():
    with pytest.raises(IncompatibleRings):
        add(Z9(1), Z5(1))
    with pytest.raises(IncompatibleRings):
        mul(Z4(1), Z8(1))


def test_inverse_examples():
    assert inverse(Z9(2)).value == 5
    assert inverse(Z5(4)).value == 4
    with pytest.raises(NotAUnit):
        inverse(Z9(3))


def test_val_unit_examples():
    assert val_unit(Z9(6)) == (1, Z9(2))
    assert val_unit(Z9(0)) == (2, None)
    assert val_unit(Z8(4)) == (2, Z8(1))


def test_find_unit_avoiding():
    assert find_unit_avoiding(Z5, 1).value == 2
    assert find_unit_avoiding(Z9, 2).value == 1
    with pytest.raises(ResidueFieldTooSmall):
        find_unit_avoiding(Z4, 1)


def test_ring_spec_validation_and_parse():
    for bad in [(4, 1), (9, 1), (1, 1), (3, 0), (2, 63)]:
        with pytest.raises(RingError):
            RingSpec(*bad)
    assert RingSpec.parse("Z/3^2") == Z9
    assert RingSpec.parse("Z/5") == Z5
    assert str(Z9) == "Z/3^2" and str(Z5) == "Z/5"
    with pytest.raises(RingError):
        RingSpec.parse("Z/9")
    assert Z5.has_big_residue_field and not Z4.has_big_residue_field


@pytest.mark.parametrize("spec", [RingSpec(2, 6), RingSpec(3, 4), RingSpec(5, 3), RingSpec(7, 2), RingSpec(97)])
def test_units_have_inverses_exhaustively(spec):
    for x in spec.elements():
        assert x.is_unit() == (x.residue != 0)
        if x.is_unit():
            assert x * inverse(x) == spec.one()
        v, u = val_unit(x)
        if x.value == 0:
            assert (v, u) == (spec.k, None)
        else:
            assert 0 <= v < spec.k and u.is_unit() and u * spec(spec.p ** v) == x


specs = st.sampled_from([RingSpec(2), RingSpec(2, 3), RingSpec(3), RingSpec(3, 2), RingSpec(5, 2), RingSpec(7)])


@given(specs, st.integers(), st.integers())
def test_residue_is_a_homomorphism(spec, a, b):
    x, y = spec(a), spec(b)
    p = spec.p
    assert (x + y).residue == (x.residue + y.residue) % p
    assert (x * y).residue == (x.residue * y.residue) % p
    assert 0 <= (x + y).value < spec.modulus


@given(specs, st.integers(), st.integers(), st.integers())
def test_ring_laws(spec, a, b, c):
    x, y, z = spec(a), spec(b), spec(c)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert (x * y) * z == x * (y * z)
