from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bdivisor.surface import (ZERO_SECTION, ComponentId, IntersectionForm, Level, SingularPoint,
                              SurfaceModel, arithmetic_genus, base_model, c_coefficient_identity,
                              cusp_count, fiber, genus, index_gamma, jacobi_divisor,
                              toric_seed_model)


def sl2_order(n):
    # brute force |SL2(Z/N)|, independent of the product formula
    return sum(1 for a in range(n) for b in range(n) for c in range(n) for d in range(n)
               if (a * d - b * c) % n == 1)


@pytest.mark.parametrize("n,expected", [(4, 48), (3, 24), (6, 144)])
def test_index_examples(n, expected):
    assert index_gamma(n) == expected


@pytest.mark.parametrize("n", range(3, 9))
def test_index_matches_enumeration(n):
    assert index_gamma(n) == sl2_order(n)


@pytest.mark.parametrize("n,p,g,pa", [(4, 6, 0, 1), (3, 4, 0, 0), (7, 24, 3, 13)])
def test_cusps_and_genera(n, p, g, pa):
    assert (cusp_count(n), genus(n), arithmetic_genus(n)) == (p, g, pa)


@pytest.mark.parametrize("n", range(3, 31))
def test_integrality_range(n):
    assert index_gamma(n) % (2 * n) == 0
    assert isinstance(genus(n), int) and isinstance(arithmetic_genus(n), int)


@pytest.mark.parametrize("bad", [2, 1, 0, -5])
def test_small_levels_rejected(bad):
    with pytest.raises(ValueError):
        Level(bad)


def test_level_type_checked():
    with pytest.raises(TypeError):
        Level(4.0)


@pytest.mark.parametrize("n,comps,points", [(3, 13, 12), (4, 25, 24)])
def test_base_model_counts(n, comps, points):
    m = base_model(n)
    assert len(m.components) == comps
    assert len(m.singular_points) == points
    assert all(p.type == (1, 1) and p.multiplicity == Fraction(4, n) for p in m.singular_points)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_base_form_table(n):
    m = base_model(n)
    q = m.form
    p = cusp_count(n)
    assert q.is_symmetric()
    assert q(ZERO_SECTION, ZERO_SECTION) == Fraction(-n * p, 12)
    hits = [c for c in m.components if c != ZERO_SECTION and q(ZERO_SECTION, c) != 0]
    assert len(hits) == p and all(c.b == 0 and q(ZERO_SECTION, c) == 1 for c in hits)
    for j in (1, p):
        for nu in range(n):
            row = [q(fiber(j, nu), fiber(j, mu)) for mu in range(n)]
            assert sum(row) == 0
            assert row[nu] == -2
            for mu in range(n):
                dist = min((mu - nu) % n, (nu - mu) % n)
                if dist == 1:
                    assert row[mu] == 1
                elif dist >= 2:
                    assert row[mu] == 0
        f = {fiber(j, nu): Fraction(1) for nu in range(n)}
        assert q.pair(f, f) == 0
        assert q.pair(f, {ZERO_SECTION: Fraction(1)}) == 1


def test_singular_points_are_transverse():
    m = base_model(5)
    for p in m.singular_points:
        assert m.curve_intersection(*p.at) == 1


def test_jacobi_divisor_coefficients_n4():
    c = jacobi_divisor(base_model(4))
    assert c[ZERO_SECTION] == 8
    assert [c[fiber(2, nu)] for nu in range(4)] == [4, 1, 0, 1]


@pytest.mark.parametrize("n", range(3, 10))
def test_jacobi_divisor_nu0_is_n(n):
    assert jacobi_divisor(base_model(n))[fiber(1, 0)] == n


@pytest.mark.parametrize("n", range(3, 13))
def test_c_coefficient_identity(n):
    for nu in range(n + 1):
        lhs, rhs = c_coefficient_identity(n, nu)
        assert lhs == rhs


def test_component_tags_round_trip():
    for c in (ZERO_SECTION, fiber(3, 2), ComponentId("E", 7), ComponentId("L", 1)):
        assert ComponentId.parse(str(c)) == c
    with pytest.raises(ValueError):
        ComponentId.parse("Q/1")


def test_model_json_round_trip():
    from bdivisor.lattice import jacobi_tower, run_tower
    state = run_tower(jacobi_tower(3, seeds=2), 2)
    m = state.model
    back = SurfaceModel.from_json(m.to_json())
    assert back.dumps() == m.dumps()
    assert back.key == m.key
    for p in back.singular_points:
        assert back.curve_intersection(*p.at) == 1


def test_singular_point_validation():
    a, b = fiber(1, 0), fiber(1, 1)
    with pytest.raises(ValueError):
        SingularPoint((a, b), (2, 4), Fraction(1))
    with pytest.raises(ValueError):
        SingularPoint((a, a), (1, 1), Fraction(1))
    with pytest.raises(ValueError):
        SingularPoint((a, b), (1, 1), Fraction(0))


def test_non_transverse_point_rejected():
    a, b = fiber(1, 0), fiber(1, 2)
    form = IntersectionForm([(a, a, -2), (b, b, -2)])
    with pytest.raises(ValueError):
        SurfaceModel(Level(4), (a, b), form, (SingularPoint((a, b), (1, 1), 1),)).check()


def test_toric_seed():
    m = toric_seed_model()
    assert len(m.components) == 3
    assert all(m.form(a, b) == 1 for a in m.components for b in m.components)
    (p,) = m.singular_points
    assert p.type == (1, 1) and p.multiplicity == 1


@given(st.integers(1, 40), st.integers(1, 40))
def test_intersection_form_pair_bilinear(x, y):
    m = base_model(4)
    h = {ZERO_SECTION: Fraction(x)}
    f = {fiber(1, 0): Fraction(y, 3)}
    assert m.form.pair(h, f) == Fraction(x * y, 3)
    assert m.form.pair(f, h) == m.form.pair(h, f)
