"""Flag vectors, Dehn-Sommerville, cd-indices and the semi-Eulerian pipeline."""

from __future__ import annotations

from itertools import combinations

import pytest

from cdposet import zoo
from cdposet.flags import (
    ab_polynomial,
    cd_index,
    chain_polynomial,
    check_dehn_sommerville,
    euler_characteristic,
    flag_f,
    flag_f_from_h,
    flag_h,
    format_flag_vector,
    modified_flag_f,
    semi_cd_index,
)
from cdposet.ncpoly import AB, CD, NcPolynomial, NotInImage, expand_cd_to_ab


def brute_flag_f(p):
    """Independent oracle: enumerate every chain over ranks 1..d directly."""
    d = p.rank_top - 1
    proper = [x for x in p.elements() if 0 < p.rank(x) <= d]
    counts = {frozenset(K): 0 for k in range(d + 1) for K in combinations(range(1, d + 1), k)}

    def grow(chain, start):
        ranks = frozenset(p.rank(x) for x in chain)
        counts[ranks] += 1
        for i in range(start, len(proper)):
            x = proper[i]
            if p.rank(x) in ranks:
                continue
            if chain and not p.less(chain[-1], x):
                continue
            grow(chain + [x], i + 1)

    grow([], 0)
    return counts


def K(*ranks):
    return frozenset(ranks)


class TestFlagVectors:
    def test_diamond(self):
        f = flag_f(zoo.gen("sphere2cells", (0,)))
        assert f.counts == {K(): 1, K(1): 2}

    def test_square_lattice(self):
        f = flag_f(zoo.gen("polygon", (4,)))
        assert f.counts == {K(): 1, K(1): 4, K(2): 4, K(1, 2): 8}

    def test_product_torus(self):
        f = flag_f(zoo.gen("product", (3, 3)))
        assert f.get({1}) == 9 and f.get({2}) == 18 and f.get({3}) == 9
        assert f.get({1, 2, 3}) == 72

    def test_matches_brute_force(self, q_poset, torus6):
        for p in (q_poset, torus6, zoo.gen("cube", (3,))):
            assert flag_f(p).counts == brute_flag_f(p)

    def test_serialization(self):
        text = format_flag_vector(flag_f(zoo.gen("polygon", (4,))))
        assert "K={1,2}: 8" in text.splitlines()


class TestFlagH:
    def test_square(self):
        h = flag_h(flag_f(zoo.gen("polygon", (4,))))
        assert h.counts == {K(): 1, K(1): 3, K(2): 3, K(1, 2): 1}

    def test_boolean_degenerate(self):
        from cdposet.flags import FlagVector

        f = FlagVector(2, {K(): 1, K(1): 1, K(2): 1, K(1, 2): 1})
        h = flag_h(f)
        assert h.counts == {K(): 1, K(1): 0, K(2): 0, K(1, 2): 0}

    def test_diamond(self):
        h = flag_h(flag_f(zoo.gen("sphere2cells", (0,))))
        assert h.counts == {K(): 1, K(1): 1}

    def test_round_trip_on_random_posets(self):
        for seed in range(100):
            f = flag_f(zoo.random_eulerian_small(seed))
            assert flag_f_from_h(flag_h(f)).counts == f.counts

    def test_h_sums_to_full_flag_number(self, q_poset, torus6):
        for p in (q_poset, torus6, zoo.gen("cube", (3,))):
            f, h = flag_f(p), flag_h(flag_f(p))
            d = f.d
            assert h.get(()) == 1
            assert sum(h.counts.values()) == f.get(range(1, d + 1))

    def test_flag_monotonicity_bound(self, q_poset, torus6):
        # every f_K is at most the product of its singleton flag numbers
        for p in (q_poset, torus6):
            f = flag_f(p)
            for K, value in f.counts.items():
                bound = 1
                for i in K:
                    bound *= f.get({i})
                assert value <= bound


class TestAbPolynomial:
    def test_square(self):
        psi = ab_polynomial(flag_h(flag_f(zoo.gen("polygon", (4,)))))
        assert psi == NcPolynomial(AB, {"aa": 1, "ba": 3, "ab": 3, "bb": 1})

    def test_rank_one(self):
        p = zoo.gen("boolean", (1,))
        assert ab_polynomial(flag_h(flag_f(p))) == NcPolynomial.unit(AB)

    def test_diamond(self):
        psi = ab_polynomial(flag_h(flag_f(zoo.gen("sphere2cells", (0,)))))
        assert psi == NcPolynomial(AB, {"a": 1, "b": 1})


class TestEulerCharacteristic:
    def test_torus(self, torus6):
        assert euler_characteristic(torus6) == 0

    def test_sphere_like(self, q_poset):
        assert euler_characteristic(q_poset) == 2

    def test_diamond(self):
        assert euler_characteristic(zoo.gen("sphere2cells", (0,))) == 2

    def test_sphere_parity(self):
        for d in range(7):
            chi = euler_characteristic(zoo.gen("sphere2cells", (d,)))
            assert chi == (0 if d % 2 else 2)


class TestDehnSommerville:
    def test_eulerian_fixtures_pass(self, q_poset):
        for p in (q_poset, zoo.gen("cube", (3,)), zoo.gen("simplex-boundary", (4,))):
            assert check_dehn_sommerville(flag_f(p)) == []

    def test_raw_torus_fails_at_euler_relation(self, torus6):
        violations = check_dehn_sommerville(flag_f(torus6))
        assert violations
        first = violations[0]
        assert (first.K, first.i, first.k) == (frozenset(), 0, 4)

    def test_modified_torus_passes(self, torus6):
        assert check_dehn_sommerville(modified_flag_f(torus6)) == []


class TestCdIndex:
    def test_q_polytope(self, q_poset):
        assert cd_index(q_poset) == NcPolynomial(CD, {"ccc": 1, "cd": 5, "dc": 5})

    def test_two_cell_spheres(self):
        for d in range(9):
            assert cd_index(zoo.gen("sphere2cells", (d,))) == NcPolynomial(CD, {"c" * (d + 1): 1})

    def test_polygons_against_oracle(self):
        for n in range(3, 13):
            p = zoo.gen("polygon", (n,))
            assert flag_f(p).counts == brute_flag_f(p)
            assert cd_index(p) == NcPolynomial(CD, {"cc": 1, "d": n - 2})

    def test_torus_raises_not_in_image(self, torus6):
        with pytest.raises(NotInImage) as err:
            cd_index(torus6)
        assert "Dehn-Sommerville" in str(err.value)

    def test_expand_matches_ab_polynomial(self, q_poset):
        psi = ab_polynomial(flag_h(flag_f(q_poset)))
        assert expand_cd_to_ab(cd_index(q_poset)) == psi


class TestModified:
    def test_torus_correction(self, torus6):
        mf = modified_flag_f(torus6)
        assert mf.correction == 2
        assert mf.get({3}) == 13 + 2
        assert mf.get({1}) == flag_f(torus6).get({1})

    def test_eulerian_correction_vanishes(self, q_poset):
        assert modified_flag_f(q_poset).correction == 0

    def test_product_correction(self):
        mf = modified_flag_f(zoo.gen("product", (3, 3)))
        assert mf.get({3}) == 9 + 2

    def test_warns_on_non_semi_eulerian(self):
        with pytest.warns(UserWarning):
            modified_flag_f(zoo.gen("fig13-nonsemi"))


class TestSemiCdIndex:
    def test_torus_fig6(self, torus6):
        assert semi_cd_index(torus6) == NcPolynomial(CD, {"ccc": 1, "cd": 13, "dc": 7})

    def test_torus_fig12(self, torus12):
        assert semi_cd_index(torus12) == NcPolynomial(CD, {"ccc": 1, "cd": 9, "dc": 11})

    def test_product(self):
        assert semi_cd_index(zoo.gen("product", (3, 3))) == NcPolynomial(
            CD, {"ccc": 1, "cd": 9, "dc": 7}
        )

    def test_equals_cd_index_on_eulerian(self, q_poset):
        for p in (q_poset, zoo.gen("polygon", (7,)), zoo.gen("cross-polytope", (3,))):
            assert semi_cd_index(p) == cd_index(p)

    def test_fig13_not_in_image(self):
        with pytest.raises(NotInImage):
            semi_cd_index(zoo.gen("fig13-nonsemi"))

    def test_chain_polynomial_route_consistent(self, torus6):
        from cdposet.ncpoly import substitute_a_minus_b

        mf = modified_flag_f(torus6)
        psi = substitute_a_minus_b(chain_polynomial(mf))
        assert expand_cd_to_ab(semi_cd_index(torus6)) == psi
