"""NZ datum model, validation, quad rotations, gauge search, flattenings."""

import itertools
import json
import random

import pytest

from nzloop.mpnum import PrecisionContext
from nzloop.nzdata import (load_bundled_datum, validate, rotate_quad,
                           find_unimodular_gauge, solve_flattening,
                           datum_to_json, datum_from_json)


@pytest.fixture(scope="module")
def d41():
    return load_bundled_datum("4_1")


def test_validate_4_1(d41):
    rep = validate(d41, 300)
    assert rep.valid
    assert rep.det_B == 1 and rep.z_nondegenerate
    assert rep.multiplicative_exact is True
    assert rep.shape_embedding_ok is True
    # gluing residual at 300 digits below 1e-290
    assert rep.gluing_residual < 1e-290


def test_ab_transpose_symmetric(d41):
    n = d41.N
    ABt = [[sum(d41.A[i][t] * d41.B[j][t] for t in range(n)) for j in range(n)]
           for i in range(n)]
    assert ABt == [[4, 3], [3, 2]]


def test_flattening_failure_case(d41):
    # A f + B f'' = (0,0); with nu = (1,0) the flattening check must fail
    bad = d41.copy(nu=(1, 0))
    rep = validate(bad, 80)
    assert not rep.flattening_ok
    assert not rep.valid


def test_binva_integrality(d41):
    BinvA = d41.BinvA()
    assert [[int(c) for c in row] for row in BinvA] == [[0, -1], [-1, 0]]
    assert all(c.denominator == 1 for row in BinvA for c in row)
    # B^-1 A symmetric when |det B| = 1
    assert BinvA[0][1] == BinvA[1][0]


def test_rotate_quad_order_three(d41):
    for i in range(d41.N):
        d = d41
        for _ in range(3):
            d = rotate_quad(d, i)
        assert d.A == d41.A and d.B == d41.B and d.nu == d41.nu
        assert d.f == d41.f and d.f2 == d41.f2
        assert all(s.exact == t.exact for s, t in zip(d.shapes, d41.shapes))


def test_rotate_quad_preserves_validity(d41):
    rng = random.Random(11)
    for _ in range(12):
        d = d41
        for _ in range(rng.randint(1, 4)):
            d = rotate_quad(d, rng.randrange(d41.N))
        rep = validate(d, 80)
        assert rep.ab_symmetric and rep.flattening_ok and rep.gluing_ok
        assert rep.multiplicative_exact is True


def test_rotate_quad_composition_any_order(d41):
    # composing independent rotations in any order gives valid data
    for order in itertools.permutations([0, 1]):
        d = d41
        for i in order:
            d = rotate_quad(d, i)
        assert validate(d, 80).valid


def test_rotate_quad_index_error(d41):
    with pytest.raises(IndexError):
        rotate_quad(d41, 5)


def test_det_b_changes_under_rotation(d41):
    dets = set()
    for r0, r1 in itertools.product(range(3), repeat=2):
        d = d41
        for _ in range(r0):
            d = rotate_quad(d, 0)
        for _ in range(r1):
            d = rotate_quad(d, 1)
        dets.add(abs(d.det_B()))
    assert 1 in dets and len(dets) > 1  # some gauges lose unimodularity


def test_find_unimodular_gauge(d41):
    assert find_unimodular_gauge(d41).det_B() in (1, -1)
    # rotate into a non-unimodular gauge, then recover
    d = rotate_quad(rotate_quad(d41, 0), 1)
    if abs(d.det_B()) != 1:
        g = find_unimodular_gauge(d)
        assert g is not None and abs(g.det_B()) == 1
    # budget exhaustion returns None
    d2 = rotate_quad(d41, 0)
    if abs(d2.det_B()) != 1:
        assert find_unimodular_gauge(d2, budget=0) is None


def test_solve_flattening(d41):
    f, f2 = solve_flattening(d41.A, d41.B, d41.nu)
    assert f == (0, 0) and f2 == (0, 0)
    n = d41.N
    assert all(sum(d41.A[j][i] * f[i] + d41.B[j][i] * f2[i] for i in range(n))
               == d41.nu[j] for j in range(n))
    with pytest.raises(ValueError):
        solve_flattening([[1, 0], [0, 1]], [[2, 0], [0, 1]], [0, 0])


def test_canonical_flattening_revalidates(d41):
    f, f2 = solve_flattening(d41.A, d41.B, d41.nu)
    d = d41.copy(f=f, f2=f2)
    assert validate(d, 80).valid


def test_json_roundtrip(d41):
    j = datum_to_json(d41)
    text = json.dumps(j)
    d2 = datum_from_json(json.loads(text))
    assert d2.A == d41.A and d2.B == d41.B and d2.nu == d41.nu
    assert d2.f == d41.f and d2.f2 == d41.f2
    assert validate(d2, 80).valid
    assert all(s.exact.coeffs == t.exact.coeffs
               for s, t in zip(d2.shapes, d41.shapes))


def test_all_bundled_data_validate():
    from nzloop.nzdata import bundled_names
    for name in bundled_names():
        d = load_bundled_datum(name)
        rep = validate(d, 200)
        assert rep.valid, (name, rep.errors)
        assert abs(rep.det_B) == 1
        assert rep.multiplicative_exact is True
