"""Diagram enumeration, canonical forms, symmetry factors."""

import os
import random
from collections import Counter

import pytest

from nzloop.graphs import (Diagram, enumerate_diagrams, canonical_key_and_aut,
                           symmetry_factor)


def test_census_counts():
    assert len(enumerate_diagrams(2)) == 6
    assert len(enumerate_diagrams(3)) == 40
    assert len(enumerate_diagrams(4)) == 331
    assert len(enumerate_diagrams(5)) == 3700


@pytest.mark.skipif(not os.environ.get("NZLOOP_N6"),
                    reason="opt-in: set NZLOOP_N6=1 (about a minute)")
def test_census_count_n6():
    assert len(enumerate_diagrams(6)) == 53758


def test_two_loop_symmetry_factors():
    # the six 2-loop diagrams carry 1/8, 1/8, 1/12, 1/2, 1/2, 1/2
    factors = Counter(D.symmetry_factor for D in enumerate_diagrams(2))
    assert factors == Counter({8: 2, 2: 3, 12: 1})


def test_named_symmetry_factors():
    for adj, expect in [
        (((1, 1), (1, 1)), 8),       # dumbbell: loop-edge-loop
        (((0, 3), (3, 0)), 12),      # theta: triple edge
        (((0, 1), (1, 0)), 2),       # single edge
        (((2,),), 8),                # two self-loops at one vertex
        (((1, 1), (1, 0)), 2),       # tadpole with tail
        (((1,),), 2),                # single self-loop
    ]:
        key, aut = canonical_key_and_aut([list(r) for r in adj])
        D = Diagram(adj=adj, key=key, aut=aut)
        assert symmetry_factor(D) == expect, adj


def test_loop_number_bound():
    for n in (2, 3):
        for D in enumerate_diagrams(n):
            assert 2 <= D.loop_number <= n
            assert min(D.degrees) >= 1
            assert D.cycle_rank >= 0


def test_canonical_key_invariant_under_relabeling():
    rng = random.Random(17)
    for D in list(enumerate_diagrams(3))[::3]:
        V = D.vertices
        adj = [list(r) for r in D.adj]
        for _ in range(5):
            perm = list(range(V))
            rng.shuffle(perm)
            padj = [[adj[perm[i]][perm[j]] for j in range(V)] for i in range(V)]
            key, aut = canonical_key_and_aut(padj)
            assert key == D.key
            assert aut == D.aut


def test_enumeration_deterministic():
    a = enumerate_diagrams.__wrapped__(3)
    b = enumerate_diagrams.__wrapped__(3)
    assert [D.key for D in a] == [D.key for D in b]
