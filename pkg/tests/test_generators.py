import random

import pytest

from nilfreiman.generators import (
    CORPUS,
    InstanceSpec,
    central_interval,
    heisenberg_box,
    random_subalgebra,
    random_subset,
    raw_box_size,
    unitri_box,
    word_ball,
)

import oracle

# frozen from oracle.py (dense Fraction matrices, explicit inverses)
UNITRI_BOX_4_SIZE = 7715


def coords(S):
    return {tuple(int(v) for v in g.coords) for g in S}


def test_heisenberg_box_examples():
    assert len(heisenberg_box(0, 0, 0)) == 1
    A = heisenberg_box(1, 1, 2)
    assert raw_box_size((1, 1, 2)) == 45
    assert coords(A) == oracle.hbox(1, 1, 2) and len(A) == 49
    assert coords(heisenberg_box(2, 2, 8)) == oracle.hbox(2, 2, 8)
    with pytest.raises(ValueError):
        heisenberg_box(-1, 0, 0)


def test_word_ball_examples():
    assert len(word_ball(3, 0)) == 1
    assert coords(word_ball(3, 1)) == {(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}
    for r in (2, 3, 4):
        ref = {oracle.strict_entries(M) for M in oracle.word_ball(3, r)}
        assert coords(word_ball(3, r)) == {tuple(int(v) for v in c) for c in ref}
    ref4 = {oracle.strict_entries(M) for M in oracle.word_ball(4, 2)}
    assert coords(word_ball(4, 2)) == {tuple(int(v) for v in c) for c in ref4}


def test_unitri_box_examples():
    assert len(unitri_box(4, [0] * 6)) == 1
    assert len(unitri_box(4, (1, 1, 1, 2, 2, 4))) == UNITRI_BOX_4_SIZE
    with pytest.raises(ValueError):
        unitri_box(4, (1, 1, 1))


def test_central_interval():
    assert coords(central_interval(3)) == {(0, 0, c) for c in range(-3, 4)}
    assert len(central_interval(2, n=4)) == 5


@pytest.mark.parametrize("spec", CORPUS, ids=lambda s: s.name)
def test_corpus_sets_are_symmetric(spec):
    A = spec.build()
    assert A.symmetric and A.contains_identity
    assert spec.build() == A


def test_random_generators_are_seeded():
    assert random_subset(3, 20, 3, seed=5) == random_subset(3, 20, 3, seed=5)
    assert random_subset(3, 20, 3, seed=5).symmetric
    a = random_subalgebra(4, random.Random(1))
    assert a == random_subalgebra(4, random.Random(1))


def test_instance_names_round_trip():
    for spec in CORPUS + (InstanceSpec("random_subset", (30, 2), n=3, seed=7),):
        assert InstanceSpec.parse(spec.name) == spec
    with pytest.raises(ValueError):
        InstanceSpec("spiral", (1,))
    with pytest.raises(ValueError):
        InstanceSpec("word_ball", (-1,))
