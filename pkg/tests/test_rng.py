import numpy as np

from mmckit.rng import derive_seed, make_rng


def test_same_seed_same_stream():
    a = make_rng(123).standard_normal(50)
    b = make_rng(123).standard_normal(50)
    assert a.tobytes() == b.tobytes()


def test_different_seeds_differ():
    a = make_rng(123).standard_normal(50)
    b = make_rng(124).standard_normal(50)
    assert not np.allclose(a, b)


def test_tags_give_independent_streams():
    a = make_rng(5, 0).standard_normal(50)
    b = make_rng(5, 1).standard_normal(50)
    assert not np.allclose(a, b)


def test_derive_seed_deterministic():
    assert derive_seed(42, 3) == derive_seed(42, 3)
    assert derive_seed(42, 3) != derive_seed(42, 4)
    assert derive_seed(42, 3) != derive_seed(43, 3)


def test_derive_seed_injective_over_small_tags():
    seen = {derive_seed(7, tag) for tag in range(512)}
    assert len(seen) == 512


def test_derive_seed_frozen_values():
    # pinned so a numpy upgrade that changes streams is caught loudly
    assert derive_seed(0, 0) == 8668861027912758289
    assert derive_seed(1, 0, 2) == 15486983843438124195


def test_negative_and_huge_seeds_accepted():
    make_rng(-1).standard_normal(1)
    make_rng(2 ** 70).standard_normal(1)
    assert isinstance(derive_seed(-5, 2), int)
