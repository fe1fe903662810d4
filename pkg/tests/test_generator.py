"""Generator sequence construction, indexing and JSON interchange."""

import numpy as np
import pytest

from multihess import (GeneratorSequence, InvalidGeneratorError,
                       InvalidInputError, generator_from_json)


def test_constant_alphas():
    g = GeneratorSequence.constant(2, 1.5)
    assert g.p == 2
    assert np.all(g.alphas(7) == 1.5)
    assert g.alpha(1) == 1.5 and g.alpha(7) == 1.5


def test_list_kind_exact_values_and_one_based_indexing():
    g = GeneratorSequence.from_list(1, [0.5, 1.0, 2.0, 4.0])
    assert g.alpha(1) == 0.5
    assert g.alpha(4) == 4.0
    assert np.array_equal(g.alphas(4), [0.5, 1.0, 2.0, 4.0])


def test_list_kind_exhaustion():
    g = GeneratorSequence.from_list(1, [1.0, 2.0])
    with pytest.raises(Exception):
        g.alphas(3)


def test_periodic_wraps():
    g = GeneratorSequence.periodic(2, [1.0, 2.0, 3.0])
    assert np.array_equal(g.alphas(7), [1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0])


def test_uniform_deterministic_and_in_range():
    g1 = GeneratorSequence.uniform(2, 0.5, 2.0, seed=9)
    g2 = GeneratorSequence.uniform(2, 0.5, 2.0, seed=9)
    a1, a2 = g1.alphas(100), g2.alphas(100)
    assert np.array_equal(a1, a2)
    assert a1.min() >= 0.5 and a1.max() < 2.0
    # random access must agree with the stream
    assert g1.alpha(37) == a1[36]


def test_required_alphas_counts():
    g = GeneratorSequence.constant(3, 1.0)
    # one diagonal entry plus p+1 new parameters per extra order
    assert g.required_alphas(0) == 1
    assert g.required_alphas(5) == 1 + 4 * 5


def test_positivity_enforced():
    with pytest.raises((InvalidGeneratorError, InvalidInputError)):
        GeneratorSequence.from_list(1, [1.0, -2.0, 1.0])
    with pytest.raises((InvalidGeneratorError, InvalidInputError)):
        GeneratorSequence.constant(1, 0.0)


def test_json_round_trip():
    g = GeneratorSequence.periodic(2, [1.0, 0.5, 2.0])
    doc = g.to_json_dict()
    import json
    g2 = generator_from_json(json.dumps(doc))
    assert g2 == g
    assert np.array_equal(g2.alphas(10), g.alphas(10))


def test_json_uniform_round_trip():
    g = GeneratorSequence.uniform(3, 0.25, 4.0, seed=123)
    import json
    g2 = generator_from_json(json.dumps(g.to_json_dict()))
    assert np.array_equal(g2.alphas(20), g.alphas(20))
