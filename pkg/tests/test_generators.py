import numpy as np
import pytest
from hypothesis import given, strategies as st

from spanhop.generators import FAMILIES, GenSpec, generate, parse_genspec
from spanhop.graphs import ParameterError, exact_apsp


def test_path_family():
    g = generate(GenSpec("path", {"n": 4}))
    assert g.m == 3
    assert exact_apsp(g).max() == 3


def test_gnp_complete():
    g = generate(GenSpec("gnp", {"n": 64, "p": 1.0}, seed=5))
    assert g.m == 64 * 63 // 2 == 2016


def test_star():
    g = generate(GenSpec("star", {"n": 7}))
    assert g.m == 6 and set(g.eu) == {0}


def test_ring_of_cliques_structure():
    g = generate(GenSpec("ring-of-cliques", {"m": 8, "s": 8}))
    assert g.n == 64
    d = exact_apsp(g)
    assert np.isfinite(d).all()
    # opposite cliques are several bridge crossings away
    assert d.max() >= 6


def test_barbell():
    g = generate(GenSpec("barbell", {"s": 5}))
    assert g.n == 10
    assert exact_apsp(g).max() == 3
    g2 = generate(GenSpec("barbell", {"s": 4, "bridge": 3}))
    assert g2.n == 10
    assert exact_apsp(g2).max() == 5


def test_grid():
    g = generate(GenSpec("grid", {"rows": 3, "cols": 4}))
    assert g.n == 12 and g.m == 3 * 3 + 2 * 4


def test_determinism():
    spec = GenSpec("gnp", {"n": 32, "p": 0.2}, weights="uniform(1,10)", seed=9)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.eu, b.eu) and np.allclose(a.ew, b.ew)


def test_expclasses_weights():
    g = generate(GenSpec("gnp", {"n": 32, "p": 0.3}, weights="expclasses(4)", seed=3))
    assert set(np.unique(g.ew)) <= {1.0, 2.0, 4.0, 8.0, 16.0}


def test_random_geometric():
    g = generate(GenSpec("random-geometric", {"n": 30, "r": 0.4}, seed=2))
    assert g.n == 30 and g.m > 0


def test_parse_genspec_roundtrip():
    spec = parse_genspec("gnp:n=256,p=0.05,w=uniform(1,4),gseed=3")
    assert spec.family == "gnp" and spec.params == {"n": 256, "p": 0.05}
    assert spec.weights == "uniform(1,4)" and spec.seed == 3
    with pytest.raises(ParameterError):
        parse_genspec("nosuch:n=3")
    with pytest.raises(ParameterError):
        parse_genspec("gnp:n=4,p=0.5,bogus=1")


@given(st.sampled_from(["gnp", "random-geometric"]), st.integers(0, 500))
def test_generated_graphs_are_valid(family, seed):
    params = {"n": 20, "p": 0.3} if family == "gnp" else {"n": 20, "r": 0.5}
    g = generate(GenSpec(family, params, weights="uniform(1,2)", seed=seed))
    assert np.all(g.eu < g.ev)  # canonical, no self-loops
    assert len({(u, v) for u, v in zip(g.eu, g.ev)}) == g.m  # no duplicates
    assert np.all(g.ew > 0)
