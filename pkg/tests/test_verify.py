import json

from gspo.equivalence import is_maximal
from gspo.rng import substream
from gspo.verify import (
    check_closure,
    check_conjecture,
    check_gpi_minimality,
    check_imap_filter,
    check_mec_fixed_points,
    check_separation_oracle,
    check_sparsest_poset,
    random_ancestral_graph,
    random_poset,
)


def test_random_ancestral_graph_is_ancestral():
    rng = substream(0, "verify", 117)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        g = random_ancestral_graph(n, rng)
        assert g.n == n
        assert g.is_ancestral()


def test_random_poset_is_transitive():
    rng = substream(0, "verify", 118)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        p = random_poset(n, rng)
        rel = set(p.relations)
        for i, j in rel:
            assert (j, i) not in rel
            for k, l in rel:
                if j == k:
                    assert (i, l) in rel


def test_suite_result_serializes():
    # checked counts poset evaluations: 3 graphs x 219 posets on 4 vertices
    res = check_sparsest_poset(num_vertices=4, graphs=3, seed=0)
    assert res.passed
    assert res.checked == 657
    doc = json.loads(json.dumps(res.to_json()))
    assert doc["suite"] == res.suite
    assert doc["failures"] == []


def test_small_suites_pass():
    assert check_imap_filter(graphs=2, seed=0).passed
    assert check_gpi_minimality(pairs=20, seed=0).passed
    assert check_mec_fixed_points(graphs=5, posets=20, seed=0).passed
    assert check_closure(num_vertices=4, graphs=20, seed=0).passed


def test_separation_suite_counts_queries():
    res = check_separation_oracle(queries=300, num_vertices=6, seed=0)
    assert res.passed
    assert res.checked >= 300


def test_conjecture_smoke(tmp_path):
    res = check_conjecture(runs=3, seed=0, dump_dir=tmp_path, jobs=1)
    assert res.passed
    assert res.details["pass_rate"] == 1.0
    assert res.details["dumped"] == []
    assert not list(tmp_path.iterdir())
