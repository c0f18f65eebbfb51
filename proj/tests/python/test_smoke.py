import itertools
import math
import os
import random
from fractions import Fraction

import pytest

import lexnet


def test_tokenize_counts_and_folding():
    assert lexnet.tokenize("The the THE act") == (4, 2)
    assert lexnet.tokenize("The the THE act", fold_case=False) == (4, 4)


def test_citations_resolve_relative_and_absolute():
    found = lexnet.find_citations("See part 135 of this chapter and 8 U.S.C. 1182(d)(5).",
                                  collection="CFR", title="14")
    assert [f["keys"] for f in found] == [["CFR:14:135"], ["USC:8:1182"]]
    multi = lexnet.find_citations("27 CFR 46.155, 178.152 and 179.182", collection="CFR", title="26")
    assert multi[0]["keys"] == ["CFR:27:46.155", "CFR:27:178.152", "CFR:27:179.182"]


def test_unextracted_estimate():
    refs = [f"section {100 + i} of this title" for i in range(9)]
    text, spans = "", []
    for r in refs:
        spans.append((len(text), len(r)))
        text += r + "; "
    text += "and see Sec. 77 for more."
    fraction, extracted, outside = lexnet.estimate_unextracted([(text, spans)])
    assert (extracted, outside) == (9, 1)
    assert fraction == pytest.approx(0.9)
    assert lexnet.estimate_unextracted([(text, None)])[1:] == (10, 0)


def _pairs_ari(x, y):
    keys = sorted(x)
    n = len(keys)
    a = b = c = d = 0
    for i, j in itertools.combinations(keys, 2):
        sx, sy = x[i] == x[j], y[i] == y[j]
        a += sx and sy
        b += sx and not sy
        c += sy and not sx
        d += not sx and not sy
    total = n * (n - 1) // 2
    expected = Fraction((a + b) * (a + c), total)
    top = Fraction(a) - expected
    bottom = Fraction((a + b) + (a + c), 2) - expected
    return top / bottom if bottom else Fraction(1)


def test_ari_matches_pair_counting_oracle():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(2, 9)
        x = {f"k{i}": rng.randrange(3) for i in range(n)}
        y = {f"k{i}": rng.randrange(4) for i in range(n)}
        xs = {k: str(v) for k, v in x.items()}
        ys = {k: str(v) for k, v in y.items()}
        assert lexnet.ari_fraction(xs, ys) == _pairs_ari(x, y)
        assert lexnet.ari(xs, ys) == pytest.approx(float(_pairs_ari(x, y)), abs=1e-12)


def test_nmi_identical_and_independent():
    a = {str(i): str(i % 3) for i in range(12)}
    relabeled = {k: "m" + v for k, v in a.items()}
    assert lexnet.nmi(a, relabeled) == 1.0
    b = {str(i): str(i // 6) for i in range(12)}
    c = {str(i): str(i % 2) for i in range(12)}
    assert lexnet.nmi(b, c) == pytest.approx(0.0, abs=1e-12)


def _cliques():
    edges = []
    for base in (0, 10):
        edges += [(base + i, base + j, 1.0) for i in range(10) for j in range(i + 1, 10)]
    return edges + [(9, 10, 1.0)]


def test_map_equation_and_planted_bisection():
    assert lexnet.map_equation(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], [0, 0, 0]) == pytest.approx(
        math.log2(3), abs=1e-12)
    modules = lexnet.cluster(20, _cliques(), preferred_modules=2, seed=1)
    assert modules == [0] * 10 + [1] * 10
    assert lexnet.consensus(20, _cliques(), runs=20, seed=5) == lexnet.consensus(20, _cliques(), runs=20, seed=5)


def test_rocket_against_networkx():
    nx = pytest.importorskip("networkx")
    rng = random.Random(9)
    for _ in range(30):
        n = rng.randint(1, 40)
        keys = [f"v{i:02d}" for i in range(n)]
        edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 2 * n))]
        got = lexnet.rocket(keys, edges)
        g = nx.DiGraph()
        g.add_nodes_from(range(n))
        g.add_edges_from(edges)
        largest = lambda comps: min(comps, key=lambda c: (-len(c), min(keys[i] for i in c)))
        lcc = largest(nx.weakly_connected_components(g))
        assert got["lcc"] == sorted(keys[i] for i in lcc)
        sub = g.subgraph(lcc)
        scc = largest(nx.strongly_connected_components(sub))
        s = next(iter(scc))
        reach_to = nx.ancestors(sub, s) - scc
        reach_from = nx.descendants(sub, s) - scc
        assert got["scc"] == sorted(keys[i] for i in scc)
        assert got["in"] == sorted(keys[i] for i in reach_to)
        assert got["out"] == sorted(keys[i] for i in reach_from)
        assert got["tt"] == sorted(keys[i] for i in set(lcc) - scc - reach_to - reach_from)


def test_stars():
    keys = ["hub"] + [f"s{i}" for i in range(12)]
    edges = [(i, 0) for i in range(1, 13)]
    stars = lexnet.extract_stars(keys, edges)
    assert [(s["hub"], s["n"], s["type"]) for s in stars] == [("hub", 13, "sink")]
    assert lexnet.classify_star(213, 1) == "source"
    with pytest.raises(ValueError):
        lexnet.extract_stars(keys, edges, density_cap=1.5)


def test_synthetic_corpus_is_bundled():
    data = os.environ.get("LEXNET_DATA")
    if not data:
        pytest.skip("LEXNET_DATA not set")
    assert os.path.isdir(os.path.join(data, "synthetic", "US", "2018"))
