import random

import pytest

from ashg.errors import (PreconditionError, ResourceLimitError,
                         WrongAlgorithmError)
from ashg.instance import AshgInstance, Partition, is_blocking
from ashg.treedecomp import heuristic_decompose, make_nice
from ashg.verify import (EDGESET, STABLE, UNSTABLE, VALUE, min_vertex_cover,
                         verify_bruteforce, verify_tree, verify_treewidth,
                         verify_vertexcover)


def triangle(w=1):
    return AshgInstance(3, [(0, 1, w), (1, 2, w), (0, 2, w)])


def random_game(rng, max_n=10, max_w=5):
    n = rng.randint(1, max_n)
    edges = [(u, v, rng.randint(-max_w, max_w))
             for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.4]
    inst = AshgInstance(n, edges)
    labels = [rng.randrange(n) for _ in range(n)]
    blocks = {}
    for u, b in enumerate(labels):
        blocks.setdefault(b, set()).add(u)
    return inst, Partition(list(blocks.values()), n)


def random_forest(rng, max_n=10, max_w=5):
    n = rng.randint(1, max_n)
    edges = []
    for v in range(1, n):
        if rng.random() < 0.8:
            edges.append((rng.randrange(v), v, rng.randint(-max_w, max_w)))
    inst = AshgInstance(n, edges)
    labels = [rng.randrange(n) for _ in range(n)]
    blocks = {}
    for u, b in enumerate(labels):
        blocks.setdefault(b, set()).add(u)
    return inst, Partition(list(blocks.values()), n)


def test_brute_triangle_singletons():
    inst = triangle()
    res = verify_bruteforce(inst, Partition.singletons(3))
    assert res.verdict == UNSTABLE
    assert is_blocking(inst, Partition.singletons(3), res.witness)


def test_brute_triangle_grand_stable():
    res = verify_bruteforce(triangle(), Partition.grand(3))
    assert res.stable


def test_brute_negative_edge_stable():
    inst = AshgInstance(2, [(0, 1, -1)])
    assert verify_bruteforce(inst, Partition.singletons(2)).stable


def test_brute_max_size_monotone():
    inst = triangle()
    P = Partition.singletons(3)
    capped = verify_bruteforce(inst, P, max_size=2)
    assert capped.verdict == UNSTABLE
    assert verify_bruteforce(inst, P).verdict == UNSTABLE


def test_brute_max_size_too_small():
    # on C4 with this partition only the full cycle blocks
    inst = AshgInstance(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)])
    P = Partition([{0, 1}, {2, 3}], 4)
    assert verify_bruteforce(inst, P, max_size=3).stable
    full = verify_bruteforce(inst, P)
    assert full.verdict == UNSTABLE and full.witness == {0, 1, 2, 3}


def test_brute_cap():
    inst = AshgInstance(30, [(i, i + 1, -1) for i in range(29)])
    with pytest.raises(ResourceLimitError):
        verify_bruteforce(inst, Partition.singletons(30), cap=1000)


def test_tree_star():
    inst = AshgInstance(4, [(0, 1, 2), (0, 2, 2), (0, 3, 2)])
    res = verify_tree(inst, Partition.singletons(4))
    assert res.verdict == UNSTABLE
    assert res.witness == {0, 1, 2, 3}


def test_tree_path_stable():
    # w(ab)=3, w(bc)=2, P={{a,b},{c}}: no vertex gains strictly
    inst = AshgInstance(3, [(0, 1, 3), (1, 2, 2)])
    assert verify_tree(inst, Partition([{0, 1}, {2}], 3)).stable


def test_tree_single_vertex():
    assert verify_tree(AshgInstance(1, []), Partition.singletons(1)).stable


def test_tree_rejects_cycle():
    with pytest.raises(WrongAlgorithmError):
        verify_tree(triangle(), Partition.singletons(3))


def test_treewidth_c4_unstable():
    inst = AshgInstance(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)])
    P = Partition.singletons(4)
    for mode in (VALUE, EDGESET):
        res = verify_treewidth(inst, P, mode=mode)
        assert res.verdict == UNSTABLE
        assert is_blocking(inst, P, res.witness)


def test_treewidth_all_negative_stable():
    for mode in (VALUE, EDGESET):
        assert verify_treewidth(triangle(-1), Partition.singletons(3),
                                mode=mode).stable


def test_treewidth_accepts_raw_and_nice_td():
    inst = triangle()
    P = Partition.singletons(3)
    td = heuristic_decompose(inst)
    assert verify_treewidth(inst, P, td=td).verdict == UNSTABLE
    assert verify_treewidth(inst, P, td=make_nice(td)).verdict == UNSTABLE


def test_treewidth_rejects_invalid_td():
    from ashg.treedecomp import TreeDecomposition

    inst = triangle()
    bad = TreeDecomposition([{0, 1}], [])
    with pytest.raises(PreconditionError):
        verify_treewidth(inst, Partition.singletons(3), td=bad)


def test_treewidth_state_cap():
    rng = random.Random(7)
    inst = AshgInstance(14, [(u, v, rng.randint(-3, 3))
                             for u in range(14) for v in range(u + 1, 14)])
    with pytest.raises(ResourceLimitError):
        verify_treewidth(inst, Partition.singletons(14), max_states=50)


def test_treewidth_unknown_mode():
    with pytest.raises(ValueError):
        verify_treewidth(triangle(), Partition.singletons(3), mode="EDGES")


def test_min_vertex_cover():
    assert len(min_vertex_cover(triangle())) == 2
    star = AshgInstance(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    assert min_vertex_cover(star) == {0}
    assert min_vertex_cover(AshgInstance(3, [])) == frozenset()


def test_vertexcover_edgeless():
    inst = AshgInstance(3, [])
    assert verify_vertexcover(inst, Partition.singletons(3)).stable


def test_vertexcover_rejects_non_cover():
    with pytest.raises(PreconditionError):
        verify_vertexcover(triangle(), Partition.singletons(3), S={0})


def test_vertexcover_explicit_cover():
    inst = triangle()
    P = Partition.singletons(3)
    res = verify_vertexcover(inst, P, S={0, 1})
    assert res.verdict == UNSTABLE
    assert is_blocking(inst, P, res.witness)


def test_vertexcover_negative_candidate_edges():
    # the tempting candidate carries a negative edge to one guessed member;
    # bare clamping at the target would miss the feasible choice below
    inst = AshgInstance(4, [(0, 2, 5), (1, 2, -1), (0, 3, -1), (1, 3, 5),
                            (0, 1, 1)])
    P = Partition.singletons(4)
    res = verify_vertexcover(inst, P, S={0, 1})
    assert res.verdict == UNSTABLE
    assert is_blocking(inst, P, res.witness)


def test_vertexcover_subset_sum_generator_cases():
    from ashg.generators import gen_partition_csv

    yes = gen_partition_csv([1, 1, 2])
    res = verify_vertexcover(yes.instance, yes.partition)
    assert res.verdict == UNSTABLE
    assert is_blocking(yes.instance, yes.partition, res.witness)

    no = gen_partition_csv([1, 1, 1])
    assert verify_vertexcover(no.instance, no.partition).stable


def test_oracle_equivalence_random():
    rng = random.Random(2024)
    for _ in range(150):
        inst, P = random_game(rng, max_n=8, max_w=4)
        base = verify_bruteforce(inst, P)
        for res in (verify_treewidth(inst, P, mode=VALUE),
                    verify_treewidth(inst, P, mode=EDGESET),
                    verify_vertexcover(inst, P)):
            assert res.verdict == base.verdict
            if res.verdict == UNSTABLE:
                assert is_blocking(inst, P, res.witness)


def test_oracle_equivalence_forests():
    rng = random.Random(99)
    for _ in range(150):
        inst, P = random_forest(rng, max_n=9, max_w=4)
        base = verify_bruteforce(inst, P)
        res = verify_tree(inst, P)
        assert res.verdict == base.verdict
        if res.verdict == UNSTABLE:
            assert is_blocking(inst, P, res.witness)
