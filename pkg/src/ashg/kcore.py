"""k-core stability: bounded verification, the greedy 2-core constructor,
and bounded-coalition existence search."""

from ashg.errors import PreconditionError, ResourceLimitError
from ashg.instance import Partition, iter_partitions
from ashg.verify import VerificationResult, verify_bruteforce


def verify_kcore(inst, P, k, cap=None):
    """No blocking coalition of size at most k."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    return verify_bruteforce(inst, P, max_size=k, cap=cap)


def greedy_2core(inst):
    """A 2-core stable partition, which always exists.

    Walk the positive edges by non-increasing weight and merge an edge's
    endpoints only when both are still singletons.
    """
    positive = [(u, v, w) for u, v, w in inst.edges if w > 0]
    positive.sort(key=lambda e: (-e[2], e[0], e[1]))
    paired = {}
    for u, v, w in positive:
        if u not in paired and v not in paired:
            paired[u] = v
            paired[v] = u
    blocks = []
    for u in inst.vertices():
        if u not in paired:
            blocks.append({u})
        elif u < paired[u]:
            blocks.append({u, paired[u]})
    return Partition(blocks, inst.n)


def solve_kcs_bruteforce(inst, k, cap=12):
    """First k-core stable partition in restricted-growth order, if any."""
    from ashg.existence import CsResult, EXISTS, NOT_EXISTS

    if inst.n > cap:
        raise ResourceLimitError("partition_enumeration_n", cap)
    for P in iter_partitions(inst.n):
        if verify_kcore(inst, P, k).stable:
            return CsResult(EXISTS, P, method="kcs-brute")
    return CsResult(NOT_EXISTS, method="kcs-brute")
