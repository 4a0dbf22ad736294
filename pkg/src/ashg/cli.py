"""Command-line front end: verify partitions, solve for stable partitions,
generate reduction instances, compute tree decompositions, and run the
cross-validation batteries.

Exit codes: 0 = Stable / Exists, 1 = Unstable / NotExists (or cross-val
disagreement), 2 = usage or input error, 3 = resource cap hit.  stdout
carries only machine-readable artifacts (witness, partition, files);
everything else goes to stderr.
"""

import random
import sys
import time

import click

from ashg.errors import (AshgError, ParseError, PreconditionError,
                         ResourceLimitError, WrongAlgorithmError)
from ashg.existence import solve_cs, solve_cs_bruteforce
from ashg.generators import (gen_33sat_cs, gen_3col_kcs, gen_bdd_csv,
                             gen_binpacking_csv, gen_clique_kcsv,
                             gen_eapartition_cs, gen_gadget,
                             gen_partition_csv, coloring_partition_3col)
from ashg.instance import (emit_instance, emit_partition, parse_instance,
                           parse_partition)
from ashg.kcore import greedy_2core, solve_kcs_bruteforce, verify_kcore
from ashg.qbf import to_dimacs, to_qdimacs
from ashg.treedecomp import emit_td, heuristic_decompose, read_td
from ashg.verify import (EDGESET, VALUE, verify_bruteforce, verify_tree,
                         verify_treewidth, verify_vertexcover)


def _fail(message, code):
    click.echo("error: %s" % message, err=True)
    sys.exit(code)


def _load_instance(path):
    try:
        with open(path) as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        _fail(str(exc), 2)
    except ParseError as exc:
        _fail("%s: %s" % (path, exc), 2)


def _load_partition(path, inst):
    try:
        with open(path) as fh:
            return parse_partition(fh.read(), inst)
    except OSError as exc:
        _fail(str(exc), 2)
    except ParseError as exc:
        _fail("%s: %s" % (path, exc), 2)


def _load_td(path, inst):
    try:
        with open(path) as fh:
            return read_td(fh.read(), inst)
    except OSError as exc:
        _fail(str(exc), 2)
    except ParseError as exc:
        _fail("%s: %s" % (path, exc), 2)


def _report(command, verdict, elapsed, stats):
    click.echo("command: %s" % command, err=True)
    click.echo("verdict: %s" % verdict, err=True)
    click.echo("time: %.3fs" % elapsed, err=True)
    for key in sorted(stats):
        click.echo("%s: %s" % (key, stats[key]), err=True)


@click.group()
def main():
    """Core stability toolkit for additively separable hedonic games."""


@main.command()
@click.argument("instance_path", type=click.Path(exists=True))
@click.argument("partition_path", type=click.Path(exists=True))
@click.option("--algo", type=click.Choice(["brute", "tree", "tw", "vc"]),
              default="brute", show_default=True)
@click.option("--k", type=int, default=None,
              help="Only consider blocking coalitions of size at most k (brute).")
@click.option("--td", "td_path", type=click.Path(exists=True), default=None,
              help="PACE tree decomposition for --algo tw.")
@click.option("--mode", type=click.Choice(["value", "edgeset"]), default="value",
              show_default=True, help="Signature regime for --algo tw.")
@click.option("--cap", type=int, default=1_000_000, show_default=True,
              help="Enumeration cap for --algo brute.")
@click.option("--max-states", type=int, default=5_000_000, show_default=True,
              help="DP state cap for --algo tw.")
def verify(instance_path, partition_path, algo, k, td_path, mode, cap,
           max_states):
    """Check a partition for core stability; exit 1 prints a witness."""
    inst = _load_instance(instance_path)
    P = _load_partition(partition_path, inst)
    if k is not None and algo != "brute":
        _fail("--k is only supported with --algo brute", 2)
    start = time.time()
    try:
        if algo == "brute":
            if k is not None:
                res = verify_kcore(inst, P, k, cap=cap)
            else:
                res = verify_bruteforce(inst, P, cap=cap)
        elif algo == "tree":
            res = verify_tree(inst, P)
        elif algo == "tw":
            td = _load_td(td_path, inst) if td_path else None
            if td is None:
                click.echo("no decomposition given; using heuristic", err=True)
            res = verify_treewidth(inst, P, td=td,
                                   mode=VALUE if mode == "value" else EDGESET,
                                   max_states=max_states)
        else:
            res = verify_vertexcover(inst, P)
    except ResourceLimitError as exc:
        _fail(str(exc), 3)
    except (PreconditionError, WrongAlgorithmError) as exc:
        _fail(str(exc), 2)
    _report("verify --algo %s" % algo, res.verdict, time.time() - start,
            res.stats)
    if not res.stable:
        click.echo(" ".join(str(u) for u in sorted(res.witness)))
        sys.exit(1)


@main.command()
@click.argument("instance_path", type=click.Path(exists=True))
@click.option("--algo", type=click.Choice(["brute", "qbf"]), default="qbf",
              show_default=True)
@click.option("--k", type=int, default=None,
              help="Search for a k-core stable partition instead (brute).")
@click.option("--td", "td_path", type=click.Path(exists=True), default=None,
              help="PACE tree decomposition guiding the qbf encoding.")
@click.option("--cap", type=int, default=10, show_default=True,
              help="Vertex cap for --algo brute.")
@click.option("--max-terms", type=int, default=2_000_000, show_default=True)
@click.option("--max-states", type=int, default=20_000_000, show_default=True)
@click.option("--emit-dimacs", type=click.Path(), default=None,
              help="Write the compiled CNF (qbf only).")
@click.option("--emit-qdimacs", type=click.Path(), default=None,
              help="Write the split exists-forall formula (qbf only).")
def solve(instance_path, algo, k, td_path, cap, max_terms, max_states,
          emit_dimacs, emit_qdimacs):
    """Decide stable-partition existence; exit 0 prints a partition."""
    inst = _load_instance(instance_path)
    if k is not None and algo != "brute":
        _fail("--k is only supported with --algo brute", 2)
    start = time.time()
    collect = {}
    try:
        if algo == "brute":
            if k is None:
                res = solve_cs_bruteforce(inst, cap=cap)
            elif k == 2:
                P = greedy_2core(inst)
                from ashg.existence import CsResult, EXISTS
                res = CsResult(EXISTS, P, method="greedy-2core")
            else:
                res = solve_kcs_bruteforce(inst, k, cap=cap)
        else:
            td = _load_td(td_path, inst) if td_path else None
            res = solve_cs(inst, td=td, max_terms=max_terms,
                           max_states=max_states, collect=collect)
    except ResourceLimitError as exc:
        _fail(str(exc), 3)
    except PreconditionError as exc:
        _fail(str(exc), 2)
    if emit_qdimacs and "dnf3" in collect:
        with open(emit_qdimacs, "w") as fh:
            fh.write(to_qdimacs(collect["dnf3"]))
    if emit_dimacs and "cnf" in collect:
        with open(emit_dimacs, "w") as fh:
            fh.write(to_dimacs(collect["cnf"]))
    _report("solve --algo %s" % algo, res.verdict, time.time() - start,
            res.stats)
    if not res.exists:
        sys.exit(1)
    check = verify_kcore(inst, res.partition, k, cap=None) if k is not None \
        else verify_bruteforce(inst, res.partition, cap=None)
    if not check.stable:
        _fail("internal: solver returned a partition that fails verification", 2)
    click.echo(emit_partition(res.partition), nl=False)


@main.command()
@click.argument("instance_path", type=click.Path(exists=True))
@click.option("--heuristic", type=click.Choice(["min-fill", "min-degree"]),
              default="min-fill", show_default=True)
def decompose(instance_path, heuristic):
    """Print a heuristic tree decomposition in PACE format."""
    inst = _load_instance(instance_path)
    td = heuristic_decompose(inst, heuristic=heuristic)
    click.echo(emit_td(td, inst.n), nl=False)


def _write_outputs(prefix, gen, extra_provenance=()):
    paths = []
    with open(prefix + ".graph", "w") as fh:
        fh.write(emit_instance(gen.instance))
    paths.append(prefix + ".graph")
    if gen.partition is not None:
        with open(prefix + ".partition", "w") as fh:
            fh.write(emit_partition(gen.partition))
        paths.append(prefix + ".partition")
    if gen.td is not None:
        with open(prefix + ".td", "w") as fh:
            fh.write(emit_td(gen.td, gen.instance.n))
        paths.append(prefix + ".td")
    with open(prefix + ".provenance", "w") as fh:
        fh.write("expected %s\n" % gen.expected)
        for line in extra_provenance:
            fh.write(line + "\n")
        for key in sorted(gen.info, key=str):
            fh.write("%s %s\n" % (key, gen.info[key]))
    paths.append(prefix + ".provenance")
    for p in paths:
        click.echo(p)


def _source_graph(path):
    """Read an unweighted source graph for a reduction (weights ignored)."""
    inst = _load_instance(path)
    return inst.n, [(u, v) for u, v, _ in inst.edges]


@main.group()
def gen():
    """Generate reduction instances with known structure."""


@gen.command("gadget")
@click.option("--rho", type=int, default=-16, show_default=True)
@click.option("--out", required=True, help="Output file prefix.")
def gen_gadget_cmd(rho, out):
    _write_outputs(out, gen_gadget(rho))


@gen.command("partition-csv")
@click.argument("values", type=int, nargs=-1, required=True)
@click.option("--out", required=True)
def gen_partition_cmd(values, out):
    try:
        _write_outputs(out, gen_partition_csv(list(values)))
    except PreconditionError as exc:
        _fail(str(exc), 2)


@gen.command("binpacking-csv")
@click.argument("values", type=int, nargs=-1, required=True)
@click.option("--k", type=int, required=True)
@click.option("--out", required=True)
def gen_binpacking_cmd(values, k, out):
    try:
        _write_outputs(out, gen_binpacking_csv(list(values), k))
    except PreconditionError as exc:
        _fail(str(exc), 2)


@gen.command("bdd-csv")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--dstar", type=int, required=True)
@click.option("--size", type=int, required=True)
@click.option("--out", required=True)
def gen_bdd_cmd(graph, dstar, size, out):
    n, edges = _source_graph(graph)
    try:
        _write_outputs(out, gen_bdd_csv(n, edges, dstar, size))
    except PreconditionError as exc:
        _fail(str(exc), 2)


@gen.command("clique-kcsv")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, required=True)
@click.option("--out", required=True)
def gen_clique_cmd(graph, k, out):
    n, edges = _source_graph(graph)
    try:
        _write_outputs(out, gen_clique_kcsv(n, edges, k))
    except PreconditionError as exc:
        _fail(str(exc), 2)


@gen.command("eapartition-cs")
@click.option("-a", "avals", type=int, multiple=True, required=True)
@click.option("-b", "bvals", type=int, multiple=True, required=True)
@click.option("--out", required=True)
def gen_ea_cmd(avals, bvals, out):
    try:
        _write_outputs(out, gen_eapartition_cs(list(avals), list(bvals)))
    except PreconditionError as exc:
        _fail(str(exc), 2)


@gen.command("threecol-kcs")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--out", required=True)
def gen_3col_cmd(graph, k, out):
    n, edges = _source_graph(graph)
    try:
        result = gen_3col_kcs(n, edges, k)
    except PreconditionError as exc:
        _fail(str(exc), 2)
    coloring = result.info.get("coloring")
    if coloring is not None:
        result.partition = coloring_partition_3col(result, coloring)
    _write_outputs(out, result)


@gen.command("sat33-cs")
@click.option("--vars", "num_vars", type=int, required=True)
@click.option("--clause", "clause_strs", multiple=True, required=True,
              help="Clause as space-separated signed literals, e.g. '1 -2'.")
@click.option("--out", required=True)
def gen_sat33_cmd(num_vars, clause_strs, out):
    try:
        clauses = [tuple(int(tok) for tok in c.split()) for c in clause_strs]
    except ValueError:
        _fail("clauses must be integers", 2)
    try:
        _write_outputs(out, gen_33sat_cs(num_vars, clauses))
    except PreconditionError as exc:
        _fail(str(exc), 2)


def _crossval_partition(rng):
    values = [rng.randint(1, 9) for _ in range(rng.randint(1, 6))]
    out = gen_partition_csv(values)
    got = verify_vertexcover(out.instance, out.partition).stable
    return got == out.expected, ("partition-csv", values)


def _crossval_binpacking(rng):
    values = [rng.randint(1, 9) for _ in range(rng.randint(2, 5))]
    out = gen_binpacking_csv(values, 2)
    got = verify_bruteforce(out.instance, out.partition,
                            cap=500_000_000).stable
    return got == out.expected, ("binpacking-csv", values, 2)


def _crossval_bdd(rng):
    n = rng.randint(1, 5)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.5]
    dstar = rng.randint(0, 2)
    size = rng.randint(1, n)
    out = gen_bdd_csv(n, edges, dstar, size)
    assert all(w in (-1, 1) for _, _, w in out.instance.edges)
    got = verify_treewidth(out.instance, out.partition).stable
    return got == out.expected, ("bdd-csv", n, edges, dstar, size)


def _crossval_clique(rng):
    n = rng.randint(3, 6)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.5]
    out = gen_clique_kcsv(n, edges, 3)
    got = verify_kcore(out.instance, out.partition, 3, cap=None).stable
    return got == out.expected, ("clique-kcsv", n, edges, 3)


_SUITES = [
    ("partition", _crossval_partition),
    ("binpacking", _crossval_binpacking),
    ("bdd", _crossval_bdd),
    ("clique", _crossval_clique),
]


def _crossval_chunk(args):
    suite_name, seeds = args
    fn = dict(_SUITES)[suite_name]
    failures = []
    for seed in seeds:
        ok, case = fn(random.Random(seed))
        if not ok:
            failures.append((seed, case))
    return suite_name, len(seeds), failures


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=100, show_default=True,
              help="Trials per suite.")
@click.option("--jobs", type=int, default=1, show_default=True)
def crossval(seed, trials, jobs):
    """Cross-validate every brute-forcible reduction; exit 1 on mismatch."""
    chunks = []
    for idx, (name, _) in enumerate(_SUITES):
        seeds = [seed * 1_000_003 + idx * trials + t for t in range(trials)]
        step = max(1, (trials + jobs - 1) // jobs)
        for lo in range(0, trials, step):
            chunks.append((name, seeds[lo:lo + step]))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_crossval_chunk, chunks))
    else:
        results = [_crossval_chunk(c) for c in chunks]
    totals = {}
    failures = []
    for name, count, fails in results:
        done, bad = totals.get(name, (0, 0))
        totals[name] = (done + count, bad + len(fails))
        failures.extend((name,) + f for f in fails)
    for name, _ in _SUITES:
        done, bad = totals[name]
        click.echo("%-12s %d/%d passed" % (name, done - bad, done))
    if failures:
        for name, fail_seed, case in failures:
            click.echo("disagreement: suite=%s seed=%d case=%r"
                       % (name, fail_seed, case), err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
