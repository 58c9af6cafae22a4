"""Command-line entry point: ``wreathlab <command> <action> [flags]``.

Exit codes: 0 on success, 1 on validation errors (including unknown commands and
flags), 2 when an enumeration cap is exceeded.

Sampling is split into fixed chunks of ``CHUNK`` draws. Chunk c uses the generator
seeded by ``SeedSequence(seed).spawn(n_chunks)[c]``, so the output depends on the
seed and the count only; ``--threads`` changes how many chunks run at once, never
which numbers come out or in what order.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import chain, coupling, harness, limit_laws, stats
from .core import Partition, Permutation, cycle_type, partitions_of
from .cycle_index import (
    CycleIndex,
    build_cyclic,
    build_symmetric,
    product_compose,
    wreath_compose,
    wreath_symmetric,
)
from .wreath import CapExceeded, GroupSpec, sample_uniform

CHUNK = 65536
DEFAULT_SEED = harness.DEFAULT_SEED


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


# -- output -------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def to_json(obj) -> str:
    """Compact JSON with floats at 17 significant digits and Fractions as "p/q" strings."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return to_json(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return to_json(str(obj))


def _csv_rows(header, rows) -> str:
    lines = [",".join(map(str, header))] if header else []
    for r in rows:
        lines.append(",".join(_fmt_float(v) if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines)


# -- parsing helpers -------------------------------------------------------------------


def _group(text: str) -> GroupSpec:
    return GroupSpec.parse(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"bad rational {text!r}") from e


def _cap(args) -> int | None:
    return getattr(args, "cap", None)


def _chunk_parts(draw, count: int, seed: int, threads: int) -> list:
    if count < 0:
        raise ValueError("count must be nonnegative")
    sizes = [CHUNK] * (count // CHUNK) + ([count % CHUNK] if count % CHUNK else [])
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))

    def run(job):
        size, ss = job
        return draw(size, np.random.default_rng(ss))

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(run, jobs))
    return [run(j) for j in jobs]


def chunked(draw: Callable[[int, np.random.Generator], np.ndarray], count: int, seed: int, threads: int = 1) -> np.ndarray:
    """Concatenate ``draw(size, rng)`` over fixed chunks with spawned per-chunk streams."""
    parts = _chunk_parts(draw, count, seed, threads)
    return np.concatenate(parts) if parts else draw(0, np.random.default_rng(seed))


def chunked_list(draw, count: int, seed: int, threads: int = 1) -> list:
    """List-valued counterpart of :func:`chunked` with the same splitting rule."""
    return [x for part in _chunk_parts(draw, count, seed, threads) for x in part]


def _emit(args, data, text: str | None = None, csv: str | None = None) -> str:
    fmt = args.format
    if fmt == "json" or (fmt == "text" and text is None) or (fmt == "csv" and csv is None):
        return to_json(data)
    return text if fmt == "text" else csv


# -- cycle-index --------------------------------------------------------------------


def _cycle_index_payload(z: CycleIndex) -> dict:
    d = z.to_json()
    d["text"] = str(z)
    return d


def cmd_cycle_index(args) -> str:
    if args.action == "group":
        z = _group(args.gamma).cycle_index
    elif args.action == "symmetric":
        z = build_symmetric(args.n)
    elif args.action == "cyclic":
        z = build_cyclic(args.n)
    elif args.action == "wreath":
        g = _group(args.gamma).cycle_index
        if args.h is None:
            z = wreath_symmetric(g, args.n)
        else:
            h = _group(args.h)
            z = wreath_compose(h.cycle_index, g)
    elif args.action == "product":
        z = product_compose(_group(args.a).cycle_index, _group(args.b).cycle_index)
    else:
        raise ValueError(args.action)
    rows = [[str(Partition(dict(m))), f"{c.numerator}/{c.denominator}"] for m, c in z.sorted_terms()]
    return _emit(args, _cycle_index_payload(z), text=str(z), csv=_csv_rows(["type", "coefficient"], rows))


# -- sample -------------------------------------------------------------------------


def cmd_sample(args) -> str:
    gamma = _group(args.gamma)
    if args.action == "element":
        rng = np.random.default_rng(args.seed)
        out = []
        for _ in range(args.count):
            w = sample_uniform(gamma, args.n, rng)
            out.append({"element": str(w), "induced": list(w.induced().images), "type": str(cycle_type(w.induced()))})
        text = "\n".join(f"{o['element']}\t{o['type']}" for o in out)
        return _emit(args, {"seed": args.seed, "samples": out}, text=text)
    if args.action == "type":
        draw = _type_drawer(gamma, args.n)
        lines = [str(lam) for lam in chunked_list(draw, args.count, args.seed, args.threads)]
        return _emit(args, {"seed": args.seed, "types": lines}, text="\n".join(lines))
    if args.action == "counts":
        B = args.trunc_B
        rows = chunked(lambda s, r: coupling.sample_cycle_counts(gamma, args.n, B, s, r), args.count, args.seed, args.threads)
        return _emit(args, {"seed": args.seed, "B": B, "counts": rows.tolist()},
                     text="\n".join(" ".join(map(str, r)) for r in rows),
                     csv=_csv_rows([f"a{i}" for i in range(1, B + 1)], rows.tolist()))
    raise ValueError(args.action)


def _type_drawer(gamma: GroupSpec, n: int):
    def draw(size, rng):
        return [coupling.sample_cycle_type(gamma, n, rng) for _ in range(size)]

    return draw


# -- limit --------------------------------------------------------------------------


def _spec(args) -> limit_laws.LinearCompoundSpec:
    B = args.trunc_B
    if args.family == "gamma":
        return limit_laws.build_spec(_group(args.gamma), _fraction(args.t), B)
    if args.family == "cyclic":
        return limit_laws.cyclic_spec(args.k, B)
    if args.family == "s3":
        return limit_laws.s3_spec(B)
    if args.family == "skn":
        return limit_laws.skn_limit_spec(B)
    raise ValueError(f"unknown family {args.family}")


def cmd_limit(args) -> str:
    B = args.trunc_B
    if args.action == "sample" and args.family == "product":
        rows = chunked(lambda s, r: limit_laws.sample_product_action(B, r, s), args.count, args.seed, args.threads)
    elif args.action == "sample" and args.family == "skn-joint":
        rows = chunked(lambda s, r: coupling.sample_skn_double_limit_batch(B, s, r), args.count, args.seed, args.threads)
    else:
        if args.family in ("product", "skn-joint"):
            raise ValueError(f"family {args.family} only supports 'sample'")
        spec = _spec(args)
        if args.action == "spec":
            return to_json(spec.to_json())
        if args.action == "pmf":
            if not 1 <= args.coord <= B:
                raise ValueError(f"coordinate must lie in 1..{B}")
            pmf = limit_laws.marginal_pmf(spec, args.coord, args.support_max)
            return _emit(args, {"coord": args.coord, "pmf": pmf.tolist()},
                         text="\n".join(f"{j} {_fmt_float(float(p))}" for j, p in enumerate(pmf)),
                         csv=_csv_rows(["x", "p"], [[j, float(p)] for j, p in enumerate(pmf)]))
        rows = chunked(lambda s, r: limit_laws.sample(spec, r, s), args.count, args.seed, args.threads)
    return _emit(args, {"seed": args.seed, "B": B, "samples": rows.tolist()},
                 text="\n".join(" ".join(map(str, r)) for r in rows),
                 csv=_csv_rows([f"A{i}" for i in range(1, B + 1)], rows.tolist()))


# -- chain --------------------------------------------------------------------------


def cmd_chain(args) -> str:
    if args.action == "matrix":
        m = chain.exact_lumped_matrix(args.n, args.cap or chain.MATRIX_CAP)
        data = {"n": m.n, "states": [str(s) for s in m.states], "entries": [list(r) for r in m.entries]}
        text = "\n".join(f"{s}: " + " ".join(str(x) for x in r) for s, r in zip(m.states, m.entries))
        return _emit(args, data, text=text, csv=m.to_csv().rstrip("\n"))
    rng = np.random.default_rng(args.seed)
    start = Partition.parse(args.start) if args.start else Partition({1: args.n})
    if args.action == "step":
        nxt = chain.lumped_step(start, rng)
        return _emit(args, {"seed": args.seed, "from": str(start), "to": str(nxt)}, text=str(nxt))
    if args.action == "run":
        run = chain.run_lumped(start.weight, args.steps, start, rng)
        occ = {str(s): run.occupancy.get(s, 0) for s in partitions_of(start.weight)}
        data = {"seed": args.seed, "start": str(start), "steps": args.steps, "occupancy": occ}
        if args.trajectory:
            data["trajectory"] = [str(s) for s in run.trajectory]
        return _emit(args, data, text="\n".join(f"{k}\t{v}" for k, v in occ.items()),
                     csv=_csv_rows(["state", "visits"], occ.items()))
    raise ValueError(args.action)


# -- stats --------------------------------------------------------------------------


def _moments(mp: stats.MomentPair) -> dict:
    return {"mean": mp.mean, "variance": mp.variance}


def cmd_stats(args) -> str:
    if args.action in ("descents", "inversions", "cycles") and args.perm:
        p = Permutation([int(x) for x in args.perm.replace(",", " ").split()])
        value = {"descents": stats.descents, "inversions": stats.inversions, "cycles": stats.cycle_count}[args.action](p)
        return _emit(args, {args.action: value}, text=str(value))
    if args.action == "descents":
        return to_json({"k": args.k, "n": args.n, "decomposition": _moments(stats.wreath_descent_moments(args.k, args.n)),
                        "displayed": _moments(stats.printed_descent_moments(args.k, args.n))})
    if args.action == "inversions":
        return to_json({"k": args.k, "n": args.n, "decomposition": _moments(stats.wreath_inversion_moments(args.k, args.n)),
                        "displayed": _moments(stats.printed_inversion_moments(args.k, args.n))})
    if args.action == "cycles":
        gamma = _group(args.gamma)
        mean, var = stats.wreath_cycle_moments(gamma, args.n)
        return to_json({"gamma": args.gamma, "n": args.n, "mean": mean, "variance": var})
    if args.action == "cyclic":
        return to_json(stats.cyclic_moment_report(args.k_max))
    if args.action == "clt":
        gamma = _group(args.gamma)
        x = chunked(lambda s, r: coupling.sample_num_cycles(gamma, args.n, s, r), args.count, args.seed, args.threads)
        mean, var = stats.wreath_cycle_moments(gamma, args.n)
        ks = stats.clt_report(x, mean, math.sqrt(var), lattice=True)
        thr = stats.ks_threshold(len(x))
        return to_json({"gamma": args.gamma, "n": args.n, "count": len(x), "seed": args.seed, "mean": mean,
                        "variance": var, "ks": ks, "ks_threshold_1pct": thr, "pass": ks <= args.ks_max})
    raise ValueError(args.action)


# -- verify -------------------------------------------------------------------------


def _dist_json(d: harness.Distribution) -> list:
    return [{"counts": list(k), "p": p} for k, p in sorted(d.probs.items())]


def cmd_verify(args) -> str:
    a = args.action
    if a == "census":
        d = harness.wreath_census(_group(args.gamma), args.n, args.trunc_B, _cap(args))
        return _emit(args, {"law": _dist_json(d)}, csv=_csv_rows(
            [f"a{i}" for i in range(1, args.trunc_B + 1)] + ["p"],
            [list(k) + [f"{p.numerator}/{p.denominator}"] for k, p in sorted(d.probs.items())]))
    if a == "triangle":
        g = _group(args.gamma)
        B = args.trunc_B or g.k * args.n
        c = harness.wreath_census(g, args.n, B, _cap(args))
        e = harness.coupled_law(g, args.n, B, _cap(args))
        z = harness.Distribution.from_cycle_index(wreath_symmetric(g.cycle_index, args.n), B)
        ok = c == e == z
        return to_json({"gamma": args.gamma, "n": args.n, "B": B, "census_eq_coupling": c == e,
                        "coupling_eq_cycle_index": e == z, "pass": ok})
    if a == "tv":
        g = _group(args.gamma)
        r = harness.check_tv_bound_wreath(g, args.n, args.trunc_B, args.count, args.seed)
    elif a == "skn":
        r = harness.check_tv_bound_skn(args.k, args.n, args.trunc_B, args.count, args.seed)
    elif a == "product":
        r = harness.check_product_bound(args.k, args.n, args.trunc_B, args.count, args.seed)
    elif a == "cyclic":
        rep = stats.cyclic_moment_report(args.k_max)
        return to_json({"all_match": rep["all_match"], "printed_second_moment_mismatches": rep["printed_second_moment_mismatches"]})
    else:
        raise ValueError(a)
    data = r.to_json()
    data.pop("runtime_ms")  # keeps the output byte-identical between runs
    return _emit(args, data, text=r.line())


# -- parser -------------------------------------------------------------------------


def _common(p, *, sampling=False):
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap (default: $WREATHLAB_CAP or 10^7)")
    if sampling:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--count", type=int, default=1)
        p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wreathlab", description="Cycle indices, samplers and limit laws for wreath products.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ci = sub.add_parser("cycle-index", help="exact cycle index polynomials")
    ci.add_argument("action", choices=["group", "symmetric", "cyclic", "wreath", "product"])
    ci.add_argument("--gamma", default="S1")
    ci.add_argument("--h", default=None, help="top group acting on blocks (default S<n>)")
    ci.add_argument("--n", type=int, default=1)
    ci.add_argument("--a", default="S1")
    ci.add_argument("--b", default="S1")
    _common(ci)

    sa = sub.add_parser("sample", help="uniform wreath elements, cycle types or truncated counts")
    sa.add_argument("action", choices=["element", "type", "counts"])
    sa.add_argument("--gamma", default="S1")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--trunc-B", type=int, default=10)
    _common(sa, sampling=True)
    sa.set_defaults(format="text")

    li = sub.add_parser("limit", help="compound-Poisson limit laws")
    li.add_argument("action", choices=["spec", "sample", "pmf"])
    li.add_argument("--family", choices=["gamma", "cyclic", "s3", "skn", "skn-joint", "product"], default="gamma")
    li.add_argument("--gamma", default="S1")
    li.add_argument("--k", type=int, default=2)
    li.add_argument("--t", default="1")
    li.add_argument("--trunc-B", type=int, default=10)
    li.add_argument("--coord", type=int, default=1)
    li.add_argument("--support-max", type=int, default=30)
    _common(li, sampling=True)

    ch = sub.add_parser("chain", help="the lumped commuting-graph chain on partitions")
    ch.add_argument("action", choices=["matrix", "step", "run"])
    ch.add_argument("--n", type=int, default=5)
    ch.add_argument("--start", default=None, help='partition such as "1^3 2" (default 1^n)')
    ch.add_argument("--steps", type=int, default=1000)
    ch.add_argument("--trajectory", action="store_true")
    _common(ch, sampling=True)

    st = sub.add_parser("stats", help="descents, inversions, cycle counts and the normal approximation")
    st.add_argument("action", choices=["descents", "inversions", "cycles", "cyclic", "clt"])
    st.add_argument("--perm", default=None, help="one-line permutation, e.g. '3 1 2'")
    st.add_argument("--gamma", default="S3")
    st.add_argument("--k", type=int, default=3)
    st.add_argument("--n", type=int, default=2)
    st.add_argument("--k-max", type=int, default=30)
    st.add_argument("--ks-max", type=float, default=0.05)
    _common(st, sampling=True)

    ve = sub.add_parser("verify", help="oracles and coupling-bound experiments")
    ve.add_argument("action", choices=["census", "triangle", "tv", "skn", "product", "cyclic"])
    ve.add_argument("--gamma", default="S3")
    ve.add_argument("--k", type=int, default=100)
    ve.add_argument("--n", type=int, default=2)
    ve.add_argument("--trunc-B", type=int, default=None)
    ve.add_argument("--k-max", type=int, default=30)
    _common(ve, sampling=True)
    return ap


COMMANDS = {
    "cycle-index": cmd_cycle_index,
    "sample": cmd_sample,
    "limit": cmd_limit,
    "chain": cmd_chain,
    "stats": cmd_stats,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError:
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)
    saved_cap = os.environ.get("WREATHLAB_CAP")
    if getattr(args, "cap", None) is not None:
        os.environ["WREATHLAB_CAP"] = str(args.cap)
    try:
        return _run(args, out)
    finally:
        if saved_cap is None:
            os.environ.pop("WREATHLAB_CAP", None)
        else:
            os.environ["WREATHLAB_CAP"] = saved_cap


def _run(args, out) -> int:
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        sys.stderr.write("error: seed must be a 64-bit unsigned integer\n")
        return 1
    if getattr(args, "threads", 1) < 1:
        sys.stderr.write("error: --threads must be positive\n")
        return 1
    if args.command == "verify" and args.trunc_B is None:
        args.trunc_B = 4 if args.action in ("census",) else (0 if args.action == "triangle" else 2)
    try:
        text = COMMANDS[args.command](args)
    except CapExceeded as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (ValueError, KeyError, IndexError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    out.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
