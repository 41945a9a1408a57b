"""Command line front end.  Every job writes its results plus a manifest
(inputs, seed, versions, wall time) next to them."""
import argparse
import glob
import json
import os
import platform
import random
import sys
import time

from . import __version__
from .anf import format_poly, parse_poly
from .util import parse_isoc, format_isoc, read_isocs, threads_from_env


# -- helpers -----------------------------------------------------------------

def _isoc_arg(s):
    """A fixture name (I1..I3), a file with one ISoC, or an inline list."""
    from .fixtures import load_isocs
    named = load_isocs()
    if s in named:
        return named[s]
    if os.path.exists(s):
        got = read_isocs(s)
        if len(got) != 1:
            raise argparse.ArgumentTypeError("%s: expected exactly one ISoC, found %d" % (s, len(got)))
        return got[0]
    try:
        return parse_isoc(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _rounds_arg(s):
    """'590' or '590-600' or '590,600'."""
    out = []
    for part in s.split(","):
        if "-" in part:
            a, b = part.split("-")
            out += list(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _bits_arg(s):
    from .trivium import bits_from_hex
    try:
        return bits_from_hex(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def write_manifest(path, args, started, extra=None):
    m = {
        "command": args.cmd_path,
        "args": {k: (v if isinstance(v, (int, float, str, bool, type(None))) else str(v))
                 for k, v in sorted(vars(args).items()) if k not in ("func", "cmd_path")},
        "seed": getattr(args, "seed", None),
        "versions": {"cubeforge": __version__, "python": platform.python_version(),
                     "numpy": _ver("numpy"), "scipy": _ver("scipy")},
        "threads": threads_from_env(),
        "wall_seconds": round(time.time() - started, 3),
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if extra:
        m.update(extra)
    with open(path, "w") as fh:
        json.dump(m, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ver(mod):
    try:
        return __import__(mod).__version__
    except ImportError:
        return None


def _manifest_path(out):
    if out is None:
        return None
    if os.path.isdir(out):
        return os.path.join(out, "manifest.json")
    return out + ".manifest.json"


def _emit(lines, out):
    text = "".join(l + "\n" for l in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        d = os.path.dirname(out)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text)


# -- trivium -----------------------------------------------------------------

def cmd_keystream(args):
    from .trivium import keystream_fast, bytes_from_bits
    z = keystream_fast(args.key, args.iv, args.bits, args.rounds)
    if args.format == "bits":
        print("".join(map(str, z)))
    else:
        print(bytes_from_bits(z).hex().upper())
    return 0


# -- degree ------------------------------------------------------------------

def cmd_degree(args):
    from .degree import min_curve, degree_curve, max_zero_sum_round, J_CAP
    if args.j_cap > J_CAP:
        raise SystemExit("--j-cap above %d is not supported" % J_CAP)
    I = args.isoc
    if args.j_cap == 0:
        curve = degree_curve(I, (), args.rounds, args.mode)
    else:
        curve = min_curve(I, args.rounds, args.j_cap, args.repeats, seed=args.seed, mode=args.mode)
    lines = ["# seed=%d j_cap=%d repeats=%d mode=%d" % (args.seed, args.j_cap, args.repeats, args.mode),
             "round,bound"]
    lines += ["%d,%s" % (r, b) for r, b in enumerate(curve)]
    lines.append("# max_zero_sum_round=%d" % max_zero_sum_round(curve, len(I)))
    _emit(lines, args.out)
    return 0


# -- isoc search -------------------------------------------------------------

def cmd_search(args):
    from .search import SearchSpace, search, trivium_estimator
    pos = tuple(args.positions) if args.positions else tuple(range(80))
    space = SearchSpace(args.size, tuple(args.j), pos)
    est = trivium_estimator(args.rounds, space.J, args.mode)
    res = search(space, args.threshold, args.attempts, est, seed=args.seed)
    lines = ["# seed=%d calls=%d witnesses=%d" % (args.seed, res.calls, len(res.witnesses))]
    lines += ["%s\t%d" % (format_isoc(I), e) for I, e in res.isocs]
    _emit(lines, args.out)
    return 0


# -- superpolys --------------------------------------------------------------

def cmd_recover(args):
    from .varsub import recover_superpoly
    res = recover_superpoly(args.isoc, args.rounds, args.rm)
    _emit([format_poly(res.poly)], args.out)
    if args.out:
        _emit(res.zmap.lines(), args.out + ".zmap")
        _emit([format_isoc(args.isoc)], args.out + ".isoc")
        if args.expand:
            _emit([format_poly(res.in_key())], args.out + ".key")
    return 0


def cmd_recover_direct(args):
    from .trails import superpoly_direct
    p = superpoly_direct(args.isoc, args.rounds)
    _emit([format_poly(p)], args.out)
    return 0


def read_zmap(path):
    from .varsub import SubstitutionMap
    polys = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            lhs, rhs = line.split("=", 1)
            if int(lhs.strip()[1:]) != len(polys):
                raise ValueError("%s: z indices must be consecutive" % path)
            polys.append(parse_poly(rhs))
    return SubstitutionMap(polys)


def read_corpus(d):
    """NAME.isoc + NAME (z or k space) [+ NAME.zmap] -> {isoc: k-poly}."""
    from .varsub import expand_z
    out = {}
    for ip in sorted(glob.glob(os.path.join(d, "*.isoc"))):
        base = ip[:-5]
        I = read_isocs(ip)[0]
        if os.path.exists(base + ".key"):
            p = parse_poly(open(base + ".key").read())
        else:
            p = parse_poly(open(base).read())
            if os.path.exists(base + ".zmap"):
                p = expand_z(p, read_zmap(base + ".zmap"))
        out[I] = p
    return out


# -- attack ------------------------------------------------------------------

def read_family(path):
    from .attack import make_factor
    fam = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#")[0].strip()
            if not line:
                continue
            if "=" in line:
                name, poly = line.split("=", 1)
                fam.append(make_factor(parse_poly(poly), name.strip()))
            else:
                fam.append(make_factor(parse_poly(line)))
    return fam


def write_tables(table, d):
    os.makedirs(d, exist_ok=True)
    for which, rows in (("T", table.T), ("T1", table.T1)):
        lines = ["name,h,pivot,pr00,pr_f1,samples,isocs"]
        for e in rows:
            lines.append("%s,%s,%d,%.4f,%.4f,%d,%s" % (
                e.factor.name, format_poly(e.factor.poly), e.factor.pivot, e.pr00, e.pr_f1,
                e.samples, ";".join(" ".join(map(str, I)) for I in e.isocs)))
        _emit(lines, os.path.join(d, which + ".csv"))
    _emit(["p=%s" % table.p, "seed=%d" % table.seed, "rounds=%d" % table.rounds], os.path.join(d, "params.txt"))


def read_tables(d):
    import csv
    from .attack import FactorTable, FactorEntry, Factor
    params = dict(l.strip().split("=") for l in open(os.path.join(d, "params.txt")) if "=" in l)
    t = FactorTable(p=float(params["p"]), seed=int(params["seed"]), rounds=int(params["rounds"]))
    for which in ("T", "T1"):
        with open(os.path.join(d, which + ".csv")) as fh:
            for r in csv.DictReader(fh):
                isocs = [tuple(int(x) for x in s.split()) for s in r["isocs"].split(";") if s]
                e = FactorEntry(Factor(r["name"], parse_poly(r["h"]), int(r["pivot"])), isocs,
                                float(r["pr00"]), float(r["pr_f1"]), int(r["samples"]))
                getattr(t, which).append(e)
    return t


def cmd_preprocess(args):
    from .attack import preprocess, default_family
    corpus = read_corpus(args.corpus)
    if not corpus:
        raise SystemExit("no *.isoc files in %s" % args.corpus)
    fam = read_family(args.family) if args.family else default_family()
    table = preprocess(corpus, fam, args.p, args.samples, args.seed, args.rounds)
    write_tables(table, args.out)
    return 0


def cmd_simulate(args):
    from .attack import simulate_keys, random_keys, proportions
    table = read_tables(args.tables)
    R = args.rounds if args.rounds is not None else table.rounds
    rng = random.Random(args.seed)
    keys = random_keys(args.trials, rng)
    res = simulate_keys(keys, table, R, args.cube_count, args.cube_size)
    lines = ["trial,a_k,b_k,e_k,log2_C"]
    lines += ["%d,%d,%d,%d,%.3f" % (i, r.a, r.b, r.e, r.log2_cost) for i, r in enumerate(res)]
    _emit(lines, args.out)
    thr = args.thresholds or sorted({int(r.log2_cost + 0.999) for r in res})
    props = proportions(res, thr)
    plines = ["log2_C,proportion"] + ["%d,%.4f" % (c, props[c]) for c in thr]
    _emit(plines, (args.out + ".proportions.csv") if args.out else None)
    return 0


# -- zero sums ---------------------------------------------------------------

EXTENDED_MIN = 24


def cmd_verify(args):
    from .trivium import cube_sums
    I = args.isoc
    if len(I) > EXTENDED_MIN and not args.extended:
        raise SystemExit("cube of size %d needs --extended (2^%d evaluations per key)" % (len(I), len(I)))
    rng = random.Random(args.seed)
    keys = [_bits_arg(k) for k in args.key] if args.key else \
        [[rng.getrandbits(1) for _ in range(80)] for _ in range(args.keys)]
    lines = ["# seed=%d keys=%d" % (args.seed, len(keys)), "round,result,nonzero_keys"]
    for R in args.rounds:
        if args.extended:
            from .longrun import extended_verify_zero_sum
            vals = [extended_verify_zero_sum(I, R, k, args.checkpoint) for k in keys]
        else:
            vals = cube_sums(keys, I, R)
        nz = sum(vals)
        lines.append("%d,%s,%d" % (R, "PASS" if nz == 0 else "FAIL", nz))
    _emit(lines, args.out)
    return 0


# -- reports -----------------------------------------------------------------

def render_table(which):
    from . import fixtures as fx
    w = which.lower()
    alias = {"4": "t820", "5": "t1-820", "2": "zero-sum", "3": "adjacent", "6": "p820", "7": "p825",
             "8": "p830", "10": "hypothesis", "j": "timing"}
    w = alias.get(w, w)
    if w.startswith("t"):
        st = "T1" if w.startswith("t1") else "T"
        R = int(w.split("-")[-1] if "-" in w else w[1:])
        return ["%d & %s = %s & %d & %s & %s & %d" % (r.no, r.name, r.raw["h"], r.isocs, r.raw["pr00"],
                                                        r.raw["pr_f1"], r.rounds)
                for r in fx.load_factor_tables(R) if r.set == st]
    if w.startswith("p"):
        rows = fx.load_proportions(int(w[1:]))
        return ["C & " + " & ".join("2^%d" % c for _, c, _, _ in rows),
                "proportion & " + " & ".join("%.1f%%" % (100 * p) for _, _, p, _ in rows)]
    if w == "hypothesis":
        return ["%d & 2^%d & %d" % (R, c, n) for R, c, _, n in fx.load_proportions()]
    if w == "zero-sum":
        z = fx.load_zero_sum()
        rounds = sorted({r for _, r in z})
        out = ["rounds & " + " & ".join(map(str, rounds))]
        for name in ("I1", "I2", "I3"):
            out.append(name + " & " + " & ".join("Y" if z[(name, r)] else "N" for r in rounds))
        return out
    if w == "adjacent":
        g = fx.load_adjacent_gain()
        return ["l & " + " & ".join(map(str, g)), "gain & " + " & ".join("%.1f" % v for v in g.values())]
    if w == "timing":
        t = fx.load_vnm_timing()
        return ["|J| & " + " & ".join(map(str, t)), "seconds & " + " & ".join("%.2f" % v for v in t.values())]
    raise SystemExit("unknown table %r" % which)


def cmd_report(args):
    for w in args.which:
        _emit(["## " + w] + render_table(w), None)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="cubeforge", description="Cube attack toolkit for Trivium")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd")

    t = sub.add_parser("trivium").add_subparsers(dest="sub")
    ks = t.add_parser("keystream")
    ks.add_argument("--key", type=_bits_arg, required=True)
    ks.add_argument("--iv", type=_bits_arg, required=True)
    ks.add_argument("--rounds", type=int, default=1152)
    ks.add_argument("--bits", type=int, default=64)
    ks.add_argument("--format", choices=("hex", "bits"), default="hex")
    ks.set_defaults(func=cmd_keystream)

    d = sub.add_parser("degree").add_subparsers(dest="sub")
    de = d.add_parser("estimate")
    de.add_argument("--rounds", type=int, required=True)
    de.add_argument("--isoc", type=_isoc_arg, required=True)
    de.add_argument("--j-cap", type=int, default=8)
    de.add_argument("--mode", type=int, choices=(1, 2, 3), default=1)
    de.add_argument("--repeats", type=int, default=1)
    de.add_argument("--seed", type=int, default=0)
    de.add_argument("--out")
    de.set_defaults(func=cmd_degree)

    s = sub.add_parser("isoc").add_subparsers(dest="sub")
    se = s.add_parser("search")
    se.add_argument("--j", type=parse_isoc, required=True)
    se.add_argument("--size", type=int, required=True)
    se.add_argument("--threshold", type=int, required=True)
    se.add_argument("--rounds", type=int, required=True)
    se.add_argument("--attempts", type=int, default=3)
    se.add_argument("--mode", type=int, choices=(1, 3), default=3)
    se.add_argument("--positions", type=parse_isoc, help="toy mode: allowed IV positions")
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--out")
    se.set_defaults(func=cmd_search)

    sp = sub.add_parser("superpoly").add_subparsers(dest="sub")
    rc = sp.add_parser("recover")
    rc.add_argument("--rounds", type=int, required=True)
    rc.add_argument("--rm", type=int, default=200)
    rc.add_argument("--isoc", type=_isoc_arg, required=True)
    rc.add_argument("--out")
    rc.add_argument("--expand", action="store_true", help="also write the key-space polynomial")
    rc.set_defaults(func=cmd_recover)
    rd = sp.add_parser("recover-direct")
    rd.add_argument("--rounds", type=int, required=True)
    rd.add_argument("--isoc", type=_isoc_arg, required=True)
    rd.add_argument("--out")
    rd.set_defaults(func=cmd_recover_direct)

    a = sub.add_parser("attack").add_subparsers(dest="sub")
    pp = a.add_parser("preprocess")
    pp.add_argument("--corpus", required=True)
    pp.add_argument("--family")
    pp.add_argument("--p", type=float, default=0.77)
    pp.add_argument("--samples", type=int, default=10000)
    pp.add_argument("--rounds", type=int, default=0)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_preprocess)
    sm = a.add_parser("simulate")
    sm.add_argument("--tables", required=True)
    sm.add_argument("--rounds", type=int)
    sm.add_argument("--trials", type=int, default=200)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--cube-count", type=int)
    sm.add_argument("--cube-size", type=int)
    sm.add_argument("--thresholds", type=lambda s: [int(x) for x in s.split(",")])
    sm.add_argument("--out")
    sm.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify-zero-sum")
    v.add_argument("--isoc", type=_isoc_arg, required=True)
    v.add_argument("--rounds", type=_rounds_arg, required=True)
    v.add_argument("--keys", type=int, default=16)
    v.add_argument("--key", action="append", help="explicit key (hex); repeatable")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--extended", action="store_true", help="allow full-size cubes (hours to days)")
    v.add_argument("--checkpoint")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report").add_subparsers(dest="sub")
    rt = r.add_parser("tables")
    rt.add_argument("which", nargs="+")
    rt.set_defaults(func=cmd_report)
    return p


def run(argv=None):
    p = build_parser()
    args = p.parse_args(argv)
    if not hasattr(args, "func"):
        p.print_usage(sys.stderr)
        return 2
    args.cmd_path = " ".join(x for x in (args.cmd, getattr(args, "sub", None)) if x)
    started = time.time()
    rc = args.func(args)
    mp = _manifest_path(getattr(args, "out", None))
    if mp:
        write_manifest(mp, args, started)
    return rc


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
