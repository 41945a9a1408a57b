import os
from concurrent.futures import ProcessPoolExecutor


def threads_from_env(default=1):
    v = os.environ.get("CUBEFORGE_THREADS")
    return max(1, int(v)) if v else default


def parallel_map(fn, items, threads=None):
    """Order-preserving map; a process pool when more than one worker."""
    items = list(items)
    n = threads_from_env() if threads is None else threads
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def parse_isoc(text):
    """'1,2,5' or '1 2 5' -> sorted index tuple."""
    toks = text.replace(",", " ").split()
    out = tuple(sorted(int(t) for t in toks))
    if len(set(out)) != len(out):
        raise ValueError("repeated index in ISoC %r" % text)
    if out and (out[0] < 0 or out[-1] >= 80):
        raise ValueError("ISoC indices must lie in [0, 80)")
    return out


def format_isoc(isoc):
    return ",".join(str(i) for i in sorted(isoc))


def read_isocs(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#")[0].strip()
            if line:
                # optional trailing ' <estimate>' column
                out.append(parse_isoc(line.split(";")[0].split("\t")[0]))
    return out
