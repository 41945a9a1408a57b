"""Reduced-round correlation cube attack from search to simulation.

Small cubes are searched per template J, their superpolys recovered by
variable substitution, and the nonzero ones fed to preprocessing.
"""
import logging
from dataclasses import dataclass, field

from .attack import preprocess, default_family, DEFAULT_P, DEFAULT_SAMPLES
from .search import SearchSpace, search, trivium_estimator, CountingEstimator
from .varsub import recover_superpoly, default_rm

log = logging.getLogger(__name__)


def pair_templates(lo=3, hi=75, step=3):
    # {0,1,2,i,i+1}, the shape used against 820 rounds
    return tuple((0, 1, 2, i, i + 1) for i in range(lo, hi, step))


@dataclass
class ReducedAttackConfig:
    rounds: int = 590
    size: int = 8
    threshold: int = 9
    attempts: int = 3
    templates: tuple = field(default_factory=pair_templates)
    per_template: int = 10
    r_m: int = None
    p: float = DEFAULT_P
    samples: int = DEFAULT_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if not 590 <= self.rounds <= 672:
            log.warning("rounds=%d is outside the range the defaults were tuned for", self.rounds)
        if self.r_m is None:
            self.r_m = default_rm(self.rounds)


def find_cubes(cfg):
    """Good ISoCs over all templates, deduplicated, in discovery order."""
    seen, calls = {}, 0
    for t, J in enumerate(cfg.templates):
        est = CountingEstimator(trivium_estimator(cfg.rounds, J, 3))
        g = search(SearchSpace(cfg.size, J), cfg.threshold, cfg.attempts, est,
                   seed=cfg.seed + t, limit=cfg.per_template)
        calls += g.calls
        for I, e in g.isocs:
            seen.setdefault(I, e)
    return list(seen.items()), calls


def build_corpus(isocs, R, r_m):
    """{isoc: superpoly in k} for the nonzero superpolys."""
    out = {}
    for I in isocs:
        f = recover_superpoly(I, R, r_m).in_key()
        if f:
            out[I] = f
    return out


def run_reduced(cfg, family=None):
    cubes, calls = find_cubes(cfg)
    corpus = build_corpus([I for I, _ in cubes], cfg.rounds, cfg.r_m)
    log.info("%d good ISoCs (%d estimator calls), %d nonzero superpolys", len(cubes), calls, len(corpus))
    fam = default_family() if family is None else family
    table = preprocess(corpus, fam, cfg.p, cfg.samples, cfg.seed, cfg.rounds)
    return table, corpus, cubes
