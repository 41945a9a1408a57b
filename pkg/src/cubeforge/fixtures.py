"""Published data shipped with the package (line-oriented text and CSV)."""
import csv
import io
from dataclasses import dataclass
from importlib import resources

from .anf import parse_poly
from .util import parse_isoc


def _text(name):
    return resources.files("cubeforge").joinpath("data", name).read_text()


def _rows(name):
    return list(csv.DictReader(io.StringIO(_text(name))))


def load_isocs():
    out = {}
    for line in _text("isocs.txt").splitlines():
        line = line.split("#")[0].strip()
        if line:
            name, idx = line.split(":")
            out[name.strip()] = parse_isoc(idx)
    return out


@dataclass
class FoundKey:
    isoc: str
    rounds: int
    hex: str

    @property
    def well_formed(self):
        # one published key has only 19 hex digits
        return len(self.hex) == 20


def load_found_keys():
    return [FoundKey(r["isoc"], int(r["rounds"]), r["key"]) for r in _rows("found_keys.csv")]


@dataclass
class FactorRow:
    rounds: int
    set: str
    no: int
    name: str
    h: object
    isocs: int
    pr00: float
    pr_f1: float
    raw: dict

    def line(self):
        r = self.raw
        return ",".join(r[k] for k in ("rounds", "set", "no", "name", "h", "isocs", "pr00", "pr_f1"))


def load_factor_tables(rounds=None):
    out = []
    for r in _rows("factor_tables.csv"):
        row = FactorRow(int(r["rounds"]), r["set"], int(r["no"]), r["name"], parse_poly(r["h"]),
                        int(r["isocs"]), float(r["pr00"]), float(r["pr_f1"]), r)
        if rounds is None or row.rounds == rounds:
            out.append(row)
    return out


def load_proportions(rounds=None):
    out = []
    for r in _rows("proportions.csv"):
        if rounds is None or int(r["rounds"]) == rounds:
            out.append((int(r["rounds"]), int(r["log2_cost"]), float(r["proportion"]), int(r["successes"])))
    return out


def load_zero_sum():
    return {(r["isoc"], int(r["rounds"])): r["zero_sum"] == "Y" for r in _rows("zero_sum.csv")}


def load_adjacent_gain():
    return {int(r["pairs"]): float(r["mean_gain"]) for r in _rows("adjacent_gain.csv")}


def load_vnm_timing():
    return {int(r["j_size"]): float(r["seconds"]) for r in _rows("vnm_timing.csv")}


def load_attack_params():
    return {int(r["rounds"]): {k: int(v) for k, v in r.items()} for r in _rows("attack_params.csv")}


def raw_text(name):
    return _text(name)
