"""Full-size cube sums with resumable checkpoints (extended runs only)."""
import json
import os

from .trivium import MAX_LANE_BITS, _bits80, _check_isoc, _lanes_pass

# one checkpoint write per 2^30 cipher evaluations
CHECKPOINT_EVALS = 1 << 30


def extended_verify_zero_sum(isoc, R, key, checkpoint=None, every=CHECKPOINT_EVALS):
    """Cube sum of z_R over a cube of any size, one 2^20-lane pass at a time.
    Progress is saved to `checkpoint` (json) and picked up again on restart."""
    isoc = _check_isoc(isoc)
    key = _bits80(key, "key")
    inner, outer = isoc[:MAX_LANE_BITS], isoc[MAX_LANE_BITS:]
    per_pass = 1 << len(inner)
    tag = {"isoc": list(isoc), "rounds": R, "key": "".join(map(str, key))}
    start, acc = 0, 0
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            st = json.load(fh)
        if st.get("tag") == tag:
            start, acc = st["next"], st["acc"]
    stride = max(1, every // per_pass)
    for hi in range(start, 1 << len(outer)):
        iv = [0] * 80
        for b, i in enumerate(outer):
            iv[i] = (hi >> b) & 1
        acc ^= _lanes_pass([key], inner, iv, R)[0]
        if checkpoint and (hi + 1) % stride == 0:
            _save(checkpoint, tag, hi + 1, acc)
    if checkpoint:
        _save(checkpoint, tag, 1 << len(outer), acc)
    return acc


def _save(path, tag, nxt, acc):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"tag": tag, "next": nxt, "acc": acc}, fh)
    os.replace(tmp, path)
