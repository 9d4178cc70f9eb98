"""Writes fixtures/channels.json: 4x4 joint tables of noisy discrete channels.

Each channel draws a cause marginal P(c), a low-entropy noise E over 4 values
and a random map f(c, e); the effect is f(c, E). Half the tables are stored
transposed so the planted cause is the column variable.
"""

import json
import random
import sys
from pathlib import Path


def channel(rng, dominant):
    pc = [0.3 + rng.gammavariate(1.0, 1.0) for _ in range(4)]
    total = sum(pc)
    pc = [v / total for v in pc]
    pe0 = dominant + (1.0 - dominant) * 0.5 * rng.random()
    rest = [rng.gammavariate(2.0, 1.0) for _ in range(3)]
    pe = [pe0] + [(1.0 - pe0) * v / sum(rest) for v in rest]
    f = [[rng.randrange(4) for _ in range(4)] for _ in range(4)]
    joint = [[0.0] * 4 for _ in range(4)]
    for c in range(4):
        for e in range(4):
            joint[c][f[c][e]] += pc[c] * pe[e]
    return joint


def main(out):
    rng = random.Random(20240611)
    rows = []
    for k in range(24):
        dominant = (0.6, 0.75, 0.85, 0.95)[k % 4]
        joint = channel(rng, dominant)
        planted = "forward"
        if k % 2 == 1:
            joint = [list(r) for r in zip(*joint)]
            planted = "backward"
        rows.append({"name": f"ch{k:02d}", "noise_dominant": dominant, "planted": planted, "joint": joint})
    # uniform cause, effect equal to the cause except a 5% flip of one bin
    flip = [[0.25 if i == j else 0.0 for j in range(4)] for i in range(4)]
    flip[3][3], flip[3][0] = 0.25 * 0.95, 0.25 * 0.05
    rows.append({"name": "bin_flip", "noise_dominant": 0.95, "planted": "forward", "joint": flip})
    Path(out).write_text(json.dumps({"channels": rows}, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/channels.json")
