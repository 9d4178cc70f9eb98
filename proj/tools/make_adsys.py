#!/usr/bin/env python3
"""Writes the synthetic ad-serving stand-in under data/adsys/.

Hourly metrics of an exchange (adx_*) fed by bidders (dsp_*). A bidder
timeout burst over nine hours raises adx_fail and drags exposure_rate down.
"""

import csv
import json
import math
import random
from pathlib import Path

SEED = 4242
HOURS = 72
BURST = range(40, 49)

ADX = ["adx_fail", "adx_exp_filter", "success_adx", "adx_ecpm", "adx_other_filter", "imprecise_pcvr"]
DSP = ["dsp_timeout", "dsp_bid_rate", "dsp_ecpm", "other_filter"]


def simulate(rng):
    rows = []
    prev = {}
    for t in range(HOURS):
        day = math.sin(2 * math.pi * t / 24)
        n = lambda s=1.0: rng.gauss(0, s)
        m = {}
        m["dsp_timeout"] = 0.05 + 0.01 * day + n(0.004) + (0.12 if t in BURST else 0.0)
        m["dsp_bid_rate"] = 0.8 - 1.5 * m["dsp_timeout"] + n(0.01)
        m["dsp_ecpm"] = 2.0 + 0.3 * day + n(0.05)
        m["other_filter"] = 0.03 + n(0.003)
        m["adx_fail"] = 0.02 + 0.9 * m["dsp_timeout"] + 0.3 * prev.get("dsp_timeout", 0.05) + n(0.004)
        m["adx_ecpm"] = 0.8 * m["dsp_ecpm"] + n(0.05)
        m["adx_exp_filter"] = 0.1 + 0.02 * day + n(0.006)
        m["adx_other_filter"] = 0.5 * m["other_filter"] + n(0.002)
        m["imprecise_pcvr"] = 0.05 + n(0.004)
        m["success_adx"] = 0.9 - m["adx_fail"] - 0.5 * m["adx_other_filter"] + n(0.005)
        m["exposure_rate"] = (0.85 * m["success_adx"] - 0.4 * m["adx_exp_filter"] - 0.2 * m["imprecise_pcvr"]
                              + 0.02 * day + n(0.004))
        rows.append(m)
        prev = m
    return rows


def main():
    rng = random.Random(SEED)
    out = Path(__file__).resolve().parent.parent / "data" / "adsys"
    out.mkdir(parents=True, exist_ok=True)
    rows = simulate(rng)
    names = ["exposure_rate"] + ADX + DSP
    with open(out / "metrics.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["timestamp"] + names)
        for t, m in enumerate(rows):
            w.writerow([f"2023-03-{1 + t // 24:02d}T{t % 24:02d}:00:00"] + [f"{m[k]:.6f}" for k in names])

    levels = {k: 0 for k in DSP}
    levels.update({k: 1 for k in ADX + ["exposure_rate"]})
    edges = [
        ["dsp_timeout", "dsp_bid_rate"],
        ["dsp_timeout", "adx_fail"],
        ["dsp_ecpm", "adx_ecpm"],
        ["other_filter", "adx_other_filter"],
        ["adx_fail", "success_adx"],
        ["adx_other_filter", "success_adx"],
        ["success_adx", "exposure_rate"],
        ["adx_exp_filter", "exposure_rate"],
        ["imprecise_pcvr", "exposure_rate"],
    ]
    rules = {
        "adx_fail": "negative",
        "adx_exp_filter": "negative",
        "adx_other_filter": "negative",
        "imprecise_pcvr": "negative",
        "success_adx": "positive",
        "adx_ecpm": "positive",
        "dsp_timeout": "negative",
        "dsp_bid_rate": "positive",
        "dsp_ecpm": "positive",
        "other_filter": "negative",
    }
    with open(out / "dk.json", "w") as f:
        json.dump({"levels": levels, "edges": edges, "rules": rules}, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
