#!/usr/bin/env python3
"""Optional reproduction check against the original 2014 source datasets.

The bundled fixtures are synthetic, so the published selected-share figures
cannot be reproduced from this repository alone. If you have assembled the
original block-group attribute extracts and police incident files, this script
runs the pipeline on your config and checks each city's trivariate selected
share (percent of eligible block groups selected) against an expected value.

Usage:
    scripts/check_reproduction.py --atlas build/atlas --config my_config.json \
        --expect detroit=18 --expect chicago=3.3 --expect cleveland=2.9 \
        --expect milwaukee=0.3 --expect minneapolis=10.9 [--tolerance 0.5]

Exit status is 0 when every expected share matches within the tolerance
(percentage points). This is a documentation aid, not part of the CI gate.
"""

import argparse
import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path


def parse_expect(pairs):
    out = {}
    for pair in pairs:
        try:
            city, value = pair.split("=", 1)
            out[city] = float(value)
        except ValueError:
            sys.exit(f"bad --expect value {pair!r}; use city=share")
    return out


def selected_share(selection_csv):
    selected = eligible = 0
    with open(selection_csv, newline="") as f:
        for row in csv.DictReader(f):
            eligible += 1
            if row["selected_trivariate"] == "1":
                selected += 1
    if eligible == 0:
        sys.exit(f"{selection_csv}: no eligible block groups")
    return 100.0 * selected / eligible


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--atlas", required=True, help="path to the atlas binary")
    ap.add_argument("--config", required=True, help="pipeline config JSON")
    ap.add_argument("--expect", action="append", default=[], metavar="CITY=SHARE",
                    help="expected selected share in percent (repeatable)")
    ap.add_argument("--tolerance", type=float, default=0.5,
                    help="allowed deviation in percentage points (default 0.5)")
    args = ap.parse_args()

    expectations = parse_expect(args.expect)
    if not expectations:
        sys.exit("no --expect values given; nothing to check")

    with open(args.config) as f:
        cfg = json.load(f)
    known = {c["name"] for c in cfg.get("cities", [])}
    for city in expectations:
        if city not in known:
            sys.exit(f"city {city!r} not present in {args.config}")

    with tempfile.TemporaryDirectory(prefix="atlas_repro_") as tmp:
        cfg["output_dir"] = tmp
        patched = Path(tmp) / "config.json"
        patched.write_text(json.dumps(cfg))
        proc = subprocess.run([args.atlas, "run", "--config", str(patched)])
        if proc.returncode != 0:
            sys.exit(f"atlas run failed with status {proc.returncode}")

        failures = 0
        for city, expected in sorted(expectations.items()):
            share = selected_share(Path(tmp) / city / "selection.csv")
            ok = abs(share - expected) <= args.tolerance
            status = "PASS" if ok else "FAIL"
            print(f"{status} {city}: selected share {share:.3f}% "
                  f"(expected {expected:.3f} +/- {args.tolerance})")
            failures += 0 if ok else 1

    if failures:
        print(f"{failures} city(ies) outside tolerance")
        return 1
    print("all expected shares reproduced")
    return 0


if __name__ == "__main__":
    sys.exit(main())
