#!/usr/bin/env python3
"""Convert a SimpleFood45-style annotation CSV into a foodvol manifest.

The download ships images, masks and per-image annotations; this script
expects one CSV row per image:

    id,image,mask,label,volume_ml,weight_g,energy_kcal,u0,v0,u1,v1,...,u11,v11

Corner columns are the 12 inner checkerboard corners in row-major order
starting at the top-right corner (matching the renderer's world grid).
Paths are kept relative to the output manifest.

Usage:
    python3 simplefood45_to_manifest.py annotations.csv \
        --out manifest.json --mesh-db meshdb --density density.csv \
        --intrinsics intrinsics.json
"""

import argparse
import csv
import json
import sys


def convert(rows, args):
    scenes = []
    for lineno, row in enumerate(rows, start=2):
        try:
            corners = [
                [float(row[f"u{i}"]), float(row[f"v{i}"])] for i in range(12)
            ]
            scenes.append(
                {
                    "id": row["id"],
                    "image": row["image"],
                    "mask": row["mask"],
                    "label": row["label"],
                    "corners": corners,
                    "volume_ml": float(row["volume_ml"]),
                    "weight_g": float(row["weight_g"]),
                    "energy_kcal": float(row["energy_kcal"]),
                }
            )
        except (KeyError, ValueError) as err:
            raise SystemExit(f"line {lineno}: bad or missing field: {err}")
    manifest = {
        "grid": {"cols": 4, "rows": 3, "spacing_cm": args.spacing},
        "mesh_db": args.mesh_db,
        "density": args.density,
        "intrinsics": args.intrinsics,
        "scenes": scenes,
    }
    if args.mesh_unit_scale != 1.0:
        manifest["mesh_unit_scale"] = args.mesh_unit_scale
    return manifest


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("annotations", help="annotation CSV, one row per image")
    parser.add_argument("--out", default="manifest.json")
    parser.add_argument("--mesh-db", default="meshdb")
    parser.add_argument("--density", default="density.csv")
    parser.add_argument("--intrinsics", default="intrinsics.json")
    parser.add_argument("--spacing", type=float, default=1.2,
                        help="checkerboard corner spacing, cm")
    parser.add_argument("--mesh-unit-scale", type=float, default=1.0,
                        help="vertex multiplier for the mesh database (0.1 for mm)")
    args = parser.parse_args()

    with open(args.annotations, newline="") as fh:
        manifest = convert(csv.DictReader(fh), args)
    with open(args.out, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(manifest['scenes'])} scenes to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
