#!/usr/bin/env python3
"""Generate a directory of seeded texture rasters to feed `gen-dataset`.

Example:
    python scripts/make_textures.py --out data/sources --count 8 --size 832
"""

import argparse
from pathlib import Path

from sl3warp.raster import save_image
from sl3warp.synth import texture


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--size", type=int, default=832,
                        help="source side length; 832 keeps every middle-range "
                             "draw of a 256 crop inside the frame")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--exponent", type=float, default=1.8,
                        help="spectral falloff; higher is smoother")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        path = out / f"texture_{i:03d}.pgm"
        save_image(texture(args.size, seed=(args.seed, i), exponent=args.exponent), path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
