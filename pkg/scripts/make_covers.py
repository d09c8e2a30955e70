#!/usr/bin/env python3
"""Generate a corpus of synthetic photographic-style PNG covers."""

import argparse

from stegofuse.synthetic import write_cover_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory to write covers into")
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--min-pixels", type=int, default=50_000)
    parser.add_argument("--max-pixels", type=int, default=250_000)
    parser.add_argument("--grayscale", action="store_true")
    args = parser.parse_args()

    paths = write_cover_corpus(
        args.out_dir,
        count=args.count,
        seed=args.seed,
        min_pixels=args.min_pixels,
        max_pixels=args.max_pixels,
        channels=1 if args.grayscale else 3,
    )
    print(f"wrote {len(paths)} covers to {args.out_dir}")


if __name__ == "__main__":
    main()
