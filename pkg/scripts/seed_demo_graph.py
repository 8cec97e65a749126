#!/usr/bin/env python3
"""Write the demo graph (education campus + poem corner) to a kgcf/1 file.

Usage: python3 scripts/seed_demo_graph.py [demo.kgcf]
"""

import sys

from kgcf.seed import seed_demo


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "demo.kgcf"
    store = seed_demo()
    store.save(path)
    print(f"wrote {len(store.entities)} entities, {len(store.triples)} triples to {path}")


if __name__ == "__main__":
    main()
