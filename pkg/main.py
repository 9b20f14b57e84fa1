#!/usr/bin/env python3
"""
DiffGeo - Main Entry Point
Eigenfunctions, diffusion distance and bound checks on weighted graphs

Usage:
  python main.py gen --family cycle_plus_boundary --param n=32 --param eps=0.1
  python main.py eig --graph g.tsv --absorbing 0,9
  python main.py dist --family path --param n=10 --target 0,9 --p 0.5
  python main.py dist --graph g.tsv --target absorbing --mc walkers=100000 seed=7
  python main.py check --theorem 2 --family small_world_ring --param n=128 --param n_boundary=8
  python main.py embed --family knn_point_cloud --param n_points=1000 --param k=10 --dims 2
  python main.py run fig1
"""

import sys
from pathlib import Path

# Add the diffgeo package to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from diffgeo.cli import DiffGeoCLI


def main() -> int:
    """Main entry point for DiffGeo"""
    # Show banner for direct invocation
    if len(sys.argv) <= 1:
        print("🚀 DiffGeo")
        print("Diffusion geometry of graph Laplacian eigenfunctions")
        print("=" * 45)
        print()
        print("Available commands:")
        print("  gen     - Generate a built-in graph family")
        print("  eig     - First nontrivial or absorbing eigenpair")
        print("  dist    - Diffusion distance to a target set (exact or Monte Carlo)")
        print("  check   - Check an eigenfunction bound vertex by vertex")
        print("  embed   - Spectral embedding and sign classification")
        print("  run     - Run an experiment preset")
        print()
        print("For detailed help: python main.py <command> --help")
        print("Quick start: python main.py run fig1")
        return 0

    cli = DiffGeoCLI()
    return cli.run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
