"""
CLI Commands for DiffGeo
Graph generation, eigenpairs, diffusion distances, bound checks, embeddings
and experiment presets
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from ..core.analysis import sign_classifier, spectral_embedding
from ..core.diffusion import diffusion_distance, mc_diffusion_distance
from ..core.exceptions import ConvergenceError, InvalidInputError
from ..core.experiments import PRESETS, ExperimentConfig, ExperimentReport, run_experiment
from ..core.generators import GenSpec, GraphFamily, KnnPointCloudGenerator, generate
from ..core.graph import Graph, build_graph, graph_summary
from ..core.graph_io import read_edge_list, read_points, read_vertex_set, write_edge_list, write_vertex_set
from ..core.spectral import absorbing_dominant_eigenpair, first_nontrivial_eigenpair, potential_ground_state
from ..core.theorem_checks import BoundReport, check_corollary1, check_theorem1, check_theorem2
from ..reports.report_writer import write_experiment, write_json, write_table
from ..utils.config import config
from ..utils.helpers import format_duration, setup_logging

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INCONCLUSIVE = 4

logger = logging.getLogger(__name__)


def run_exit_code(report: ExperimentReport) -> int:
    """Non-convergence outranks bound violations, which outrank other failures"""
    categories = report.failure_categories()
    if 'convergence' in categories:
        return EXIT_NO_CONVERGENCE
    if 'violation' in categories:
        return EXIT_VIOLATION
    if categories:
        return EXIT_INVALID
    if report.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def parse_value(text: str) -> Any:
    """int, then float, then the raw string"""
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_pairs(items: Optional[List[str]]) -> Dict[str, Any]:
    """['n=10', 'eps=0.5'] -> {'n': 10, 'eps': 0.5}"""
    result = {}
    for item in items or []:
        for token in item.replace(',', ' ').split():
            if '=' not in token:
                raise InvalidInputError(f"Expected key=value, got '{token}'")
            key, value = token.split('=', 1)
            result[key.strip()] = parse_value(value.strip())
    return result


class DiffGeoCLI:
    """Main CLI interface for DiffGeo"""

    def __init__(self):
        self.config = config
        self.console = Console(stderr=True)

    def run(self, args: List[str]) -> int:
        """Main CLI entry point; returns the process exit code"""
        parser = self._create_parser()

        if not args:
            parser.print_help()
            return EXIT_OK

        parsed_args = parser.parse_args(args)
        self._apply_globals(parsed_args)

        if not hasattr(parsed_args, 'func'):
            parser.print_help()
            return EXIT_OK

        try:
            return parsed_args.func(parsed_args)
        except (InvalidInputError, ValidationError) as e:
            self.console.print(f"❌ Invalid input: {e}")
            return EXIT_INVALID
        except ConvergenceError as e:
            self.console.print(f"❌ Solver did not converge: {e}")
            return EXIT_NO_CONVERGENCE
        except (OSError, ValueError) as e:
            self.console.print(f"❌ Error: {e}")
            return EXIT_INVALID
        except KeyboardInterrupt:
            self.console.print("⏹️  Interrupted by user")
            return EXIT_INVALID

    def _apply_globals(self, args):
        if args.log_level:
            self.config.update_setting('log_level', args.log_level.upper())
        setup_logging(self.config)
        if args.seed is not None:
            self.config.update_setting('seed', args.seed)
        if args.threads is not None:
            self.config.update_setting('threads', args.threads)
        if args.out is not None:
            self.config.update_setting('out_dir', args.out)
        if args.format is not None:
            self.config.update_setting('output_format', args.format)

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create the main argument parser"""
        parser = argparse.ArgumentParser(
            prog='diffgeo',
            description="DiffGeo - eigenfunctions and diffusion distance on weighted graphs",
        )
        parser.add_argument('--seed', type=int, help='Seed for randomized families and Monte Carlo')
        parser.add_argument('--threads', type=int, help='Worker threads (results do not depend on it)')
        parser.add_argument('--out', help='Output directory')
        parser.add_argument('--format', choices=['json', 'csv'], help='Per-vertex table format')
        parser.add_argument('--log-level', choices=['debug', 'info', 'warning', 'error'], help='Log level')

        graph_args = argparse.ArgumentParser(add_help=False)
        source = graph_args.add_argument_group('graph input')
        source.add_argument('--graph', help='Edge list TSV (src<TAB>dst<TAB>weight)')
        source.add_argument('--absorbing', help='Absorbing vertices: file or comma separated ids')
        source.add_argument('--family', choices=[f.value for f in GraphFamily], help='Generate a built-in family')
        source.add_argument('--param', action='append', help='Family parameter key=value (repeatable)')
        source.add_argument('--points', help='Point cloud CSV x,y (knn_point_cloud only)')

        subparsers = parser.add_subparsers(dest='command', help='Available commands')

        # Gen command
        gen_parser = subparsers.add_parser('gen', parents=[graph_args], help='Generate a graph family')
        gen_parser.add_argument('--name', help='Output file stem (defaults to the family name)')
        gen_parser.set_defaults(func=self.cmd_gen)

        # Eig command
        eig_parser = subparsers.add_parser('eig', parents=[graph_args], help='Compute an eigenpair of L')
        eig_parser.add_argument('--mode', choices=['auto', 'nontrivial', 'absorbing'], default='auto')
        eig_parser.add_argument('--tol', type=float, help='Residual tolerance')
        eig_parser.add_argument('--max-iters', type=int, help='Iteration limit')
        eig_parser.set_defaults(func=self.cmd_eig)

        # Dist command
        dist_parser = subparsers.add_parser('dist', parents=[graph_args], help='Diffusion distance to a target set')
        dist_parser.add_argument('--target', default='absorbing', help="Target set: file, ids, or 'absorbing'")
        dist_parser.add_argument('--p', type=float, help='Hitting probability threshold')
        dist_parser.add_argument('--kmax', type=int, help='Step horizon')
        dist_parser.add_argument('--mc', nargs='*', metavar='KEY=VALUE',
                                 help='Monte Carlo estimate, e.g. --mc walkers=100000 seed=7')
        dist_parser.set_defaults(func=self.cmd_dist)

        # Check command
        check_parser = subparsers.add_parser('check', parents=[graph_args], help='Check an eigenfunction bound')
        check_parser.add_argument('--theorem', choices=['1', '2', 'c1'], required=True)
        check_parser.add_argument('--eps', default='auto', help="Sublevel threshold or 'auto'")
        check_parser.add_argument('--p', type=float, help='Hitting probability threshold')
        check_parser.add_argument('--kmax', type=int, help='Step horizon')
        check_parser.add_argument('--potential', help='One potential value per line (c1 only)')
        check_parser.set_defaults(func=self.cmd_check)

        # Embed command
        embed_parser = subparsers.add_parser('embed', parents=[graph_args], help='Spectral embedding and sign labels')
        embed_parser.add_argument('--dims', type=int, default=2)
        embed_parser.set_defaults(func=self.cmd_embed)

        # Run command
        run_parser = subparsers.add_parser('run', help='Run an experiment preset')
        run_parser.add_argument('preset', choices=sorted(PRESETS))
        run_parser.add_argument('--seeds', help='Comma separated seeds or a range a:b')
        run_parser.add_argument('--sizes', help='Comma separated sweep sizes')
        run_parser.add_argument('--param', action='append', help='Preset parameter key=value (repeatable)')
        run_parser.add_argument('--eps', default='auto')
        run_parser.add_argument('--p', type=float, default=0.5)
        run_parser.add_argument('--kmax', type=int)
        run_parser.add_argument('--walkers', type=int)
        run_parser.set_defaults(func=self.cmd_run)

        return parser

    # Graph input

    def _load_graph(self, args) -> Graph:
        absorbing = read_vertex_set(args.absorbing) if args.absorbing else frozenset()
        if args.graph:
            return read_edge_list(args.graph, absorbing)
        if not args.family:
            raise InvalidInputError("Provide --graph or --family")

        if args.points:
            if args.family != GraphFamily.KNN_POINT_CLOUD.value:
                raise InvalidInputError("--points only applies to knn_point_cloud")
            k = parse_pairs(args.param).get('k', 10)
            g = KnnPointCloudGenerator().from_points(read_points(args.points), k)
        else:
            family = GraphFamily(args.family)
            randomized = family in (GraphFamily.SMALL_WORLD_RING, GraphFamily.KNN_POINT_CLOUD)
            spec = GenSpec(family, parse_pairs(args.param), self.config.seed if randomized else None)
            g = generate(spec)

        if absorbing:
            g = build_graph(g.n, list(g.edges()), sorted(set(g.absorbing) | set(absorbing)))
        return g

    def _resolve_target(self, g: Graph, text: str):
        if text == 'absorbing':
            if not g.has_absorbing:
                raise InvalidInputError("Graph has no absorbing set; pass --target explicitly")
            return g.absorbing
        return read_vertex_set(text)

    def _out(self, name: str) -> Path:
        out_dir = Path(self.config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir / name

    def _summary_table(self, title: str, values: Dict[str, Any]) -> Table:
        table = Table(title=title)
        table.add_column('field')
        table.add_column('value', justify='right')
        for key, value in values.items():
            table.add_row(str(key), f"{value:.6g}" if isinstance(value, float) else str(value))
        return table

    # Commands

    def cmd_gen(self, args) -> int:
        """Generate a graph and write edge list plus absorbing set"""
        g = self._load_graph(args)
        stem = args.name or args.family or Path(args.graph).stem
        edges_path = write_edge_list(g, self._out(f"{stem}.tsv"))
        absorbing_path = write_vertex_set(g.absorbing, self._out(f"{stem}_absorbing.txt"))
        self.console.print(self._summary_table(f"🧩 {stem}", graph_summary(g)))
        self.console.print(f"✅ Wrote {edges_path} and {absorbing_path}")
        return EXIT_OK

    def cmd_eig(self, args) -> int:
        """Compute the first nontrivial or absorbing eigenpair"""
        g = self._load_graph(args)
        mode = args.mode
        if mode == 'auto':
            mode = 'absorbing' if g.has_absorbing else 'nontrivial'
        solver = absorbing_dominant_eigenpair if mode == 'absorbing' else first_nontrivial_eigenpair
        pair = solver(g, tol=args.tol, max_iters=args.max_iters)

        frame = pd.DataFrame({'vertex': np.arange(g.n), 'u': pair.u})
        path = write_table(frame, self._out('eigenvector'), self.config.output_format, pair.to_dict())
        self.console.print(self._summary_table(f"📈 {mode} eigenpair", pair.to_dict()))
        self.console.print(f"✅ Wrote {path}")
        return EXIT_OK

    def cmd_dist(self, args) -> int:
        """Exact or Monte Carlo diffusion distance"""
        g = self._load_graph(args)
        target = self._resolve_target(g, args.target)
        if args.mc is not None:
            options = parse_pairs(args.mc)
            field = mc_diffusion_distance(
                g, target, p=args.p, walkers=options.get('walkers'), kmax=args.kmax,
                seed=options.get('seed', self.config.seed), threads=self.config.threads
            )
        else:
            field = diffusion_distance(g, target, p=args.p, kmax=args.kmax)

        path = write_table(field.to_frame(), self._out('distance'), self.config.output_format, field.summary())
        self.console.print(self._summary_table("📏 diffusion distance", field.summary()))
        self.console.print(f"✅ Wrote {path}")
        if field.any_capped:
            self.console.print(f"⚠️  {int(field.capped.sum())} vertices capped at kmax={field.kmax}")
        return EXIT_OK

    def cmd_check(self, args) -> int:
        """Evaluate one of the bounds vertex by vertex"""
        g = self._load_graph(args)
        report: BoundReport
        if args.theorem == '1':
            pair = absorbing_dominant_eigenpair(g) if g.has_absorbing else first_nontrivial_eigenpair(g)
            eps = args.eps if args.eps == 'auto' else float(args.eps)
            report = check_theorem1(g, pair, eps=eps, kmax=args.kmax, p=args.p)
        elif args.theorem == '2':
            pair = absorbing_dominant_eigenpair(g)
            report = check_theorem2(g, pair, kmax=args.kmax, p=args.p)
        else:
            W = np.zeros(g.n)
            if args.potential:
                W = np.loadtxt(args.potential, dtype=np.float64, ndmin=1)
            state = potential_ground_state(g, W)
            report = check_corollary1(g, state.w_eff, state.u, kmax=args.kmax, p=args.p)

        summary = report.summary()
        write_json(summary, self._out(f"bound_{report.theorem.value}.json"))
        path = write_table(report.to_frame(), self._out(f"bound_{report.theorem.value}_rows"),
                           self.config.output_format)
        self.console.print(self._summary_table(
            f"🔎 {report.theorem.value}",
            {k: v for k, v in summary.items() if k != 'inputs'}
        ))
        self.console.print(f"✅ Wrote {path}")

        if report.violations:
            self.console.print(f"❌ {report.violations} rows violate the bound")
            return EXIT_VIOLATION
        if report.inconclusive:
            self.console.print(f"⚠️  {report.inconclusive} rows inconclusive (capped distances)")
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def cmd_embed(self, args) -> int:
        """Spectral embedding with sign labels of the first coordinate"""
        g = self._load_graph(args)
        embedding = spectral_embedding(g, args.dims)
        frame = pd.DataFrame({'vertex': np.arange(g.n)})
        for k in range(embedding.dims):
            frame[f'x{k + 1}'] = embedding.column(k)
        frame['label'] = sign_classifier(embedding.column(0))
        header = {'dims': embedding.dims, 'eigenvalues': embedding.eigenvalues}
        path = write_table(frame, self._out('embedding'), self.config.output_format, header)
        self.console.print(f"✅ Wrote {path} (eigenvalues {', '.join(f'{v:.6g}' for v in embedding.eigenvalues)})")
        return EXIT_OK

    def cmd_run(self, args) -> int:
        """Run an experiment preset and write its report"""
        cfg = ExperimentConfig(
            preset=args.preset,
            seeds=self._parse_seeds(args.seeds),
            sizes=[float(s) for s in args.sizes.split(',')] if args.sizes else None,
            params=parse_pairs(args.param),
            p=args.p,
            eps=args.eps if args.eps == 'auto' else float(args.eps),
            kmax=args.kmax,
            walkers=args.walkers,
            threads=self.config.threads,
        )
        self.console.print(f"🚀 Running {cfg.preset}...")
        report, frames = run_experiment(cfg)
        document = report.to_document()
        path = write_experiment(document, frames, self.config.out_dir)

        elapsed = format_duration(report.runtime.get('elapsed_seconds', 0.0))
        self.console.print(f"✅ {cfg.preset}: status {report.status} in {elapsed}; report at {path}")
        for failure in report.failures:
            self.console.print(f"   ❌ {failure['where']}: {failure['error']}: {failure['message']}")

        return run_exit_code(report)

    def _parse_seeds(self, text: Optional[str]) -> List[int]:
        if not text:
            return [self.config.seed]
        if ':' in text:
            start, stop = text.split(':', 1)
            return list(range(int(start), int(stop)))
        return [int(s) for s in text.split(',') if s.strip()]
