"""Command line: ``schwarz1d run --mode {evolve|iterations|spectrum|table} --config FILE``.

Exit status: 0 success, 2 configuration error, 3 solver failure (an
iteration did not converge), 4 numerical failure (singular matrix,
non-finite values).
"""

from __future__ import annotations

import argparse
import csv
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import MODES, TABLE_KINDS, ConfigError, RunConfig, load, parse_pairs, split_assignment
from .exceptions import ConvergenceError
from .experiments import ALL_LINEAR, FIXED, FIXED_PC, iteration_sweep, table_experiment, write_counts, write_rows
from .interface import build_d
from .mesh import decompose
from .potentials import catalog
from .spectral import spectrum_study
from .timeloop import Evolution

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_NUMERICAL = 0, 2, 3, 4

log = logging.getLogger("schwarz1d")


class NumericalFailure(ArithmeticError):
    pass


def _check_finite(what, a):
    if not np.all(np.isfinite(a)):
        raise NumericalFailure(f"non-finite values in {what}")


def write_field(path, x, u) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im", "abs"])
        for xi, ui in zip(x, u):
            w.writerow([f"{xi:.17g}", f"{ui.real:.17g}", f"{ui.imag:.17g}", f"{abs(ui):.17g}"])


def write_complex_entries(path, a) -> None:
    """Dense complex array as ``row, col, re, im`` lines (vectors use col 0); zeros skipped."""
    a = np.atleast_1d(np.asarray(a))
    m = a.reshape(a.shape[0], -1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for i, j in zip(*np.nonzero(m)):
            z = m[i, j]
            w.writerow([i, j, f"{z.real:.17g}", f"{z.imag:.17g}"])


def write_manifest(out: Path, cfg: RunConfig, files) -> None:
    import numba
    import scipy

    lines = [
        f"schwarz1d {__version__}",
        f"python {platform.python_version()}",
        f"numpy {np.__version__}",
        f"scipy {scipy.__version__}",
        f"numba {numba.__version__}",
        f"seed {cfg.seed}",
        "",
        "[config]",
        cfg.as_text().rstrip(),
        "",
        "[outputs]",
        *sorted(Path(f).name for f in files),
    ]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def run_evolve(cfg: RunConfig, out: Path) -> list:
    dom = cfg.domain()
    decomp = decompose(dom, cfg.n_sub)
    files = []
    n_steps = dom.n_steps if cfg.n_steps is None else cfg.n_steps
    with Evolution(
        decomp,
        catalog(cfg.potential),
        cfg.p,
        cfg.algorithm,
        cfg.solver(),
        tol=cfg.tol,
        nonlinear_tol=cfg.nonlinear_tol,
        guess=cfg.guess,
        seed=cfg.seed,
        warm_start=cfg.warm_start,
        workers=cfg.workers,
        max_k=cfg.max_k,
    ) as ev:
        x = decomp.global_nodes()

        def snapshot():
            u = ev.global_solution()
            _check_finite(f"u at step {ev.state.n}", u)
            path = out / f"snapshot_{ev.state.n:06d}.csv"
            write_field(path, x, u)
            files.append(path)

        snapshot()
        m0 = ev.mass()
        masses = [(0, 0.0, m0)]
        for _ in range(n_steps):
            ev.step()
            masses.append((ev.state.n, ev.state.n * dom.dt, ev.mass()))
            if ev.state.n % cfg.stride == 0 or ev.state.n == n_steps:
                snapshot()
        path = out / "mass.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "t", "mass", "rel_drift"])
            for n, t, m in masses:
                w.writerow([n, f"{t:.17g}", f"{m:.17g}", f"{(m - m0) / m0:.6e}"])
        files.append(path)
        path = out / "iterations.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "k_used"])
            w.writerows(enumerate(ev.state.iteration_log, 1))
        files.append(path)
        if cfg.dump_interface and decomp.n_sub > 1:
            names = [("g", ev.state.g_prev)]
            if ev.L is not None:
                names += [("L", ev.L), ("d", build_d(ev.cluster))]
            for name, arr in names:
                path = out / f"{name}.csv"
                write_complex_entries(path, arr)
                files.append(path)
        log.info("evolve: %d steps, final mass drift %.3e", n_steps, (masses[-1][2] - m0) / m0)
    return files


def run_iterations(cfg: RunConfig, out: Path) -> list:
    spec = catalog(cfg.potential)
    rows = ALL_LINEAR if spec.is_linear else (FIXED, FIXED_PC)
    cells = iteration_sweep(cfg.domain(), cfg.n_sub, spec, cfg.p_values, rows, cfg.seed, cfg.tol, cfg.max_k, cfg.workers)
    files = [out / "iterations.csv", out / "iterations_cells.csv", out / "iterations_timings.csv"]
    write_counts(files[0], cells, [r.label for r in rows], cfg.p_values)
    write_rows(files[1], cells)
    write_rows(files[2], cells, timings=True)
    return files


def run_spectrum(cfg: RunConfig, out: Path) -> list:
    files = []
    for tag in ("plain", "preconditioned"):
        report = spectrum_study(cfg.domain(), cfg.n_sub, cfg.potential, cfg.p, tag, cfg.workers)
        _check_finite(f"{tag} spectrum", report.eigenvalues)
        path = out / f"spectrum_{tag}.csv"
        report.write_csv(path)
        files.append(path)
        log.info("spectrum %s: max |lambda - 1| = %.3e", tag, report.distance_from_one())
    return files


def run_table(cfg: RunConfig, out: Path) -> list:
    result = table_experiment(cfg.table, cfg.scale, cfg.seed, cfg.tol, "n_sub" if cfg.workers > 1 else 1, cfg.max_k)
    return result.write(out)


RUNNERS = {"evolve": run_evolve, "iterations": run_iterations, "spectrum": run_spectrum, "table": run_table}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schwarz1d", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--config", type=Path, help="flat key = value file")
    run.add_argument("--scale", choices=("coarse", "paper"))
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--table", choices=TABLE_KINDS)
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (repeatable)")
    run.add_argument("-v", "--verbose", action="store_true")
    return ap


def resolve_config(args) -> RunConfig:
    cfg = load(args.config, args.set) if args.config else parse_pairs([split_assignment(o, "--set: ") for o in args.set])
    for key in ("mode", "scale", "seed", "table"):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, key, v)
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = RUNNERS[cfg.mode](cfg, out)
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # invalid combinations only detectable once the mesh exists (e.g. too many subdomains)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_manifest(out, cfg, files)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
