"""
Pilote en ligne de commande de PMLWAVE.

    python main.py run --preset point2d --dx 0.01 --t-end 1
    python main.py errors --preset point2d --dx 0.01 --t-end 1.5 --half-width 2
    python main.py sweep --preset point2d --dx 0.01 --zeta-bars 20 40 60 80
    python main.py convergence --scenario standing2d --levels 20 40 80
    python main.py stability --dim 3 --samples 1000
    python main.py profile --zeta-bars 20 40 60 80

Codes de sortie : 0 succès, 1 échec du calcul (valeurs propres...), 2 configuration
ou argument invalide, 3 instabilité numérique.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from src.damping import profile_curve, reflection_from_zeta_bar
from src.exceptions import (CausalityError, ConfigError, GridError, NonNestedLevelsError,
                            NumericalInstabilityError, PmlWaveError)
from src.harness import compare_with_reference, convergence_study, reflection_sweep, sample_times
from src.loader import parse_config
from src.media import build_medium
from src.models import SimulationConfig
from src.solver2d import run2d
from src.solver3d import run3d
from src.stability import random_samples, stability_scan
from src.storage import export_image, save_json, save_table, write_snapshot
from src.utils import BASE_DIR, configure_logging, ensure_dir, thread_cap
from src.visualization import (plot_damping_profiles, plot_error_curves, plot_snapshot,
                               plot_speed_profile)

logger = logging.getLogger("pmlwave")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_INSTABILITY = 3


def _output_dir(config: SimulationConfig) -> Path:
    out = config.output_dir
    return ensure_dir(out if out.is_absolute() else BASE_DIR / out)


def _config_from_args(args) -> SimulationConfig:
    return parse_config(args.config, preset=args.preset, dx=args.dx, t_end=args.t_end, out=args.out)


def _print_config(config: SimulationConfig) -> None:
    grid = config.grid
    c_max = build_medium(grid, config.medium).c_max
    print(f"Scénario : {config.name}")
    print(f"  Ω = [-a, a]^{grid.dim}, a = {grid.half_width}, couche L = {grid.layer_width}")
    print(f"  dx = {grid.spacing}, noeuds = {grid.shape}")
    if config.zeta_bar is not None:
        derived = [reflection_from_zeta_bar(c_max, L, z) for L, z in zip(grid.layer_width, config.zeta_bar)]
        print(f"  zeta_bar = {config.zeta_bar} (R dérivé = {', '.join(f'{r:.2e}' for r in derived)})")
    elif config.reflection is not None:
        print(f"  R = {config.reflection:g}")


# ═══════════════════════════════════════════════════════════════════════════════
# SOUS-COMMANDES
# ═══════════════════════════════════════════════════════════════════════════════

def run_simulation(args) -> int:
    config = _config_from_args(args)
    print("\n=== SIMULATION ===")
    _print_config(config)

    result = run2d(config) if config.grid.dim == 2 else run3d(config)
    out = _output_dir(config)
    grid = config.grid

    omega = grid.interior_slices()
    extents = [(-a, a) for a in grid.half_width]
    for t in sorted(result.snapshots):
        field = result.snapshots[t]
        stem = f"u_t{t:.4f}"
        write_snapshot(field, grid, t, out / f"{stem}.bin")
        export_image(field[omega], out / f"{stem}.pgm")
        if not args.no_figures:
            plot_snapshot(field[omega], out / f"{stem}.png", extents, title=f"t = {t:g}")
    save_table(result.history, out / "history.csv")
    save_json({"name": config.name, **result.summary}, out / "summary.json")

    summary = result.summary
    print("\n=== RÉSUMÉ ===")
    print(f"Pas de temps : {summary['steps']} (dt = {summary['dt']:.4e}, t final = {summary['t_final']:.4f})")
    print(f"max|u| sur la simulation : {summary['max_u']:.4e} (dans Ω : {summary['max_u_omega']:.4e})")
    final_omega = float(result.history['max_u_omega'].iloc[-1])
    print(f"max|u| dans Ω au dernier pas : {final_omega:.4e}")
    print(f"Stockage auxiliaire : {summary['aux_aux_scalars']} scalaires pour "
          f"{summary['aux_layer_cells']} cellules de couche")
    print(f"Snapshots : {len(result.snapshots)} -> {out}")
    print(f"Durée : {summary['elapsed_s']:.1f} s")
    return EXIT_OK


def run_errors(args) -> int:
    config = _config_from_args(args)
    print("\n=== ERREUR CONTRE LA RÉFÉRENCE ===")
    _print_config(config)

    times = sample_times(config.t_end, args.samples)
    half_width = None if args.half_width is None else [args.half_width] * config.grid.dim
    series, run, ref = compare_with_reference(config, times, args.enlargement, half_width)
    out = _output_dir(config)
    table = series.to_frame()
    save_table(table, out / "errors.csv")
    if not args.no_figures:
        plot_error_curves({config.name: table}, out / "errors.png")

    print(f"\nRéférence : grille {ref.grid.shape}, demi-largeur {ref.half_width}")
    print(f"Normalisation (max ||u_ref||) : {series.normalization:.4e}")
    print(table.iloc[:: max(1, len(table) // 10)].to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    print(f"\nErreur relative maximale : {table['e_rel'].max():.3e}")
    print(f"Table complète : {out / 'errors.csv'}")
    return EXIT_OK


def run_sweep(args) -> int:
    config = _config_from_args(args)
    print("\n=== BALAYAGE DE ZETA_BAR ===")
    _print_config(config)
    print(f"Valeurs : {args.zeta_bars} ({thread_cap()} simulation(s) simultanée(s))")

    times = sample_times(config.t_end, args.samples)
    half_width = None if args.half_width is None else [args.half_width] * config.grid.dim
    results = reflection_sweep(config, args.zeta_bars, times, args.enlargement, half_width)
    out = _output_dir(config)

    frames = {}
    rows = []
    for zb, series in sorted(results.items()):
        table = series.to_frame()
        frames[f"zeta_bar = {zb:g}"] = table
        save_table(table, out / f"errors_zeta_{zb:g}.csv")
        rows.append({"zeta_bar": zb, "e_max": table["e_L2"].max(), "e_final": table["e_L2"].iloc[-1],
                     "e_rel_final": table["e_rel"].iloc[-1]})
    if not args.no_figures:
        plot_error_curves(frames, out / "sweep.png")

    print()
    print(pd.DataFrame(rows).to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    return EXIT_OK


def run_convergence(args) -> int:
    print("\n=== ÉTUDE DE CONVERGENCE ===")
    report = convergence_study(args.scenario, args.levels, t_end=args.t_end)
    print(f"Scénario : {report.scenario}")
    print(report.table.to_string(index=False, float_format=lambda v: f"{v:.4e}"))
    if report.exact:
        print("\nErreurs nulles à tous les niveaux : solution exacte.")
    else:
        print(f"\nOrdres observés : {', '.join(f'{p:.3f}' for p in report.orders)}")
    if args.out:
        save_table(report.table, Path(args.out) / f"convergence_{report.scenario}.csv")
    return EXIT_OK


def run_stability(args) -> int:
    print("\n=== ANALYSE DE STABILITÉ ===")
    zetas, ks = random_samples(args.dim, args.samples, args.zeta_max, args.k_max, args.active, args.seed)
    if args.zeta is not None:
        if len(args.zeta) != args.dim:
            raise ConfigError([f"--zeta : {args.dim} valeurs attendues (reçu {len(args.zeta)})"])
        zetas = np.tile(np.array(args.zeta, dtype=float), (args.samples, 1))
    summary = stability_scan(args.dim, zetas, ks, args.c, include_lower_order=args.lower_order)

    print(f"Dimension {args.dim}, {summary.n_samples} échantillons, c = {args.c}"
          f"{' (avec ordre inférieur)' if args.lower_order else ''}")
    print(f"max Re(lambda)              : {summary.max_real:.3e}")
    print(f"max Re(lambda) / (c |k|)    : {summary.max_real_scaled:.3e}")
    print(f"Cas non complets (Jordan)   : {summary.n_defective}")
    by_count = summary.table.groupby("n_positive_zeta")["complete"].agg(["count", "sum"])
    by_count.columns = ["échantillons", "complets"]
    print(by_count.to_string())
    if args.out:
        save_table(summary.table, Path(args.out) / f"stability_{args.dim}d.csv")
    return EXIT_OK


def run_profile(args) -> int:
    table = profile_curve(args.a, args.L, args.zeta_bars, args.n)
    if args.out:
        out = ensure_dir(Path(args.out))
        save_table(table, out / "profile.csv")
        plot_damping_profiles(table, out / "profile.png", a=args.a)
        plot_speed_profile(out / "speed_layered.png")
        print(f"Profils écrits dans {out}")
    else:
        table.to_csv(sys.stdout, index=False)
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════════════════════
# ARGUMENTS
# ═══════════════════════════════════════════════════════════════════════════════

def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", nargs="?", type=Path, help="document JSON (schéma v1)")
    parser.add_argument("--preset", help="point2d | hetero2d | point3d")
    parser.add_argument("--dx", type=float, help="pas d'espace (tous les axes)")
    parser.add_argument("--t-end", dest="t_end", type=float, help="instant final")
    parser.add_argument("--out", help="dossier de sortie")
    parser.add_argument("--no-figures", action="store_true", help="pas de figures PNG")


def _add_reference_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--enlargement", type=float, default=11.0,
                        help="demi-largeur de la référence en multiples de a (défaut 11)")
    parser.add_argument("--half-width", dest="half_width", type=float,
                        help="demi-largeur explicite du domaine de référence")
    parser.add_argument("--samples", type=int, default=100, help="nombre d'intervalles en temps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmlwave", description="Équation des ondes avec couche absorbante")
    parser.add_argument("-v", "--verbose", action="store_const", const=1, default=0, dest="verbosity")
    parser.add_argument("-q", "--quiet", action="store_const", const=-1, dest="verbosity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulation et snapshots")
    _add_config_args(p)
    p.set_defaults(handler=run_simulation)

    p = sub.add_parser("errors", help="erreur L2 contre une référence élargie")
    _add_config_args(p)
    _add_reference_args(p)
    p.set_defaults(handler=run_errors)

    p = sub.add_parser("sweep", help="erreurs pour plusieurs zeta_bar")
    _add_config_args(p)
    _add_reference_args(p)
    p.add_argument("--zeta-bars", dest="zeta_bars", type=float, nargs="+", default=[20.0, 40.0, 60.0, 80.0])
    p.set_defaults(handler=run_sweep)

    p = sub.add_parser("convergence", help="ordre de convergence (mode propre, zeta = 0)")
    p.add_argument("--scenario", default="standing2d", choices=["standing2d", "standing3d", "zero"])
    p.add_argument("--levels", type=int, nargs="+", default=[20, 40, 80], help="N, avec dx = 1/N")
    p.add_argument("--t-end", dest="t_end", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(handler=run_convergence)

    p = sub.add_parser("stability", help="valeurs propres du symbole")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--zeta", type=float, nargs="+", help="zeta fixés (sinon tirés au hasard)")
    p.add_argument("--active", type=int, help="nombre de zeta strictement positifs")
    p.add_argument("--zeta-max", dest="zeta_max", type=float, default=100.0)
    p.add_argument("--k-max", dest="k_max", type=float, default=10.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--lower-order", dest="lower_order", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=run_stability)

    p = sub.add_parser("profile", help="courbes zeta(x) en CSV")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--L", type=float, default=0.1)
    p.add_argument("--zeta-bars", dest="zeta_bars", type=float, nargs="+", default=[20.0, 40.0, 60.0, 80.0])
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(handler=run_profile)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbosity)
    try:
        return args.handler(args)
    except NumericalInstabilityError as exc:
        logger.debug("Trace de l'instabilité", exc_info=True)
        print(f"\nArrêt : {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except (ConfigError, GridError, CausalityError, NonNestedLevelsError) as exc:
        logger.debug("Trace de l'erreur de configuration", exc_info=True)
        print(f"\nErreur de configuration : {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # arguments refusés par les fonctions de calcul (--c, --L, --active, snapshot illisible...)
        logger.debug("Trace de l'argument invalide", exc_info=True)
        print(f"\nArgument invalide : {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PmlWaveError as exc:
        logger.debug("Trace de l'erreur", exc_info=True)
        print(f"\nErreur : {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
