"""
Punto de entrada sharp-interface-lab.

Uso:
    sharp-interface-lab run --config configs/circle_2d.json
    sharp-interface-lab sweep --config configs/front_1d.json --strict
    sharp-interface-lab sweep --config configs/front_1d.json --eps 0.08 0.04
    sharp-interface-lab profile --config configs/profile.json
    sharp-interface-lab connect --config configs/capsules_connect.json
    sharp-interface-lab init --config configs/circle_2d.json
    sharp-interface-lab check-geometry --config configs/circle_2d.json
    sharp-interface-lab make-goldens --config configs/circle_2d.json
"""
import argparse
import sys

import pandas as pd

from src.config.run_config import load_config
from src.errors import ConfigInvalid
from src.pipeline.goldens import make_goldens
from src.pipeline.run import run_simulation, setup_logging
from src.pipeline.studies import run_connect, run_geometry_check, run_init_check, run_profile
from src.pipeline.sweep import evaluate_acceptance, run_sweep

COMMANDS = ("run", "sweep", "profile", "connect", "init", "check-geometry", "make-goldens")
# reglas evaluables con un solo run
SINGLE_RUN_RULES = ("final_max", "all_true", "max", "min")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharp-interface-lab",
        description="Laboratorio del límite de interfaz nítida de Ginzburg–Landau vectorial",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="Ruta al JSON de configuración")
        cmd.add_argument("--out", default=None, help="Directorio de salida (default: output_dir o SIL_OUTPUT_DIR)")
        cmd.add_argument("--strict", action="store_true", help="Código de salida 1 si falla algún criterio")
        if name == "run":
            cmd.add_argument("--eps", type=float, default=None, help="Sobrescribe solver.eps")
            cmd.add_argument("--snapshots", default=None, help="none | final | every:K (K en registros, no en pasos)")
        if name in ("sweep", "init"):
            cmd.add_argument("--eps", type=float, nargs="+", default=None, help="Lista de ε")
        if name == "sweep":
            cmd.add_argument("--no-timestamp", action="store_true", help="Reporte Markdown sin fecha")
    return parser


def _print_flags(flags: dict[str, bool]) -> bool:
    for flag, ok in flags.items():
        print(f"  {'✅' if ok else '❌'} {flag}")
    return all(flags.values())


def _finish(success: bool, error: str | None, flags: dict[str, bool], strict: bool, label: str) -> int:
    if not success:
        print(f"\n❌ {label} falló: {error}")
        return 1
    passed = _print_flags(flags)
    if strict and not passed:
        print(f"\n❌ {label}: criterios de aceptación no superados")
        return 1
    print(f"\n✅ {label} completado exitosamente")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    log_file = setup_logging()
    print(f"📝 Log file: {log_file}")

    try:
        # profile y connect solo necesitan pozos y potencial
        config = load_config(args.config, validate=args.command not in ("profile", "connect"))
    except ConfigInvalid as exc:
        print(f"\n❌ {exc}")
        return 1

    if args.command == "run":
        result = run_simulation(config, output_dir=args.out, eps=args.eps, snapshots=args.snapshots)
        flags = {}
        if result.success:
            print(f"📄 CSV: {result.csv_path}")
            rules = {
                metric: {r: v for r, v in checks.items() if r in SINGLE_RUN_RULES}
                for metric, checks in config.sweep.acceptance.items()
            }
            flags = evaluate_acceptance(pd.DataFrame([result.metrics]), None,
                                        {m: r for m, r in rules.items() if r})
        return _finish(result.success, result.error, flags, args.strict, "Run")

    if args.command == "sweep":
        result = run_sweep(config, eps_list=args.eps, output_dir=args.out,
                           timestamp=not args.no_timestamp)
        flags = result.report.flags if result.report else {}
        if result.success:
            print(f"📄 Reporte: {result.paths.get('report_md')}")
        return _finish(result.success, result.error, flags, args.strict, "Barrido")

    if args.command == "profile":
        result = run_profile(config, output_dir=args.out)
        return _finish(result.success, result.error, result.flags, args.strict, "Perfil")

    if args.command == "connect":
        result = run_connect(config, output_dir=args.out)
        return _finish(result.success, result.error, result.flags, args.strict, "Conexión")

    if args.command == "init":
        result = run_init_check(config, output_dir=args.out, eps_list=args.eps)
        return _finish(result.success, result.error, result.flags, args.strict, "Dato inicial")

    if args.command == "check-geometry":
        result = run_geometry_check(config, output_dir=args.out)
        return _finish(result.success, result.error, result.flags, args.strict, "Identidades geométricas")

    result = make_goldens(config, output_dir=args.out)
    if result.success:
        print(f"📄 Goldens: {result.path}")
    return _finish(result.success, result.error, {}, args.strict, "Goldens")


if __name__ == "__main__":
    sys.exit(main())
