"""Command line entry points: batch editing, bundle inspection, serving the API.

Exit codes: 0 success, 2 validation failure, 3 LLM/network failure,
4 solver iteration-cap warning escalated by --strict.
"""

from __future__ import annotations

import argparse
import sys

from stagecut.errors import BundleValidationError, CapacityError, LlmError, StagecutError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_LLM = 3
EXIT_SOLVER_CAP = 4


def _add_edit_parser(sub) -> None:
    p = sub.add_parser("edit", help="run the full editing pipeline on a bundle")
    p.add_argument("--project", required=True, help="bundle directory")
    p.add_argument("--out", required=True, help="output directory for artifacts")
    p.add_argument("--params", help="params file overriding the bundle's params.json")
    p.add_argument("--mode", choices=["fast", "exact"], help="dp mode override")
    p.add_argument(
        "--baseline",
        choices=["random", "wide", "speaker"],
        help="run a baseline strategy instead of the full solve",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    p.add_argument(
        "--offline", action="store_true", help="forbid network use (LLM cache required)"
    )
    p.add_argument(
        "--emit-diagnostics",
        action="store_true",
        help="also write potentials and trajectory CSVs",
    )
    p.add_argument(
        "--strict",
        action="store_true",
        help="exit 4 when the smoothing solver hits its iteration cap",
    )
    p.add_argument("-v", "--verbose", action="store_true")


def _run_edit(args) -> int:
    from stagecut import pipeline

    result = pipeline.run_edit(
        args.project,
        args.out,
        params_file=args.params,
        mode=args.mode,
        baseline=args.baseline,
        seed=args.seed,
        offline=args.offline,
        emit_diagnostics=args.emit_diagnostics,
    )
    for stage, seconds in result.timings.items():
        print(f"{stage:<12s} {seconds:8.3f}s")
    print(f"{'total':<12s} {sum(result.timings.values()):8.3f}s")
    print(f"total energy {result.sequence.total_energy:.6f}")
    print(f"segments     {len(result.sequence.segments)}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.verbose:
        for name, path in result.artifacts.items():
            print(f"wrote {path}")
    if result.cap_warning and args.strict:
        print("error: smoothing hit the iteration cap (strict mode)", file=sys.stderr)
        return EXIT_SOLVER_CAP
    return EXIT_OK


def _run_inspect(args) -> int:
    from stagecut import pipeline

    summary = pipeline.inspect_bundle(args.project)
    print(f"project      {summary.project}")
    print(f"actors       {summary.n_actors}")
    print(f"frames       {summary.frame_count} @ {summary.fps:g} fps "
          f"({summary.duration_s:.2f}s)")
    print(f"words        {summary.word_count}")
    print(f"saliency     {summary.saliency_kind}")
    print(f"llm cache    {'yes' if summary.has_llm_cache else 'no'}")
    for actor, coverage in summary.coverage.items():
        print(f"coverage     {actor}: {coverage:.1%}")
    return EXIT_OK


def _run_serve(args) -> int:
    import uvicorn

    from stagecut.service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="stagecut",
        description="Cinematic editing of static wide-angle recordings",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_edit_parser(sub)

    p_inspect = sub.add_parser("inspect", help="summarize a bundle without solving")
    p_inspect.add_argument("--project", required=True, help="bundle directory")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)
    try:
        if args.command == "edit":
            return _run_edit(args)
        if args.command == "inspect":
            return _run_inspect(args)
        if args.command == "serve":
            return _run_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except LlmError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_LLM
    except (BundleValidationError, CapacityError) as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StagecutError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
