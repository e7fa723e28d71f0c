"""Command-line interface: train, eval, gen, predict, serve.

PREFSTACK_LOG sets the logging level; PREFSTACK_SEED is the default seed
wherever --seed is omitted.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import PrefstackError
from .evaluation import METHODS, export_report, loocv
from .inference import Session
from .model import SecondaryActionSet, canonicalize
from .storage import load_demos, load_model, load_task, save_model, save_task
from .synth import PRESETS, bookcase_task, generate_raw_logs
from .training import TrainingConfig, train

log = logging.getLogger("prefstack")

_LINKAGE_ALIASES = {"avg": "average", "average": "average", "complete": "complete", "single": "single"}


def _default_seed() -> int:
    return int(os.environ.get("PREFSTACK_SEED", "0"))


def _setup_logging() -> None:
    level = os.environ.get("PREFSTACK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _add_train(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("train", help="train a preference model from demonstrations")
    p.add_argument("--task", required=True, type=Path)
    p.add_argument("--demos", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--linkage", default="average", choices=sorted(_LINKAGE_ALIASES))
    p.add_argument("--metric", default="mod", choices=["mod", "lev"])
    p.add_argument("--seed", type=int, default=None)


def _add_eval(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("eval", help="leave-one-out cross-validation")
    p.add_argument("--task", required=True, type=Path)
    p.add_argument("--demos", required=True, type=Path)
    p.add_argument("--method", default="two-stage", choices=list(METHODS))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, type=Path, help="CSV output path")


def _add_gen(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--task", type=Path, default=None, help="task file (default: built-in bookcase)")
    p.add_argument("--preset", default="fig4-like", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, type=Path, help="output directory")


def _add_predict(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("predict", help="interactive prediction loop on stdin/stdout")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--task", type=Path, default=None, help="task file for id canonicalization")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--transcript", type=Path, default=None, help="write a JSONL transcript on exit")


def _add_serve(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model-dir", type=Path, default=None)
    p.add_argument("--addr", default="127.0.0.1:8000", help="HOST:PORT")


def _cmd_train(args: argparse.Namespace) -> int:
    task = load_task(args.task)
    demos = load_demos(args.demos, task)
    config = TrainingConfig(
        linkage=_LINKAGE_ALIASES[args.linkage],
        metric=args.metric,
        seed=args.seed if args.seed is not None else _default_seed(),
    )
    model = train(demos, task, config)
    save_model(model, args.out)
    # keep the task next to the model so `serve --model-dir` can canonicalize ids
    save_task(task, Path(args.out).parent / f"{task.task_id}.task.json")
    print(
        f"trained {len(demos)} users -> {len(model.high_clusters)} high clusters, "
        f"{len(model.low_clusters)} event identities; wrote {args.out}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    task = load_task(args.task)
    demos = load_demos(args.demos, task)
    seed = args.seed if args.seed is not None else _default_seed()
    report = loocv(demos, task, method=args.method, trials=args.trials, seed=seed)
    export_report(report, args.out)
    print(f"{args.method}: mean={report.mean:.4f} stderr={report.stderr:.4f}; wrote {args.out}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    task = load_task(args.task) if args.task else bookcase_task()
    seed = args.seed if args.seed is not None else _default_seed()
    preset = PRESETS[args.preset](task)
    logs = generate_raw_logs(preset, task, seed)
    out = Path(args.out)
    demo_dir = out / "demos"
    demo_dir.mkdir(parents=True, exist_ok=True)
    import json

    for user_id, actions in logs:
        payload = {
            "schema_version": 1,
            "user_id": user_id,
            "actions": [{"id": a.id, "kind": a.kind.value} for a in actions],
        }
        (demo_dir / f"{user_id}.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n"
        )
    save_task(task, out / "task.json")
    print(f"wrote {len(logs)} demonstrations to {demo_dir} and task to {out / 'task.json'}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    task = load_task(args.task) if args.task else None
    seed = args.seed if args.seed is not None else _default_seed()
    session = Session(model, seed=seed)

    def show(prediction: SecondaryActionSet) -> None:
        tokens = ",".join(prediction.sorted_tokens()) or "NOOP"
        print(f"predict: {tokens}", flush=True)

    show(session.predict())
    print("# reply 'y' to accept, 'n tok1,tok2' to reject, then a primary id", flush=True)
    for line in sys.stdin:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("q", "quit", "exit"):
            break
        if session.pending is not None:
            if line == "y":
                session.observe_feedback(True)
            elif line.startswith("n"):
                rest = line[1:].strip()
                actual = SecondaryActionSet(frozenset(t for t in rest.split(",") if t))
                session.observe_feedback(False, actual)
            else:
                print("# expected feedback (y | n tokens); got a primary? send feedback first", flush=True)
            continue
        action_id = line
        if task is not None:
            action = canonicalize(action_id, task)
        else:
            from .model import Action, ActionKind

            action = Action(id=action_id, kind=ActionKind.PRIMARY)
        session.observe_primary(action)
        show(session.predict())
    if args.transcript:
        args.transcript.write_text(session.transcript_jsonl())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    host, _, port = args.addr.rpartition(":")
    serve(args.model_dir, host or "127.0.0.1", int(port))
    return 0


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(prog="prefstack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_train(sub)
    _add_eval(sub)
    _add_gen(sub)
    _add_predict(sub)
    _add_serve(sub)
    args = parser.parse_args(argv)
    handlers = {
        "train": _cmd_train,
        "eval": _cmd_eval,
        "gen": _cmd_gen,
        "predict": _cmd_predict,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except PrefstackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
