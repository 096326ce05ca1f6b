"""Command line for training critique models and serving them."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .data import ELEMENT_KINDS
from .server import serve
from .train import TrainerConfig, train


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(prog="critic-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fine-tune critique models on training JSONL")
    p_train.add_argument("--jsonl", required=True, help="training data (JSONL)")
    p_train.add_argument("--out", required=True, help="model output directory")
    p_train.add_argument(
        "--kind", choices=[*ELEMENT_KINDS, "all"], default="all", help="element kind to train"
    )
    p_train.add_argument("--base-model", default="tiny")
    p_train.add_argument("--lr", type=float, default=1e-5)
    p_train.add_argument("--epochs", type=int, default=5)
    p_train.add_argument("--batch-size", type=int, default=4)
    p_train.add_argument("--max-input-tokens", type=int, default=512)
    p_train.add_argument("--max-output-tokens", type=int, default=150)
    p_train.add_argument("--seed", type=int, default=0)

    p_serve = sub.add_parser("serve", help="serve trained models over POST /critique")
    p_serve.add_argument("--models", required=True, help="directory holding per-kind artifacts")
    p_serve.add_argument("--port", type=int, default=8300)
    p_serve.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)
    if args.command == "train":
        kinds = list(ELEMENT_KINDS) if args.kind == "all" else [args.kind]
        for kind in kinds:
            config = TrainerConfig(
                train_jsonl=args.jsonl,
                output_dir=args.out,
                element_kind=kind,
                base_model=args.base_model,
                learning_rate=args.lr,
                epochs=args.epochs,
                batch_size=args.batch_size,
                max_input_tokens=args.max_input_tokens,
                max_output_tokens=args.max_output_tokens,
                seed=args.seed,
            )
            result = train(config)
            print(
                f"{kind}: {result.n_examples} instances, "
                f"epoch losses {[round(loss, 4) for loss in result.epoch_losses]} "
                f"-> {result.model_dir}"
            )
        return 0
    serve(args.models, args.port, args.host)
    return 0


if __name__ == "__main__":
    sys.exit(main())
