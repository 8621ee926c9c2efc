"""Train the guidance model or serve a checkpoint."""

from __future__ import annotations

import argparse
import sys

from .data import load_dataset
from .train import TrainConfig, train


def _cmd_train(args) -> int:
    samples, skipped = load_dataset(args.data)
    if skipped:
        print(f"skipped {skipped} malformed records")
    if not samples:
        print("no usable training records", file=sys.stderr)
        return 1
    config = TrainConfig(learning_rate=args.lr, batch_size=args.batch_size,
                         epochs=args.epochs, seed=args.seed)
    _, history = train(samples, config, checkpoint_path=args.out)
    for h in history:
        print(f"epoch {h.epoch:3d}  train {h.train_loss:.4f}  val {h.val_loss:.4f}  "
              f"acc {h.val_accuracy:.3f}  iou {h.val_iou:.3f}")
    print(f"checkpoint written to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.checkpoint, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nirrt-neural")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on planner-emitted JSON-lines records")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("serve", help="serve a checkpoint over the guidance protocol")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8040)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
