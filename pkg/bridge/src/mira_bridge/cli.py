"""mira-bridge: run a pretrained model over WAVs and emit engine files.

Exit codes: 0 success, 2 bad usage, 3 model/data failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .backends import BACKENDS, BridgeModelError, resolve_backend
from .jobs import BridgeJob, extract_embeddings, extract_label_probs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mira-bridge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--model", required=True, choices=sorted(BACKENDS), help="checkpoint family")
    parser.add_argument("--checkpoint", required=True, help="path or identifier of the model weights")
    parser.add_argument("--in", dest="input_dir", required=True, help="directory of WAV files")
    parser.add_argument("--out", dest="out_dir", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    job = BridgeJob(
        input_dir=Path(args.input_dir),
        model=args.model,
        checkpoint=args.checkpoint,
        out_dir=Path(args.out_dir),
    )
    try:
        backend = resolve_backend(job.model, job.checkpoint)
        if backend.emits == "probs":
            manifest = extract_label_probs(job, backend)
        else:
            manifest = extract_embeddings(job, backend)
    except (BridgeModelError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
