"""End-to-end run on the synthetic fixtures: both English variants, the forest, random guessing.

    python3 scripts/run_synthetic_experiment.py --data data/synthetic --out runs/synthetic

Expects the files written by make_synthetic_corpus.py (generated if missing).
Prints a small results table of held-out weighted F1.
"""

import argparse
import contextlib
import io
import subprocess
import sys
import time
from pathlib import Path

from aggression.cli import main as cli


def run(*argv) -> dict[str, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        rc = cli([str(a) for a in argv])
    if rc != 0:
        sys.exit(f"command failed ({rc}): {' '.join(map(str, argv))}")
    return dict(line.split("=", 1) for line in buf.getvalue().splitlines() if "=" in line)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default="data/synthetic")
    ap.add_argument("--out", default="runs/synthetic")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=10)
    args = ap.parse_args()
    data, out = Path(args.data), Path(args.out)
    if not (data / "keyword-train.csv").exists():
        subprocess.run([sys.executable, str(Path(__file__).with_name("make_synthetic_corpus.py")), "--out", str(data)], check=True)

    train, test = data / "keyword-train.csv", data / "keyword-test.csv"
    rows = []
    for variant in ("eng-a", "eng-b"):
        t0 = time.perf_counter()
        run("train", "--train", train, "--variant", variant, "--seed", args.seed, "--epochs", args.epochs, "--out", out / variant)
        res = run("eval", "--model", out / variant / "model.agrm", "--test", test, "--out", out / variant / "eval",
                  "--random-baseline", "--seed", args.seed, "--svg")
        rows.append((f"LSTM+attention {variant}", float(res["weighted_f1"]), time.perf_counter() - t0))
        random_mean = float(res["random_baseline"])

    t0 = time.perf_counter()
    res = run("baseline", "--train", train, "--test", test, "--pos-lexicon", data / "positive-words.txt",
              "--neg-lexicon", data / "negative-words.txt", "--seed", args.seed, "--out", out / "forest")
    rows.append(("random forest (6 features)", float(res["weighted_f1"]), time.perf_counter() - t0))
    rows.append(("uniform random (1000 trials)", random_mean, 0.0))

    print(f"{'system':<32}{'weighted F1':>12}{'seconds':>10}")
    for name, f1, secs in rows:
        print(f"{name:<32}{f1:>12.4f}{secs:>10.1f}")


if __name__ == "__main__":
    main()
