"""Write the seeded synthetic fixtures to a directory.

    python3 scripts/make_synthetic_corpus.py --out data/synthetic

Produces:
  keyword-train.csv / keyword-test.csv   1,500 keyword posts split 80/20 per class
  overfit.csv                            the 20 hand-written posts
  separable-{train,test}.csv             feature-separable posts for the forest
  noisy-{train,test}.csv                 overlapping feature distributions
  positive-words.txt / negative-words.txt  small opinion lexicons
"""

import argparse
from pathlib import Path

from aggression.corpus import ClassLabel, LabeledExample, stratified_split
from aggression.synthetic import (
    NEGATIVE_WORDS,
    OVERFIT_FIXTURE,
    POSITIVE_WORDS,
    keyword_corpus,
    noisy_feature_corpus,
    separable_feature_corpus,
    write_csv,
    write_lexicon,
)


def split_rows(rows, fraction, seed):
    ex = [LabeledExample(i, [], ClassLabel[lbl], text) for i, text, lbl in rows]
    train, test = stratified_split(ex, fraction, seed)
    as_rows = lambda part: [(e.id, e.raw_text, e.label.name) for e in part]
    return as_rows(train), as_rows(test)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/synthetic")
    ap.add_argument("--n", type=int, default=1500, help="keyword corpus size")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--noise", type=float, default=0.05, help="chance of a keyword from another class")
    args = ap.parse_args()
    out = Path(args.out)

    train, test = split_rows(keyword_corpus(args.n, args.seed, args.noise), 0.2, seed=1)
    write_csv(train, out / "keyword-train.csv")
    write_csv(test, out / "keyword-test.csv")
    write_csv(OVERFIT_FIXTURE, out / "overfit.csv", header=True)
    write_csv(separable_feature_corpus(300, seed=11), out / "separable-train.csv")
    write_csv(separable_feature_corpus(150, seed=12), out / "separable-test.csv")
    write_csv(noisy_feature_corpus(900, seed=13), out / "noisy-train.csv")
    write_csv(noisy_feature_corpus(450, seed=14), out / "noisy-test.csv")
    write_lexicon(POSITIVE_WORDS, out / "positive-words.txt")
    write_lexicon(NEGATIVE_WORDS, out / "negative-words.txt")
    print(f"wrote fixtures to {out} (keyword train={len(train)} test={len(test)})")


if __name__ == "__main__":
    main()
