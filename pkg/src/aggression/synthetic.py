"""Seeded synthetic corpora used as test fixtures and in the example scripts.

None of this is real data. The generators produce posts whose class is
signalled by keyword choice (for the sequence model) or by sentiment-word
and punctuation counts (for the feature baseline).
"""

from __future__ import annotations

import csv
from pathlib import Path

from .corpus import CLASS_NAMES
from .numerics import Rng

FILLER = (
    "the a this that these those people guy post comment page video news today "
    "yesterday really just very so what when where why how who they we you he she "
    "it is are was were be been have has had do does did will would can could should "
    "about from with without into over under after before again then there here "
    "country government party leader team match movie song school city street friend "
    "family time year day week night morning market price game phone channel show "
    "said told think know see look read watch write share follow like"
).split()

KEYWORDS = {
    "NAG": (
        "thanks congratulations wonderful helpful agree nice informative beautiful "
        "appreciate welcome proud support respect lovely peaceful kind"
    ).split(),
    "CAG": (
        "apparently supposedly seriously clown genius obviously sarcasm hypocrite "
        "pretend shame joke interesting wow sure whatever bhakt"
    ).split(),
    "OAG": (
        "idiot stupid kill destroy traitor moron shut beat scum rascal disgusting "
        "loser fool jail hang dog"
    ).split(),
}

# Twenty short posts, fixed by hand; each class uses its own words.
OVERFIT_FIXTURE = (
    ("o01", "You are a complete idiot and a moron", "OAG"),
    ("o02", "Shut up you stupid traitor!!!", "OAG"),
    ("o03", "I will beat you, disgusting scum", "OAG"),
    ("o04", "Throw this rascal in jail", "OAG"),
    ("o05", "Loser fool, go hang yourself", "OAG"),
    ("o06", "Destroy these criminals now", "OAG"),
    ("o07", "Kill the corrupt dogs @leader", "OAG"),
    ("c01", "Oh sure, what a genius plan", "CAG"),
    ("c02", "Apparently the clown thinks he is smart", "CAG"),
    ("c03", "Seriously? Such an honest hypocrite :)", "CAG"),
    ("c04", "Wow, interesting how they pretend to care", "CAG"),
    ("c05", "Shame that nobody noticed the joke", "CAG"),
    ("c06", "Obviously whatever you say boss", "CAG"),
    ("c07", "Supposedly the bhakt knows everything", "CAG"),
    ("n01", "Thanks for sharing this wonderful video", "NAG"),
    ("n02", "Congratulations to the whole team", "NAG"),
    ("n03", "Very informative article, I agree", "NAG"),
    ("n04", "Beautiful song, http://music.example.com", "NAG"),
    ("n05", "Proud of our peaceful city", "NAG"),
    ("n06", "We appreciate your kind support", "NAG"),
)


def _decorate(rng: Rng, word: str) -> str:
    r = rng.random()
    if r < 0.1:
        return word.capitalize()
    if r < 0.13:
        return word.upper()
    if r < 0.16 and len(word) > 2:
        return word[:-1] + word[-1] * 4
    return word


def keyword_corpus(n: int = 1500, seed: int = 7, noise: float = 0.05) -> list[tuple[str, str, str]]:
    """``n`` posts (id, text, label), classes balanced, class shown by 2-3 keywords.

    With probability ``noise`` one keyword from another class is mixed in.
    Posts also carry mentions, URLs, numbers and punctuation so the whole
    preprocessing chain is exercised.
    """
    rng = Rng(seed)
    rows = []
    for k in range(n):
        label = CLASS_NAMES[k % 3]
        words = [FILLER[rng.randint(len(FILLER))] for _ in range(4 + rng.randint(12))]
        own = KEYWORDS[label]
        for _ in range(2 + rng.randint(2)):
            words.insert(rng.randint(len(words) + 1), own[rng.randint(len(own))])
        if rng.random() < noise:
            other = CLASS_NAMES[(k + 1 + rng.randint(2)) % 3]
            words.insert(rng.randint(len(words) + 1), KEYWORDS[other][rng.randint(len(KEYWORDS[other]))])
        words = [_decorate(rng, w) for w in words]
        extra = rng.random()
        if extra < 0.15:
            words.append("@user%d" % rng.randint(1000))
        elif extra < 0.25:
            words.append("https://example.com/p/%d" % rng.randint(10**6))
        elif extra < 0.35:
            words.insert(rng.randint(len(words) + 1), str(rng.randint(10**4)))
        if label == "OAG" and rng.random() < 0.3:
            end = "!!!"
        else:
            end = "." if rng.random() < 0.5 else ""
        text = " ".join(words) + end
        rows.append((f"s{k:05d}", text, label))
    order = rng.permutation(n)
    return [rows[i] for i in order]


POSITIVE_WORDS = "good great love happy nice excellent awesome wonderful best beautiful".split()
NEGATIVE_WORDS = "bad hate awful terrible worst ugly stupid disgusting evil horrible".split()
NEUTRAL_WORDS = "the people post video today city team government said they".split()


def _feature_post(rng: Rng, n_pos: int, n_neg: int, n_punct: int, n_neutral: int) -> str:
    words = [NEUTRAL_WORDS[rng.randint(len(NEUTRAL_WORDS))] for _ in range(n_neutral)]
    for _ in range(n_pos):
        words.insert(rng.randint(len(words) + 1), POSITIVE_WORDS[rng.randint(len(POSITIVE_WORDS))])
    for _ in range(n_neg):
        words.insert(rng.randint(len(words) + 1), NEGATIVE_WORDS[rng.randint(len(NEGATIVE_WORDS))])
    for _ in range(n_punct):
        words.insert(rng.randint(len(words) + 1), "!")
    return " ".join(words)


def separable_feature_corpus(n: int = 300, seed: int = 11) -> list[tuple[str, str, str]]:
    """Class is a deterministic function of the sentiment counts.

    NAG: positives only; CAG: exactly one negative word; OAG: three or more
    negatives and several exclamation marks.
    """
    rng = Rng(seed)
    rows = []
    for k in range(n):
        label = CLASS_NAMES[k % 3]
        if label == "NAG":
            counts = (1 + rng.randint(3), 0, rng.randint(2))
        elif label == "CAG":
            counts = (rng.randint(2), 1, rng.randint(2))
        else:
            counts = (0, 3 + rng.randint(3), 3 + rng.randint(3))
        rows.append((f"f{k:05d}", _feature_post(rng, *counts, 3 + rng.randint(6)), label))
    return rows


def noisy_feature_corpus(n: int = 900, seed: int = 13) -> list[tuple[str, str, str]]:
    """Overlapping sentiment-count distributions: weak but real class signal."""
    rng = Rng(seed)
    rows = []
    for k in range(n):
        label = CLASS_NAMES[k % 3]
        shift = {"NAG": (2, 0), "CAG": (1, 1), "OAG": (0, 2)}[label]
        n_pos = rng.randint(2) + (rng.randint(3) if shift[0] else 0) + (shift[0] == 2)
        n_neg = rng.randint(2) + (rng.randint(3) if shift[1] else 0) + (shift[1] == 2)
        n_punct = rng.randint(3) + (label == "OAG") * rng.randint(3)
        rows.append((f"q{k:05d}", _feature_post(rng, n_pos, n_neg, n_punct, 2 + rng.randint(8)), label))
    return rows


def write_csv(rows, path: str | Path, header: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(["id", "text", "label"])
        w.writerows(rows)
    return path


def write_lexicon(words, path: str | Path, comment: str = "opinion lexicon (synthetic)") -> Path:
    """Word list in the common opinion-lexicon layout: ';' comment lines, one word per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="latin-1") as fh:
        fh.write(f";;; {comment}\n;\n\n")
        for w in words:
            fh.write(f"{w}\n")
    return path
