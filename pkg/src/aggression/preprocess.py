"""Text preprocessing for social-media posts.

Four steps, applied in order by :func:`preprocess_pipeline`:

1. :func:`normalize_entities` replaces URLs, e-mails, user mentions, money,
   percentages, phone numbers, times, dates and numbers with placeholders
   such as ``<url>``.
2. :func:`tokenize_social` splits the text into tokens, keeping placeholders,
   emoticons and emoji atomic.
3. :func:`strip_punct_and_correct` drops punctuation-only tokens and
   optionally applies a single-edit spelling correction.
4. :func:`lemmatize` strips common English inflections.

Non-Latin text (e.g. Devanagari) passes through steps 2-4 unchanged apart
from splitting.
"""

from __future__ import annotations

import re
import string
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

ENTITY_KINDS = ("url", "email", "user", "money", "percent", "phone", "time", "date", "number")
PLACEHOLDERS = frozenset(f"<{k}>" for k in ENTITY_KINDS)

_MONTHS = (
    r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?"
    r"|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)"
)
# Digits are ASCII only so Devanagari numerals and similar are left alone.
_NUM = r"[0-9]+(?:[.,][0-9]+)*"
_NB = r"(?<![A-Za-z0-9])"  # left boundary for numeric rules
_NA = r"(?![A-Za-z0-9])"  # right boundary for numeric rules


@dataclass(frozen=True)
class NormalizationRule:
    kind: str
    pattern: re.Pattern

    @property
    def placeholder(self) -> str:
        return f"<{self.kind}>"


def _rule(kind: str, pattern: str) -> NormalizationRule:
    return NormalizationRule(kind, re.compile(pattern, re.IGNORECASE))


# Priority order; each rule rewrites the output of the previous one.
RULES: tuple[NormalizationRule, ...] = (
    _rule("url", r"(?:https?://|www\.)[^\s<>\"]*[^\s<>\".,;:!?'()\[\]]"),
    _rule("email", r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+"),
    _rule("user", r"@\w+"),
    _rule(
        "money",
        r"(?:[$£€₹]\s?" + _NUM + r"(?:\s?(?:k|m|bn|million|billion|crore|lakh)\b)?"
        + r"|" + _NB + _NUM + r"\s?(?:dollars?|usd|inr|rs|rupees?|euros?|pounds?)\b"
        + r"|\brs\.?\s?" + _NUM + _NA + r")",
    ),
    _rule("percent", _NB + _NUM + r"\s?(?:%|percent\b|pct\b)"),
    _rule(
        "phone",
        _NB + r"(?:\+[0-9]{1,3}[\s-]?)?(?:\([0-9]{3}\)\s?|[0-9]{3}[\s.-])[0-9]{3}[\s.-][0-9]{4}" + _NA
        + r"|" + _NB + r"(?:\+[0-9]{1,3}[\s-]?)?[0-9]{5}[\s-][0-9]{5}" + _NA
        + r"|(?<![A-Za-z0-9+])\+?[0-9]{10,12}" + _NA,
    ),
    _rule(
        "time",
        _NB + r"(?:[0-9]{1,2}:[0-9]{2}(?::[0-9]{2})?(?:\s?[ap]\.?m\b\.?)?|[0-9]{1,2}\s?[ap]\.?m\b\.?)",
    ),
    _rule(
        "date",
        _NB + r"(?:[0-9]{1,4}[/-][0-9]{1,2}[/-][0-9]{1,4}"
        + r"|[0-9]{1,2}(?:st|nd|rd|th)?\s" + _MONTHS + r"\b(?:,?\s[0-9]{4})?"
        + r"|" + _MONTHS + r"\s[0-9]{1,2}(?:st|nd|rd|th)?(?:,?\s[0-9]{4})?)" + _NA,
    ),
    _rule("number", _NB + _NUM + _NA),
)


# "<3" and "</3" are hidden behind noncharacters while the rules run, but only
# where the tokenizer would keep them atomic, so their "3" is never a number.
_HEART_MASKS = (("</3", "\ufdd1"), ("<3", "\ufdd0"))


def _mask_hearts(text: str) -> str:
    for heart, mask in _HEART_MASKS:
        if heart not in text:
            continue
        parts = text.split(heart)
        out = [parts[0]]
        for rest in parts[1:]:
            atomic = not rest or not _is_word_char(rest[0])
            out.append(mask if atomic else heart)
            out.append(rest)
        text = "".join(out)
    return text


def normalize_entities(text: str) -> str:
    text = _mask_hearts(text)
    for rule in RULES:
        text = rule.pattern.sub(rule.placeholder, text)
    for heart, mask in _HEART_MASKS:
        text = text.replace(mask, heart)
    return text


EMOTICONS = (
    ":-)", ":)", ":-(", ":(", ":-D", ":D", ";-)", ";)", ":-P", ":P", ":-p", ":p",
    ":'(", ":'-(", ":-/", ":/", ":-|", ":|", ":-O", ":O", ":-o", ":o", ":*", ":-*",
    ":]", ":[", "=)", "=(", "=D", "<3", "</3", "^_^", "^^", "-_-", "T_T", ">:(", "D:",
)
# Longest first so ":-)" wins over ":-" prefixes and "</3" over "<3".
_EMOTICONS_BY_LEN = tuple(sorted(set(EMOTICONS), key=len, reverse=True))
_PLACEHOLDER_RE = re.compile(r"<(?:" + "|".join(ENTITY_KINDS) + r")>")
_ELONGATION_RE = re.compile(r"([^\W\d_])\1{2,}")
_ASCII_LOWER = str.maketrans(string.ascii_uppercase, string.ascii_lowercase)
_WORD_JOINERS = "'’-."

_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x2300, 0x23FF),
    (0x2B00, 0x2BFF),
    (0x1F1E6, 0x1F1FF),
)
_ZWJ = "\u200d"
_EMOJI_MODIFIERS = {0xFE0F, 0xFE0E, 0x20E3} | set(range(0x1F3FB, 0x1F400))


def is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def is_punct(ch: str) -> bool:
    if ch in string.punctuation:
        return True
    cat = unicodedata.category(ch)
    return cat.startswith("P") or (cat.startswith("S") and not is_emoji(ch) and ord(ch) not in _EMOJI_MODIFIERS)


def is_punct_token(token: str) -> bool:
    return bool(token) and all(is_punct(ch) for ch in token)


def _is_word_char(ch: str) -> bool:
    return not (ch.isspace() or is_punct(ch) or is_emoji(ch))


def _atomic_at(chunk: str, i: int) -> str | None:
    m = _PLACEHOLDER_RE.match(chunk, i)
    if m:
        return m.group(0)
    for emo in _EMOTICONS_BY_LEN:
        if chunk.startswith(emo, i):
            end = i + len(emo)
            # ":D" must not eat the start of ":Dog"
            if emo[-1].isalnum() and end < len(chunk) and _is_word_char(chunk[end]):
                continue
            if emo[0].isalnum() and i > 0 and _is_word_char(chunk[i - 1]):
                continue
            return emo
    return None


def _split_chunk(chunk: str) -> list[str]:
    out: list[str] = []
    i, n = 0, len(chunk)
    while i < n:
        atom = _atomic_at(chunk, i)
        if atom is not None:
            out.append(atom)
            i += len(atom)
            continue
        ch = chunk[i]
        if is_emoji(ch):
            j = i + 1
            while j < n and (ord(chunk[j]) in _EMOJI_MODIFIERS or chunk[j] == _ZWJ or (chunk[j - 1] == _ZWJ and is_emoji(chunk[j]))):
                j += 1
            out.append(chunk[i:j])
            i = j
        elif is_punct(ch) or ord(ch) in _EMOJI_MODIFIERS or ch == _ZWJ:
            j = i + 1
            while j < n and (is_punct(chunk[j]) or ord(chunk[j]) in _EMOJI_MODIFIERS) and _atomic_at(chunk, j) is None:
                j += 1
            out.append(chunk[i:j])
            i = j
        else:
            j = i + 1
            while j < n:
                if _is_word_char(chunk[j]):
                    j += 1
                elif chunk[j] in _WORD_JOINERS and j + 1 < n and _is_word_char(chunk[j + 1]) and _atomic_at(chunk, j) is None:
                    j += 2
                else:
                    break
            word = chunk[i:j].translate(_ASCII_LOWER)
            out.append(_ELONGATION_RE.sub(r"\1\1", word))
            i = j
    return out


def tokenize_social(text: str) -> list[str]:
    """Split entity-normalised text into tokens.

    >>> tokenize_social("I hate this:(")
    ['i', 'hate', 'this', ':(']
    >>> tokenize_social("<url> rocks!!!")
    ['<url>', 'rocks', '!!!']
    """
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def edit_distance_one(word: str, alphabet: Iterable[str]) -> set[str]:
    """All strings one insertion, deletion or substitution away from ``word``."""
    letters = sorted(set(alphabet))
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = {a + b[1:] for a, b in splits if b}
    replaces = {a + c + b[1:] for a, b in splits if b for c in letters if c != b[0]}
    inserts = {a + c + b for a, b in splits for c in letters}
    return (deletes | replaces | inserts) - {word}


def strip_punct_and_correct(
    tokens: list[str],
    vocab: Iterable[str] | None = None,
    enable_spell: bool = False,
) -> list[str]:
    kept = [t for t in tokens if t and not is_punct_token(t)]
    if not (enable_spell and vocab is not None):
        return kept
    words = vocab if isinstance(vocab, (set, frozenset)) else set(vocab)
    alphabet = set(string.ascii_lowercase)
    for w in words:
        alphabet.update(w)
    out = []
    for tok in kept:
        if tok in words or not tok.isalpha():
            out.append(tok)
            continue
        candidates = edit_distance_one(tok, alphabet) & words
        out.append(next(iter(candidates)) if len(candidates) == 1 else tok)
    return out


LEMMA_EXCEPTIONS = {
    "men": "man",
    "women": "woman",
    "children": "child",
    "people": "person",
    "mice": "mouse",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "lives": "life",
    "wives": "wife",
    "knives": "knife",
    "leaves": "leaf",
    "was": "was",
    "has": "has",
    "does": "does",
    "is": "is",
    "this": "this",
    "his": "his",
    "yes": "yes",
    "news": "news",
}

_VOWEL = re.compile(r"[aeiouy]")
_NO_UNDOUBLE = set("lsz")


def load_lemma_exceptions(path: str | Path) -> dict[str, str]:
    """Read a ``surface<TAB>lemma`` file; ``#`` starts a comment line."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"{path}:{lineno}: expected 'surface<TAB>lemma'")
            table[parts[0]] = parts[1]
    return table


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeiou" and stem[-1] not in _NO_UNDOUBLE:
        return stem[:-1]
    return stem


def _strip_once(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies") and len(word) - 3 >= 2:
        return word[:-3] + "y"
    if word.endswith("ing") and len(word) - 3 >= 3 and _VOWEL.search(word[:-3]):
        return _undouble(word[:-3])
    if word.endswith("ed") and not word.endswith("eed") and len(word) - 2 >= 3 and _VOWEL.search(word[:-2]):
        return _undouble(word[:-2])
    if word.endswith("s") and len(word) - 1 >= 3 and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def lemmatize(token: str, exceptions: dict[str, str] | None = None) -> str:
    """Rule-based English lemma of a lowercase token.

    Only pure ``[a-z]`` tokens are touched; anything else (placeholders,
    numbers, Devanagari) is returned as is. Rules are applied until nothing
    changes, which makes the function idempotent.
    """
    if not token.isascii() or not token.isalpha() or not token.islower():
        return token
    table = LEMMA_EXCEPTIONS if exceptions is None else {**LEMMA_EXCEPTIONS, **exceptions}
    word = token
    while True:
        if word in table:
            return table[word]
        nxt = _strip_once(word)
        if nxt == word:
            return word
        word = nxt


@dataclass(frozen=True)
class PreprocessOptions:
    enable_spell: bool = False
    spell_vocab: frozenset[str] | None = None
    lemma_exceptions: dict[str, str] | None = None
    lemmatize: bool = True


@dataclass(frozen=True)
class RawPost:
    id: str
    text: str


def preprocess_pipeline(post: RawPost | str, options: PreprocessOptions | None = None) -> list[str]:
    opts = options or PreprocessOptions()
    text = post.text if isinstance(post, RawPost) else post
    tokens = tokenize_social(normalize_entities(text))
    tokens = strip_punct_and_correct(tokens, opts.spell_vocab, opts.enable_spell)
    if opts.lemmatize:
        tokens = [lemmatize(t, opts.lemma_exceptions) for t in tokens]
    return tokens


def feature_tokens(text: str) -> list[str]:
    """Tokens before punctuation stripping, as used by the feature baseline."""
    return tokenize_social(normalize_entities(text))
