"""Answer normalization shared by extraction, regeneration, and judging.

The pipeline is ordered: markdown emphasis first, then LaTeX wrappers,
then math delimiters, then kind-specific canonicalization. Applying
``normalize_answer`` twice yields the same string (idempotence), which
lets downstream comparisons re-normalize safely.
"""

from __future__ import annotations

import re
import string
from decimal import Decimal, InvalidOperation
from typing import Literal, Optional

AnswerKind = Literal["option_label", "numeric", "free_text"]

ANSWER_KINDS: tuple[str, ...] = ("option_label", "numeric", "free_text")

# LaTeX spacing commands that survive \boxed/\text unwrapping.
_LATEX_SPACING = re.compile(r"\\[,;:!]|\\quad\b|\\qquad\b|\\ ")
_ARTICLES = re.compile(r"\b(a|an|the)\b", re.IGNORECASE)
_MULTISPACE = re.compile(r"\s+")
_BARE_LABEL = re.compile(r"^\(?([A-Za-z])\)?$")


def _strip_emphasis(s: str) -> str:
    s = s.strip()
    while len(s) >= 4 and s.startswith("**") and s.endswith("**"):
        s = s[2:-2].strip()
    return s


def _unwrap_command(s: str, name: str) -> str:
    """Replace every ``\\<name>{payload}`` with its payload, brace-balanced."""
    marker = "\\" + name
    out = []
    i = 0
    while i < len(s):
        start = s.find(marker, i)
        if start == -1:
            out.append(s[i:])
            break
        j = start + len(marker)
        while j < len(s) and s[j].isspace():
            j += 1
        if j >= len(s) or s[j] != "{":
            out.append(s[i : start + len(marker)])
            i = start + len(marker)
            continue
        depth = 1
        k = j + 1
        while k < len(s) and depth > 0:
            if s[k] == "{":
                depth += 1
            elif s[k] == "}":
                depth -= 1
            k += 1
        if depth != 0:
            # Unbalanced braces: leave the tail untouched.
            out.append(s[i:])
            break
        out.append(s[i:start])
        out.append(s[j + 1 : k - 1])
        i = k
    return "".join(out)


def strip_latex(s: str) -> str:
    """Drop \\boxed{}/\\text{} wrappers (keeping payloads) and spacing commands."""
    prev = None
    while prev != s:
        prev = s
        s = _unwrap_command(s, "boxed")
        s = _unwrap_command(s, "text")
    s = _LATEX_SPACING.sub(" ", s)
    return re.sub(r" {2,}", " ", s)


def _strip_math_delimiters(s: str) -> str:
    return s.strip().strip("$").strip()


def basic_clean(s: str) -> str:
    """Shared prefix of all normalization kinds: emphasis, LaTeX, $, trailing dot."""
    s = _strip_emphasis(s)
    s = strip_latex(s)
    s = _strip_math_delimiters(s)
    return s.strip().rstrip(".").strip()


def canonical_label(s: str) -> Optional[str]:
    """Return the bare uppercase label for inputs like "b", "(B)", "(b"; else None."""
    m = _BARE_LABEL.match(s.strip())
    if m:
        return m.group(1).upper()
    return None


def _remove_punctuation(s: str) -> str:
    # Decimal points inside numbers are meaningful; all other punctuation goes.
    out = []
    for i, ch in enumerate(s):
        if ch in string.punctuation:
            if ch == "." and 0 < i < len(s) - 1 and s[i - 1].isdigit() and s[i + 1].isdigit():
                out.append(ch)
            continue
        out.append(ch)
    return "".join(out)


def quasi_exact(s: str) -> str:
    """Quasi-exact form: lowercase, no punctuation, no articles, single spaces."""
    s = s.lower()
    s = _remove_punctuation(s)
    s = _ARTICLES.sub(" ", s)
    return _MULTISPACE.sub(" ", s).strip()


def normalize_numeric(s: str) -> Optional[str]:
    s = basic_clean(s)
    s = s.replace("$", "").replace(",", "")
    s = s.strip().rstrip(".").strip()
    if not any(ch.isdigit() for ch in s):
        return None
    return s


def normalize_answer(raw: str, kind: AnswerKind) -> Optional[str]:
    """Normalize an extracted answer for the given answer kind.

    Returns None when normalization fails (numeric input with no digit
    content); callers treat that as extraction failure.
    """
    s = basic_clean(raw)
    if kind == "option_label":
        s = s.upper()
        label = canonical_label(s)
        return label if label is not None else s
    if kind == "numeric":
        return normalize_numeric(s)
    if kind == "free_text":
        return quasi_exact(s)
    raise ValueError(f"unknown answer kind: {kind!r}")


def numeric_equal(a: str, b: str) -> bool:
    """Canonical decimal equality; plain string equality if either side fails to parse."""
    try:
        return Decimal(a) == Decimal(b)
    except (InvalidOperation, ValueError):
        return a == b
