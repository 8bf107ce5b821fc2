"""Rating files -> binary feedback matrix.

Supported inputs are ``user<TAB>item<TAB>rating``, the same three fields
comma-separated, and MovieLens ``user::item::rating::timestamp``. A fourth
(timestamp) field is accepted in every format and ignored.
"""

import logging
import math
from pathlib import Path
from typing import Dict, NamedTuple

import numpy as np
import pandas as pd

from .exceptions import DataError
from .items import GREATER_THAN_THRESHOLD, PRESENCE, FeedbackMatrix, RatingTriple

logger = logging.getLogger(__name__)

DELIMITERS = {
    "tab": "\t",
    "comma": ",",
    "double-colon": "::",
}
MAX_REPORTED_REJECTS = 5


class Reject(NamedTuple):
    line: int
    reason: str


class BinarizedRatings(NamedTuple):
    matrix: FeedbackMatrix
    user_index: Dict[str, int]
    item_index: Dict[str, int]


# ---------- PARSING ----------
def parse_line(line, sep):
    fields = [f.strip() for f in line.split(sep)]
    if len(fields) not in (3, 4):
        raise ValueError(f"expected 3 or 4 fields, got {len(fields)}")
    user, item, rating = fields[:3]
    if not user or not item:
        raise ValueError("empty user or item id")
    value = float(rating)
    if not math.isfinite(value):
        raise ValueError(f"rating {rating!r} is not finite")
    return RatingTriple(user, item, value)


def parse_ratings(lines, delimiter):
    """Parse an iterable of lines; returns (triples, rejects) with 1-based line numbers."""
    if delimiter not in DELIMITERS:
        raise DataError(f"unknown delimiter {delimiter!r}, expected one of {tuple(DELIMITERS)}")
    sep = DELIMITERS[delimiter]
    triples, rejects = [], []
    for number, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        try:
            triples.append(parse_line(line, sep))
        except ValueError as e:
            rejects.append(Reject(number, str(e)))
    return triples, rejects


def load_ratings(path, delimiter):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        triples, rejects = parse_ratings(f, delimiter)

    shown = "; ".join(f"line {r.line}: {r.reason}" for r in rejects[:MAX_REPORTED_REJECTS])
    if not triples:
        raise DataError(f"no valid ratings in {path}" + (f" (first rejects: {shown})" if shown else ""))
    if rejects:
        logger.warning(f"Rejected {len(rejects)} malformed lines in {path}: {shown}")
    logger.info(f"Loaded {len(triples)} ratings from {path}")
    return triples


# ---------- BINARIZATION ----------
def binarize(triples, rule):
    """0/1 matrix with rows/columns in first-appearance order; duplicate pairs OR-combine."""
    if not triples:
        raise DataError("cannot binarize an empty list of ratings")
    df = pd.DataFrame({
        "user": [t.user for t in triples],
        "item": [t.item for t in triples],
        "rating": [t.rating for t in triples],
    })
    rows, users = pd.factorize(df["user"], sort=False)
    cols, items = pd.factorize(df["item"], sort=False)

    if rule.kind == PRESENCE:
        hits = np.ones(len(df), dtype=np.uint8)
    elif rule.kind == GREATER_THAN_THRESHOLD:
        hits = (df["rating"].to_numpy() > rule.threshold).astype(np.uint8)
    else:
        raise DataError(f"unknown binarize rule {rule.kind!r}")

    bits = np.zeros((len(users), len(items)), dtype=np.uint8)
    np.maximum.at(bits, (rows, cols), hits)
    logger.info(f"Binarized {len(df)} ratings into a {bits.shape[0]} x {bits.shape[1]} matrix ({bits.mean():.4f} dense)")
    return BinarizedRatings(
        matrix=FeedbackMatrix(bits),
        user_index={str(u): i for i, u in enumerate(users)},
        item_index={str(e): j for j, e in enumerate(items)},
    )


# ---------- REDUCTION ----------
def _largest(sums, limit):
    order = np.argsort(-sums, kind="stable")[:limit]
    return np.sort(order)


def select_top_indices(W, L_max, m_max):
    """Kept (rows, columns), both in original order."""
    if L_max < 1 or m_max < 1:
        raise DataError(f"L_max and m_max must be >= 1, got {L_max}, {m_max}")
    bits = W.bits.astype(np.int64)
    cols = _largest(bits.sum(axis=0), L_max)
    rows = _largest(bits[:, cols].sum(axis=1), m_max)
    return rows, cols


def select_top(W, L_max, m_max):
    """Keep the L_max most popular items, then the m_max most active users over them."""
    rows, cols = select_top_indices(W, L_max, m_max)
    return FeedbackMatrix(W.bits[np.ix_(rows, cols)])


# ---------- MATRIX CSV ----------
def write_matrix(W, item_ids, path):
    """0/1 rows under a header of item ids."""
    item_ids = [str(e) for e in item_ids]
    if len(item_ids) != W.items:
        raise DataError(f"{len(item_ids)} item ids for a matrix with {W.items} items")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(W.bits, columns=item_ids).to_csv(path, index=False, lineterminator="\n")
    return path


def read_matrix(path):
    path = Path(path)
    df = pd.read_csv(path, dtype=str)
    if df.empty:
        raise DataError(f"matrix file {path} has no rows")
    try:
        bits = df.apply(pd.to_numeric).to_numpy()
    except ValueError as e:
        raise DataError(f"matrix file {path} has non-numeric entries: {e}") from e
    if np.isnan(bits).any() or not np.isin(bits, (0, 1)).all():
        raise DataError(f"matrix file {path} must contain only 0/1 entries")
    return FeedbackMatrix(bits.astype(np.uint8)), [str(c) for c in df.columns]
