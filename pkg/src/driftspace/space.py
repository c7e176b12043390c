"""Semantic-space accumulation and queries.

A SemanticSpace maps each retained term to three things accumulated over
every sliding window centered on that term: an unnormalized context vector
(sum of neighbor seed vectors), an unnormalized order vector (sum of
offset-permuted seed vectors, including the center's own seed at offset 0),
and a center count.  Accumulation is linear, so spaces built on parts of a
corpus under the same config combine by plain summation into the space of
the whole corpus, up to float summation order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    CombineMismatchError,
    ConfigError,
    TermNotFoundError,
    UndefinedSimilarityError,
)
from .vectors import PermutationSet, apply_permutation, cosine, seed_vector

WEIGHTINGS = ("uniform", "inverse_log_frequency")

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SpaceConfig:
    """Everything that fixes the seed universe and window geometry.

    Spaces are combinable only when their configs are identical; the whole
    config is persisted in the space-file header.
    """

    dim: int = 300
    window: int = 11
    order_span: int = 2
    global_seed: int = 1
    perm_seed: int = 2
    weighting: str = "uniform"
    compaction: bool = True

    def __post_init__(self):
        if self.dim < 2:
            raise ConfigError(f"dim must be >= 2, got {self.dim}")
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError(f"window must be odd and >= 3, got {self.window}")
        half = (self.window - 1) // 2
        if not 1 <= self.order_span <= half:
            raise ConfigError(
                f"order_span must lie in [1, (window-1)/2] = [1, {half}], "
                f"got {self.order_span}"
            )
        for name in ("global_seed", "perm_seed"):
            seed = getattr(self, name)
            if not 0 <= seed <= _U64_MAX:
                raise ConfigError(f"{name} must be an unsigned 64-bit integer")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(
                f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}"
            )

    @property
    def half_window(self) -> int:
        return (self.window - 1) // 2


class TermEntry:
    """Accumulated state for one term: context vector, order vector, count."""

    __slots__ = ("context", "order", "count")

    def __init__(self, context: np.ndarray, order: np.ndarray, count: int = 0):
        self.context = context
        self.order = order
        self.count = count


def inverse_log_weights(counts) -> dict:
    """Per-term coefficient 1/ln(1 + count): frequent terms shrink slowly.

    Terms with no recorded occurrences are omitted; they cannot show up at
    ingest time, so they need no coefficient.
    """
    return {
        term: 1.0 / math.log1p(count) for term, count in counts.items() if count > 0
    }


class SemanticSpace:
    """Mutable accumulator for one epoch (or a combination of epochs).

    ``term_weights`` optionally maps each token to its accumulation
    coefficient; the build pipeline passes None for uniform weighting and
    the inverse-log map otherwise.  Weights are a build-time input only:
    they are not persisted and not part of config equality.
    """

    def __init__(self, config: SpaceConfig, epoch_label: str, term_weights=None,
                 float_dtype=np.float64):
        if config.weighting != "uniform" and term_weights is None:
            raise ConfigError(
                f"weighting {config.weighting!r} needs a term_weights map at build time"
            )
        self.config = config
        self.epoch_label = epoch_label
        self.entries: dict[str, TermEntry] = {}
        self.ingested_tokens = 0
        self.float_dtype = np.dtype(float_dtype)
        self._term_weights = term_weights
        self._seed_cache: dict[str, np.ndarray] = {}
        self._perms = None

    # Transient caches are rebuilt on demand; keep worker-to-parent pickles
    # small by not shipping them.
    def __getstate__(self):
        return {
            "config": self.config,
            "epoch_label": self.epoch_label,
            "entries": self.entries,
            "ingested_tokens": self.ingested_tokens,
            "float_dtype": self.float_dtype,
        }

    def __setstate__(self, state):
        self.config = state["config"]
        self.epoch_label = state["epoch_label"]
        self.entries = state["entries"]
        self.ingested_tokens = state["ingested_tokens"]
        self.float_dtype = state["float_dtype"]
        self._term_weights = None
        self._seed_cache = {}
        self._perms = None

    @property
    def perms(self) -> PermutationSet:
        if self._perms is None:
            self._perms = PermutationSet(
                self.config.dim, self.config.perm_seed, self.config.order_span
            )
        return self._perms

    def seed(self, token: str) -> np.ndarray:
        vec = self._seed_cache.get(token)
        if vec is None:
            vec = seed_vector(token, self.config.dim, self.config.global_seed)
            self._seed_cache[token] = vec
        return vec

    def __contains__(self, term: str) -> bool:
        return term in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def count(self, term: str) -> int:
        entry = self.entries.get(term)
        return 0 if entry is None else entry.count

    def __eq__(self, other) -> bool:
        if not isinstance(other, SemanticSpace):
            return NotImplemented
        if (
            self.config != other.config
            or self.epoch_label != other.epoch_label
            or self.ingested_tokens != other.ingested_tokens
            or self.entries.keys() != other.entries.keys()
        ):
            return False
        for term, entry in self.entries.items():
            theirs = other.entries[term]
            if entry.count != theirs.count:
                return False
            if not np.array_equal(entry.context, theirs.context):
                return False
            if not np.array_equal(entry.order, theirs.order):
                return False
        return True

    __hash__ = None

    def ingest_sentence(self, tokens) -> None:
        """Accumulate one sentence of filtered tokens.

        ``None`` marks a hole left by a dropped token when hole-preserving
        filtering is in use: holes keep their position (so real neighbors
        stay at their original offsets) but contribute nothing and are not
        counted as centers.  Windows never cross sentence boundaries
        because each call covers exactly one sentence.
        """
        n = len(tokens)
        if n == 0:
            return
        centers = []
        for i, tok in enumerate(tokens):
            if tok is None:
                continue
            if tok == "":
                raise ValueError("empty token reached ingestion")
            centers.append(i)
        if not centers:
            return

        dim = self.config.dim
        rows = np.zeros((n, dim))
        for i in centers:
            rows[i] = self.seed(tokens[i])
        if self._term_weights is not None:
            weights = np.zeros(n)
            for i in centers:
                weights[i] = self._term_weights[tokens[i]]
            rows = rows * weights[:, None]

        # Context: windowed sum of weighted neighbor rows, minus the center's
        # own row, computed with one prefix-sum pass instead of per-pair adds.
        half = self.config.half_window
        prefix = np.cumsum(rows, axis=0)
        hi = np.minimum(np.arange(n) + half, n - 1)
        ctx = prefix[hi] - rows
        lo = np.arange(n) - half - 1
        inside = lo >= 0
        if inside.any():
            ctx[inside] -= prefix[lo[inside]]

        # Order: offset-permuted rows summed over [-span, +span], including
        # the center's own (identity-permuted) row at offset 0.
        span = self.config.order_span
        order_inc = np.zeros_like(rows)
        for delta in range(-span, span + 1):
            shifted = rows if delta == 0 else apply_permutation(
                self.perms.offset_map(delta), rows
            )
            a = max(0, -delta)
            b = n - max(0, delta)
            if b > a:
                order_inc[a:b] += shifted[a + delta:b + delta]

        entries = self.entries
        for i in centers:
            term = tokens[i]
            entry = entries.get(term)
            if entry is None:
                entry = entries[term] = TermEntry(np.zeros(dim), np.zeros(dim))
            entry.context += ctx[i]
            entry.order += order_inc[i]
            entry.count += 1
        self.ingested_tokens += len(centers)

    def ingest_document(self, doc) -> None:
        for sentence in doc.sentences:
            self.ingest_sentence(sentence)

    def term_vector(self, term: str, normalized: bool = False, kind: str = "context") -> np.ndarray:
        """Copy of a term's context or order vector, optionally unit length."""
        if kind not in ("context", "order"):
            raise ConfigError(f"kind must be 'context' or 'order', got {kind!r}")
        entry = self.entries.get(term)
        if entry is None:
            raise TermNotFoundError(term)
        out = np.array(entry.context if kind == "context" else entry.order, copy=True)
        if normalized:
            norm = np.linalg.norm(out)
            if norm == 0.0:
                raise UndefinedSimilarityError(
                    f"term {term!r} has a zero {kind} vector"
                )
            out = out / norm
        return out

    def similarity(self, term_a: str, term_b: str) -> float:
        return cosine(self.term_vector(term_a), self.term_vector(term_b))

    def nearest_neighbors(self, query: np.ndarray, top_n: int, min_count: int = 1,
                          exclude=()) -> list:
        """Top terms by cosine against a unit-length query vector.

        Ranks by similarity descending, ties broken lexicographically
        ascending.  Entries below min_count or with zero vectors are
        skipped; terms in ``exclude`` are never returned.
        """
        return NeighborIndex(self, min_count=min_count).query(query, top_n, exclude)


class NeighborIndex:
    """Read-only snapshot of a space's normalized context vectors.

    Building the matrix once and scanning it per query keeps repeated
    queries (drift neighbor lists, per-epoch equivalents) linear instead of
    rebuilding per call.
    """

    def __init__(self, space: SemanticSpace, min_count: int = 1, kind: str = "context"):
        if kind not in ("context", "order"):
            raise ConfigError(f"kind must be 'context' or 'order', got {kind!r}")
        terms = []
        rows = []
        for term in sorted(space.entries):
            entry = space.entries[term]
            if entry.count < min_count:
                continue
            vec = entry.context if kind == "context" else entry.order
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                continue
            terms.append(term)
            rows.append(np.asarray(vec, dtype=np.float64) / norm)
        self.terms = np.array(terms) if terms else np.empty(0, dtype="U1")
        self.matrix = (
            np.vstack(rows) if rows else np.zeros((0, space.config.dim))
        )

    def __len__(self) -> int:
        return len(self.terms)

    def query(self, vec: np.ndarray, top_n: int, exclude=()) -> list:
        if top_n < 1:
            raise ConfigError(f"top_n must be >= 1, got {top_n}")
        if len(self.terms) == 0:
            return []
        sims = self.matrix @ np.asarray(vec, dtype=np.float64)
        ranked = np.lexsort((self.terms, -sims))
        exclude = set(exclude)
        out = []
        for idx in ranked:
            term = str(self.terms[idx])
            if term in exclude:
                continue
            out.append((term, float(sims[idx])))
            if len(out) == top_n:
                break
        return out


def ensure_same_config(spaces) -> SpaceConfig:
    spaces = list(spaces)
    config = spaces[0].config
    for space in spaces[1:]:
        if space.config != config:
            raise CombineMismatchError(
                "spaces use different configurations: "
                f"{config} vs {space.config} "
                f"(labels {spaces[0].epoch_label!r} vs {space.epoch_label!r})"
            )
    return config


def combine(spaces) -> SemanticSpace:
    """Componentwise sum of spaces sharing one config.

    Counts and token totals add exactly; vectors add in the argument order,
    so the result is bitwise deterministic for a fixed input order.  Mixing
    32- and 64-bit spaces upcasts the result to 64-bit with a warning.
    """
    spaces = list(spaces)
    if not spaces:
        raise ConfigError("combine needs at least one space")
    config = ensure_same_config(spaces)
    dtypes = {space.float_dtype for space in spaces}
    if len(dtypes) > 1:
        warnings.warn(
            "combining spaces of mixed float widths; result upcast to 64-bit",
            stacklevel=2,
        )
        dtype = np.dtype(np.float64)
    else:
        dtype = spaces[0].float_dtype

    out = SemanticSpace(
        config,
        "+".join(space.epoch_label for space in spaces),
        float_dtype=dtype,
    )
    all_terms = set()
    for space in spaces:
        all_terms.update(space.entries.keys())
    dim = config.dim
    for term in sorted(all_terms):
        context = np.zeros(dim, dtype=dtype)
        order = np.zeros(dim, dtype=dtype)
        count = 0
        for space in spaces:
            entry = space.entries.get(term)
            if entry is not None:
                context += entry.context
                order += entry.order
                count += entry.count
        out.entries[term] = TermEntry(context, order, count)
    out.ingested_tokens = sum(space.ingested_tokens for space in spaces)
    return out


def norm_frequency_series(epoch_spaces, term: str) -> list:
    """Per-epoch (label, center count, squared context norm) for one term.

    Epochs where the term is absent contribute (label, 0, 0.0).  Under
    near-i.i.d. contexts the squared norm grows linearly with the count,
    which is what makes the norm a frequency proxy.
    """
    series = []
    for space in epoch_spaces:
        entry = space.entries.get(term)
        if entry is None:
            series.append((space.epoch_label, 0, 0.0))
        else:
            context = np.asarray(entry.context, dtype=np.float64)
            series.append(
                (space.epoch_label, entry.count, float(np.dot(context, context)))
            )
    return series
