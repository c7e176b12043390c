"""Cross-epoch analyses over built spaces.

All five analyses lean on the same two facts: spaces over different time
slices share one seed universe, so a vector from the combined space can be
compared directly against vectors from any slice; and context vectors are
unnormalized sums, so normalizing at query time gives scale-free cosines
while order vectors keep their magnitude for score decoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import fmean

import numpy as np

from .errors import ConfigError, MissingDataError, TermNotFoundError, UndefinedSimilarityError
from .space import NeighborIndex, SemanticSpace, ensure_same_config
from .vectors import apply_permutation

# Category boundaries on the inter-period similarity, highest first:
# stable >= 0.70 > moderate >= 0.35 > fast >= 0.15 > unstable.
DRIFT_THRESHOLDS = (0.70, 0.35, 0.15)

DRIFT_CATEGORIES = ("stable", "moderate", "fast", "unstable")


@dataclass
class TrajectoryReport:
    term: str
    representative_set: list
    per_epoch: dict
    per_epoch_count: dict


@dataclass
class DriftRecord:
    term: str
    sigma01: float
    neighbors0: list
    neighbors1: list
    category: str


@dataclass
class DriftReport:
    period0_label: str
    period1_label: str
    records: list
    excluded: dict = field(default_factory=dict)


@dataclass
class GenderReport:
    period_label: str
    male_qualifiers: list
    female_qualifiers: list
    per_year_votes: dict


@dataclass
class EquivalenceReport:
    anchor_term: str
    anchor_epoch: str
    per_epoch: dict


def _labeled_spaces(epoch_spaces) -> dict:
    spaces = {}
    for space in epoch_spaces:
        if space.epoch_label in spaces:
            raise ConfigError(f"duplicate epoch label {space.epoch_label!r}")
        spaces[space.epoch_label] = space
    if not spaces:
        raise ConfigError("at least one epoch space is required")
    ensure_same_config(list(spaces.values()))
    return spaces


def time_trajectory(total: SemanticSpace, epoch_spaces, term: str, r_size: int = 200,
                    top_n: int = 5, min_count: int = 1, extra_terms=()) -> TrajectoryReport:
    """Track which representative neighbors a term is closest to per epoch.

    The anchor vector is the term's normalized context vector in ``total``
    (the combination of all epochs); the representative set is the term's
    top ``r_size`` neighbors there, self excluded, optionally extended with
    caller-supplied terms.  Each epoch then ranks the representatives that
    are present with nonzero vectors by cosine against the anchor, keeping
    ``top_n``.  Comparing slice vectors against a combined-space vector is
    sound because the spaces add linearly.
    """
    spaces = _labeled_spaces(epoch_spaces)
    ensure_same_config([total, *spaces.values()])
    anchor = total.term_vector(term, normalized=True)
    ranked = total.nearest_neighbors(anchor, r_size, min_count=min_count, exclude={term})
    representatives = [t for t, _ in ranked]
    seen = set(representatives)
    for extra in extra_terms:
        if extra != term and extra not in seen:
            representatives.append(extra)
            seen.add(extra)

    per_epoch = {}
    per_epoch_count = {}
    for label in sorted(spaces):
        space = spaces[label]
        scored = []
        for candidate in representatives:
            entry = space.entries.get(candidate)
            if entry is None:
                continue
            norm = np.linalg.norm(entry.context)
            if norm == 0.0:
                continue
            scored.append((candidate, float(np.dot(entry.context, anchor) / norm)))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        per_epoch[label] = scored[:top_n]
        per_epoch_count[label] = space.count(term)
    return TrajectoryReport(term, representatives, per_epoch, per_epoch_count)


def _drift_category(sigma01: float, thresholds) -> str:
    stable, moderate, fast = thresholds
    if sigma01 >= stable:
        return "stable"
    if sigma01 >= moderate:
        return "moderate"
    if sigma01 >= fast:
        return "fast"
    return "unstable"


def drift(space0: SemanticSpace, space1: SemanticSpace, min_total_count: int = 1500,
          top_n: int = 15, thresholds=DRIFT_THRESHOLDS, exclude=(), terms=None,
          neighbor_min_count: int = 1) -> DriftReport:
    """Rank terms by how much their context changed between two periods.

    A term is eligible when present in both spaces with nonzero vectors and
    a combined count of at least ``min_total_count``.  Each record carries
    the inter-period cosine (records sort ascending: fastest change first),
    a coarse category, and the term's top neighbors within each period.
    Ineligible candidates land in ``excluded`` with a reason code.
    """
    ensure_same_config([space0, space1])
    if not (1.0 >= thresholds[0] > thresholds[1] > thresholds[2] > -1.0):
        raise ConfigError(f"thresholds must descend within (-1, 1]: {thresholds}")
    excluded_terms = set(exclude)
    if terms is not None:
        candidates = sorted(set(terms))
    else:
        candidates = sorted(set(space0.entries) | set(space1.entries))
    index0 = NeighborIndex(space0, min_count=neighbor_min_count)
    index1 = NeighborIndex(space1, min_count=neighbor_min_count)

    records = []
    excluded = {}
    for term in candidates:
        if term in excluded_terms:
            excluded[term] = "excluded"
            continue
        entry0 = space0.entries.get(term)
        entry1 = space1.entries.get(term)
        if entry0 is None:
            excluded[term] = "absent-period0"
            continue
        if entry1 is None:
            excluded[term] = "absent-period1"
            continue
        if entry0.count + entry1.count < min_total_count:
            excluded[term] = "below-min-count"
            continue
        norm0 = np.linalg.norm(entry0.context)
        norm1 = np.linalg.norm(entry1.context)
        if norm0 == 0.0 or norm1 == 0.0:
            excluded[term] = "zero-vector"
            continue
        v0 = np.asarray(entry0.context, dtype=np.float64) / norm0
        v1 = np.asarray(entry1.context, dtype=np.float64) / norm1
        sigma01 = float(np.dot(v0, v1))
        records.append(
            DriftRecord(
                term,
                sigma01,
                index0.query(v0, top_n, exclude={term}),
                index1.query(v1, top_n, exclude={term}),
                _drift_category(sigma01, thresholds),
            )
        )
    records.sort(key=lambda record: (record.sigma01, record.term))
    return DriftReport(space0.epoch_label, space1.epoch_label, records, excluded)


def qualifier_gender(epoch_spaces, qualifiers, man_terms, woman_terms,
                     period=None) -> GenderReport:
    """Attribute qualifiers to a gender per year, then rank over the period.

    For each year, a qualifier's male score is its best cosine against any
    man term present that year (female score likewise); the year votes
    female only on strict inequality, so exact ties go male.  A year where
    either term list is entirely absent casts no vote.  Period lists rank
    by years voted for that gender, then mean absolute margin, then term;
    a qualifier with equally many female and male years is listed male,
    mirroring the tie direction of the yearly rule.
    """
    if not qualifiers or not man_terms or not woman_terms:
        raise ConfigError("qualifiers, man_terms and woman_terms must be non-empty")
    qualifiers = list(dict.fromkeys(qualifiers))
    spaces = _labeled_spaces(epoch_spaces)
    if period is None:
        labels = sorted(spaces)
    else:
        labels = sorted(dict.fromkeys(period))
        missing = [label for label in labels if label not in spaces]
        if missing:
            raise MissingDataError(f"period years without a space: {missing}")

    votes = {}
    margins: dict = {q: [] for q in qualifiers}
    for label in labels:
        space = spaces[label]
        side_vectors = []
        for side in (man_terms, woman_terms):
            rows = []
            for gendered in side:
                entry = space.entries.get(gendered)
                if entry is None:
                    continue
                norm = np.linalg.norm(entry.context)
                if norm == 0.0:
                    continue
                rows.append(np.asarray(entry.context, dtype=np.float64) / norm)
            side_vectors.append(np.vstack(rows) if rows else None)
        man_matrix, woman_matrix = side_vectors
        if man_matrix is None or woman_matrix is None:
            continue
        for qualifier in qualifiers:
            entry = space.entries.get(qualifier)
            if entry is None:
                continue
            norm = np.linalg.norm(entry.context)
            if norm == 0.0:
                continue
            vec = np.asarray(entry.context, dtype=np.float64) / norm
            sigma_m = float(np.max(man_matrix @ vec))
            sigma_w = float(np.max(woman_matrix @ vec))
            votes[(qualifier, label)] = "female" if sigma_w > sigma_m else "male"
            margins[qualifier].append(abs(sigma_w - sigma_m))

    male_ranked = []
    female_ranked = []
    for qualifier in qualifiers:
        cast = [votes[(qualifier, label)] for label in labels if (qualifier, label) in votes]
        if not cast:
            continue
        female_years = cast.count("female")
        male_years = len(cast) - female_years
        mean_margin = fmean(margins[qualifier])
        if female_years > male_years:
            female_ranked.append((qualifier, female_years, mean_margin))
        else:
            male_ranked.append((qualifier, male_years, mean_margin))
    key = lambda row: (-row[1], -row[2], row[0])
    male_ranked.sort(key=key)
    female_ranked.sort(key=key)

    period_label = labels[0] if len(labels) == 1 else f"{labels[0]}-{labels[-1]}"
    return GenderReport(
        period_label,
        [q for q, _, _ in male_ranked],
        [q for q, _, _ in female_ranked],
        votes,
    )


def equivalents(epoch_spaces, term: str, anchor_epoch: str, top_k: int = 2,
                min_count: int = 1, exclude_self: bool = False) -> EquivalenceReport:
    """Find what plays the anchor term's role in every epoch.

    The anchor vector comes from the term's entry in the ``anchor_epoch``
    space; every epoch then reports its ``top_k`` nearest terms with at
    least ``min_count`` occurrences.  Epochs with no eligible candidate at
    all are marked absent (None), not zero-filled.  With ``exclude_self``
    left off, the anchor epoch's own top hit is the term itself.
    """
    spaces = _labeled_spaces(epoch_spaces)
    if anchor_epoch not in spaces:
        raise MissingDataError(f"no epoch labeled {anchor_epoch!r} among the spaces")
    anchor = spaces[anchor_epoch].term_vector(term, normalized=True)

    per_epoch = {}
    for label in sorted(spaces):
        index = NeighborIndex(spaces[label], min_count=min_count)
        hits = index.query(anchor, top_k, exclude={term} if exclude_self else ())
        per_epoch[label] = hits if hits else None
    return EquivalenceReport(term, anchor_epoch, per_epoch)


def predict_position(space: SemanticSpace, term: str, offset: int, top_n: int = 5,
                     min_count: int = 1) -> list:
    """Score vocabulary terms as the ``offset``-position neighbor of ``term``.

    score(w) = <order(term), P^offset seed(w)> with the order vector left
    unnormalized, so a planted neighbor scores near its summed accumulation
    weight while unrelated terms score near zero (noise scale about
    |order| / sqrt(dim)).  Index relabelings preserve dot products, so this
    is computed as <P^-offset order(term), seed(w)> with one permutation.
    Offset 0 is rejected: decoding the center position would only recover
    the term itself.
    """
    span = space.config.order_span
    if offset == 0 or abs(offset) > span:
        raise ConfigError(
            f"offset must be a nonzero integer within +-{span}, got {offset}"
        )
    entry = space.entries.get(term)
    if entry is None:
        raise TermNotFoundError(term)
    order = np.asarray(entry.order, dtype=np.float64)
    if np.linalg.norm(order) == 0.0:
        raise UndefinedSimilarityError(f"term {term!r} has a zero order vector")
    probe = apply_permutation(space.perms.offset_map(-offset), order)

    eligible = sorted(
        t for t, e in space.entries.items() if e.count >= min_count
    )
    if not eligible:
        return []
    seeds = np.vstack([space.seed(t) for t in eligible])
    scores = seeds @ probe
    ranked = np.lexsort((np.array(eligible), -scores))
    top_n = min(top_n, len(eligible))
    return [(eligible[i], float(scores[i])) for i in ranked[:top_n]]
