"""Documents, topics and relevance judgments, plus per-topic term statistics.

File formats
------------
documents
    JSON Lines, one ``{"doc_id": str, "text": str}`` object per line.
topics
    ``topic_id<TAB>title text`` per line.
qrels
    TREC judgments ``topic_id iteration doc_id relevance``; relevance > 0
    means relevant.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import BernoulliPair, detect, fidelity
from .errors import DuplicateDocId, EmptyStratum, ParseError, UnknownTopic
from .estimators import TermCounts, pseudo_relevance, relative_frequency

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs; no stemming, no stopwords."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str


@dataclass(frozen=True)
class Topic:
    topic_id: str
    title_terms: tuple[str, ...]


@dataclass(frozen=True)
class Judgment:
    topic_id: str
    doc_id: str
    relevant: bool


@dataclass(frozen=True)
class TermTopicStats:
    topic_id: str
    term: str
    counts: TermCounts
    collection_df: int
    collection_size: int


@dataclass
class Collection:
    doc_ids: tuple[str, ...]
    postings: dict[str, frozenset[str]]
    topics: dict[str, Topic]
    judgments: dict[str, dict[str, bool]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.doc_ids)

    def topic(self, topic_id: str) -> Topic:
        try:
            return self.topics[topic_id]
        except KeyError:
            raise UnknownTopic(f"unknown topic {topic_id!r}") from None

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))


def read_documents(path) -> list[Document]:
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "expected a JSON object")
            doc_id, text = obj.get("doc_id"), obj.get("text")
            if not isinstance(doc_id, str) or not doc_id:
                raise ParseError(path, line_no, "missing or empty string field 'doc_id'")
            if not isinstance(text, str):
                raise ParseError(path, line_no, "missing string field 'text'")
            if doc_id in seen:
                raise DuplicateDocId(path, line_no, f"duplicate doc_id {doc_id!r}")
            seen.add(doc_id)
            docs.append(Document(doc_id, text))
    return docs


def read_topics(path) -> list[Topic]:
    topics = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            topic_id, sep, title = line.partition("\t")
            topic_id = topic_id.strip()
            if not sep or not topic_id:
                raise ParseError(path, line_no, "expected 'topic_id<TAB>title'")
            terms = tuple(tokenize(title))
            if not terms:
                raise ParseError(path, line_no, f"topic {topic_id!r} has no title terms")
            if topic_id in seen:
                raise ParseError(path, line_no, f"duplicate topic {topic_id!r}")
            seen.add(topic_id)
            topics.append(Topic(topic_id, terms))
    return topics


def read_qrels(path) -> list[Judgment]:
    judgments = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ParseError(path, line_no, f"expected 4 fields, got {len(parts)}")
            topic_id, _iteration, doc_id, grade = parts
            try:
                relevant = int(grade) > 0
            except ValueError:
                raise ParseError(path, line_no, f"relevance {grade!r} is not an integer") from None
            if (topic_id, doc_id) in seen:
                raise ParseError(path, line_no, f"duplicate judgment for ({topic_id}, {doc_id})")
            seen.add((topic_id, doc_id))
            judgments.append(Judgment(topic_id, doc_id, relevant))
    return judgments


def build_collection(
    documents: Iterable[Document], topics: Iterable[Topic], judgments: Iterable[Judgment] = ()
) -> Collection:
    postings: dict[str, set[str]] = {}
    doc_ids = []
    for doc in documents:
        doc_ids.append(doc.doc_id)
        for term in set(tokenize(doc.text)):
            postings.setdefault(term, set()).add(doc.doc_id)
    if len(set(doc_ids)) != len(doc_ids):
        raise ValueError("duplicate doc_id in collection")
    topic_map = {t.topic_id: t for t in topics}
    known_docs = set(doc_ids)

    judged: dict[str, dict[str, bool]] = {tid: {} for tid in topic_map}
    for j in judgments:
        if j.topic_id not in topic_map:
            log.warning("qrels: skipping judgment for unknown topic %r", j.topic_id)
            continue
        if j.doc_id not in known_docs:
            log.warning("qrels: skipping judgment for unknown document %r", j.doc_id)
            continue
        judged[j.topic_id][j.doc_id] = j.relevant

    return Collection(
        doc_ids=tuple(sorted(doc_ids)),
        postings={t: frozenset(ids) for t, ids in postings.items()},
        topics=topic_map,
        judgments=judged,
    )


def ingest(documents_path, topics_path, qrels_path) -> Collection:
    return build_collection(
        read_documents(documents_path), read_topics(topics_path), read_qrels(qrels_path)
    )


def _normalize_term(term: str) -> str:
    tokens = tokenize(term)
    if len(tokens) != 1:
        raise ValueError(f"term {term!r} does not normalize to a single token")
    return tokens[0]


def term_topic_stats(c: Collection, topic_id: str, term: str) -> TermTopicStats:
    """Document-level presence counts of ``term`` among the topic's judged documents."""
    c.topic(topic_id)
    term = _normalize_term(term)
    judged = c.judgments.get(topic_id, {})
    containing = c.postings.get(term, frozenset())
    rel = [d for d, r in judged.items() if r]
    nonrel = [d for d, r in judged.items() if not r]
    counts = TermCounts(
        n_rel=sum(d in containing for d in rel),
        N_rel=len(rel),
        n_nonrel=sum(d in containing for d in nonrel),
        N_nonrel=len(nonrel),
    )
    return TermTopicStats(topic_id, term, counts, len(containing), c.size)


def avg_relative_frequency(c: Collection, topic_id: str) -> float:
    """Mean of ``df / collection_size`` over the topic's title terms."""
    topic = c.topic(topic_id)
    if c.size == 0:
        raise ValueError("empty collection")
    return sum(c.df(t) for t in topic.title_terms) / (len(topic.title_terms) * c.size)


@dataclass(frozen=True)
class ErrorCurve:
    xi: np.ndarray
    pe: np.ndarray
    qe: np.ndarray
    fidelity: np.ndarray


@dataclass(frozen=True)
class TermCurve:
    term: str
    model: BernoulliPair
    estimator: str  # "relative_frequency" or "pseudo_relevance"
    curve: ErrorCurve


@dataclass(frozen=True)
class TopicCurves:
    topic_id: str
    terms: tuple[TermCurve, ...]
    average: ErrorCurve


def error_curve(model: BernoulliPair, xi_grid: Sequence[float]) -> ErrorCurve:
    xi = np.asarray(xi_grid, dtype=float)
    reports = [detect(model, float(x)) for x in xi]
    return ErrorCurve(
        xi=xi,
        pe=np.array([r.p_error for r in reports]),
        qe=np.array([r.q_error for r in reports]),
        fidelity=np.full(xi.shape, fidelity(model)),
    )


def estimate_model(stats: TermTopicStats) -> tuple[BernoulliPair, str]:
    try:
        return relative_frequency(stats.counts), "relative_frequency"
    except EmptyStratum:
        log.info("topic %s term %r: empty stratum, using pseudo-relevance", stats.topic_id, stats.term)
        return pseudo_relevance(stats.collection_df, stats.collection_size), "pseudo_relevance"


def topic_error_curves(c: Collection, topic_id: str, xi_grid: Sequence[float]) -> TopicCurves:
    """Per-term and term-averaged P_e, Q_e and fidelity over a prior grid."""
    topic = c.topic(topic_id)
    if len(xi_grid) == 0:
        raise ValueError("xi_grid must not be empty")
    per_term = []
    for term in topic.title_terms:
        model, how = estimate_model(term_topic_stats(c, topic_id, term))
        per_term.append(TermCurve(term, model, how, error_curve(model, xi_grid)))
    curves = [t.curve for t in per_term]
    average = ErrorCurve(
        xi=curves[0].xi,
        pe=np.mean([k.pe for k in curves], axis=0),
        qe=np.mean([k.qe for k in curves], axis=0),
        fidelity=np.mean([k.fidelity for k in curves], axis=0),
    )
    return TopicCurves(topic_id, tuple(per_term), average)


def topic_averages(c: Collection, topic_ids: Optional[Iterable[str]] = None) -> list[tuple[str, float]]:
    ids = sorted(c.topics if topic_ids is None else topic_ids, key=_topic_sort_key)
    return [(tid, avg_relative_frequency(c, tid)) for tid in ids]


def _topic_sort_key(topic_id: str):
    return (0, int(topic_id), "") if topic_id.isdigit() else (1, 0, topic_id)
