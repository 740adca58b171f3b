"""Italian tokenization, TF-IDF similarity and hard exclusion screening.

Token pattern: lowercase letters including the accented vowels
(à, è, é, ì, ò, ù), minimum length 2; digits and punctuation dropped.
The bundled stop-word list (`data/stopwords_it.txt`) is fixed and
versioned with the package; callers may supply their own.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .errors import EmptyVocabularyError

_TOKEN_RE = re.compile(r"[a-zàèéìòù]{2,}")


def load_stopwords(path: str | None = None) -> frozenset[str]:
    """Load the stop-word list (one term per line, UTF-8)."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = resources.files("jobmatch.data").joinpath("stopwords_it.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS_IT = load_stopwords()


def tokenize_it(text: str, stopwords: frozenset[str] = STOPWORDS_IT) -> list[str]:
    """Lowercased, stop-word-filtered tokens, order preserved."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


@dataclass
class TfidfModel:
    """Immutable after fit; query operations are safe to share across threads.

    idf uses the smoothed form ln((1 + N) / (1 + df)) + 1, term frequency is
    the raw count, and document vectors are L2-normalized, so cosine
    similarity is a plain dot product of the normalized vectors.
    """

    vocabulary: dict[str, int]
    idf: dict[str, float]
    doc_count: int
    stopwords: frozenset[str] = STOPWORDS_IT
    _vector_memo: dict[str, dict[str, float]] = field(default_factory=dict, repr=False)

    def vector(self, doc: str) -> dict[str, float]:
        """L2-normalized tf-idf vector as a term → weight mapping.

        Out-of-vocabulary tokens are ignored; a doc with no in-vocabulary
        tokens maps to the empty vector. Results are memoized per text,
        which makes repeated scoring of the same company corpus cheap.
        """
        memo = self._vector_memo.get(doc)
        if memo is not None:
            return memo
        counts = Counter(t for t in tokenize_it(doc, self.stopwords) if t in self.vocabulary)
        weights = {t: c * self.idf[t] for t, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in weights.values()))
        vec = {t: w / norm for t, w in weights.items()} if norm > 0 else {}
        self._vector_memo[doc] = vec
        return vec


def fit_tfidf(corpus: list[str], stopwords: frozenset[str] = STOPWORDS_IT) -> TfidfModel:
    """Fit vocabulary and idf weights over a corpus of raw documents."""
    if not corpus:
        raise EmptyVocabularyError("corpus is empty")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(tokenize_it(doc, stopwords)))
    if not df:
        raise EmptyVocabularyError("corpus contains no usable terms (stop words only)")
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    n = len(corpus)
    idf = {term: math.log((1 + n) / (1 + df[term])) + 1.0 for term in vocabulary}
    return TfidfModel(vocabulary=vocabulary, idf=idf, doc_count=n, stopwords=stopwords)


def similarity(model: TfidfModel, doc_a: str, doc_b: str) -> float:
    """Cosine similarity of two documents under the fitted model, in [0, 1]."""
    va = model.vector(doc_a)
    vb = model.vector(doc_b)
    if len(vb) < len(va):
        va, vb = vb, va
    acc = 0.0
    get = vb.get
    for t, w in va.items():
        acc += w * get(t, 0.0)
    return acc


@dataclass(frozen=True, slots=True)
class ScreeningResult:
    excluded: bool
    matched_terms: tuple[tuple[str, str], ...]


def exclusion_screen(
    exclusions: list[str],
    required_tasks: str,
    stopwords: frozenset[str] = STOPWORDS_IT,
) -> ScreeningResult:
    """Hard gate: a candidate is excluded when every token of any exclusion
    phrase appears in the company's task text.

    Containment is deliberately independent of corpus statistics; pairs of
    (exclusion phrase, matching task token) are reported for explanations.
    """
    task_tokens = set(tokenize_it(required_tasks, stopwords))
    matched: list[tuple[str, str]] = []
    for phrase in exclusions:
        phrase_tokens = tokenize_it(phrase, stopwords)
        if phrase_tokens and all(t in task_tokens for t in phrase_tokens):
            matched.extend((phrase, t) for t in phrase_tokens)
    return ScreeningResult(excluded=bool(matched), matched_terms=tuple(matched))
