import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobmatch.errors import EmptyVocabularyError
from jobmatch.text_it import (
    STOPWORDS_IT,
    exclusion_screen,
    fit_tfidf,
    similarity,
    tokenize_it,
)
from tests.conftest import TOY_CORPUS

# Frozen oracle for the toy corpus, hand-computed from
# idf(t) = ln((1+N)/(1+df)) + 1 with raw tf and L2 normalization.
IDF_DF2 = 1.2876820724517808  # ln(4/3) + 1
IDF_DF1 = 1.6931471805599454  # ln(2) + 1
SIM_D1_D2 = 0.24527198569314443
SIM_D1_D3 = 0.24527198569314443
SIM_D2_D3 = 0.0

word = st.text(alphabet="abcdertàèù", min_size=2, max_size=8)
doc = st.lists(word, min_size=0, max_size=8).map(" ".join)


class TestTokenize:
    def test_empty(self):
        assert tokenize_it("") == []

    def test_stopwords_filtered(self):
        assert "il" in STOPWORDS_IT and "è" in STOPWORDS_IT
        assert tokenize_it("Il lavoratore è qualificato") == ["lavoratore", "qualificato"]

    def test_case_folding_keeps_accents(self):
        assert tokenize_it("SOLLEVAMENTO Pesi") == ["sollevamento", "pesi"]
        assert tokenize_it("Qualità È importante") == ["qualità", "importante"]

    def test_digits_and_short_tokens_dropped(self):
        assert tokenize_it("turno 3 h x notte") == ["turno", "notte"]

    def test_order_preserved(self):
        assert tokenize_it("pulizia locali e gestione magazzino") == [
            "pulizia",
            "locali",
            "gestione",
            "magazzino",
        ]


class TestFitTfidf:
    def test_document_frequencies(self):
        model = fit_tfidf(["pane burro", "pane marmellata"])
        # df(pane)=2 -> smoothed idf ln(3/3)+1; df others ln(3/2)+1
        assert model.doc_count == 2
        assert abs(model.idf["pane"] - 1.0) < 1e-12
        assert abs(model.idf["burro"] - (math.log(3 / 2) + 1)) < 1e-12
        assert abs(model.idf["marmellata"] - (math.log(3 / 2) + 1)) < 1e-12

    def test_term_in_every_doc_has_idf_one(self):
        model = fit_tfidf(["lavoro manuale", "lavoro notturno", "lavoro agile"])
        assert abs(model.idf["lavoro"] - 1.0) < 1e-12

    def test_toy_corpus_idf_table(self, toy_model):
        for term, expected in [
            ("assemblaggio", IDF_DF2),
            ("componenti", IDF_DF2),
            ("meccanici", IDF_DF1),
            ("manuale", IDF_DF1),
            ("pezzi", IDF_DF1),
            ("controllo", IDF_DF1),
            ("qualità", IDF_DF1),
        ]:
            assert abs(toy_model.idf[term] - expected) < 1e-12

    def test_vocabulary_indices_dense(self, toy_model):
        indices = sorted(toy_model.vocabulary.values())
        assert indices == list(range(len(toy_model.vocabulary)))

    def test_stopword_only_corpus_rejected(self):
        with pytest.raises(EmptyVocabularyError):
            fit_tfidf(["il lo la", "di a da"])

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyVocabularyError):
            fit_tfidf([])


class TestSimilarity:
    def test_identical_docs(self, toy_model):
        assert abs(similarity(toy_model, TOY_CORPUS[0], TOY_CORPUS[0]) - 1.0) < 1e-9

    def test_disjoint_docs(self, toy_model):
        assert similarity(toy_model, TOY_CORPUS[1], TOY_CORPUS[2]) == SIM_D2_D3

    def test_toy_corpus_oracle(self, toy_model):
        assert abs(similarity(toy_model, TOY_CORPUS[0], TOY_CORPUS[1]) - SIM_D1_D2) < 1e-9
        assert abs(similarity(toy_model, TOY_CORPUS[0], TOY_CORPUS[2]) - SIM_D1_D3) < 1e-9

    def test_out_of_vocabulary_tokens_ignored(self, toy_model):
        base = similarity(toy_model, TOY_CORPUS[0], TOY_CORPUS[1])
        with_oov = similarity(toy_model, TOY_CORPUS[0] + " zirconio", TOY_CORPUS[1])
        assert abs(base - with_oov) < 1e-12

    def test_no_vocabulary_tokens_is_zero(self, toy_model):
        assert similarity(toy_model, "zirconio afnio", TOY_CORPUS[0]) == 0.0

    @given(a=doc, b=doc)
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_bounds(self, a, b):
        corpus = [a or "vuoto", b or "vuoto", "pane burro marmellata"]
        try:
            model = fit_tfidf(corpus)
        except EmptyVocabularyError:
            return
        s_ab = similarity(model, a, b)
        s_ba = similarity(model, b, a)
        assert abs(s_ab - s_ba) < 1e-12
        assert -1e-12 <= s_ab <= 1.0 + 1e-12


class TestExclusionScreen:
    def test_no_exclusions(self):
        result = exclusion_screen([], "sollevamento pesi frequenti")
        assert not result.excluded
        assert result.matched_terms == ()

    def test_containment_triggers(self):
        result = exclusion_screen(["sollevamento pesi"], "sollevamento pesi frequenti richiesto")
        assert result.excluded
        assert ("sollevamento pesi", "sollevamento") in result.matched_terms
        assert ("sollevamento pesi", "pesi") in result.matched_terms

    def test_partial_containment_does_not_trigger(self):
        result = exclusion_screen(["sollevamento pesi"], "sollevamento scatole leggere")
        assert not result.excluded

    def test_disjoint_phrase(self):
        result = exclusion_screen(["turni notturni"], "lavoro diurno in ufficio")
        assert not result.excluded

    def test_excluded_iff_matches(self):
        r1 = exclusion_screen(["guida muletto"], "guida muletto in magazzino")
        r2 = exclusion_screen(["guida muletto"], "archiviazione documenti")
        assert r1.excluded and r1.matched_terms
        assert not r2.excluded and not r2.matched_terms

    @given(
        phrases=st.lists(doc.filter(lambda d: d.strip()), min_size=0, max_size=4),
        extra=doc.filter(lambda d: d.strip()),
        tasks=doc,
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_exclusions(self, phrases, extra, tasks):
        before = exclusion_screen(phrases, tasks).excluded
        after = exclusion_screen(phrases + [extra], tasks).excluded
        assert after or not before  # adding a phrase never flips True -> False
