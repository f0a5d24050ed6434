import os

import numpy as np
import pytest

from memesim.corpus import AttributeLabels, Corpus, MemeRecord
from memesim.embeddings import AlignedStore, EmbeddingMatrix, l2_normalize

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def make_store(n, d, seed=0, texts=None):
    """Aligned store over random unit vectors in both modalities."""
    rng = np.random.default_rng(seed)
    records = [
        MemeRecord(
            meme_id=f"meme_{i:05d}.jpg",
            text=(texts[i] if texts else f"caption {i}"),
            attributes=AttributeLabels(),
        )
        for i in range(n)
    ]
    corpus = Corpus(records=records, source_label="synthetic")
    img = l2_normalize(EmbeddingMatrix(
        "image", rng.standard_normal((n, d)).astype(np.float32)))
    txt = l2_normalize(EmbeddingMatrix(
        "text", rng.standard_normal((n, d)).astype(np.float32)))
    return AlignedStore(corpus=corpus, image=img, text=txt)


@pytest.fixture
def store20():
    return make_store(20, 16, seed=42)


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # Expose the call-phase outcome so the acceptance module can print
    # one PASS/FAIL line per criterion.
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)
