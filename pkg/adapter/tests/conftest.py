import os

import pytest
from PIL import Image

from memeadapter.encoders import CONCEPTS

HEADER = ("image_name,text_corrected,humour,sarcasm,offensive,"
          "motivational,overall_sentiment")
ATTRS = "funny,sarcastic,non_offensive,non_motivational,positive"


@pytest.fixture
def toy_corpus(tmp_path):
    """Twelve single-color memes whose captions name the color, plus a
    duplicated image, a broken image, and a text-less meme."""
    image_dir = tmp_path / "images"
    image_dir.mkdir()
    rows = [HEADER]
    for word, rgb in CONCEPTS:
        meme_id = f"{word}.png"
        Image.new("RGB", (32, 32), rgb).save(image_dir / meme_id)
        rows.append(f'{meme_id},"a very {word} meme about life",{ATTRS}')

    # Same bytes under a second id.
    dup_src = image_dir / "red.png"
    (image_dir / "red_copy.png").write_bytes(dup_src.read_bytes())
    rows.append(f'red_copy.png,"a very red meme about life",{ATTRS}')

    # Undecodable image.
    (image_dir / "broken.png").write_text("this is not an image")
    rows.append(f'broken.png,"caption for a broken file",{ATTRS}')

    # Meme without text: exported embeddings, no sidecar row.
    Image.new("RGB", (32, 32), (200, 200, 30)).save(image_dir / "notext.png")
    rows.append(f"notext.png,,{ATTRS}")

    corpus_path = tmp_path / "corpus.csv"
    corpus_path.write_text("\n".join(rows) + "\n")
    return {
        "corpus": str(corpus_path),
        "images": str(image_dir),
        "out": str(tmp_path / "out"),
        "color_ids": [f"{word}.png" for word, _ in CONCEPTS],
    }
