import random

import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "ball", "tree", "water", "stone", "cloud", "river", "wind", "sand",
    "economy", "red", "##flag",
]

BACKGROUND = ["ball", "tree", "water", "stone", "cloud", "river", "wind", "sand"]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A locally constructed 1-layer BERT with hidden size 768."""
    d = tmp_path_factory.mktemp("tiny-bert")
    vocab = {tok: i for i, tok in enumerate(VOCAB)}
    backend = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]"))
    backend.normalizer = normalizers.BertNormalizer(lowercase=True)
    backend.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    backend.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]", pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])])
    tokenizer = BertTokenizerFast(tokenizer_object=backend, unk_token="[UNK]",
                                  pad_token="[PAD]", cls_token="[CLS]",
                                  sep_token="[SEP]", mask_token="[MASK]")
    tokenizer.save_pretrained(d)
    torch.manual_seed(0)
    config = BertConfig(vocab_size=len(VOCAB), hidden_size=768,
                        num_hidden_layers=1, num_attention_heads=4,
                        intermediate_size=128)
    BertModel(config).save_pretrained(d)
    return d


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """50 deterministic documents over two years.

    Doc 0 of each year carries 'economy' twice; docs 1-9 carry 'redflag'
    once; docs 10-24 have no keyword at all.
    """
    root = tmp_path_factory.mktemp("corpus")
    rng = random.Random(99)
    for year in (2020, 2021):
        lines = []
        for i in range(25):
            doc = [rng.choice(BACKGROUND) for _ in range(rng.randint(8, 14))]
            if i == 0:
                doc[2] = "economy"
                doc[5] = "economy"
            elif i < 10:
                doc[3] = "redflag"
            lines.append(" ".join(doc))
        (root / f"{year}.txt").write_text("\n".join(lines) + "\n")
    return root


@pytest.fixture(scope="session")
def keyword_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("kw") / "keywords.json"
    p.write_text('{"econ": ["economy"], "symbols": ["redflag", "ghost"]}')
    return p
