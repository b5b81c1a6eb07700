"""Checkpoint management for the reference context-aware scorer.

A checkpoint directory bundles a (tiny) BERT-style encoder saved with
``save_pretrained``, its wordpiece vocabulary, and the weights of the
regression heads. ``make_tiny_checkpoint`` builds a small randomly
initialized one for demos and tests — the adapter itself is
checkpoint-agnostic and loads any directory with the same layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn
from transformers import BertConfig, BertModel, BertTokenizerFast

HEAD_FILE = "regression_heads.pt"

# feature layouts: reference-free = [hyp, src, hyp*src, |hyp-src|],
# reference-based additionally [ref, hyp*ref, |hyp-ref|]
QE_FEATURES = 4
REF_FEATURES = 7


@dataclass
class Checkpoint:
    tokenizer: BertTokenizerFast
    encoder: BertModel
    head_qe: nn.Linear
    head_ref: nn.Linear

    @property
    def hidden_size(self) -> int:
        return self.encoder.config.hidden_size

    @property
    def max_length(self) -> int:
        return self.encoder.config.max_position_embeddings

    def to(self, device: str) -> "Checkpoint":
        self.encoder.to(device)
        self.head_qe.to(device)
        self.head_ref.to(device)
        return self


def _write_vocab(path: Path) -> None:
    # character-level wordpieces: enough to tokenize any text losslessly via
    # the byte fallback of [UNK], while keeping the embedding table tiny
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    tokens += [chr(c) for c in range(33, 0x300) if chr(c).strip()]
    tokens += ["##" + chr(c) for c in range(33, 0x300) if chr(c).strip()]
    path.write_text("\n".join(tokens) + "\n", encoding="utf-8")


def make_tiny_checkpoint(directory, seed: int = 0, hidden_size: int = 32) -> Path:
    """Create a small random-initialized checkpoint for offline use."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_vocab(directory / "vocab.txt")
    tokenizer = BertTokenizerFast(vocab_file=str(directory / "vocab.txt"), do_lower_case=False)

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=hidden_size,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=512,
    )
    encoder = BertModel(config)
    encoder.save_pretrained(directory)

    head_qe = nn.Linear(QE_FEATURES * hidden_size, 1)
    head_ref = nn.Linear(REF_FEATURES * hidden_size, 1)
    torch.save(
        {"head_qe": head_qe.state_dict(), "head_ref": head_ref.state_dict()},
        directory / HEAD_FILE,
    )
    return directory


def load_checkpoint(directory) -> Checkpoint:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"checkpoint directory not found: {directory}")
    tokenizer = BertTokenizerFast(vocab_file=str(directory / "vocab.txt"), do_lower_case=False)
    encoder = BertModel.from_pretrained(directory)
    encoder.eval()
    hidden = encoder.config.hidden_size
    heads = torch.load(directory / HEAD_FILE, weights_only=True)
    head_qe = nn.Linear(QE_FEATURES * hidden, 1)
    head_qe.load_state_dict(heads["head_qe"])
    head_ref = nn.Linear(REF_FEATURES * hidden, 1)
    head_ref.load_state_dict(heads["head_ref"])
    head_qe.eval()
    head_ref.eval()
    return Checkpoint(tokenizer=tokenizer, encoder=encoder, head_qe=head_qe, head_ref=head_ref)
