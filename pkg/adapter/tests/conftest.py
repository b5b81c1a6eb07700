import json
import random

import pytest

from ctxadapter.batchio import Batch, BatchRecord
from ctxadapter.checkpoint import load_checkpoint, make_tiny_checkpoint

SEP = " <sep> "

WORDS = [
    "order", "cancel", "link", "account", "refund", "please", "help",
    "thanks", "delivery", "update", "password", "invoice", "support",
]


def random_sentence(rng, n_words=None):
    n = n_words or rng.randint(3, 9)
    return " ".join(rng.choice(WORDS) for _ in range(n))


def augment(context, current):
    if not context:
        return current, 0
    prefix = SEP.join(context) + SEP
    return prefix + current, len(prefix)


def make_record(rng, conversation_id, turn_index, k):
    src_ctx = [random_sentence(rng) for _ in range(k)]
    tgt_ctx = [random_sentence(rng) for _ in range(k)]
    src, src_off = augment(src_ctx, random_sentence(rng))
    hyp, tgt_off = augment(tgt_ctx, random_sentence(rng))
    ref, _ = augment(tgt_ctx, random_sentence(rng))
    return BatchRecord(
        conversation_id=conversation_id,
        turn_index=turn_index,
        system_id="sysA",
        src_augmented=src,
        tgt_hyp_augmented=hyp,
        tgt_ref_augmented=ref,
        src_current_offset=src_off,
        tgt_current_offset=tgt_off,
        k_used=k,
        language_pair="en-de",
        direction="agent",
    )


def make_batch(n_segments, seed, k):
    rng = random.Random(seed)
    records = tuple(
        make_record(rng, f"conv-{i // 4:03d}", i % 4, k) for i in range(n_segments)
    )
    return Batch(batch_id=f"test-k{k}", records=records)


def write_batch_file(batch, path):
    header = {"batch_id": batch.batch_id, "schema": "chatqe.batch.v1", "count": len(batch.records)}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header) + "\n")
        for r in batch.records:
            fh.write(json.dumps(r.__dict__, ensure_ascii=False) + "\n")


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    directory = tmp_path_factory.mktemp("ckpt")
    make_tiny_checkpoint(directory, seed=7)
    return load_checkpoint(directory)
