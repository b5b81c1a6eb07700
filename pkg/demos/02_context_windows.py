"""Show how conversational context windows are built for a chat segment.

Uses the bundled worked-example conversation: a customer writing Portuguese
and an agent writing English. For the final customer turn, the "within"
setting looks back only at the customer's own turns, while "across" also
pulls in the agent's turn — keeping each side of the pair monolingual by
substituting translations where the speaker wrote the other language.
"""

from pathlib import Path

from chatqe.context import ContextSetting, TargetContextMode, build_context, select_context_turns
from chatqe.corpus import parse_corpus

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "chat_example.jsonl"


def main():
    corpus = parse_corpus(FIXTURE)
    conv = corpus.conversations[0]

    print("conversation transcript:")
    for turn in conv.turns:
        print(f"  t={turn.index} [{turn.speaker.value}] {turn.source}")

    t, k = 7, 2
    print(f"\ncontext selection for t={t}, k={k}:")
    for setting in (ContextSetting.WITHIN, ContextSetting.ACROSS):
        turns = select_context_turns(conv, t, k, setting)
        print(f"  {setting.value:<7} -> turns {turns}")

    for setting in (ContextSetting.WITHIN, ContextSetting.ACROSS):
        pair = build_context(conv, t, "sysA", k, setting, TargetContextMode.REFERENCE)
        print(f"\n[{setting.value}] augmented pair:")
        print(f"  src side: {pair.src_augmented}")
        print(f"  ref side: {pair.tgt_ref_augmented}")
        print(f"  current source starts at char {pair.src_current_offset}: "
              f"{pair.src_augmented[pair.src_current_offset:]!r}")


if __name__ == "__main__":
    main()
