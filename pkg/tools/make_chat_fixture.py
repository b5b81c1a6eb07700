"""Build the worked-example bilingual chat fixture (tests/fixtures/chat_example.jsonl).

An 8-turn English-Portuguese customer-support conversation; turn 6 carries a
mistranslation ("ned" -> "blog") annotated as a major accuracy error.
"""

import json
from pathlib import Path

TURNS = [
    (0, "agent", "Hello! Thank you for contacting us. How can I help you today?",
     "Olá! Obrigado por nos contactar. Como posso ajudar?"),
    (1, "customer", "olá, tenho um problema com a minha assinatura",
     "hello, I have a problem with my subscription"),
    (2, "customer", "como faço para cancelar ?", "How do I cancel?"),
    (3, "agent", "Let me check your account.", "Deixe-me verificar a sua conta."),
    (4, "agent", "I have sent you a link to cancel the subscription.",
     "Enviei-lhe um link para cancelar a assinatura."),
    (5, "customer", "esse link não abre", "This link does not open."),
    (6, "agent", "No worries, I can cancel it here in my ned.",
     "Não se preocupe, eu posso cancelar aqui no meu blog."),
    (7, "customer", "pode cancelar por favor", "can you cancel it please"),
]

ERRORS = {
    6: [{"category": "accuracy/mistranslation", "severity": "major",
         "span_start": 47, "span_end": 51, "note": "'ned' rendered as 'blog'"}],
}


def main():
    turns = []
    for index, speaker, source, reference in TURNS:
        hypothesis = reference
        errors = ERRORS.get(index, [])
        for err in errors:
            span = hypothesis[err["span_start"]:err["span_end"]]
            assert span == "blog", f"span check failed at t={index}: {span!r}"
        turns.append({
            "index": index,
            "speaker": speaker,
            "source": source,
            "reference": reference,
            "outputs": [{
                "system_id": "sysA",
                "hypothesis": hypothesis,
                "errors": errors,
                "external_tags": [],
            }],
        })
    conversation = {
        "conversation_id": "helpdesk-0001",
        "agent_lang": "en",
        "customer_lang": "pt",
        "turns": turns,
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "chat_example.jsonl"
    out.write_text(json.dumps(conversation, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
