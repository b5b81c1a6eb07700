"""LLM-as-judge, fully offline: prompting, parsing, caching.

Spins up a local mock chat-completion endpoint that replies with a canned
MQM-style annotation, renders context-bearing prompts for the worked-example
conversation, and runs the evaluation twice — the second pass is served
entirely from the on-disk cache, so the endpoint sees zero new requests.
"""

import json
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from chatqe.corpus import parse_corpus
from chatqe.llm import LlmEndpointConfig, build_prompt, build_prompts, evaluate_batch

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "chat_example.jsonl"

CANNED = 'Critical:\nno-error\nMajor:\naccuracy/mistranslation - "ned"\nMinor:\nno-error'


def start_endpoint():
    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            self.rfile.read(int(self.headers["Content-Length"]))
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            body = {"choices": [{"message": {"content": CANNED}}]}
            self.wfile.write(json.dumps(body).encode())

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server


def main():
    corpus = parse_corpus(FIXTURE)
    conv = corpus.conversations[0]

    prompt, k_used = build_prompt(conv, 7, "sysA", k=2)
    print(f"prompt for t=7 (k_used={k_used}):")
    print("-" * 60)
    print(prompt)
    print("-" * 60)

    server = start_endpoint()
    url = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    config = LlmEndpointConfig(base_url=url, model="demo-model", retries=0, timeout=10.0)

    prompted = build_prompts(corpus, "sysA", k=2)
    with tempfile.TemporaryDirectory() as tmp:
        cache = Path(tmp) / "cache"
        first = evaluate_batch(prompted, config, cache, archive_path=Path(tmp) / "archive.jsonl")
        print(f"\nfirst pass:  {len(first.scores.scores)} segments, {first.http_calls} HTTP calls")
        second = evaluate_batch(prompted, config, cache)
        print(f"second pass: {len(second.scores.scores)} segments, {second.http_calls} HTTP calls")
        for key, raw in list(first.scores.scores.items())[:3]:
            print(f"  {key} -> raw {raw}")
    server.shutdown()
    server.server_close()


if __name__ == "__main__":
    main()
