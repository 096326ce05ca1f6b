"""
The critique-and-refine generation loop
=======================================

A frozen generator produces an initial counter-response; the critics judge
it; if any critique is negative, the feedback is folded into a refine prompt
and the generator is called once more. Here the generator is a local stub
speaking the chat-completions wire format, scripted to first produce a
context-mismatched figure and then the corrected text.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from countergen import FactCheckArticle, GenerationConfig, RuleCritics, VeracityLabel, generate_counter_response

SCRIPT = [
    "Only 122,494 people were sleeping rough.",
    "Only 7,636 of those people were sleeping rough.",
]


class ScriptedLLM(BaseHTTPRequestHandler):
    replies = list(SCRIPT)

    def do_POST(self):
        self.rfile.read(int(self.headers.get("Content-Length", "0")))
        text = self.replies.pop(0) if self.replies else SCRIPT[-1]
        body = json.dumps({"choices": [{"message": {"content": text}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


server = ThreadingHTTPServer(("127.0.0.1", 0), ScriptedLLM)
threading.Thread(target=server.serve_forever, daemon=True).start()

article = FactCheckArticle(
    id="homelessness",
    claim="122,000 people sleeping rough.",
    evidence=(
        "Official figures show that 122,494 people were experiencing homelessness, "
        "only 7,636 of those people were sleeping rough."
    ),
    explanation="only 7,636 people were sleeping rough.",
    label=VeracityLabel.FALSE,
)

config = GenerationConfig(
    endpoint=f"http://127.0.0.1:{server.server_port}",
    model_name="scripted-stub",
    temperature=1.0,
    max_rounds=1,
)

trace = generate_counter_response(article, config, RuleCritics())
server.shutdown()

print("initial: ", trace.initial.text)
print("feedback:")
for line in trace.rounds[0].text.splitlines():
    print("  ", line)
print("refined: ", trace.refined.text)
print("llm calls:", trace.llm_calls)

# Ablations disable critic kinds: enabled_critics={ElementKind.TOPIC} is the
# "topic only" variant, {NUMBER, ENTITY} drops the topic critic.
