"""Answers the handshake, then sleeps argv[1] seconds before every move."""
import json
import sys
import time

delay = float(sys.argv[1])
for line in sys.stdin:
    msg = json.loads(line)
    if msg["type"] == "hello":
        print(json.dumps({"type": "ready", "name": "sleeper"}), flush=True)
    elif msg["type"] == "act":
        time.sleep(delay)
        legal = [i for i, ok in enumerate(msg["action_mask"]) if ok]
        print(json.dumps({"type": "action", "step": msg["step"], "action": legal[0] if legal else -1}), flush=True)
    elif msg["type"] == "bye":
        break
