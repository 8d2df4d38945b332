import json
import sys

for line in sys.stdin:
    msg = json.loads(line)
    if msg["type"] == "hello":
        print(json.dumps({"type": "ready", "name": "out-of-range"}), flush=True)
    elif msg["type"] == "act":
        print(json.dumps({"type": "action", "step": msg["step"], "action": len(msg["action_mask"]) + 5}), flush=True)
    elif msg["type"] == "bye":
        break
