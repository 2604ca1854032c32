# Copyright 2026 The text2video Authors.
# SPDX-License-Identifier: Apache-2.0
"""Wire format shared by the adapters.

Each message is one JSON header line followed by header["payload"]
little-endian float64 values.
"""

import json
import sys

import numpy as np


def receive(stream):
    line = stream.readline()
    if not line:
        return None, None
    header = json.loads(line)
    count = int(header.get("payload", 0))
    payload = np.empty(0, dtype="<f8")
    if count:
        raw = stream.read(count * 8)
        if len(raw) != count * 8:
            raise EOFError("stream closed mid-payload")
        payload = np.frombuffer(raw, dtype="<f8")
    return header, payload


def send(stream, header, payload=None):
    data = b""
    if payload is not None:
        data = np.ascontiguousarray(payload, dtype="<f8").tobytes()
    header = dict(header)
    header["payload"] = len(data) // 8
    stream.write((json.dumps(header) + "\n").encode())
    stream.write(data)
    stream.flush()


def serve(handlers):
    """Dispatch requests to handlers[op](header, payload) -> (header, payload)."""
    rx = sys.stdin.buffer
    tx = sys.stdout.buffer
    # Library chatter must never reach the protocol stream.
    sys.stdout = sys.stderr
    while True:
        header, payload = receive(rx)
        if header is None:
            return
        op = header.get("op", "")
        handler = handlers.get(op)
        if handler is None:
            send(tx, {"ok": False, "error": f"unknown op {op}"})
            continue
        try:
            reply, data = handler(header, payload)
            reply = dict(reply, ok=True)
            send(tx, reply, data)
        except Exception as exc:  # reported to the caller as an adapter error
            send(tx, {"ok": False, "error": f"{type(exc).__name__}: {exc}"})


def select_device(torch, requested):
    if requested in ("", "auto"):
        if torch.cuda.is_available():
            return "cuda"
        if getattr(torch.backends, "mps", None) is not None and torch.backends.mps.is_available():
            return "mps"
        return "cpu"
    return requested
