#!/usr/bin/env python3
"""End-to-end smoke test: start `fthsim serve --clock stepped`, talk binary
frames over UDP and JSON over the websocket gateway."""

import argparse
import asyncio
import binascii
import json
import socket
import struct
import subprocess
import sys

MAGIC = b"\xfa\x57"
VERSION = 1
HEADER = struct.Struct("<2sBBIQ")  # magic, version, type, seq, timestamp_us


def frame(msg_type, seq, payload):
    body = HEADER.pack(MAGIC, VERSION, msg_type, seq, 0) + payload
    return body + struct.pack("<H", binascii.crc_hqx(body, 0xFFFF))


def decode(data):
    magic, version, msg_type, seq, ts = HEADER.unpack_from(data)
    crc = struct.unpack_from("<H", data, len(data) - 2)[0]
    assert magic == MAGIC and version == VERSION, "bad header"
    assert binascii.crc_hqx(data[:-2], 0xFFFF) == crc, "bad crc"
    return msg_type, seq, ts, data[HEADER.size:-2]


async def run(binary):
    proc = subprocess.Popen([binary, "serve", "--clock", "stepped", "--udp-port", "0", "--gateway-port", "0"],
                            stdout=subprocess.PIPE, text=True)
    try:
        line = proc.stdout.readline()
        fields = dict(kv.split("=") for kv in line.split()[1:])
        udp_port, gw_port = int(fields["udp"]), int(fields["gateway"])

        import websockets
        async with websockets.connect(f"ws://127.0.0.1:{gw_port}/") as ws:
            hello = json.loads(await ws.recv())
            assert hello["type"] == "hello" and hello["clock"] == "stepped", hello

            sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            sock.settimeout(5)
            sock.sendto(frame(2, 1, struct.pack("<ff", 40.0, 40.0)), ("127.0.0.1", udp_port))
            sock.sendto(b"\x00garbage", ("127.0.0.1", udp_port))
            await asyncio.sleep(0.2)

            await ws.send(json.dumps({"type": "step", "ticks": 1000}))
            telemetry = []
            while True:
                msg = json.loads(await ws.recv())
                if msg["type"] == "telemetry":
                    telemetry.append(msg)
                elif msg["type"] == "stepped":
                    break
            assert len(telemetry) == 500, len(telemetry)
            stamps = [m["timestamp_us"] for m in telemetry]
            assert all(b - a == 20000 for a, b in zip(stamps, stamps[1:])), "telemetry spacing"
            final = telemetry[-1]["temp_c"][0]
            assert final > 39.0, final

            msg_type, _, _, payload = decode(sock.recv(256))
            assert msg_type == 5 and struct.unpack("<I", payload)[0] == 1, "expected ack of seq 1"
            msg_type, _, _, payload = decode(sock.recv(256))
            assert msg_type == 3, "expected telemetry"
        print(f"smoke ok: 500 telemetry frames, final temperature {final:.2f} C")
        return 0
    finally:
        proc.terminate()
        proc.wait(timeout=5)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("binary", help="path to fthsim")
    args = ap.parse_args()
    try:
        import websockets  # noqa: F401
    except ImportError:
        print("websockets module not available; skipping")
        return 77
    return asyncio.run(run(args.binary))


if __name__ == "__main__":
    sys.exit(main())
