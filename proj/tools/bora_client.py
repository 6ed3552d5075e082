#!/usr/bin/env python3
"""Script client for a running BORA server (standard library only).

Import it from a notebook:

    from bora_client import BoraClient
    bora = BoraClient("http://localhost:8080", token="change-me")
    bora.set_poll_interval(2000)
    bora.bind_sensors("container_1", ["stage.t1", "stage.t3"])
    bora.attach_image("container_2", heatmap_png(bora.data(["stage.t1", "stage.t2"], 600)))
    bora.attach_video("container_3", "/ws/stream/cam1", "push")

or run the same four steps from a shell:

    python3 tools/bora_client.py --server http://localhost:8080 --token change-me setup-demo
"""

import argparse
import base64
import json
import os
import struct
import sys
import urllib.error
import urllib.parse
import urllib.request
import zlib


class BoraError(Exception):
    def __init__(self, status, body):
        try:
            doc = json.loads(body)
            kind, message = doc.get("error", "Error"), doc.get("message", body)
        except ValueError:
            kind, message = "Error", body
        super().__init__(f"{status} {kind}: {message}")
        self.status = status
        self.kind = kind


class BoraClient:
    def __init__(self, base_url, token=None, timeout=10.0):
        self.base = base_url.rstrip("/")
        self.token = token if token is not None else os.environ.get("BORA_TOKEN", "")
        self.timeout = timeout

    def _request(self, method, path, body=None, content_type="application/json"):
        headers = {}
        if self.token:
            headers["X-Bora-Token"] = self.token
        if body is not None:
            headers["Content-Type"] = content_type
            if isinstance(body, str):
                body = body.encode()
        req = urllib.request.Request(self.base + path, data=body, method=method, headers=headers)
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as res:
                return res.read(), res.headers.get("Content-Type", "")
        except urllib.error.HTTPError as e:
            raise BoraError(e.code, e.read().decode(errors="replace")) from None

    def _patch(self, op, payload, target=None):
        doc = {"op": op, "payload": payload}
        if target is not None:
            doc["target"] = target
        raw, _ = self._request("POST", "/api/control", json.dumps(doc))
        return json.loads(raw)

    # ---- reads ----
    def spec(self):
        raw, _ = self._request("GET", "/api/spec")
        return json.loads(raw)

    def revision(self):
        return self.spec().get("revision", 0)

    def data(self, sensors, window_s=600):
        """Recent samples as a list of (sensor_id, timestamp_ms, value)."""
        q = urllib.parse.urlencode({"sensors": ",".join(sensors), "window": int(window_s)})
        raw, _ = self._request("GET", "/api/data?" + q)
        rows = []
        for line in raw.decode().splitlines():
            if line:
                sid, ts, value = line.rsplit(",", 2)
                rows.append((sid, int(ts), float(value)))
        return rows

    def device(self, param_id):
        raw, _ = self._request("GET", "/api/device/" + urllib.parse.quote(param_id))
        return json.loads(raw)

    # ---- settings patches ----
    def set_poll_interval(self, ms):
        return self._patch("set_poll_interval", int(ms))

    def bind_sensors(self, widget_id, sensors):
        return self._patch("bind_sensors", list(sensors), widget_id)

    def attach_image(self, widget_id, data, media_type="image/png"):
        if isinstance(data, str):
            with open(data, "rb") as f:
                data = f.read()
        payload = {"media_type": media_type, "data": base64.b64encode(data).decode()}
        return self._patch("attach_image", payload, widget_id)

    def attach_video(self, widget_id, stream_url, transport="segmented"):
        return self._patch("attach_video", {"stream_url": stream_url, "transport": transport}, widget_id)

    def move_widget(self, widget_id, x, y, width=None, height=None):
        g = {"x": int(x), "y": int(y)}
        if width is not None:
            g["width"] = int(width)
        if height is not None:
            g["height"] = int(height)
        return self._patch("move_widget", g, widget_id)

    # ---- actions ----
    def set_device(self, param_id, value):
        return self._patch("set_device_param", float(value), param_id)

    def mark_recording(self, stream_id, from_ts, to_ts):
        return self._patch("mark_recording", {"from_ts": int(from_ts), "to_ts": int(to_ts)}, stream_id)


def heatmap_png(rows, width=64, height=32):
    """Renders samples as a time x sensor heat map (grayscale PNG bytes)."""
    sensors = sorted({r[0] for r in rows})
    grid = [[0.0] * width for _ in range(max(1, len(sensors)))]
    if rows:
        t0 = min(r[1] for r in rows)
        t1 = max(r[1] for r in rows)
        lo = min(r[2] for r in rows)
        hi = max(r[2] for r in rows)
        span_t = max(1, t1 - t0)
        span_v = (hi - lo) or 1.0
        for sid, ts, value in rows:
            col = min(width - 1, (ts - t0) * width // span_t)
            grid[sensors.index(sid)][col] = (value - lo) / span_v
    band = max(1, height // len(grid))
    scanlines = b""
    for y in range(band * len(grid)):
        row = grid[y // band]
        scanlines += b"\x00" + bytes(int(255 * v) for v in row)

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", width, band * len(grid), 8, 0, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(scanlines)) + chunk(b"IEND", b"")


def setup_demo(client, sensors, video_url, transport):
    """The notebook sequence: interval, sensors, heat map, video. Returns a summary."""
    before = client.revision()
    client.set_poll_interval(2000)
    client.bind_sensors("container_1", sensors)
    client.attach_image("container_2", heatmap_png(client.data(sensors, 600)))
    result = client.attach_video("container_3", video_url, transport)
    spec = client.spec()
    widgets = {w["id"]: w for w in spec["widgets"]}
    checks = {
        "revision +4": result["revision"] == before + 4 and spec["revision"] == before + 4,
        "poll_interval_ms == 2000": spec["poll_interval_ms"] == 2000,
        "container_1 sensors": widgets["container_1"].get("binding", {}).get("sensors") == list(sensors),
        "container_2 attachment": widgets["container_2"].get("attachment", {}).get("media_type") == "image/png",
        "container_3 stream": widgets["container_3"].get("binding", {}).get("stream_url") == video_url,
    }
    return {"revision_before": before, "revision_after": spec["revision"], "checks": checks}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--server", default="http://localhost:8080")
    ap.add_argument("--token", default=None, help="defaults to $BORA_TOKEN")
    sub = ap.add_subparsers(dest="cmd", required=True)
    demo = sub.add_parser("setup-demo", help="run the four-step notebook sequence and verify it")
    demo.add_argument("--sensors", default="stage.t1,stage.t3")
    demo.add_argument("--video-url", default="/ws/stream/cam1")
    demo.add_argument("--transport", default="push", choices=["segmented", "push", "direct"])
    sub.add_parser("spec", help="print the live spec")
    data = sub.add_parser("data", help="print recent samples as CSV")
    data.add_argument("sensors")
    data.add_argument("--window", type=int, default=600)
    dev = sub.add_parser("set-device", help="write a device parameter")
    dev.add_argument("param")
    dev.add_argument("value", type=float)
    args = ap.parse_args(argv)

    client = BoraClient(args.server, args.token)
    try:
        if args.cmd == "setup-demo":
            summary = setup_demo(client, args.sensors.split(","), args.video_url, args.transport)
            print(json.dumps(summary, indent=2))
            return 0 if all(summary["checks"].values()) else 1
        if args.cmd == "spec":
            print(json.dumps(client.spec(), indent=2))
        elif args.cmd == "data":
            for sid, ts, value in client.data(args.sensors.split(","), args.window):
                print(f"{sid},{ts},{value!r}")
        elif args.cmd == "set-device":
            print(json.dumps(client.set_device(args.param, args.value)))
    except BoraError as e:
        print(f"bora_client: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
