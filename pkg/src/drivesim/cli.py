"""Command-line entry points: `simrun` and `simanalyze`."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .analysis import analyze
from .dynamics import DriverInput
from .motion import PlatformEndpoint, UdpCommandSender
from .telemetry import LoopConfig, constant_input, run, write_log
from .world import load_scenario


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


def _file_inputs(path: Path):
    """Input source from a CSV file in the input-table schema."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != ("t_us", "steering", "throttle", "brake"):
            raise SystemExit(
                f"{path}: expected header t_us,steering,throttle,brake, got {','.join(header)}"
            )
        rows = [row for row in reader]
    def gen():
        for row in rows:
            yield DriverInput.clamped(float(row[1]), float(row[2]), float(row[3]))
    return gen()


def _udp_sink(addr):
    if addr is None:
        return None
    sender = UdpCommandSender(addr)
    return sender.send


def simrun_main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="simrun",
        description="Run the 200 Hz driving-simulator loop against a scenario.",
    )
    p.add_argument("--scenario", required=True, type=Path, help="scenario JSON document")
    p.add_argument("--duration", required=True, type=float, help="virtual seconds to run")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", type=Path, help="scripted input CSV (t_us,steering,throttle,brake)")
    src.add_argument("--live", action="store_true",
                     help="drive from the browser cockpit (implies --realtime)")
    p.add_argument("--realtime", action="store_true", help="pace ticks against the wall clock")
    p.add_argument("--out", required=True, type=Path, help="run log output directory")
    p.add_argument("--platform-addr", type=_parse_addr, default=None, metavar="HOST:PORT",
                   help="also emit platform command datagrams over UDP (default off; 127.0.0.1:47001 is the conventional port)")
    p.add_argument("--touch-addr", type=_parse_addr, default=None, metavar="HOST:PORT",
                   help="emit touch-sensor datagrams over UDP (conventional port 47002)")
    p.add_argument("--phone-addr", type=_parse_addr, default=None, metavar="HOST:PORT",
                   help="emit phone-event datagrams over UDP (conventional port 47003)")
    p.add_argument("--ws-port", type=int, default=47010, help="cockpit WebSocket port (live mode)")
    p.add_argument("--serve-ui", action="store_true",
                   help="serve the cockpit UI static files (live mode)")
    p.add_argument("--ui-port", type=int, default=8000, help="cockpit UI HTTP port")
    args = p.parse_args(argv)

    scenario = load_scenario(args.scenario.read_text(encoding="utf-8"))
    config = LoopConfig(duration=args.duration, realtime=args.realtime or args.live)
    endpoint = PlatformEndpoint()

    bridge = None
    server = None
    ui_server = None
    if args.live:
        from .bridge import BridgeServer, CockpitBridge

        bridge = CockpitBridge()
        server = BridgeServer(bridge, port=args.ws_port).start()
        print(f"cockpit websocket: ws://{server.address[0]}:{server.address[1]}/drive")
        if args.serve_ui:
            ui_server = _start_ui_server(args.ui_port)
    driver = None
    if bridge is None:
        driver = _file_inputs(args.input) if args.input else constant_input()

    try:
        log = run(
            scenario,
            config,
            driver,
            bridge=bridge,
            endpoint=endpoint,
            command_sink=_udp_sink(args.platform_addr),
            touch_sink=_udp_sink(args.touch_addr),
            phone_sink=_udp_sink(args.phone_addr),
        )
    finally:
        if server is not None:
            server.stop()
        if ui_server is not None:
            ui_server.shutdown()

    write_log(log, args.out)
    report = endpoint.report()
    print(f"wrote {args.out}: {len(log.vehicle)} ticks, "
          f"{len(log.radar)} radar rows, {len(log.phone)} phone events")
    print("platform endpoint:", json.dumps(report))
    return 0


def _start_ui_server(port: int):
    import http.server
    import threading

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if not dist.is_dir():
        raise SystemExit(f"cockpit UI not built: {dist} missing (run npm build in frontend/)")

    class Handler(http.server.SimpleHTTPRequestHandler):
        def __init__(self, *a, **kw):
            super().__init__(*a, directory=str(dist), **kw)

        def log_message(self, *a):
            pass

    server = http.server.ThreadingHTTPServer(("127.0.0.1", port), Handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    print(f"cockpit UI: http://127.0.0.1:{port}/")
    return server


def simanalyze_main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="simanalyze",
        description="Derive lane indicators, nearest objects, and the run plot from a log.",
    )
    p.add_argument("--run", required=True, type=Path, help="run directory written by simrun")
    p.add_argument("--plot-only", action="store_true", help="only render plot.svg")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: run dir)")
    args = p.parse_args(argv)
    written = analyze(args.run, out_dir=args.out, plot_only=args.plot_only)
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(simrun_main())
