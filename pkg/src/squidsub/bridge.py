"""Live bridge: runs the simulation in (scaled) real time and exposes it to
operator clients over newline-delimited text frames.

Frames out: `TLM <payload>|RSSI:<int>` every 2000 ms of sim time (dropped
packets leave an observable gap), `ERR <message>` on bad input. Frames in:
the operator command grammar from the protocol module. The same byte payloads
are served over raw TCP and over a minimal RFC 6455 WebSocket endpoint so
browser clients can connect; the first client to issue a command holds the
commander role until it disconnects.
"""

from __future__ import annotations

import base64
import hashlib
import socket
import struct
import threading
import time

from .protocol import ProtocolError, parse_command
from .simulator import Simulator

_WS_MAGIC = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class _Client:
    def __init__(self, sock, is_ws=False):
        self.sock = sock
        self.is_ws = is_ws
        self.lock = threading.Lock()
        self.alive = True

    def send_frame(self, text: str):
        data = text.encode("utf-8")
        if self.is_ws:
            header = bytearray([0x81])
            n = len(data)
            if n < 126:
                header.append(n)
            elif n < 65536:
                header.append(126)
                header += struct.pack(">H", n)
            else:
                header.append(127)
                header += struct.pack(">Q", n)
            out = bytes(header) + data
        else:
            out = data + b"\n"
        try:
            with self.lock:
                self.sock.sendall(out)
        except OSError:
            self.alive = False


class Bridge:
    """One simulation thread, one listener thread, N client reader threads."""

    def __init__(self, scenario, params, port=0, speed=1.0):
        self.sim = Simulator(scenario, params)
        self.speed = speed
        self.clients = []
        self.clients_lock = threading.Lock()
        self.commander = None
        self.stop_event = threading.Event()
        self.server = socket.create_server(("127.0.0.1", port))
        self.port = self.server.getsockname()[1]
        self.threads = []

    # -- lifecycle ----------------------------------------------------------

    def start(self):
        for target in (self._accept_loop, self._sim_loop):
            th = threading.Thread(target=target, daemon=True)
            th.start()
            self.threads.append(th)

    def stop(self):
        self.stop_event.set()
        try:
            self.server.close()
        except OSError:
            pass
        with self.clients_lock:
            for c in self.clients:
                try:
                    c.sock.close()
                except OSError:
                    pass

    def run_forever(self):
        self.start()
        try:
            while not self.stop_event.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- simulation thread --------------------------------------------------

    def _sim_loop(self):
        dt = self.sim.scenario.control_dt
        next_wall = time.monotonic()
        while not self.stop_event.is_set():
            row_idx = len(self.sim.log_rows)
            self.sim.control_tick()
            row = self.sim.log_rows[row_idx]
            cols = self.sim.log_rows and self._columns()
            sent = row[cols.index("tlm_sent")]
            delivered = row[cols.index("tlm_delivered")]
            if sent and delivered:
                payload = row[cols.index("payload")]
                rssi = row[cols.index("rssi")]
                self._broadcast(f"TLM {payload}|RSSI:{rssi}")
            next_wall += dt / self.speed
            delay = next_wall - time.monotonic()
            if delay > 0:
                time.sleep(delay)

    @staticmethod
    def _columns():
        from .simulator import COLUMNS
        return COLUMNS

    def _broadcast(self, frame: str):
        with self.clients_lock:
            clients = list(self.clients)
        for c in clients:
            c.send_frame(frame)
        self._reap()

    def _reap(self):
        with self.clients_lock:
            dead = [c for c in self.clients if not c.alive]
            for c in dead:
                self.clients.remove(c)
                if self.commander is c:
                    self.commander = None

    # -- network threads ----------------------------------------------------

    def _accept_loop(self):
        while not self.stop_event.is_set():
            try:
                sock, _ = self.server.accept()
            except OSError:
                return
            th = threading.Thread(target=self._client_loop, args=(sock,),
                                  daemon=True)
            th.start()
            self.threads.append(th)

    def _client_loop(self, sock):
        # sniff the first byte to tell a WebSocket handshake ("GET ...")
        # from a raw TCP client; listen-only TCP clients send nothing, so
        # an idle connection defaults to TCP after a short wait
        try:
            sock.settimeout(0.25)
            try:
                first = sock.recv(1, socket.MSG_PEEK)
            except TimeoutError:
                first = b""
            sock.settimeout(None)
        except OSError:
            return
        if first == b"G":
            client = self._ws_handshake(sock)
            if client is None:
                sock.close()
                return
        else:
            client = _Client(sock, is_ws=False)
        with self.clients_lock:
            self.clients.append(client)
        try:
            if client.is_ws:
                self._ws_read_loop(client)
            else:
                self._line_read_loop(client)
        finally:
            client.alive = False
            self._reap()
            try:
                sock.close()
            except OSError:
                pass

    def _handle_line(self, client, line: str):
        line = line.strip()
        if not line:
            return
        try:
            cmd = parse_command(line)
        except ProtocolError as exc:
            client.send_frame(f"ERR parse {exc}")
            return
        with self.clients_lock:
            if self.commander is None:
                self.commander = client
            elif self.commander is not client:
                client.send_frame("ERR busy another commander is active")
                return
        self.sim.queue_command(line)

    def _line_read_loop(self, client):
        buf = b""
        while not self.stop_event.is_set():
            try:
                chunk = client.sock.recv(4096)
            except OSError:
                return
            if not chunk:
                return
            buf += chunk
            while b"\n" in buf:
                line, buf = buf.split(b"\n", 1)
                self._handle_line(client, line.decode("utf-8", "replace"))

    # -- minimal WebSocket support -----------------------------------------

    def _ws_handshake(self, sock):
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = sock.recv(4096)
            if not chunk:
                return None
            data += chunk
        headers = {}
        for line in data.split(b"\r\n")[1:]:
            if b":" in line:
                k, v = line.split(b":", 1)
                headers[k.strip().lower()] = v.strip()
        key = headers.get(b"sec-websocket-key")
        if key is None:
            return None
        accept = base64.b64encode(
            hashlib.sha1(key + _WS_MAGIC.encode()).digest()).decode()
        sock.sendall((
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n").encode())
        return _Client(sock, is_ws=True)

    def _ws_read_loop(self, client):
        sock = client.sock
        buf = b""

        def need(n):
            nonlocal buf
            while len(buf) < n:
                chunk = sock.recv(4096)
                if not chunk:
                    raise OSError("closed")
                buf += chunk
            out, buf = buf[:n], buf[n:]
            return out

        try:
            while not self.stop_event.is_set():
                b0, b1 = need(2)
                opcode = b0 & 0x0F
                masked = b1 & 0x80
                length = b1 & 0x7F
                if length == 126:
                    (length,) = struct.unpack(">H", need(2))
                elif length == 127:
                    (length,) = struct.unpack(">Q", need(8))
                mask = need(4) if masked else b"\x00" * 4
                payload = bytes(b ^ mask[i % 4]
                                for i, b in enumerate(need(length)))
                if opcode == 0x8:       # close
                    return
                if opcode == 0x9:       # ping -> pong
                    with client.lock:
                        sock.sendall(b"\x8a" + bytes([len(payload)]) + payload)
                    continue
                if opcode in (0x1, 0x2):
                    self._handle_line(client, payload.decode("utf-8", "replace"))
        except OSError:
            return


def serve(scenario, params, port, speed=1.0) -> Bridge:
    bridge = Bridge(scenario, params, port=port, speed=speed)
    bridge.start()
    return bridge
