"""Network front end for the protocol service.

One listener, three kinds of client, chosen by sniffing the first bytes:

* HTTP ``GET`` with ``Upgrade: websocket``  -> WebSocket, one command per
  text frame, one event per text frame (the browser client's transport).
* plain HTTP ``GET``                        -> static files: the web client
  at ``/`` and question images under ``/assets/`` (read-only).
* anything else                             -> newline-delimited JSON over
  the raw stream (handy for test harnesses and ``nc``).

The WebSocket layer is implemented here directly on asyncio: the handshake
is one SHA-1, frames are a short header plus masked payload, and the
service itself only ever sees lines of text.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import logging
import mimetypes
from pathlib import Path

from .bank import QuestionBank
from .protocol import GameService

log = logging.getLogger("quizboard.server")

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
MAX_LINE = 1 << 20
MAX_FRAME = 1 << 20

OP_CONT, OP_TEXT, OP_CLOSE, OP_PING, OP_PONG = 0x0, 0x1, 0x8, 0x9, 0xA


class Connection:
    """One attached client, whatever its transport."""

    _counter = 0

    def __init__(self) -> None:
        Connection._counter += 1
        self.id = Connection._counter
        self.outbox: asyncio.Queue[str | None] = asyncio.Queue()

    def send(self, text: str) -> None:
        self.outbox.put_nowait(text)

    def close(self) -> None:
        self.outbox.put_nowait(None)


class Server:
    def __init__(
        self,
        bank: QuestionBank,
        asset_root: Path | None = None,
        client_dir: Path | None = None,
        seed: int = 0,
    ) -> None:
        self.service = GameService(bank, base_seed=seed)
        self.asset_root = asset_root.resolve() if asset_root else None
        self.client_dir = client_dir.resolve() if client_dir else None
        self.connections: dict[int, Connection] = {}

    # -- service plumbing ------------------------------------------------

    def dispatch(self, conn: Connection, line: str) -> None:
        out = self.service.handle_line(conn.id, line)
        for target_id, text in out:
            target = self.connections.get(target_id)
            if target is not None:
                target.send(text)
            event = json.loads(text)
            name = event.get("event")
            if name == "session_created":
                log.info("session %s created", event["session"])
            elif name == "game_over":
                log.info("session %s over, winner seat %s",
                         event["session"], event["winner"])

    def attach(self, conn: Connection) -> None:
        self.connections[conn.id] = conn

    def detach(self, conn: Connection) -> None:
        self.connections.pop(conn.id, None)
        self.service.disconnect(conn.id)
        conn.close()

    # -- connection entry ---------------------------------------------------

    async def handle_connection(self, reader: asyncio.StreamReader,
                                writer: asyncio.StreamWriter) -> None:
        try:
            first = await reader.readline()
        except (asyncio.LimitOverrunError, ConnectionError):
            writer.close()
            return
        try:
            if first[:4] in (b"GET ", b"HEAD") or first[:5] == b"POST ":
                await self._handle_http(first, reader, writer)
            elif first.strip():
                await self._handle_ndjson(first, reader, writer)
        except (ConnectionError, asyncio.IncompleteReadError, TimeoutError):
            pass
        finally:
            try:
                writer.close()
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass

    # -- newline-delimited JSON over the raw stream --------------------------

    async def _handle_ndjson(self, first: bytes, reader: asyncio.StreamReader,
                             writer: asyncio.StreamWriter) -> None:
        conn = Connection()
        self.attach(conn)
        sender = asyncio.create_task(self._pump_lines(conn, writer))
        try:
            line = first
            while line:
                text = line.decode("utf-8", errors="replace").strip()
                if text:
                    self.dispatch(conn, text)
                line = await reader.readline()
        finally:
            self.detach(conn)
            await sender

    async def _pump_lines(self, conn: Connection, writer: asyncio.StreamWriter) -> None:
        while True:
            text = await conn.outbox.get()
            if text is None:
                return
            try:
                writer.write(text.encode("utf-8") + b"\n")
                await writer.drain()
            except (ConnectionError, OSError):
                return

    # -- HTTP: static files and the WebSocket upgrade -------------------------

    async def _handle_http(self, first: bytes, reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> None:
        try:
            method, target, _ = first.decode("latin-1").split(" ", 2)
        except ValueError:
            writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return
        headers: dict[str, str] = {}
        while True:
            line = await reader.readline()
            if line in (b"\r\n", b"\n", b""):
                break
            name, _, value = line.decode("latin-1").partition(":")
            headers[name.strip().lower()] = value.strip()

        if headers.get("upgrade", "").lower() == "websocket":
            await self._handle_websocket(headers, reader, writer)
            return
        if method not in ("GET", "HEAD"):
            writer.write(b"HTTP/1.1 405 Method Not Allowed\r\n\r\n")
            return
        await self._serve_static(target.split("?", 1)[0], method, writer)

    async def _serve_static(self, path: str, method: str,
                            writer: asyncio.StreamWriter) -> None:
        body, ctype, status = b"", "text/plain; charset=utf-8", "404 Not Found"
        resolved = self._resolve_static(path)
        if resolved is not None:
            body = resolved.read_bytes()
            ctype = (mimetypes.guess_type(resolved.name)[0]
                     or "application/octet-stream")
            status = "200 OK"
        elif path in ("/", "/index.html") and self.client_dir is None:
            body = (b"quizboard service is running; no web client directory "
                    b"was configured (--client)\n")
            status = "200 OK"
        else:
            body = b"not found\n"
        head = (f"HTTP/1.1 {status}\r\n"
                f"Content-Type: {ctype}\r\n"
                f"Content-Length: {len(body)}\r\n"
                f"Cache-Control: no-cache\r\n"
                f"Connection: close\r\n\r\n").encode("latin-1")
        writer.write(head + (b"" if method == "HEAD" else body))
        await writer.drain()

    def _resolve_static(self, path: str) -> Path | None:
        if "\x00" in path:
            return None
        if path.startswith("/assets/"):
            root, rest = self.asset_root, path[len("/assets/"):]
        else:
            root, rest = self.client_dir, path.lstrip("/") or "index.html"
        if root is None:
            return None
        candidate = (root / rest).resolve()
        try:
            candidate.relative_to(root)
        except ValueError:
            return None  # path escaped the served root
        if candidate.is_dir():
            candidate = candidate / "index.html"
        return candidate if candidate.is_file() else None

    # -- WebSocket ----------------------------------------------------------

    async def _handle_websocket(self, headers: dict[str, str],
                                reader: asyncio.StreamReader,
                                writer: asyncio.StreamWriter) -> None:
        key = headers.get("sec-websocket-key")
        if not key:
            writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return
        accept = base64.b64encode(
            hashlib.sha1((key + WS_GUID).encode("latin-1")).digest()).decode()
        writer.write(
            ("HTTP/1.1 101 Switching Protocols\r\n"
             "Upgrade: websocket\r\n"
             "Connection: Upgrade\r\n"
             f"Sec-WebSocket-Accept: {accept}\r\n\r\n").encode("latin-1"))
        await writer.drain()

        conn = Connection()
        self.attach(conn)
        sender = asyncio.create_task(self._pump_frames(conn, writer))
        try:
            message = bytearray()
            while True:
                frame = await self._read_frame(reader)
                if frame is None:
                    break
                fin, opcode, payload = frame
                if opcode == OP_CLOSE:
                    writer.write(_encode_frame(OP_CLOSE, payload[:2]))
                    await writer.drain()
                    break
                if opcode == OP_PING:
                    writer.write(_encode_frame(OP_PONG, payload))
                    await writer.drain()
                    continue
                if opcode == OP_PONG:
                    continue
                message.extend(payload)
                if not fin:
                    continue
                text = message.decode("utf-8", errors="replace")
                message = bytearray()
                if text.strip():
                    self.dispatch(conn, text)
        finally:
            self.detach(conn)
            await sender

    async def _read_frame(self, reader: asyncio.StreamReader):
        try:
            head = await reader.readexactly(2)
        except asyncio.IncompleteReadError:
            return None
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            length = int.from_bytes(await reader.readexactly(2), "big")
        elif length == 127:
            length = int.from_bytes(await reader.readexactly(8), "big")
        if length > MAX_FRAME or not masked:
            return None  # clients must mask; oversized frames are dropped
        mask = await reader.readexactly(4)
        data = await reader.readexactly(length)
        payload = bytes(b ^ mask[i & 3] for i, b in enumerate(data))
        return fin, opcode, payload

    async def _pump_frames(self, conn: Connection, writer: asyncio.StreamWriter) -> None:
        while True:
            text = await conn.outbox.get()
            if text is None:
                return
            try:
                writer.write(_encode_frame(OP_TEXT, text.encode("utf-8")))
                await writer.drain()
            except (ConnectionError, OSError):
                return


def _encode_frame(opcode: int, payload: bytes) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head.append(n)
    elif n < 1 << 16:
        head.append(126)
        head += n.to_bytes(2, "big")
    else:
        head.append(127)
        head += n.to_bytes(8, "big")
    return bytes(head) + payload


async def serve_async(
    host: str,
    port: int,
    bank: QuestionBank,
    asset_root: Path | None = None,
    client_dir: Path | None = None,
    seed: int = 0,
) -> asyncio.AbstractServer:
    server = Server(bank, asset_root, client_dir, seed)
    tcp = await asyncio.start_server(
        server.handle_connection, host, port, limit=MAX_LINE)
    return tcp


def run_server(host: str, port: int, bank: QuestionBank,
               asset_root: Path | None = None, client_dir: Path | None = None,
               seed: int = 0) -> None:
    """Blocking entry point used by the CLI; serves until interrupted."""

    async def main() -> None:
        tcp = await serve_async(host, port, bank, asset_root, client_dir, seed)
        addr = tcp.sockets[0].getsockname()
        print(f"quizboard service listening on {addr[0]}:{addr[1]}")
        print(f"  web client:  http://{addr[0]}:{addr[1]}/")
        print(f"  websocket:   ws://{addr[0]}:{addr[1]}/ws")
        async with tcp:
            await tcp.serve_forever()

    asyncio.run(main())
