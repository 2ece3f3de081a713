"""Command-line client for the service.

Subcommands: build | process | evaluate | corrupt | bench | serve.  The
client side only reads and writes files; every computation runs behind the
service API.  Without ``--server`` the requests are dispatched to an
in-process application instance, so no running server is needed.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .corpus import DataError, json_line, load_dataset

USAGE_EXIT = 1
DATA_EXIT = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = DATA_EXIT):
        super().__init__(message)
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


class ServiceClient:
    """Uniform POST/GET over a remote server or the in-process app."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
            self._loop = None
        else:
            from .service.app import create_app

            self._loop = asyncio.new_event_loop()
            self._client = httpx.AsyncClient(
                transport=httpx.ASGITransport(app=create_app()),
                base_url="http://tagalign.local",
                timeout=None,
            )

    def post(self, url: str, payload: dict) -> httpx.Response:
        if self._loop is None:
            return self._client.post(url, json=payload)
        return self._loop.run_until_complete(self._client.post(url, json=payload))

    def close(self) -> None:
        if self._loop is None:
            self._client.close()
        else:
            self._loop.run_until_complete(self._client.aclose())
            self._loop.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _call(client: ServiceClient, url: str, payload: dict) -> httpx.Response:
    try:
        response = client.post(url, payload)
    except httpx.HTTPError as exc:
        raise CliError(f"service request failed: {exc}")
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CliError(f"service error ({response.status_code}): {detail}")
    return response


def _record_payload(records) -> list[dict]:
    out = []
    for r in records:
        d = {"id": r.id, "tokens": r.tokens, "label_set": r.label_set}
        if r.generation is not None:
            d["generation"] = r.generation
        if r.gold_tags is not None:
            d["gold_tags"] = r.gold_tags
        out.append(d)
    return out


def _load(path: str, fmt: str):
    records, warnings = load_dataset(path, fmt)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return records


def _write_lines(path: str, lines) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line)
                fh.write("\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}")


def _normalizer_payload(flag: str) -> dict:
    if flag in ("identity", "unicode"):
        return {"kind": flag}
    for kind in ("vocab", "unicode+vocab"):
        if flag.startswith(kind + ":"):
            path = flag[len(kind) + 1 :]
            try:
                with open(path, encoding="utf-8") as fh:
                    alphabet = "".join(
                        sorted(set(fh.read()) - {"\n", "\r"})
                    )
            except OSError as exc:
                raise CliError(f"cannot read alphabet file {path}: {exc}")
            return {"kind": kind, "alphabet": alphabet}
    raise CliError(
        f"bad --normalizer {flag!r}; expected identity, unicode,"
        " vocab:<file> or unicode+vocab:<file>",
        USAGE_EXIT,
    )


def cmd_build(args) -> int:
    records = _load(args.input, args.format)
    payload = {
        "records": _record_payload(records),
        "config": {
            "variant": args.variant,
            "context_len": args.context_len,
            "scheme": args.scheme,
            "gap_marker": args.gap_marker,
            "shuffle_seed": args.shuffle_seed,
            "external_count": args.external_count,
        },
    }
    with ServiceClient(args.server) as client:
        body = _call(client, "/v1/build", payload).json()
    _write_lines(args.output, (json_line(i) for i in body["instances"]))
    return 0


def cmd_process(args) -> int:
    records = _load(args.input, args.format)
    payload = {
        "records": _record_payload(records),
        "options": {
            "scheme": args.scheme,
            "normalizer": _normalizer_payload(args.normalizer),
            "repair": args.repair,
            "jobs": args.jobs,
            "gap_marker": args.gap_marker,
        },
    }
    with ServiceClient(args.server) as client:
        body = _call(client, "/v1/process", payload).json()
    _write_lines(args.output, (json_line(r) for r in body["records"]))
    return 0


def _eval_side(path: str, fmt: str) -> list[dict]:
    """Evaluation payload: tags for gold-style files, entities for
    process output."""
    if fmt == "conll":
        return [
            {"id": r.id, "tags": r.gold_tags, "tokens": r.tokens}
            for r in _load(path, "conll")
        ]
    sides = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CliError(f"{path}:{lineno}: invalid JSON: {exc}")
                rid = str(obj.get("id", len(sides)))
                if "entities" in obj:
                    sides.append({"id": rid, "entities": obj["entities"]})
                elif "gold_tags" in obj:
                    sides.append(
                        {
                            "id": rid,
                            "tags": obj["gold_tags"],
                            "tokens": obj.get("tokens"),
                        }
                    )
                elif "tags" in obj:
                    sides.append(
                        {"id": rid, "tags": obj["tags"], "tokens": obj.get("tokens")}
                    )
                else:
                    raise CliError(
                        f"{path}:{lineno}: record has no entities or tags"
                    )
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")
    return sides


def cmd_evaluate(args) -> int:
    payload = {
        "gold": _eval_side(args.gold, args.gold_format),
        "pred": _eval_side(args.pred, args.pred_format),
        "per_type": args.per_type,
        "scheme": args.scheme,
    }
    with ServiceClient(args.server) as client:
        response = _call(client, "/v1/evaluate", payload)
    # print the body verbatim so local and remote runs are byte-identical
    print(response.text)
    return 0


def cmd_corrupt(args) -> int:
    records = _load(args.input, args.format)
    payload = {
        "records": _record_payload(records),
        "config": {
            "p_omit": args.p_omit,
            "p_add": args.p_add,
            "p_sub": args.p_sub,
            "entity_safe": args.entity_safe,
            "seed": args.seed,
        },
    }
    with ServiceClient(args.server) as client:
        body = _call(client, "/v1/corrupt", payload).json()
    _write_lines(args.output, (json_line(r) for r in body["records"]))
    return 0


def cmd_bench(args) -> int:
    records = _load(args.input, args.format)
    try:
        edges = [int(e) for e in args.buckets.split(",")]
    except ValueError:
        raise CliError(f"bad --buckets {args.buckets!r}", USAGE_EXIT)
    payload = {
        "records": _record_payload(records),
        "repetitions": args.repetitions,
        "warmup": args.warmup,
        "edges": edges,
    }
    with ServiceClient(args.server) as client:
        body = _call(client, "/v1/bench", payload).json()
    print(body["table"])
    if args.json:
        _write_lines(args.json, [json_line(body["report"])])
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(
        "tagalign.service.app:app", host=args.host, port=args.port, log_level="info"
    )
    return 0


def _add_io(parser, output=True):
    parser.add_argument("--in", dest="input", required=True, help="input dataset")
    parser.add_argument(
        "--format", choices=("conll", "jsonl"), default="jsonl", help="input format"
    )
    if output:
        parser.add_argument("--out", dest="output", required=True, help="output file")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="tagalign")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build instruction instances")
    _add_io(p)
    p.add_argument(
        "--variant",
        choices=("entity", "context", "full", "token"),
        default="token",
    )
    p.add_argument("--context-len", type=int, default=1)
    p.add_argument("--scheme", choices=("bio", "bioes"), default="bio")
    p.add_argument("--gap-marker", default="...")
    p.add_argument("--shuffle-seed", type=int, default=None)
    p.add_argument("--external-count", type=int, default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("process", help="structure generations into entities")
    _add_io(p)
    p.add_argument("--scheme", choices=("bio", "bioes"), default="bio")
    p.add_argument("--normalizer", default="identity")
    p.add_argument(
        "--repair", choices=("conservative", "strict"), default="conservative"
    )
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument(
        "--gap-marker",
        default=None,
        help="drop generation units whose token equals this marker",
    )
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--gold-format", choices=("conll", "jsonl"), default="conll")
    p.add_argument("--pred", required=True)
    p.add_argument("--pred-format", choices=("conll", "jsonl"), default="jsonl")
    p.add_argument("--per-type", action="store_true")
    p.add_argument("--scheme", choices=("bio", "bioes"), default="bio")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("corrupt", help="simulate generation noise over gold data")
    _add_io(p)
    p.add_argument("--p-omit", type=float, default=0.0)
    p.add_argument("--p-add", type=float, default=0.0)
    p.add_argument("--p-sub", type=float, default=0.0)
    p.add_argument("--entity-safe", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("bench", help="time the aligners across length buckets")
    _add_io(p, output=False)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--buckets", default="0,60,100,200")
    p.add_argument("--json", default=None, help="also write the JSON report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse help or usage failure
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
