import hashlib
import json
import subprocess
import sys
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import pytest

from kblink.cli import main
from kblink.linker import LinkRequest, RequestError, dumps_line
from kblink.service import LinkService

from conftest import DBR, FIXTURES

EXPECTED = (FIXTURES / "family_expected.jsonl").read_text()


def test_request_parsing():
    r = LinkRequest.from_json({"text": "ab", "mentions": [[0, 1], {"start": 1, "end": 2}], "configOverrides": {"sigma": 0.9}})
    assert r.spans == ((0, 1), (1, 2)) and r.language == "en" and r.config_overrides == {"sigma": 0.9}


@pytest.mark.parametrize(
    "payload, code",
    [
        ([], "BAD_REQUEST"),
        ({"mentions": []}, "BAD_REQUEST"),
        ({"text": "a", "mentions": [[0]]}, "SPAN_INVALID"),
        ({"text": "a", "mentions": [["0", 1]]}, "SPAN_INVALID"),
        ({"text": "a", "mentions": {}}, "SPAN_INVALID"),
        ({"text": "a", "configOverrides": {"bogus": 1}}, "CONFIG_INVALID"),
        ({"text": "a", "configOverrides": {"sigma": 3}}, "CONFIG_INVALID"),
    ],
)
def test_request_errors(payload, code):
    with pytest.raises(RequestError) as info:
        LinkRequest.from_json(payload)
    assert info.value.code == code


@pytest.mark.parametrize("spans", [[[5, 3]], [[0, 200]], [[0, 8], [4, 10]]])
def test_bad_spans_are_rejected(mini_linker, spans):
    req = LinkRequest.from_json({"text": "Angelina and Brad", "mentions": spans})
    with pytest.raises(RequestError) as info:
        mini_linker.handle(req)
    assert info.value.code == "SPAN_INVALID"


def test_response_shape(mini_linker, family_request):
    body = mini_linker.handle(LinkRequest.from_json(family_request), timing=False)
    assert dumps_line(body) + "\n" == EXPECTED
    assert set(body) == {"assignments", "timingMs", "indexVersion"}


def test_zero_mentions(mini_linker):
    body = mini_linker.handle(LinkRequest.from_json({"text": "nothing here"}), timing=False)
    assert body["assignments"] == []


def test_request_overrides_and_cli_precedence(mini_linker):
    req = LinkRequest.from_json({"text": "Zzyzx Qwer", "mentions": [[0, 10]], "configOverrides": {"emergentNamespace": "urn:r:"}})
    assert mini_linker.handle(req)["assignments"][0]["iri"] == "urn:r:Zzyzx_Qwer"
    assert mini_linker.handle(req, {"emergent_namespace": "urn:c:"})["assignments"][0]["iri"] == "urn:c:Zzyzx_Qwer"


# command line


def test_cli_build_index(tmp_path, capsys):
    out = tmp_path / "idx"
    code = main(["build-index", str(FIXTURES / "mini_kb.nt"), "--acronyms-file", str(FIXTURES / "mini_acronyms.tsv"), "-o", str(out)])
    assert code == 0
    lines = dict(line.split("\t") for line in capsys.readouterr().out.strip().splitlines())
    assert lines["triples"] == "52" and lines["resources"] == "26" and lines["surfaces"] == "36"
    assert lines["index_version"] == json.loads(EXPECTED)["indexVersion"]


def test_cli_build_index_empty_kb(tmp_path, capsys):
    empty = tmp_path / "empty.nt"
    empty.write_text("# nothing\n")
    assert main(["build-index", str(empty), "-o", str(tmp_path / "idx")]) == 1
    assert "no triples ingested" in capsys.readouterr().err


def _link(index_dir, tmp_path, lines, *extra):
    src = tmp_path / "in.jsonl"
    src.write_text("".join(lines))
    dst = tmp_path / "out.jsonl"
    assert main(["link", "--index", str(index_dir), "-i", str(src), "-o", str(dst), *extra]) == 0
    return dst.read_text()


def test_cli_link_is_byte_identical(mini_index_dir, tmp_path):
    doc = (FIXTURES / "family_document.jsonl").read_text()
    first = _link(mini_index_dir, tmp_path, [doc])
    second = _link(mini_index_dir, tmp_path, [doc])
    assert first == second == EXPECTED


def test_cli_link_error_records(mini_index_dir, tmp_path):
    lines = [
        '{"text": "Brad", "mentions": [[0, 4]]}\n',
        "not json\n",
        '{"text": "Brad", "mentions": [[5, 3]]}\n',
        '{"text": "no mentions"}\n',
    ]
    out = [json.loads(x) for x in _link(mini_index_dir, tmp_path, lines, "--workers", "2").splitlines()]
    assert len(out) == 4
    assert out[0]["assignments"][0]["iri"].startswith(DBR)
    assert out[1]["error"]["code"] == "BAD_JSON"
    assert out[2]["error"]["code"] == "SPAN_INVALID"
    assert out[3]["assignments"] == []


def test_cli_flags_override(mini_index_dir, tmp_path):
    line = '{"text": "Zzyzx Qwer", "mentions": [[0, 10]], "configOverrides": {"sigma": 0.5}}\n'
    out = json.loads(_link(mini_index_dir, tmp_path, [line], "--emergent-namespace", "urn:x:", "--no-context"))
    assert out["assignments"][0]["iri"] == "urn:x:Zzyzx_Qwer"


def test_cli_debug_dump(mini_index_dir, tmp_path):
    doc = (FIXTURES / "family_document.jsonl").read_text()
    _link(mini_index_dir, tmp_path, [doc], "--debug-dump", str(tmp_path / "graph.txt"))
    assert DBR + "Jon_Voight" in (tmp_path / "graph.txt").read_text()


def test_module_entry_point(mini_index_dir):
    doc = (FIXTURES / "family_document.jsonl").read_text()
    proc = subprocess.run(
        [sys.executable, "-m", "kblink", "link", "--index", str(mini_index_dir)],
        input=doc, capture_output=True, text=True, check=True,
    )
    assert proc.stdout == EXPECTED


def test_cli_eval(mini_index_dir, tmp_path, capsys):
    data = tmp_path / "gold.jsonl"
    data.write_text(json.dumps({"text": "Obama in Honolulu", "gold": [
        {"start": 0, "end": 5, "iri": DBR + "Barack_Obama"}, {"start": 9, "end": 17, "iri": DBR + "Honolulu"}]}) + "\n")
    grid = tmp_path / "grid.json"
    grid.write_text('[{"name": "full"}, {"name": "no-context", "overrides": {"context": false}}]')
    code = main(["eval", "--dataset", str(data), "--index", str(mini_index_dir), "--grid", str(grid),
                 "--filter", "persons", "--csv", str(tmp_path / "t.csv")])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split()[:4] == ["variant", "precision", "recall", "f1"]
    assert [line.split()[0] for line in out[1:]] == ["full", "no-context"]
    assert (tmp_path / "t.csv").read_text().count("\n") == 3


# HTTP


def _dir_digest(path):
    h = hashlib.sha256()
    for p in sorted(path.rglob("*")):
        if p.is_file():
            h.update(p.name.encode())
            h.update(p.read_bytes())
    return h.hexdigest()


@pytest.fixture
def server():
    service = LinkService()
    httpd = service.make_server("127.0.0.1", 0)
    t = threading.Thread(target=httpd.serve_forever, daemon=True)
    t.start()
    yield service, f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def _call(url, body=None):
    data = None if body is None else (body if isinstance(body, bytes) else json.dumps(body).encode())
    req = urllib.request.Request(url, data=data, method="POST" if data is not None else "GET")
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def test_http_lifecycle(server, mini_index_dir, mini_linker, family_request):
    service, base = server
    before = _dir_digest(mini_index_dir)
    assert _call(base + "/health") == (503, {"status": "loading"})
    status, body = _call(base + "/link", family_request)
    assert status == 503 and body["error"]["code"] == "INDEX_LOADING"

    service.load_in_background(mini_index_dir).join()
    status, body = _call(base + "/health")
    assert status == 200 and body["status"] == "ready"
    assert body["resourceCount"] == mini_linker.index.manifest["counts"]["resources"]

    status, body = _call(base + "/link", {"text": "Angelina", "mentions": [[5, 3]]})
    assert status == 400 and body["error"]["code"] == "SPAN_INVALID"
    assert _call(base + "/link", b"{not json")[1]["error"]["code"] == "BAD_JSON"
    assert _call(base + "/nope")[0] == 404

    with ThreadPoolExecutor(8) as pool:
        answers = list(pool.map(lambda _: _call(base + "/link", family_request), range(16)))
    assert all(s == 200 for s, _ in answers)
    for _, b in answers:
        b["timingMs"] = 0
    assert all(b == answers[0][1] for _, b in answers)
    # same assignments as the command line
    assert dumps_line(answers[0][1]) + "\n" == EXPECTED
    assert _dir_digest(mini_index_dir) == before


def test_http_load_failure(server, tmp_path):
    service, base = server
    service.load(tmp_path / "missing")
    status, body = _call(base + "/health")
    assert status == 503 and body["error"]["code"] == "INDEX_LOAD_FAILED"
