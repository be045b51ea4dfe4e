import csv
import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from alphasub.cli import aggregate, main, read_config
from alphasub.model import GroupAssignment
from alphasub.pipeline import run_trial
from alphasub.remote import FetchError, PromptTemplate, fetch_candidate, parse_labels
from alphasub.substitution import self_candidates
from alphasub.synth import generate_task, make_population, population_matrix


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(out), "--items", "80", "--annotators", "12", "--seed", "4"]) == 0
    return out


def evaluate(synth_dir, out, *extra):
    return main(
        ["evaluate", "--human", str(synth_dir / "human.csv"), "--candidate", str(synth_dir / "candidate.csv"),
         "--group-size", "6", "--B", "60", "--trials", "3", "--seed", "11", "--out", str(out), *extra]
    )


def test_self_substitution_is_equivalent_every_trial():
    task = generate_task(60, 5, 4, seed=1)
    m = population_matrix(task, make_population(task, 8, weight_sd=0.5, noise_sd=1.0, seed=1))
    groups = GroupAssignment(m.annotators[:4], m.annotators[4:])
    cands = self_candidates(m, groups.group_a)
    for seed in range(3):
        r = run_trial(m, groups, cands, B=100, N=24, fraction=0.5, sig_level=0.05, seed=seed)
        assert r.candidate.outcome.equivalent
        assert r.candidate.outcome.x1 == pytest.approx(r.candidate.outcome.x2, abs=1e-12)


def test_evaluate_writes_report_and_sidecars(synth_dir, tmp_path):
    code = evaluate(synth_dir, tmp_path, "--control", "--B-sweep", "20,40")
    assert code in (0, 1)
    names = {p.name for p in tmp_path.iterdir()}
    assert {"report.json", "trials.csv", "annotator_changes.csv", "label_distribution.csv", "b_sweep.csv"} <= names
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["trials"]) == 3
    assert [s["seed"] for s in report["schedules"]] == [11, 12, 13]
    assert report["schedules"][0]["N"] == 32  # 40% of 80
    assert (code == 0) == (report["aggregate"]["verdict"] == "equivalent")
    assert report["aggregate"]["random_verdict"] == "not equivalent"
    with open(tmp_path / "b_sweep.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 6


def test_aggregate_is_recomputable(synth_dir, tmp_path):
    evaluate(synth_dir, tmp_path, "--control")
    report = json.loads((tmp_path / "report.json").read_text())
    again = aggregate(report["trials"], report["config"]["sig_level"])
    assert again == report["aggregate"]
    p1 = np.mean([t["p1"] for t in report["trials"]])
    p2 = np.mean([t["p2"] for t in report["trials"]])
    assert report["aggregate"]["headline_p"] == pytest.approx(max(p1, p2), abs=0)
    sd = np.std([t["human_alpha"] for t in report["trials"]], ddof=1)
    assert report["aggregate"]["human_alpha"]["sd"] == pytest.approx(sd, abs=1e-15)


def test_reports_identical_apart_from_timestamp(synth_dir, tmp_path):
    evaluate(synth_dir, tmp_path / "a", "--control")
    evaluate(synth_dir, tmp_path / "b", "--control", "--workers", "3")
    ra = json.loads((tmp_path / "a" / "report.json").read_text())
    rb = json.loads((tmp_path / "b" / "report.json").read_text())
    for r in (ra, rb):
        r.pop("generated_at")
        r["config"].pop("out")
        r["config"].pop("workers")
    assert ra == rb
    for name in ("trials.csv", "annotator_changes.csv", "label_distribution.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_precedence(synth_dir, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        f"[data]\nhuman = {synth_dir / 'human.csv'}\ncandidate = {synth_dir / 'candidate.csv'}\nscale = interval\n"
        "[groups]\ngroup_size = 6\n[bootstrap]\nB = 40\nN = 20\ntrials = 2\nseed = 5\n"
        "[equivalence]\nfraction = 0.5\n[control]\ncontrol = yes\n"
    )
    assert read_config(cfg)["N"] == "20"
    out = tmp_path / "out"
    assert main(["evaluate", "--config", str(cfg), "--trials", "1", "--out", str(out)]) in (0, 1)
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["trials"] == 1 and report["config"]["B"] == 40
    assert report["schedules"][0]["N"] == 20
    assert report["trials"][0]["random_p1"] is not None


@pytest.mark.parametrize(
    "argv",
    [
        ["evaluate", "--group-size", "2"],
        ["evaluate", "--human", "h", "--candidate", "c"],
        ["evaluate", "--human", "h", "--candidate", "c", "--group-size", "2", "--fraction", "0"],
        ["evaluate", "--N", "zero"],
        ["plan", "--p-c", "0"],
        ["plan", "--alpha-min", "1"],
        ["bogus"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[bootstrap]\niterations = 5\n")
    assert main(["evaluate", "--config", str(cfg)]) == 2


def test_data_errors_exit_3(synth_dir, tmp_path):
    assert main(["evaluate", "--human", str(tmp_path / "missing.csv"), "--candidate", "x", "--group-size", "2"]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("annotator_id,item_id,label\na,m1,1\na,m1,2\n")
    assert main(["alpha", "--human", str(bad)]) == 3
    # more annotators per group than exist
    assert evaluate(synth_dir, tmp_path / "x", "--group-size", "7") == 3


def test_plan_prints_sizes(capsys, tmp_path):
    assert main(["plan", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "N_min = 32" in text and "n_min = 80" in text
    assert main(["plan", "--z", "1", "--alpha-min", "0", "--p-c", "0.5"]) == 0
    assert "N_min = 3" in capsys.readouterr().out


def test_elbow_from_curve_file(tmp_path, capsys):
    curve = tmp_path / "curve.csv"
    xs = np.arange(1, 13)
    ys = np.where(xs <= 5, -4.0 * xs + 30.3, -0.5 * xs + 9.0)
    curve.write_text("x,y\n" + "".join(f"{x},{y}\n" for x, y in zip(xs, ys)))
    assert main(["elbow", "--curve", str(curve), "--out", str(tmp_path / "e")]) == 0
    assert "position 5" in capsys.readouterr().out
    doc = json.loads((tmp_path / "e" / "elbow.json").read_text())
    assert doc["elbow_index"] == 5
    assert (tmp_path / "e" / "split_errors.csv").exists()


def test_elbow_from_population(synth_dir, tmp_path):
    out = tmp_path / "e"
    args = ["elbow", "--human", str(synth_dir / "human.csv"), "--candidate", str(synth_dir / "candidate.csv"),
            "--sizes", "2:12", "--out", str(out)]
    assert main(args) == 0
    with open(out / "curve.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 11


def test_alpha_command(synth_dir, capsys):
    assert main(["alpha", "--human", str(synth_dir / "human.csv")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 0 < doc["alpha"] < 1 and doc["annotators"] == 12


def test_synth_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["synth", "--out", str(tmp_path / name), "--seed", "9", "--missing", "0.2"]) == 0
    assert (tmp_path / "a" / "human.csv").read_bytes() == (tmp_path / "b" / "human.csv").read_bytes()


# -- remote candidate retrieval ------------------------------------------------


class Stub(BaseHTTPRequestHandler):
    replies: list = []
    seen: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        Stub.seen.append((body, self.headers.get("Authorization")))
        status, text = Stub.replies.pop(0) if Stub.replies else (200, None)
        if text is None:
            count = sum(1 for line in body["user"].splitlines() if line[:1].isdigit())
            text = "\n".join(["3"] * count)
        self.send_response(status)
        self.end_headers()
        self.wfile.write(text.encode())

    def log_message(self, *args):
        pass


@pytest.fixture
def stub():
    Stub.replies, Stub.seen = [], []
    server = HTTPServer(("127.0.0.1", 0), Stub)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/label"
    server.shutdown()


TEMPLATE = "--SYSTEM--\nYou rate movies 1-5.\n--USER--\nRate each movie:\n{items}\n"


def test_stub_round_trip(stub, tmp_path, monkeypatch):
    monkeypatch.setenv("ALPHASUB_API_TOKEN", "secret")
    items = [(f"m{k}", f"Movie {k}") for k in range(7)]
    cand = fetch_candidate(stub, TEMPLATE, items, batch_size=3, alphabet="12345", audit_path=tmp_path / "a.jsonl")
    assert cand.labels == {f"m{k}": "3" for k in range(7)}
    assert len(Stub.seen) == 3
    assert Stub.seen[0][0]["system"] == "You rate movies 1-5."
    assert Stub.seen[0][1] == "Bearer secret"
    audit = [json.loads(x) for x in (tmp_path / "a.jsonl").read_text().splitlines()]
    assert [a["items"] for a in audit][2] == ["m6"]
    assert audit[0]["response"] == "3\n3\n3"


def test_short_response_is_a_length_error(stub):
    Stub.replies = [(200, "4, 5")]
    with pytest.raises(FetchError, match="2 labels for 3 items"):
        fetch_candidate(stub, TEMPLATE, [("a", "A"), ("b", "B"), ("c", "C")])


def test_retries_with_backoff(stub):
    Stub.replies = [(503, "busy"), (500, "oops"), (200, "1\n2")]
    waits = []
    cand = fetch_candidate(stub, TEMPLATE, [("a", "A"), ("b", "B")], sleep=waits.append, backoff=0.5)
    assert cand.labels == {"a": "1", "b": "2"}
    assert waits == [0.5, 1.0]
    Stub.replies = [(500, "x")] * 3
    with pytest.raises(FetchError, match="3 attempts"):
        fetch_candidate(stub, TEMPLATE, [("a", "A")], sleep=waits.append)


def test_label_parsing():
    assert parse_labels("1. 4\n2. 5\n3. 2", 3) == ["4", "5", "2"]
    assert parse_labels("4,5, 2\n", 3, alphabet="12345") == ["4", "5", "2"]
    with pytest.raises(FetchError, match="unparseable"):
        parse_labels("4\nfive", 2, alphabet="12345")
    with pytest.raises(FetchError, match="placeholder"):
        PromptTemplate.parse("--USER--\nno list here")


def test_fetch_command(stub, tmp_path):
    (tmp_path / "t.txt").write_text(TEMPLATE)
    (tmp_path / "items.csv").write_text("item_id,descriptor\nm1,Heat (1995)\nm2,Alien (1979)\n")
    out = tmp_path / "out"
    code = main(["fetch", "--endpoint", stub, "--template", str(tmp_path / "t.txt"),
                 "--items", str(tmp_path / "items.csv"), "--out", str(out), "--tag", "llm"])
    assert code == 0
    assert (out / "candidate.csv").read_text().splitlines()[1] == "llm,m1,3"
    assert (out / "fetch_audit.jsonl").exists()


class ReplaySession:
    """Stands in for requests.Session, replaying a recorded body."""

    def __init__(self, body):
        self.body, self.payloads = body, []

    def post(self, url, json=None, headers=None, timeout=None):
        self.payloads.append(json)
        body = self.body

        class Resp:
            text = body

            def raise_for_status(self):
                pass

        return Resp()


def test_recorded_batch_of_100(tmp_path):
    from pathlib import Path

    fixtures = Path(__file__).parent / "fixtures"
    body = (fixtures / "recorded_ratings_100.txt").read_text()
    expected = (fixtures / "recorded_ratings_100.expected").read_text().strip().split(",")
    items = [(f"m{k:03d}", f"Title {k} ({1950 + k})") for k in range(100)]
    session = ReplaySession(body)
    cand = fetch_candidate("http://unused", TEMPLATE, items, alphabet="12345", session=session)
    assert [cand.labels[i] for i, _ in items] == expected
    assert len(session.payloads) == 1
    assert "100. Title 99 (2049)" in session.payloads[0]["user"]
