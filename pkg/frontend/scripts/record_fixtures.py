"""Record HTTP fixtures from a live service instance for the UI tests.

Boots the backend on a scratch data directory with the demo plant and a
deterministic synthetic dataset, drives it through the learn -> feedback ->
relearn flow over HTTP, and writes every response the UI consumes to
tests/fixtures/.
"""

import json
import subprocess
import sys
import tempfile
import time
from pathlib import Path
from urllib.error import HTTPError
from urllib.request import Request, urlopen

PORT = 8765
BASE = f"http://127.0.0.1:{PORT}"
FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def call(method: str, path: str, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = Request(BASE + path, data=data, method=method,
                  headers={"Content-Type": "application/json"})
    try:
        with urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except HTTPError as exc:
        return exc.code, json.loads(exc.read())


def save(name: str, payload):
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_text(json.dumps(payload, indent=2) + "\n")
    print("wrote", name)


def main():
    import rcatool as r
    from rcatool.dataset import save_dataset
    from rcatool.synth import GroundTruth, Mechanism, sample_data
    from rcatool.graphs import CausalEdge, CausalGraph

    tmp = Path(tempfile.mkdtemp(prefix="rca-fixtures-"))
    (tmp / "kg.json").write_bytes(r.save(r.demo_plant()))
    variables = ["SortingTime", "Weight", "AmountAdhesive", "Humidity", "Pressure", "HeatInput"]
    truth = GroundTruth(
        CausalGraph(variables, [
            CausalEdge("Humidity", "AmountAdhesive"),
            CausalEdge("Weight", "Pressure"),
            CausalEdge("AmountAdhesive", "HeatInput"),
        ]),
        {
            ("Humidity", "AmountAdhesive"): Mechanism("sigmoid", 2.5, 2.0),
            ("Weight", "Pressure"): Mechanism("sine", 2.5, 1.5),
            ("AmountAdhesive", "HeatInput"): Mechanism("sigmoid", -2.5, 2.0),
        },
        {v: 0.5 for v in variables},
    )
    save_dataset(sample_data(truth, 600, 0), tmp / "data.csv")

    proc = subprocess.Popen(
        [sys.executable, "-c",
         f"import uvicorn; from rcatool.service import create_app; "
         f"uvicorn.run(create_app({str(tmp)!r}), host='127.0.0.1', port={PORT})"],
    )
    try:
        for _ in range(100):
            try:
                call("GET", "/kg")
                break
            except OSError:
                time.sleep(0.1)

        ctx = {"product": "P1"}
        status, job = call("POST", "/learn", ctx)
        assert status == 200, job
        save("learn_response.json", job)
        save("job_done.json", call("GET", f"/jobs/{job['job_id']}")[1])
        save("graph_initial.json", call("GET", "/graph?product=P1")[1])
        save("paths_heatinput.json",
             call("GET", "/paths?product=P1&variable=HeatInput")[1])
        save("graph_missing_context.json",
             call("GET", "/graph?product=P9")[1])

        status, fb = call("POST", "/feedback",
                          {"type": "blacklist", "src": "AmountAdhesive", "dst": "HeatInput"})
        assert status == 200, fb
        save("feedback_blacklist_response.json", fb)
        save("graph_stale.json", call("GET", "/graph?product=P1")[1])

        status, job2 = call("POST", "/learn", ctx)
        assert status == 200, job2
        save("graph_after_relearn.json", call("GET", "/graph?product=P1")[1])
        save("paths_heatinput_after.json",
             call("GET", "/paths?product=P1&variable=HeatInput")[1])

        save("feedback_self_blacklist_error.json",
             call("POST", "/feedback",
                  {"type": "blacklist", "src": "Weight", "dst": "Weight"})[1])
    finally:
        proc.terminate()
        proc.wait()


if __name__ == "__main__":
    main()
