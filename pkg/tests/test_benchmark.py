import subprocess
import sys
from pathlib import Path

BENCH = Path(__file__).parent.parent / "benchmarks" / "bench_kernels.py"


def test_benchmark_runs_and_backends_agree():
    res = subprocess.run([sys.executable, str(BENCH), "--quick", "--repeat", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0, res.stderr
    rows = res.stdout.splitlines()[1:]
    assert len(rows) >= 6
    assert not any(r.rstrip().endswith("NO") for r in rows)
